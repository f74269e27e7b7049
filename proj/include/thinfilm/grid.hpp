#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

class Grid;
class PeriodicField;
class Spectrum;

using GridPtr = std::shared_ptr<const Grid>;

// Uniform periodic grid on [0, 2π) with n_points nodes θ_j = 2πj/N, plus the
// FFT plans the spectral operators need.  Immutable after construction and
// safe to share across threads (transform execution uses the thread-safe
// new-array interface; plan creation is serialized internally).
class Grid {
public:
    ~Grid();
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    int size() const { return n_; }
    double node(int j) const { return nodes_[static_cast<size_t>(j)]; }
    const std::vector<double>& nodes() const { return nodes_; }

    // Highest representable mode (the Nyquist index N/2).
    int max_mode() const { return n_ / 2; }
    // 2/3-rule cutoff: modes with |n| > cutoff are dropped by dealias().
    int dealias_cutoff() const { return n_ / 3; }

    // Forward transform with the h_n = (1/2π)∮ h e^{-inθ} dθ normalization:
    // returns c[k] = (1/N) Σ_j v_j e^{-ikθ_j} for k = 0..N/2.
    std::vector<std::complex<double>> forward(const std::vector<double>& values) const;
    // Inverse of forward(): v_j = Σ_{n=-N/2+1}^{N/2} c_n e^{inθ_j} with
    // c_{-n} = conj(c_n) implied.  Imaginary parts of c_0 and c_{N/2} are
    // ignored (they must vanish for a real field).
    std::vector<double> backward(const std::vector<std::complex<double>>& coeffs) const;

private:
    friend GridPtr make_grid(int n_points);
    friend PeriodicField derivative(const PeriodicField& f, int k);
    explicit Grid(int n_points);

    // backward() carried out in extended precision and rounded once at the
    // end.  derivative() multiplies coefficients by up to (N/2)^4, where the
    // ulp of a double c2r output already exceeds the operator's accuracy.
    std::vector<double> backward_extended(const std::vector<std::complex<double>>& coeffs) const;

    int n_;
    std::vector<double> nodes_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

// Fourier image of a real field: coefficients for n = 0..N/2 stored
// explicitly, negative modes implied by the reality condition
// h_{-n} = conj(h_n).
class Spectrum {
public:
    Spectrum(GridPtr grid, std::vector<std::complex<double>> coeffs);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    // Number of stored coefficients, N/2 + 1.
    int size() const { return static_cast<int>(coeffs_.size()); }

    // Coefficient h_n for any |n| ≤ N/2 (conjugated for n < 0).
    std::complex<double> coefficient(int n) const;

    std::complex<double>& operator[](int k) { return coeffs_[static_cast<size_t>(k)]; }
    const std::complex<double>& operator[](int k) const { return coeffs_[static_cast<size_t>(k)]; }
    const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }

    PeriodicField to_field() const;

private:
    GridPtr grid_;
    std::vector<std::complex<double>> coeffs_;
};

// Real-valued field sampled on the nodes of a Grid.
class PeriodicField {
public:
    PeriodicField(GridPtr grid, std::vector<double> values);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    int size() const { return static_cast<int>(values_.size()); }

    double operator[](int j) const { return values_[static_cast<size_t>(j)]; }
    double& operator[](int j) { return values_[static_cast<size_t>(j)]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double min() const;
    double max() const;

    // Spectral image of the field.
    Spectrum spectrum() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

// Build a grid with n_points nodes; n_points must be even and ≥ 16.
GridPtr make_grid(int n_points);

// Sample a function of θ on the grid nodes.
PeriodicField sample(const GridPtr& grid, const std::function<double(double)>& f);

// k-th spectral derivative, 1 ≤ k ≤ 4.  The Nyquist mode is zeroed for odd k
// (its asymmetric representation has no well-defined odd derivative).
PeriodicField derivative(const PeriodicField& f, int k);

// Rectangle-rule quadrature (2π/N) Σ_j f_j — spectrally exact for resolved
// integrands on a periodic grid.
double integrate(const PeriodicField& f);

// Single Fourier coefficient h_n = (1/2π)∮ f e^{-inθ} dθ for |n| < N/2.
std::complex<double> fourier_coefficient(const PeriodicField& f, int n);

// 2/3-rule dealiasing: zero every mode with |n| > N/3.
Spectrum dealias(const Spectrum& s);
PeriodicField dealias(const PeriodicField& f);

}  // namespace thinfilm
