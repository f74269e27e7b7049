#include "thinfilm/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace thinfilm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW plan creation mutates global planner state; serialize it.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct Grid::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    fftwl_plan c2r_l = nullptr;

    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
        if (c2r_l) fftwl_destroy_plan(c2r_l);
    }
};

Grid::Grid(int n_points) : n_(n_points), plans_(std::make_unique<Plans>()) {
    nodes_.resize(static_cast<size_t>(n_));
    for (int j = 0; j < n_; ++j) {
        nodes_[static_cast<size_t>(j)] = kTwoPi * j / n_;
    }

    // Plan once with FFTW_UNALIGNED so the thread-safe new-array execute
    // functions accept ordinary std::vector storage.
    std::vector<double> real(static_cast<size_t>(n_));
    std::vector<std::complex<double>> cplx(static_cast<size_t>(n_ / 2 + 1));
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->r2c = fftw_plan_dft_r2c_1d(
        n_, real.data(), reinterpret_cast<fftw_complex*>(cplx.data()),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->c2r = fftw_plan_dft_c2r_1d(
        n_, reinterpret_cast<fftw_complex*>(cplx.data()), real.data(),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    std::vector<long double> real_l(static_cast<size_t>(n_));
    std::vector<std::complex<long double>> cplx_l(static_cast<size_t>(n_ / 2 + 1));
    plans_->c2r_l = fftwl_plan_dft_c2r_1d(
        n_, reinterpret_cast<fftwl_complex*>(cplx_l.data()), real_l.data(),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Grid::~Grid() = default;

std::vector<std::complex<double>> Grid::forward(const std::vector<double>& values) const {
    if (static_cast<int>(values.size()) != n_) {
        throw std::invalid_argument("forward: value count does not match grid size");
    }
    std::vector<double> in(values);
    std::vector<std::complex<double>> out(static_cast<size_t>(n_ / 2 + 1));
    fftw_execute_dft_r2c(plans_->r2c, in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / n_;
    for (auto& c : out) c *= scale;
    return out;
}

std::vector<double> Grid::backward(const std::vector<std::complex<double>>& coeffs) const {
    if (static_cast<int>(coeffs.size()) != n_ / 2 + 1) {
        throw std::invalid_argument("backward: coefficient count does not match grid size");
    }
    // c2r destroys its input and requires real-valued end modes.
    std::vector<std::complex<double>> in(coeffs);
    in.front() = {in.front().real(), 0.0};
    in.back() = {in.back().real(), 0.0};
    std::vector<double> out(static_cast<size_t>(n_));
    fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in.data()),
                         out.data());
    return out;
}

std::vector<double> Grid::backward_extended(
    const std::vector<std::complex<double>>& coeffs) const {
    if (static_cast<int>(coeffs.size()) != n_ / 2 + 1) {
        throw std::invalid_argument("backward: coefficient count does not match grid size");
    }
    std::vector<std::complex<long double>> in(coeffs.begin(), coeffs.end());
    in.front() = {in.front().real(), 0.0L};
    in.back() = {in.back().real(), 0.0L};
    std::vector<long double> out(static_cast<size_t>(n_));
    fftwl_execute_dft_c2r(plans_->c2r_l, reinterpret_cast<fftwl_complex*>(in.data()),
                          out.data());
    return {out.begin(), out.end()};
}

GridPtr make_grid(int n_points) {
    if (n_points < 16 || n_points % 2 != 0) {
        throw ConfigError("make_grid: n_points must be even and at least 16, got " +
                          std::to_string(n_points));
    }
    return GridPtr(new Grid(n_points));
}

Spectrum::Spectrum(GridPtr grid, std::vector<std::complex<double>> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(coeffs_.size()) != grid_->size() / 2 + 1) {
        throw std::invalid_argument("Spectrum: expected N/2+1 coefficients");
    }
}

std::complex<double> Spectrum::coefficient(int n) const {
    const int nyq = grid_->max_mode();
    if (n < -nyq || n > nyq) {
        throw std::out_of_range("Spectrum::coefficient: |n| exceeds the Nyquist mode");
    }
    if (n >= 0) return coeffs_[static_cast<size_t>(n)];
    return std::conj(coeffs_[static_cast<size_t>(-n)]);
}

PeriodicField Spectrum::to_field() const {
    return PeriodicField(grid_, grid_->backward(coeffs_));
}

PeriodicField::PeriodicField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_->size()) {
        throw std::invalid_argument("PeriodicField: value count does not match grid size");
    }
}

double PeriodicField::min() const {
    return *std::min_element(values_.begin(), values_.end());
}

double PeriodicField::max() const {
    return *std::max_element(values_.begin(), values_.end());
}

Spectrum PeriodicField::spectrum() const {
    return Spectrum(grid_, grid_->forward(values_));
}

PeriodicField sample(const GridPtr& grid, const std::function<double(double)>& f) {
    std::vector<double> values(static_cast<size_t>(grid->size()));
    for (int j = 0; j < grid->size(); ++j) {
        values[static_cast<size_t>(j)] = f(grid->node(j));
    }
    return PeriodicField(grid, std::move(values));
}

PeriodicField derivative(const PeriodicField& f, int k) {
    if (k < 1 || k > 4) {
        throw std::invalid_argument("derivative: order must lie in 1..4");
    }
    auto coeffs = f.grid().forward(f.values());
    const int nyq = f.grid().max_mode();
    for (int n = 0; n <= nyq; ++n) {
        const double dn = n;
        std::complex<double> mult;
        switch (k) {
            case 1: mult = {0.0, dn}; break;
            case 2: mult = {-dn * dn, 0.0}; break;
            case 3: mult = {0.0, -dn * dn * dn}; break;
            default: mult = {dn * dn * dn * dn, 0.0}; break;
        }
        coeffs[static_cast<size_t>(n)] *= mult;
    }
    if (k % 2 == 1) coeffs[static_cast<size_t>(nyq)] = 0.0;
    return PeriodicField(f.grid_ptr(), f.grid().backward_extended(coeffs));
}

double integrate(const PeriodicField& f) {
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    return kTwoPi * sum / f.size();
}

std::complex<double> fourier_coefficient(const PeriodicField& f, int n) {
    if (std::abs(n) >= f.grid().max_mode()) {
        throw std::out_of_range("fourier_coefficient: need |n| < n_points/2");
    }
    return f.spectrum().coefficient(n);
}

Spectrum dealias(const Spectrum& s) {
    std::vector<std::complex<double>> coeffs(s.coeffs());
    const int cutoff = s.grid().dealias_cutoff();
    for (int n = cutoff + 1; n < static_cast<int>(coeffs.size()); ++n) {
        coeffs[static_cast<size_t>(n)] = 0.0;
    }
    return Spectrum(s.grid_ptr(), std::move(coeffs));
}

PeriodicField dealias(const PeriodicField& f) {
    return dealias(f.spectrum()).to_field();
}

}  // namespace thinfilm
