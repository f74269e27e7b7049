#pragma once

#include <complex>
#include <utility>

#include "thinfilm/grid.hpp"

namespace thinfilm {

// Parameters of the evolution ∂_t h + ∂_θ(h^{α+2} ψ_σ(∂_θ h + ∂_θ³ h)) = 0.
// σ = 0 selects the original degenerate nonlinearity ψ(s) = |s|^{α-1} s.
struct ModelParams {
    double alpha;        // shear-thinning exponent, > 1
    double sigma = 0.0;  // regularization, ≥ 0

    void validate() const;
};

// Steady film h(θ) = h_bar + kappa_m1 cos θ + kappa_1 sin θ.
struct SteadyStateParams {
    double h_bar;
    double kappa_m1 = 0.0;
    double kappa_1 = 0.0;

    // Positivity margin h_bar - sqrt(kappa_m1² + kappa_1²); must be > 0.
    double margin() const;
    void validate() const;
};

// ψ(s) = |s|^{α-1} s, the degenerate flux nonlinearity.
double psi(double s, double alpha);

// ψ_σ(s) = (s² + σ²)^{(α-1)/2} s; reduces to ψ at σ = 0.
double psi_sigma(double s, const ModelParams& p);

// w = ∂_θ h + ∂_θ³ h, computed from the spectrum of h with the single
// multiplier i·n(1 - n²) (so the resonant modes n = 0, ±1 drop out exactly).
PeriodicField w_field(const PeriodicField& h);

// Pointwise flux h^{α+2} ψ_σ(w).  Requires h > 0 everywhere.
PeriodicField flux(const PeriodicField& h, const ModelParams& p);

// Right-hand side -∂_θ(flux) with the 2/3-rule applied to the flux before
// differentiation; its mean vanishes identically.
PeriodicField rhs(const PeriodicField& h, const ModelParams& p);

// Sample the steady film on a grid; rejects parameters that touch zero.
PeriodicField steady_state(const SteadyStateParams& p, const GridPtr& grid);

// Invert the mode pair (h_{-1}, h_1) of a real field into the steady-state
// amplitudes (κ_{-1}, κ_1) = (h_{-1} + h_1, i(h_1 - h_{-1})).  The inputs
// must be conjugate to 1e-10.
std::pair<double, double> kappa_from_modes(std::complex<double> h_m1,
                                           std::complex<double> h_1);

// Radius function of the shifted circle that shadows the steady film at
// amplitude ε: r(θ) = d·cos(θ-φ₀) + sqrt(d²cos²(θ-φ₀) + R² - d²) with
// R = 1 + ε·h_bar, d = ε·sqrt(κ_{-1}² + κ_1²), tan φ₀ = κ_1/κ_{-1}.
// Requires 0 < ε < 1/2 and sqrt(κ_{-1}² + κ_1²) < h_bar.
PeriodicField circle_embed(const SteadyStateParams& p, double epsilon,
                           const GridPtr& grid);

}  // namespace thinfilm
