#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "thinfilm/grid.hpp"
#include "thinfilm/model.hpp"

namespace thinfilm {

// One sampled instant of a trajectory.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;     // ∮ h dθ (the L¹ norm of a positive film)
    double E = 0.0;        // π Σ_{n≠0} (n²-1)|h_n|²
    double e = 0.0;        // E - π h̄² (quadrature form ½∮(h_θ² - h²))
    double J = 0.0;        // dissipation functional
    double D_accum = 0.0;  // ∫₀ᵗ J ds, trapezoid over accepted steps
    std::complex<double> h_m1;
    std::complex<double> h_1;
    double phi_h1_norm = 0.0;  // ‖h - modes{0,±1}‖_{H¹}
    double h_min = 0.0;
    double h_max = 0.0;
};

// Least-squares power law y ≈ exp(intercept)·t^slope on a log-log window.
struct DecayFit {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

// The bootstrap exponent iteration β_{n+1} = min{2α/(α+1),
// α(α²+1)/(α+1)² + β_n·α/(α+1)} and its min-free linear limit.
struct BetaTable {
    double alpha = 0.0;
    std::vector<double> betas;        // β_0..β_n
    int steps_to_fixed_point = -1;    // first n with β_n = 2α/(α+1), -1 if unreached
    double fixed_point = 0.0;         // 2α/(α+1)
    double linear_limit = 0.0;        // α(α²+1)/(α+1)
};

// ‖φ‖²_{H¹} ≤ 4E check result.
struct EPhiCheck {
    double lhs = 0.0;  // ‖φ‖²_{H¹}
    double rhs = 0.0;  // 4·E
    bool holds = false;
};

// Fitted decay envelope Λ_ε(t) = ε/(1 + C ε^{α-1} t)^{1/(α-1)} with the
// largest constant C that keeps E(t) ≤ Λ_ε(t)² at every sample.
struct EnvelopeFit {
    double epsilon = 0.0;
    double alpha = 0.0;
    double C = 0.0;
    bool dominates = false;
    double max_ratio = 0.0;  // max_t E(t)/Λ²(t)
};

// One dyadic time window and the total variation of h_1 across it.
struct DyadicWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double variation = 0.0;
    int n_samples = 0;
};

// Dyadic Fourier budget: windows [2^{-(n+1)}L, 2^{-n}L) descending from
// L = ε^{1-α} to ≈1 and [2^n L, 2^{n+1}L) ascending while covered; the
// grand total is compared against the ε(1 + log ε^{1-α}) budget.
struct DyadicBudget {
    double epsilon = 0.0;
    double alpha = 0.0;
    std::vector<DyadicWindow> windows;
    double total = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
};

// Tail estimate of the limiting modes ξ_{±1} = lim h_{±1}(t).
struct XiEstimate {
    std::complex<double> xi_m1;
    std::complex<double> xi_1;
    double uncertainty = 0.0;  // total variation of h_1 over the tail window
    bool converged = false;
};

// ∮ h dθ.
double mass(const PeriodicField& h);

// E[h] = π h̄² + ½∮(h_θ² - h²) dθ = π Σ_{n≠0} (n²-1)|h_n|² ≥ 0 (spectral form).
double energy_E(const PeriodicField& h);

// e[h] = ½∮(h_θ² - h²) dθ by direct quadrature; e = E - π h̄².
double energy_e(const PeriodicField& h);

// J[h] = ∮ h^{α+2} (w² + σ²)^{(α-1)/2} w² dθ, w = h_θ + h_θθθ.  Requires h > 0.
double dissipation_J(const PeriodicField& h, const ModelParams& p);

// r(t_k) = |E(t_k) + D_accum(t_k) - E(t_0)| for each record.
std::vector<double> energy_identity_residual(const std::vector<DiagnosticsRecord>& trajectory);

// Zero the modes n = 0, ±1.
PeriodicField phi_remainder(const PeriodicField& h);

// ‖f‖_{H¹} = sqrt(2π Σ_n (n²+1)|f_n|²).
double h1_norm(const PeriodicField& f);

// Verify ‖φ‖²_{H¹} ≤ 4E[h] (with 1e-10 slack) for φ = phi_remainder(h).
EPhiCheck check_E_phi_inequality(const PeriodicField& h);

// Λ_ε(t) = ε/(1 + C ε^{α-1} t)^{1/(α-1)}.
double lambda_envelope(double t, double epsilon, double C, double alpha);

// Fit log y against log t on [t_lo, t_hi]; needs ≥ 10 positive samples.
DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& series,
                            double t_lo, double t_hi);

// β iteration table for α > 1 with n_max + 1 entries.
BetaTable beta_iteration(double alpha, int n_max);

// The same iteration without the min-clamp (pure linear recursion) and its
// closed form β_n = [α(α²+1)/(α+1)]·(1 - (α/(α+1))^n).
std::vector<double> beta_iteration_min_free(double alpha, int n_max);
double beta_min_free_closed_form(double alpha, int n);

// Windowed total variation of h_1(t); requires the trajectory to reach
// 2·ε^{1-α} so at least one ascending window is covered.
DyadicBudget dyadic_fourier_budget(const std::vector<DiagnosticsRecord>& trajectory,
                                   double epsilon, double alpha);

// Time-quadrature of ∮|∂_θ³ φ|^p dθ over [t_bar/2, t_bar] from stored field
// snapshots (≥ 2 inside the window required).
double third_derivative_budget(const std::vector<std::pair<double, PeriodicField>>& snapshots,
                               double t_bar, double p);

// First recorded time at which h leaves [h_bar/2, 2·h_bar], if any (t_* probe).
std::optional<double> positivity_window(const std::vector<DiagnosticsRecord>& trajectory,
                                        double h_bar);

// Average of h_{±1} over the trailing tail_fraction of the time span, with
// the tail total variation as the uncertainty; converged iff it is ≤ tol.
XiEstimate xi_limit(const std::vector<DiagnosticsRecord>& trajectory,
                    double tail_fraction = 0.5, double tol = 1e-3);

// Largest C with E(t) ≤ Λ_ε(t)² at every sample (C = 0 for zero-energy runs).
EnvelopeFit fit_lambda_envelope(const std::vector<DiagnosticsRecord>& trajectory,
                                double epsilon, double alpha);

}  // namespace thinfilm
