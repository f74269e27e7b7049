#include "thinfilm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace thinfilm {

namespace {

constexpr double kPi = std::numbers::pi;

// Σ_{n≠0} weight(n)·|h_n|² over the full index set -N/2+1..N/2 of a real
// field, using the half-complex storage (interior modes count twice).
template <typename Weight>
double mode_sum(const Spectrum& s, Weight weight) {
    const int nyq = s.grid().max_mode();
    double sum = 0.0;
    for (int n = 1; n < nyq; ++n) {
        sum += 2.0 * weight(n) * std::norm(s[n]);
    }
    sum += weight(nyq) * std::norm(s[nyq]);
    return sum;
}

}  // namespace

double mass(const PeriodicField& h) { return integrate(h); }

double energy_E(const PeriodicField& h) {
    const Spectrum s = h.spectrum();
    return kPi * mode_sum(s, [](int n) { return static_cast<double>(n) * n - 1.0; });
}

double energy_e(const PeriodicField& h) {
    const PeriodicField dh = derivative(h, 1);
    double sum = 0.0;
    for (int j = 0; j < h.size(); ++j) {
        sum += dh[j] * dh[j] - h[j] * h[j];
    }
    return 0.5 * (2.0 * kPi) * sum / h.size();
}

double dissipation_J(const PeriodicField& h, const ModelParams& p) {
    p.validate();
    if (!(h.min() > 0.0)) {
        throw DegeneracyError("dissipation_J: field is not strictly positive");
    }
    const PeriodicField w = w_field(h);
    double sum = 0.0;
    for (int j = 0; j < h.size(); ++j) {
        const double w2 = w[j] * w[j];
        sum += std::pow(h[j], p.alpha + 2.0) *
               std::pow(w2 + p.sigma * p.sigma, 0.5 * (p.alpha - 1.0)) * w2;
    }
    return 2.0 * kPi * sum / h.size();
}

std::vector<double> energy_identity_residual(const std::vector<DiagnosticsRecord>& trajectory) {
    if (trajectory.empty()) {
        throw CoverageError("energy_identity_residual: empty trajectory");
    }
    const double E0 = trajectory.front().E;
    std::vector<double> residual;
    residual.reserve(trajectory.size());
    for (const auto& rec : trajectory) {
        residual.push_back(std::abs(rec.E + rec.D_accum - E0));
    }
    return residual;
}

PeriodicField phi_remainder(const PeriodicField& h) {
    auto coeffs = h.grid().forward(h.values());
    coeffs[0] = 0.0;
    coeffs[1] = 0.0;
    return PeriodicField(h.grid_ptr(), h.grid().backward(coeffs));
}

double h1_norm(const PeriodicField& f) {
    const Spectrum s = f.spectrum();
    const double mean2 = std::norm(s[0]);
    const double rest = mode_sum(s, [](int n) { return static_cast<double>(n) * n + 1.0; });
    return std::sqrt(2.0 * kPi * (mean2 + rest));
}

EPhiCheck check_E_phi_inequality(const PeriodicField& h) {
    const double phi = h1_norm(phi_remainder(h));
    EPhiCheck out;
    out.lhs = phi * phi;
    out.rhs = 4.0 * energy_E(h);
    out.holds = out.lhs <= out.rhs + 1e-10;
    return out;
}

double lambda_envelope(double t, double epsilon, double C, double alpha) {
    return epsilon * std::pow(1.0 + C * std::pow(epsilon, alpha - 1.0) * t,
                              -1.0 / (alpha - 1.0));
}

DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& series,
                            double t_lo, double t_hi) {
    std::vector<std::pair<double, double>> logs;
    for (const auto& [t, y] : series) {
        if (t >= t_lo && t <= t_hi && t > 0.0 && y > 0.0) {
            logs.emplace_back(std::log(t), std::log(y));
        }
    }
    if (logs.size() < 10) {
        throw FitError("fit_decay_exponent: fewer than 10 usable samples in [" +
                       std::to_string(t_lo) + ", " + std::to_string(t_hi) + "]");
    }
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : logs) {
        sx += x;
        sy += y;
    }
    const double n = static_cast<double>(logs.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) {
        throw FitError("fit_decay_exponent: degenerate window (single abscissa)");
    }
    DecayFit fit;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = syy - fit.slope * sxy;
    fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    fit.n_points = static_cast<int>(logs.size());
    return fit;
}

BetaTable beta_iteration(double alpha, int n_max) {
    if (!(alpha > 1.0)) {
        throw ConfigError("beta_iteration: alpha must exceed 1");
    }
    if (n_max < 0) {
        throw ConfigError("beta_iteration: n_max must be non-negative");
    }
    BetaTable table;
    table.alpha = alpha;
    table.fixed_point = 2.0 * alpha / (alpha + 1.0);
    table.linear_limit = alpha * (alpha * alpha + 1.0) / (alpha + 1.0);
    const double gain = alpha * (alpha * alpha + 1.0) / ((alpha + 1.0) * (alpha + 1.0));
    const double ratio = alpha / (alpha + 1.0);
    double beta = 0.0;
    table.betas.push_back(beta);
    for (int n = 1; n <= n_max; ++n) {
        beta = std::min(table.fixed_point, gain + ratio * beta);
        table.betas.push_back(beta);
        if (table.steps_to_fixed_point < 0 && beta == table.fixed_point) {
            table.steps_to_fixed_point = n;
        }
    }
    return table;
}

std::vector<double> beta_iteration_min_free(double alpha, int n_max) {
    if (!(alpha > 1.0) || n_max < 0) {
        throw ConfigError("beta_iteration_min_free: need alpha > 1 and n_max >= 0");
    }
    const double gain = alpha * (alpha * alpha + 1.0) / ((alpha + 1.0) * (alpha + 1.0));
    const double ratio = alpha / (alpha + 1.0);
    std::vector<double> betas{0.0};
    for (int n = 1; n <= n_max; ++n) {
        betas.push_back(gain + ratio * betas.back());
    }
    return betas;
}

double beta_min_free_closed_form(double alpha, int n) {
    const double limit = alpha * (alpha * alpha + 1.0) / (alpha + 1.0);
    return limit * (1.0 - std::pow(alpha / (alpha + 1.0), n));
}

DyadicBudget dyadic_fourier_budget(const std::vector<DiagnosticsRecord>& trajectory,
                                   double epsilon, double alpha) {
    if (!(alpha > 1.0) || !(epsilon > 0.0 && epsilon < 1.0)) {
        throw ConfigError("dyadic_fourier_budget: need alpha > 1 and epsilon in (0,1)");
    }
    if (trajectory.size() < 2) {
        throw CoverageError("dyadic_fourier_budget: trajectory has fewer than 2 samples");
    }
    const double L = std::pow(epsilon, 1.0 - alpha);
    const double t_end = trajectory.back().t;
    if (t_end < 2.0 * L) {
        throw CoverageError("dyadic_fourier_budget: trajectory ends at t = " +
                            std::to_string(t_end) + " < 2·eps^{1-alpha} = " +
                            std::to_string(2.0 * L));
    }

    DyadicBudget budget;
    budget.epsilon = epsilon;
    budget.alpha = alpha;

    // Descending windows [L/2^{n+1}, L/2^n), n = 0..N_eps, lowest edge in [1/2, 1).
    const int n_eps = static_cast<int>(std::floor(std::log2(L)));
    for (int n = n_eps; n >= 0; --n) {
        budget.windows.push_back({L / std::pow(2.0, n + 1), L / std::pow(2.0, n), 0.0, 0});
    }
    // Ascending windows [2^n L, 2^{n+1} L) fully covered by the trajectory.
    for (int n = 0; L * std::pow(2.0, n + 1) <= t_end; ++n) {
        budget.windows.push_back({L * std::pow(2.0, n), L * std::pow(2.0, n + 1), 0.0, 0});
    }

    for (auto& window : budget.windows) {
        bool have_prev = false;
        std::complex<double> prev;
        for (const auto& rec : trajectory) {
            if (rec.t < window.t_lo || rec.t >= window.t_hi) continue;
            ++window.n_samples;
            if (have_prev) window.variation += std::abs(rec.h_1 - prev);
            prev = rec.h_1;
            have_prev = true;
        }
        budget.total += window.variation;
    }
    budget.bound = epsilon * (1.0 + std::log(L));
    budget.ratio = budget.total / budget.bound;
    return budget;
}

double third_derivative_budget(const std::vector<std::pair<double, PeriodicField>>& snapshots,
                               double t_bar, double p) {
    if (!(t_bar > 0.0)) {
        throw ConfigError("third_derivative_budget: t_bar must be positive");
    }
    // Snap the window edges so times produced by accumulation still count.
    const double snap = 1e-9 * t_bar;
    const double t_lo = 0.5 * t_bar - snap;
    const double t_hi = t_bar + snap;
    std::vector<std::pair<double, double>> samples;  // (t, ∮|∂³φ|^p dθ)
    for (const auto& [t, field] : snapshots) {
        if (t < t_lo || t > t_hi) continue;
        const PeriodicField d3 = derivative(phi_remainder(field), 3);
        double sum = 0.0;
        for (int j = 0; j < d3.size(); ++j) {
            sum += std::pow(std::abs(d3[j]), p);
        }
        samples.emplace_back(t, 2.0 * kPi * sum / d3.size());
    }
    if (samples.size() < 2) {
        throw CoverageError("third_derivative_budget: need at least 2 snapshots in [" +
                            std::to_string(t_lo) + ", " + std::to_string(t_bar) + "]");
    }
    std::sort(samples.begin(), samples.end());
    double budget = 0.0;
    for (size_t i = 1; i < samples.size(); ++i) {
        budget += 0.5 * (samples[i].second + samples[i - 1].second) *
                  (samples[i].first - samples[i - 1].first);
    }
    return budget;
}

std::optional<double> positivity_window(const std::vector<DiagnosticsRecord>& trajectory,
                                        double h_bar) {
    for (const auto& rec : trajectory) {
        if (rec.h_min < 0.5 * h_bar || rec.h_max > 2.0 * h_bar) {
            return rec.t;
        }
    }
    return std::nullopt;
}

XiEstimate xi_limit(const std::vector<DiagnosticsRecord>& trajectory,
                    double tail_fraction, double tol) {
    if (trajectory.empty()) {
        throw CoverageError("xi_limit: empty trajectory");
    }
    const double t0 = trajectory.front().t;
    const double t1 = trajectory.back().t;
    const double tail_start = t1 - tail_fraction * (t1 - t0);
    XiEstimate xi;
    std::complex<double> sum;
    int count = 0;
    bool have_prev = false;
    std::complex<double> prev;
    for (const auto& rec : trajectory) {
        if (rec.t < tail_start) continue;
        sum += rec.h_1;
        ++count;
        if (have_prev) xi.uncertainty += std::abs(rec.h_1 - prev);
        prev = rec.h_1;
        have_prev = true;
    }
    xi.xi_1 = sum / static_cast<double>(count);
    xi.xi_m1 = std::conj(xi.xi_1);
    xi.converged = xi.uncertainty <= tol;
    return xi;
}

EnvelopeFit fit_lambda_envelope(const std::vector<DiagnosticsRecord>& trajectory,
                                double epsilon, double alpha) {
    if (trajectory.empty()) {
        throw CoverageError("fit_lambda_envelope: empty trajectory");
    }
    EnvelopeFit fit;
    fit.epsilon = epsilon;
    fit.alpha = alpha;
    const double eps_pow = std::pow(epsilon, alpha - 1.0);
    double c_min = std::numeric_limits<double>::infinity();
    for (const auto& rec : trajectory) {
        if (rec.t <= 0.0 || rec.E <= 1e-300) continue;
        const double c_max =
            (std::pow(epsilon * epsilon / rec.E, 0.5 * (alpha - 1.0)) - 1.0) /
            (eps_pow * rec.t);
        c_min = std::min(c_min, c_max);
    }
    if (!std::isfinite(c_min) || c_min < 0.0) {
        // Zero-signal (steady) trajectories: the flat envelope already
        // dominates; negative c_min can only come from E(0) > ε², which the
        // ε-normalized initial data rules out.
        fit.C = 0.0;
    } else {
        fit.C = c_min;
    }
    fit.max_ratio = 0.0;
    fit.dominates = true;
    for (const auto& rec : trajectory) {
        const double lambda = lambda_envelope(rec.t, epsilon, fit.C, alpha);
        if (lambda * lambda <= 0.0) continue;
        const double ratio = rec.E / (lambda * lambda);
        fit.max_ratio = std::max(fit.max_ratio, ratio);
        if (ratio > 1.0 + 1e-9) fit.dominates = false;
    }
    return fit;
}

}  // namespace thinfilm
