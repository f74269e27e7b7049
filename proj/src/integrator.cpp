#include "thinfilm/integrator.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include "thinfilm/diagnostics.hpp"

namespace thinfilm {

namespace {

constexpr double kPi = std::numbers::pi;

// Roundoff allowance for the energy guard: E is assembled from O(N) terms of
// magnitude up to π Σ (n²+1)|h_n|², so grant a generous multiple of the
// resulting cancellation noise.  Without this, exact steady states (E ≡ 0)
// could never accept a step.
double guard_floor(const PeriodicField& h0) {
    const double scale = h1_norm(h0);
    const double mean = mass(h0) / (2.0 * kPi);
    return 1e3 * DBL_EPSILON * (kPi * mean * mean + scale * scale);
}

bool finite(const PeriodicField& f) {
    for (double v : f.values()) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace

void StepController::validate() const {
    if (!(rel_tol > 0.0) || !(safety > 0.0 && safety <= 1.0) || !(dt_min > 0.0) ||
        !(dt_max >= dt_min) || !(energy_guard_tol >= 0.0) || !(dt_init > 0.0) ||
        !(growth_limit > 1.0)) {
        throw ConfigError("StepController: invalid controller settings");
    }
}

SimState::SimState(PeriodicField h0) : h(std::move(h0)) {
    energy = energy_E(h);
    energy_ref = energy;
    energy_floor = guard_floor(h);
}

double linear_stabilizer(const PeriodicField& h, const ModelParams& p) {
    p.validate();
    const PeriodicField w = w_field(h);
    double a_max = 0.0;
    for (int j = 0; j < h.size(); ++j) {
        const double a =
            std::pow(h[j], p.alpha + 2.0) *
            std::pow(w[j] * w[j] + p.sigma * p.sigma, 0.5 * (p.alpha - 1.0));
        a_max = std::max(a_max, a);
    }
    return a_max;
}

PeriodicField imex_step(const PeriodicField& h, double dt, const ModelParams& p,
                        double a_frozen) {
    auto h_hat = h.grid().forward(h.values());
    auto rhs_hat = h.grid().forward(rhs(h, p).values());
    const int nyq = h.grid().max_mode();
    rhs_hat[0] = 0.0;  // conservative form: the mean never moves
    rhs_hat[static_cast<size_t>(nyq)] = 0.0;
    for (int n = 0; n <= nyq; ++n) {
        const double dn = n;
        const double symbol = dn * dn * (dn * dn - 1.0);  // n²(n²-1) ≥ 0
        const double denom = 1.0 + dt * a_frozen * symbol;
        h_hat[static_cast<size_t>(n)] =
            h_hat[static_cast<size_t>(n)] +
            dt * rhs_hat[static_cast<size_t>(n)] / denom;
    }
    return PeriodicField(h.grid_ptr(), h.grid().backward(h_hat));
}

void step(SimState& state, const ModelParams& p, const StepController& ctrl,
          double dt_cap) {
    p.validate();
    ctrl.validate();
    if (state.dt <= 0.0) state.dt = ctrl.dt_init;

    const double guard_budget =
        ctrl.energy_guard_tol * state.energy_ref + state.energy_floor;
    // ψ'_σ ≤ α·(s²+σ²)^{(α-1)/2}, so α·A dominates the frozen Jacobian
    // coefficient and keeps the explicit remainder contractive at any dt.
    const double a_frozen = p.alpha * linear_stabilizer(state.h, p);
    const double h_scale = std::max(1.0, std::max(std::abs(state.h.min()),
                                                  std::abs(state.h.max())));

    double dt = std::clamp(std::min(state.dt, dt_cap), ctrl.dt_min, ctrl.dt_max);
    while (true) {
        bool positivity_failed = false;
        bool error_failed = false;
        bool guard_failed = false;
        double err = 0.0;
        double energy_new = 0.0;

        try {
            const PeriodicField coarse = imex_step(state.h, dt, p, a_frozen);
            const PeriodicField mid = imex_step(state.h, 0.5 * dt, p, a_frozen);
            const PeriodicField fine = imex_step(mid, 0.5 * dt, p, a_frozen);

            if (!finite(coarse) || !finite(fine)) {
                error_failed = true;
            } else {
                for (int j = 0; j < fine.size(); ++j) {
                    err = std::max(err, std::abs(fine[j] - coarse[j]));
                }
                err /= h_scale;
                if (err > ctrl.rel_tol) {
                    error_failed = true;
                } else if (!(fine.min() > 0.0)) {
                    positivity_failed = true;
                } else {
                    energy_new = energy_E(fine);
                    if (energy_new - state.energy > guard_budget) {
                        guard_failed = true;
                    } else {
                        // Accept the fine solution.
                        state.max_guard_excess =
                            std::max(state.max_guard_excess,
                                     (energy_new - state.energy) -
                                         ctrl.energy_guard_tol * state.energy_ref);
                        state.h = fine;
                        state.t += dt;
                        state.energy = energy_new;
                        ++state.accepted;
                        double grow = ctrl.safety * std::sqrt(ctrl.rel_tol /
                                                              std::max(err, 1e-300));
                        grow = std::clamp(grow, 0.2, ctrl.growth_limit);
                        state.dt = std::clamp(dt * grow, ctrl.dt_min, ctrl.dt_max);
                        return;
                    }
                }
            }
        } catch (const DegeneracyError&) {
            // An intermediate sub-step left the positive cone.
            positivity_failed = true;
        }

        ++state.rejected;
        if (dt <= ctrl.dt_min) {
            if (positivity_failed) {
                throw TouchdownError(state.t,
                                     "film about to touch down at t = " +
                                         std::to_string(state.t) +
                                         ": positivity lost even at dt_min");
            }
            throw StiffnessError(state.t,
                                 (guard_failed ? "energy guard" : "error estimate") +
                                     std::string(" still failing at dt_min, t = ") +
                                     std::to_string(state.t));
        }
        (void)error_failed;
        dt = std::max(0.5 * dt, ctrl.dt_min);
    }
}

void advance(SimState& state, double t_end, const ModelParams& p,
             const StepController& ctrl, const Observer& obs) {
    if (!(t_end > state.t)) {
        throw ConfigError("advance: t_end must exceed the current time");
    }
    if (!(obs.output_interval > 0.0)) {
        throw ConfigError("advance: output_interval must be positive");
    }
    if (obs.on_sample) obs.on_sample(state);

    const double t0 = state.t;
    long k_out = 1;
    double next_out = std::min(t0 + k_out * obs.output_interval, t_end);
    const double snap_tol = 1e-9 * obs.output_interval;

    while (state.t < t_end - snap_tol) {
        step(state, p, ctrl, next_out - state.t);
        if (std::abs(state.t - next_out) <= snap_tol) state.t = next_out;
        if (obs.on_accepted_step) obs.on_accepted_step(state);
        while (state.t >= next_out - snap_tol && next_out <= t_end) {
            if (obs.on_sample) obs.on_sample(state);
            if (next_out >= t_end - snap_tol) break;
            ++k_out;
            next_out = std::min(t0 + k_out * obs.output_interval, t_end);
        }
    }
}

}  // namespace thinfilm
