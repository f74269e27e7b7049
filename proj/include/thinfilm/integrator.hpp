#pragma once

#include <functional>
#include <limits>

#include "thinfilm/grid.hpp"
#include "thinfilm/model.hpp"

namespace thinfilm {

// Adaptive step controller for the stabilized IMEX backward-Euler scheme.
struct StepController {
    double rel_tol = 1e-6;           // step-doubling error target (max-norm, relative)
    double safety = 0.8;             // growth safety factor
    double dt_min = 1e-12;
    double dt_max = 1.0;
    double energy_guard_tol = 1e-8;  // allowed ΔE per step, relative to E(0)
    double dt_init = 1e-3;           // first attempted step
    double growth_limit = 2.0;       // max dt growth per accepted step

    void validate() const;
};

// Evolving simulation state plus bookkeeping the diagnostics need.
struct SimState {
    PeriodicField h;
    double t = 0.0;
    double dt = 0.0;                  // next step size to attempt
    long accepted = 0;
    long rejected = 0;
    double energy = 0.0;              // E at the current state
    double energy_ref = 0.0;          // E(0), reference for the energy guard
    double energy_floor = 0.0;        // roundoff allowance for the guard
    double max_guard_excess = 0.0;    // max over accepted steps of ΔE - tol·E(0)

    explicit SimState(PeriodicField h0);
};

// Frozen stabilization coefficient A = max_θ h^{α+2}(w² + σ²)^{(α-1)/2}.
double linear_stabilizer(const PeriodicField& h, const ModelParams& p);

// One raw IMEX update with frozen coefficient a_frozen: in spectral space
//   ĥ' = [ĥ(1 + dt·a·n²(n²-1)) + dt·r̂hs(h)] / (1 + dt·a·n²(n²-1)),
// i.e. backward Euler on the a-frozen fourth-order part and forward Euler on
// the remainder.  Mass (the n = 0 mode) is unchanged identically.
PeriodicField imex_step(const PeriodicField& h, double dt, const ModelParams& p,
                        double a_frozen);

// Advance the state by exactly one accepted step (retrying internally with
// halved dt on error/energy/positivity rejections).  dt_cap additionally
// limits this step (used to land exactly on output times).  Throws
// TouchdownError if positivity cannot be maintained at dt_min and
// StiffnessError if the error estimate or energy guard still fails there.
void step(SimState& state, const ModelParams& p, const StepController& ctrl,
          double dt_cap = std::numeric_limits<double>::infinity());

// Observer hooks for advance(): on_sample fires at t = start, every
// output_interval, and at termination; on_accepted_step after every step.
struct Observer {
    double output_interval = 1.0;
    std::function<void(const SimState&)> on_sample;
    std::function<void(const SimState&)> on_accepted_step;
};

// March the state to t_end, emitting samples on the uniform output comb.
void advance(SimState& state, double t_end, const ModelParams& p,
             const StepController& ctrl, const Observer& obs);

}  // namespace thinfilm
