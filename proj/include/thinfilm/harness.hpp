#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thinfilm/diagnostics.hpp"
#include "thinfilm/integrator.hpp"
#include "thinfilm/model.hpp"

namespace thinfilm {

// One perturbation mode: amplitude·cos(nθ) or amplitude·sin(nθ).
struct ModeSpec {
    int n = 0;
    bool is_sin = false;
    double amplitude = 0.0;
};

// Initial-data recipe.  Mode lists (explicit or seeded-random) are rescaled
// so that ‖h₀ - h̄₀‖_{H¹} = ε exactly; steady states and file data are used
// verbatim.
struct InitialSpec {
    enum class Kind { Modes, Steady, File, Random };
    Kind kind = Kind::Modes;
    std::vector<ModeSpec> modes{{2, false, 1.0}};
    SteadyStateParams steady{1.0, 0.0, 0.0};
    std::string file;
    int random_lo = 2;
    int random_hi = 8;
};

enum class SnapshotPolicy { None, Dyadic };

// Full description of one run.
struct ScenarioConfig {
    int n_points = 256;
    double alpha = 0.0;  // required
    double sigma = 1e-3;
    double epsilon = 0.05;
    double h_bar = 1.0;
    double t_end = 0.0;  // required
    double output_interval = 1.0;
    StepController controller;
    InitialSpec init;
    unsigned long seed = 0;
    SnapshotPolicy snapshots = SnapshotPolicy::None;
    std::optional<double> fit_t_lo;  // defaults to t_end/100
    std::optional<double> fit_t_hi;  // defaults to t_end
    std::string label;

    void validate() const;
};

enum class RunStatus { Completed, Touchdown, Stiffness };

// Everything a finished (or honestly aborted) run reports.
struct TrajectoryReport {
    ScenarioConfig config;
    std::vector<DiagnosticsRecord> records;
    std::vector<std::pair<double, PeriodicField>> snapshots;
    std::optional<DecayFit> fit_E;
    std::optional<DecayFit> fit_phi;
    std::optional<EnvelopeFit> envelope;
    BetaTable beta_table;
    std::optional<DyadicBudget> dyadic_budget;
    std::optional<double> d3_budget_alpha;       // p = α over [t̄/2, t̄]
    std::optional<double> d3_budget_alpha_plus;  // p = α+1
    std::optional<double> d3_t_bar;
    XiEstimate xi;
    std::optional<double> violation_time;  // first exit from [h̄/2, 2h̄]
    RunStatus status = RunStatus::Completed;
    double termination_time = 0.0;
    long accepted_steps = 0;
    long rejected_steps = 0;
    double max_guard_excess = 0.0;
};

// Build h₀ from the scenario's initial spec (ε-normalized where applicable);
// rejects non-positive data.
PeriodicField build_initial_data(const ScenarioConfig& cfg);

// Run one scenario to completion, touchdown, or stiffness failure and
// assemble the report.  Deterministic for a fixed config and seed.
TrajectoryReport run_scenario(const ScenarioConfig& cfg);

// Run several scenarios concurrently (worker count capped by the
// THINFILM_THREADS environment variable); reports keep the input order.
std::vector<TrajectoryReport> sweep(const std::vector<ScenarioConfig>& configs);

// --- flat key=value config files ------------------------------------------

// Parse "key = value" lines ('#' comments); duplicate keys are rejected.
std::map<std::string, std::string> parse_config_text(const std::string& text);

// Build a ScenarioConfig from parsed keys (spec keys: n_points, alpha, sigma,
// epsilon, h_bar, t_end, output_interval, rel_tol, dt_min, dt_max, dt_init,
// safety, energy_guard_tol, seed, snapshots, init.modes, init.steady,
// init.file, init.random, fit.t_lo, fit.t_hi, label).  Unknown keys error.
ScenarioConfig scenario_from_keys(const std::map<std::string, std::string>& keys);

// Load a config file and apply command-line overrides (which win).
ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides);

// Round-trip: the resolved key=value form of a config (echoed into reports).
std::map<std::string, std::string> scenario_to_keys(const ScenarioConfig& cfg);

}  // namespace thinfilm
