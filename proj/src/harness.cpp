#include "thinfilm/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "thinfilm/io.hpp"

namespace thinfilm {

namespace {

// Deterministic uniform in [-1, 1): explicit bit construction, so the stream
// is identical across standard libraries (distributions are not portable).
double symmetric_uniform(std::mt19937_64& rng) {
    return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

PeriodicField mode_sum_field(const GridPtr& grid, const std::vector<ModeSpec>& modes) {
    std::vector<double> values(static_cast<size_t>(grid->size()), 0.0);
    for (const auto& m : modes) {
        for (int j = 0; j < grid->size(); ++j) {
            const double arg = m.n * grid->node(j);
            values[static_cast<size_t>(j)] +=
                m.amplitude * (m.is_sin ? std::sin(arg) : std::cos(arg));
        }
    }
    return PeriodicField(grid, std::move(values));
}

int max_workers() {
    if (const char* env = std::getenv("THINFILM_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Snapshot decimation: within the dyadic window [2^k, 2^{k+1}) keep at most
// ~64 sample times, decided from the sample's index inside the window.
bool dyadic_keep(double t, double output_interval) {
    if (t <= 0.0) return true;
    const double k = std::floor(std::log2(t));
    const double lo = std::pow(2.0, k);
    const double expected = lo / output_interval;
    const long stride = std::max(1L, static_cast<long>(std::ceil(expected / 64.0)));
    const long index = static_cast<long>(std::floor((t - lo) / output_interval + 0.5));
    return index % stride == 0;
}

}  // namespace

PeriodicField build_initial_data(const ScenarioConfig& cfg) {
    cfg.validate();
    const GridPtr grid = make_grid(cfg.n_points);
    PeriodicField h0(grid, std::vector<double>(static_cast<size_t>(cfg.n_points), 0.0));

    switch (cfg.init.kind) {
        case InitialSpec::Kind::Steady:
            h0 = steady_state(cfg.init.steady, grid);
            break;
        case InitialSpec::Kind::File: {
            auto values = read_field_f64(cfg.init.file);
            if (static_cast<int>(values.size()) != cfg.n_points) {
                throw ConfigError("init.file: snapshot has " + std::to_string(values.size()) +
                                  " values, config wants n_points = " +
                                  std::to_string(cfg.n_points));
            }
            h0 = PeriodicField(grid, std::move(values));
            break;
        }
        case InitialSpec::Kind::Modes:
        case InitialSpec::Kind::Random: {
            std::vector<ModeSpec> modes;
            if (cfg.init.kind == InitialSpec::Kind::Modes) {
                modes = cfg.init.modes;
            } else {
                std::mt19937_64 rng(cfg.seed);
                for (int n = cfg.init.random_lo; n <= cfg.init.random_hi; ++n) {
                    modes.push_back({n, false, symmetric_uniform(rng)});
                    modes.push_back({n, true, symmetric_uniform(rng)});
                }
            }
            PeriodicField p = mode_sum_field(grid, modes);
            const double nu = h1_norm(p);
            if (!(nu > 0.0)) {
                throw ConfigError("initial data: perturbation has zero H1 norm");
            }
            const double scale = cfg.epsilon / nu;
            for (int j = 0; j < p.size(); ++j) {
                h0[j] = cfg.h_bar + scale * p[j];
            }
            break;
        }
    }

    if (!(h0.min() > 0.0)) {
        throw ConfigError("initial data is not strictly positive (min = " +
                          std::to_string(h0.min()) + ")");
    }
    return h0;
}

TrajectoryReport run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    TrajectoryReport report;
    report.config = cfg;
    report.beta_table = beta_iteration(cfg.alpha, 10);

    const ModelParams params{cfg.alpha, cfg.sigma};
    SimState state(build_initial_data(cfg));
    state.dt = cfg.controller.dt_init;

    // D_accum: trapezoid on J over every accepted step.
    double d_accum = 0.0;
    double j_prev = dissipation_J(state.h, params);
    double t_prev = state.t;

    auto push_record = [&](const SimState& s) {
        DiagnosticsRecord rec;
        rec.t = s.t;
        rec.mass = mass(s.h);
        rec.E = s.energy;
        rec.e = energy_e(s.h);
        rec.J = (s.t == t_prev) ? j_prev : dissipation_J(s.h, params);
        rec.D_accum = d_accum;
        const Spectrum spec = s.h.spectrum();
        rec.h_1 = spec.coefficient(1);
        rec.h_m1 = std::conj(rec.h_1);
        rec.phi_h1_norm = h1_norm(phi_remainder(s.h));
        rec.h_min = s.h.min();
        rec.h_max = s.h.max();
        report.records.push_back(rec);
    };

    Observer obs;
    obs.output_interval = cfg.output_interval;
    obs.on_accepted_step = [&](const SimState& s) {
        const double j_here = dissipation_J(s.h, params);
        d_accum += 0.5 * (j_prev + j_here) * (s.t - t_prev);
        j_prev = j_here;
        t_prev = s.t;
    };
    obs.on_sample = [&](const SimState& s) {
        push_record(s);
        if (cfg.snapshots == SnapshotPolicy::Dyadic &&
            dyadic_keep(s.t, cfg.output_interval)) {
            report.snapshots.emplace_back(s.t, s.h);
        }
    };

    report.status = RunStatus::Completed;
    try {
        advance(state, cfg.t_end, params, cfg.controller, obs);
        report.termination_time = state.t;
    } catch (const TouchdownError& err) {
        report.status = RunStatus::Touchdown;
        report.termination_time = err.time();
    } catch (const StiffnessError& err) {
        report.status = RunStatus::Stiffness;
        report.termination_time = err.time();
    }
    if (report.status != RunStatus::Completed &&
        (report.records.empty() || report.records.back().t < state.t)) {
        push_record(state);  // final partial-state record
    }

    report.accepted_steps = state.accepted;
    report.rejected_steps = state.rejected;
    report.max_guard_excess = state.max_guard_excess;

    const double fit_lo = cfg.fit_t_lo.value_or(cfg.t_end / 100.0);
    const double fit_hi = cfg.fit_t_hi.value_or(cfg.t_end);
    std::vector<std::pair<double, double>> e_series, phi_series;
    for (const auto& rec : report.records) {
        e_series.emplace_back(rec.t, rec.E);
        phi_series.emplace_back(rec.t, rec.phi_h1_norm);
    }
    try {
        report.fit_E = fit_decay_exponent(e_series, fit_lo, fit_hi);
    } catch (const FitError&) {
    }
    try {
        report.fit_phi = fit_decay_exponent(phi_series, fit_lo, fit_hi);
    } catch (const FitError&) {
    }
    report.envelope = fit_lambda_envelope(report.records, cfg.epsilon, cfg.alpha);
    if (cfg.epsilon < 1.0) {  // the epsilon^{1-alpha} budget needs epsilon in (0,1)
        try {
            report.dyadic_budget = dyadic_fourier_budget(report.records, cfg.epsilon, cfg.alpha);
        } catch (const CoverageError&) {
        }
    }
    if (report.snapshots.size() >= 2 && report.termination_time >= 2.0) {
        for (double t_bar = std::pow(2.0, std::floor(std::log2(report.termination_time)));
             t_bar >= 1.0; t_bar /= 2.0) {
            try {
                report.d3_budget_alpha =
                    third_derivative_budget(report.snapshots, t_bar, cfg.alpha);
                report.d3_budget_alpha_plus =
                    third_derivative_budget(report.snapshots, t_bar, cfg.alpha + 1.0);
                report.d3_t_bar = t_bar;
                break;
            } catch (const CoverageError&) {
            }
        }
    }
    report.xi = xi_limit(report.records);
    report.violation_time = positivity_window(report.records, cfg.h_bar);
    return report;
}

std::vector<TrajectoryReport> sweep(const std::vector<ScenarioConfig>& configs) {
    for (const auto& cfg : configs) cfg.validate();

    std::vector<TrajectoryReport> reports(configs.size());
    std::vector<std::exception_ptr> failures(configs.size());
    std::atomic<size_t> next{0};
    const int workers =
        std::min<int>(max_workers(), static_cast<int>(configs.size()));

    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            try {
                reports[i] = run_scenario(configs[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return reports;
}

}  // namespace thinfilm
