#include <cmath>
#include <vector>

#include "doctest.h"
#include "thinfilm/diagnostics.hpp"
#include "thinfilm/integrator.hpp"

using namespace thinfilm;

namespace {

PeriodicField axpy(const PeriodicField& h, double a, const PeriodicField& k) {
    std::vector<double> v(h.values());
    for (int j = 0; j < h.size(); ++j) v[static_cast<size_t>(j)] += a * k[j];
    return PeriodicField(h.grid_ptr(), std::move(v));
}

// Classical RK4 on dh/dt = rhs(h); the independent reference for consistency
// checks of the semi-implicit stepper.
PeriodicField rk4(PeriodicField h, double t_end, int steps, const ModelParams& p) {
    const double dt = t_end / steps;
    for (int s = 0; s < steps; ++s) {
        const PeriodicField k1 = rhs(h, p);
        const PeriodicField k2 = rhs(axpy(h, 0.5 * dt, k1), p);
        const PeriodicField k3 = rhs(axpy(h, 0.5 * dt, k2), p);
        const PeriodicField k4 = rhs(axpy(h, dt, k3), p);
        std::vector<double> v(h.values());
        for (int j = 0; j < h.size(); ++j) {
            v[static_cast<size_t>(j)] +=
                dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        h = PeriodicField(h.grid_ptr(), std::move(v));
    }
    return h;
}

double max_diff(const PeriodicField& a, const PeriodicField& b) {
    double m = 0.0;
    for (int j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

}  // namespace

TEST_CASE("controller validation") {
    StepController ctrl;
    CHECK_NOTHROW(ctrl.validate());
    ctrl.rel_tol = 0.0;
    CHECK_THROWS_AS(ctrl.validate(), ConfigError);
    ctrl = StepController{};
    ctrl.dt_min = 2.0;  // exceeds dt_max
    CHECK_THROWS_AS(ctrl.validate(), ConfigError);
    ctrl = StepController{};
    ctrl.safety = 1.5;
    CHECK_THROWS_AS(ctrl.validate(), ConfigError);
}

TEST_CASE("steady states are exact fixed points of imex_step and step") {
    auto grid = make_grid(128);
    auto h0 = steady_state(SteadyStateParams{1.0, 0.2, -0.1}, grid);
    const ModelParams p{2.0, 1e-3};
    auto h1 = imex_step(h0, 0.5, p, 1.0);
    CHECK(max_diff(h0, h1) < 1e-12);

    SimState state(h0);
    CHECK(state.energy == doctest::Approx(0.0).epsilon(1e-14));
    StepController ctrl;
    step(state, p, ctrl);
    CHECK(state.accepted == 1);
    CHECK(state.rejected == 0);
    CHECK(max_diff(state.h, h0) < 1e-12);
    CHECK(state.energy <= state.energy_floor);
}

TEST_CASE("the mean is conserved to roundoff across accepted steps") {
    auto grid = make_grid(64);
    auto h0 = sample(grid, [](double th) { return 1.0 + 0.2 * std::cos(2.0 * th); });
    const ModelParams p{2.0, 1e-3};
    SimState state(h0);
    StepController ctrl;
    const double m0 = fourier_coefficient(state.h, 0).real();
    for (int i = 0; i < 25; ++i) step(state, p, ctrl);
    const double m1 = fourier_coefficient(state.h, 0).real();
    CHECK(std::abs(m1 - m0) < 1e-14 * std::abs(m0));
    CHECK(state.accepted == 25);
}

TEST_CASE("imex_step is first-order consistent against an RK4 reference") {
    auto grid = make_grid(32);
    auto h0 = sample(grid, [](double th) { return 1.0 + 0.1 * std::cos(2.0 * th); });
    const ModelParams p{2.0, 0.1};
    const double T = 1e-3;
    const PeriodicField ref = rk4(h0, T, 1000, p);
    const double a = p.alpha * linear_stabilizer(h0, p);

    auto integrate_imex = [&](int steps) {
        PeriodicField h = h0;
        const double dt = T / steps;
        for (int s = 0; s < steps; ++s) h = imex_step(h, dt, p, a);
        return max_diff(h, ref);
    };
    const double err_coarse = integrate_imex(10);
    const double err_fine = integrate_imex(20);
    CHECK(err_coarse > 0.0);
    const double ratio = err_coarse / err_fine;
    CHECK(ratio > 1.5);
    CHECK(ratio < 3.0);
}

TEST_CASE("one accepted adaptive step tracks the RK4 reference at rel_tol") {
    auto grid = make_grid(32);
    auto h0 = sample(grid, [](double th) { return 1.0 + 0.1 * std::cos(2.0 * th); });
    const ModelParams p{2.0, 0.1};
    SimState state(h0);
    StepController ctrl;
    ctrl.rel_tol = 1e-7;
    step(state, p, ctrl);
    REQUIRE(state.accepted == 1);
    const PeriodicField ref = rk4(h0, state.t, 400, p);
    CHECK(max_diff(state.h, ref) < 1e-6);
}

TEST_CASE("step honors dt_cap") {
    auto grid = make_grid(32);
    auto h0 = sample(grid, [](double th) { return 1.0 + 0.1 * std::cos(2.0 * th); });
    SimState state(h0);
    StepController ctrl;
    step(state, ModelParams{2.0, 0.1}, ctrl, 1e-5);
    CHECK(state.t <= 1e-5 * (1.0 + 1e-12));
    CHECK(state.t > 0.0);
}

TEST_CASE("an unattainable tolerance at dt_min raises StiffnessError") {
    auto grid = make_grid(32);
    auto h0 = sample(grid, [](double th) { return 1.0 + 0.2 * std::cos(2.0 * th); });
    const ModelParams p{2.0, 0.1};
    SimState state(h0);
    StepController ctrl;
    ctrl.rel_tol = 1e-18;
    ctrl.dt_min = 1e-3;
    ctrl.dt_init = 1e-3;
    try {
        step(state, p, ctrl);
        FAIL("expected StiffnessError");
    } catch (const StiffnessError& err) {
        CHECK(err.time() == 0.0);
        CHECK(state.rejected >= 1);
        CHECK(state.accepted == 0);
    }
}

TEST_CASE("a violated energy guard at dt_min raises StiffnessError") {
    auto grid = make_grid(32);
    auto h0 = sample(grid, [](double th) { return 1.0 + 0.2 * std::cos(2.0 * th); });
    SimState state(h0);
    // Pretend the run is already at zero energy with no roundoff allowance:
    // any accepted step would then raise E and must be vetoed by the guard.
    state.energy = 0.0;
    state.energy_ref = 0.0;
    state.energy_floor = 0.0;
    StepController ctrl;
    ctrl.dt_min = 1e-3;
    ctrl.dt_init = 1e-3;
    CHECK_THROWS_AS(step(state, ModelParams{2.0, 0.1}, ctrl), StiffnessError);
    CHECK(state.accepted == 0);
}

TEST_CASE("advance emits the sample comb with snapped times") {
    auto grid = make_grid(64);
    auto h0 = steady_state(SteadyStateParams{1.0, 0.1, 0.0}, grid);
    SimState state(h0);
    StepController ctrl;
    std::vector<double> times;
    Observer obs;
    obs.output_interval = 0.25;
    obs.on_sample = [&](const SimState& s) { times.push_back(s.t); };
    advance(state, 1.0, ModelParams{2.0, 1e-3}, ctrl, obs);
    REQUIRE(times.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(times[static_cast<size_t>(i)] ==
              doctest::Approx(0.25 * i).epsilon(1e-12));
    }
    CHECK(state.t == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("advance handles t_end not divisible by the interval") {
    auto grid = make_grid(64);
    auto h0 = steady_state(SteadyStateParams{1.0, 0.1, 0.0}, grid);
    SimState state(h0);
    StepController ctrl;
    std::vector<double> times;
    Observer obs;
    obs.output_interval = 0.3;
    obs.on_sample = [&](const SimState& s) { times.push_back(s.t); };
    advance(state, 1.0, ModelParams{2.0, 1e-3}, ctrl, obs);
    REQUIRE(times.size() == 5);  // 0, 0.3, 0.6, 0.9, 1.0
    CHECK(times.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(times[3] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("advance validates its arguments") {
    auto grid = make_grid(64);
    SimState state(steady_state(SteadyStateParams{1.0, 0.0, 0.0}, grid));
    StepController ctrl;
    Observer obs;
    CHECK_THROWS_AS(advance(state, 0.0, ModelParams{2.0, 1e-3}, ctrl, obs),
                    ConfigError);
    obs.output_interval = -1.0;
    CHECK_THROWS_AS(advance(state, 1.0, ModelParams{2.0, 1e-3}, ctrl, obs),
                    ConfigError);
}

TEST_CASE("identical runs produce identical trajectories") {
    auto grid = make_grid(64);
    auto h0 = sample(grid, [](double th) { return 1.0 + 0.15 * std::cos(3.0 * th); });
    const ModelParams p{2.5, 1e-3};
    StepController ctrl;
    SimState a(h0), b(h0);
    for (int i = 0; i < 10; ++i) {
        step(a, p, ctrl);
        step(b, p, ctrl);
    }
    CHECK(a.t == b.t);
    CHECK(a.accepted == b.accepted);
    for (int j = 0; j < a.h.size(); ++j) {
        CHECK(a.h[j] == b.h[j]);  // bitwise
    }
}

TEST_CASE("accepted steps never breach the energy guard budget") {
    auto grid = make_grid(64);
    auto h0 = sample(grid, [](double th) { return 1.0 + 0.2 * std::cos(2.0 * th); });
    SimState state(h0);
    StepController ctrl;
    const ModelParams p{2.0, 1e-3};
    for (int i = 0; i < 50; ++i) step(state, p, ctrl);
    CHECK(state.max_guard_excess <= state.energy_floor);
}
