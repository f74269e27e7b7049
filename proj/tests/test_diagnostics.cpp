#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "thinfilm/diagnostics.hpp"

using namespace thinfilm;
using std::numbers::pi;

namespace {

PeriodicField random_bandlimited(const GridPtr& grid, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> values(static_cast<size_t>(grid->size()));
    for (auto& v : values) v = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
    return dealias(PeriodicField(grid, std::move(values)));
}

// Composite Simpson rule on [0, 2π] — the quadrature-independent oracle.
double simpson(const std::function<double(double)>& f, int panels) {
    const double h = 2.0 * pi / panels;
    double acc = f(0.0) + f(2.0 * pi);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

DiagnosticsRecord record_at(double t, std::complex<double> h1) {
    DiagnosticsRecord r;
    r.t = t;
    r.h_1 = h1;
    r.h_m1 = std::conj(h1);
    return r;
}

}  // namespace

TEST_CASE("mass is the integral of the film") {
    auto grid = make_grid(64);
    CHECK(mass(steady_state(SteadyStateParams{1.0, 0.2, 0.1}, grid)) ==
          doctest::Approx(2.0 * pi).epsilon(1e-14));
    CHECK(mass(sample(grid, [](double) { return 2.5; })) ==
          doctest::Approx(5.0 * pi).epsilon(1e-14));
}

TEST_CASE("energy oracles: steady films carry zero E, cos 2θ carries 3π/2") {
    auto grid = make_grid(64);
    auto steady = steady_state(SteadyStateParams{1.0, 0.3, -0.2}, grid);
    CHECK(std::abs(energy_E(steady)) < 1e-13);
    CHECK(energy_e(steady) == doctest::Approx(-pi).epsilon(1e-12));  // -π h̄²

    auto c2 = sample(grid, [](double th) { return std::cos(2.0 * th); });
    CHECK(energy_E(c2) == doctest::Approx(1.5 * pi).epsilon(1e-13));
    CHECK(energy_e(c2) == doctest::Approx(1.5 * pi).epsilon(1e-13));
}

TEST_CASE("E = e + π·mean² and E ≥ 0 on random band-limited fields") {
    auto grid = make_grid(96);
    for (unsigned seed = 1; seed <= 20; ++seed) {
        auto h = random_bandlimited(grid, seed);
        const double mean = mass(h) / (2.0 * pi);
        CHECK(energy_E(h) ==
              doctest::Approx(energy_e(h) + pi * mean * mean).epsilon(1e-10));
        CHECK(energy_E(h) >= 0.0);
    }
}

TEST_CASE("dissipation oracle against an independent Simpson quadrature") {
    auto grid = make_grid(512);
    auto h = sample(grid, [](double th) { return 1.0 + 0.1 * std::cos(2.0 * th); });
    const ModelParams p{2.0, 0.0};
    const double expected = simpson(
        [](double th) {
            const double hv = 1.0 + 0.1 * std::cos(2.0 * th);
            const double w = 0.6 * std::sin(2.0 * th);
            return std::pow(hv, 4) * std::abs(w) * w * w;
        },
        20000);
    CHECK(dissipation_J(h, p) == doctest::Approx(expected).epsilon(1e-8));
    // closed form of the same integral
    const double closed = 0.216 * (8.0 / 3.0 + 0.06 * 8.0 / 15.0 + 1e-4 * 8.0 / 35.0);
    CHECK(expected == doctest::Approx(closed).epsilon(1e-8));

    auto steady = steady_state(SteadyStateParams{1.0, 0.2, 0.0}, grid);
    CHECK(dissipation_J(steady, ModelParams{2.0, 1e-3}) == 0.0);

    auto bad = sample(grid, [](double th) { return std::cos(th); });
    CHECK_THROWS_AS(dissipation_J(bad, p), DegeneracyError);
}

TEST_CASE("energy identity residual is zero for exact bookkeeping") {
    std::vector<DiagnosticsRecord> traj;
    for (int k = 0; k <= 10; ++k) {
        DiagnosticsRecord r;
        r.t = k;
        r.E = 5.0 - 0.3 * k;
        r.D_accum = 0.3 * k;
        traj.push_back(r);
    }
    auto res = energy_identity_residual(traj);
    REQUIRE(res.size() == 11);
    for (double v : res) CHECK(v < 1e-14);
    traj[7].D_accum += 1e-3;
    CHECK(energy_identity_residual(traj)[7] == doctest::Approx(1e-3).epsilon(1e-10));
    CHECK_THROWS_AS(energy_identity_residual({}), CoverageError);
}

TEST_CASE("phi_remainder strips exactly the modes 0 and ±1") {
    auto grid = make_grid(64);
    auto h = sample(grid, [](double th) {
        return 2.0 + 0.4 * std::cos(th) - 0.3 * std::sin(th) + 0.25 * std::cos(2.0 * th);
    });
    auto phi = phi_remainder(h);
    CHECK(std::abs(fourier_coefficient(phi, 0)) < 1e-14);
    CHECK(std::abs(fourier_coefficient(phi, 1)) < 1e-14);
    CHECK(std::abs(fourier_coefficient(phi, 2) - std::complex<double>(0.125, 0.0)) <
          1e-14);
    // ‖a·cos 2θ‖_{H¹} = a·sqrt(5π)
    CHECK(h1_norm(phi) == doctest::Approx(0.25 * std::sqrt(5.0 * pi)).epsilon(1e-13));
}

TEST_CASE("h1_norm includes the mean and matches hand values") {
    auto grid = make_grid(64);
    CHECK(h1_norm(sample(grid, [](double) { return 3.0; })) ==
          doctest::Approx(3.0 * std::sqrt(2.0 * pi)).epsilon(1e-14));
    CHECK(h1_norm(sample(grid, [](double th) { return std::cos(th); })) ==
          doctest::Approx(std::sqrt(2.0 * pi)).epsilon(1e-14));
}

TEST_CASE("the H¹-energy inequality ‖φ‖² ≤ 4E holds with the expected values") {
    auto grid = make_grid(64);
    auto c2 = sample(grid, [](double th) { return std::cos(2.0 * th); });
    auto chk = check_E_phi_inequality(c2);
    CHECK(chk.lhs == doctest::Approx(5.0 * pi).epsilon(1e-13));
    CHECK(chk.rhs == doctest::Approx(6.0 * pi).epsilon(1e-13));
    CHECK(chk.holds);
    for (unsigned seed = 100; seed < 150; ++seed) {
        CHECK(check_E_phi_inequality(random_bandlimited(grid, seed)).holds);
    }
}

TEST_CASE("lambda envelope closed form") {
    CHECK(lambda_envelope(1.0, 1.0, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(lambda_envelope(0.0, 0.3, 5.0, 3.0) == doctest::Approx(0.3).epsilon(1e-15));
    // α=3: Λ = ε/(1+Cε²t)^{1/2}
    CHECK(lambda_envelope(4.0, 0.5, 2.0, 3.0) ==
          doctest::Approx(0.5 / std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("fit_decay_exponent recovers a synthetic power law exactly") {
    std::vector<std::pair<double, double>> series;
    for (int k = 0; k < 60; ++k) {
        const double t = std::pow(10.0, k / 29.5);  // log-spaced in [1, ~100]
        series.emplace_back(t, 7.0 * std::pow(t, -2.0));
    }
    auto fit = fit_decay_exponent(series, 1.0, 200.0);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.n_points == 60);

    CHECK_THROWS_AS(fit_decay_exponent(series, 500.0, 600.0), FitError);
    std::vector<std::pair<double, double>> flat(20, {3.0, 1.0});
    CHECK_THROWS_AS(fit_decay_exponent(flat, 1.0, 10.0), FitError);
}

TEST_CASE("beta iteration: α=2 hits 10/9, 4/3 and clamps at step 2") {
    auto table = beta_iteration(2.0, 10);
    REQUIRE(table.betas.size() == 11);
    CHECK(table.betas[0] == 0.0);
    CHECK(table.betas[1] == doctest::Approx(10.0 / 9.0).epsilon(1e-15));
    CHECK(table.betas[2] == table.fixed_point);  // exact clamp
    CHECK(table.betas[10] == table.fixed_point);
    CHECK(table.fixed_point == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(table.steps_to_fixed_point == 2);
    CHECK(table.linear_limit == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(beta_iteration(1.0, 5), ConfigError);
}

TEST_CASE("beta iteration is non-decreasing and reaches 2α/(α+1) within 10 steps") {
    for (double alpha : {1.5, 2.0, 3.0, 5.0}) {
        auto table = beta_iteration(alpha, 10);
        for (size_t i = 1; i < table.betas.size(); ++i) {
            CHECK(table.betas[i] >= table.betas[i - 1]);
        }
        CHECK(table.steps_to_fixed_point >= 1);
        CHECK(table.steps_to_fixed_point <= 10);
        CHECK(table.fixed_point ==
              doctest::Approx(2.0 * alpha / (alpha + 1.0)).epsilon(1e-15));
    }
}

TEST_CASE("min-free beta recursion matches its closed form to 1e-12") {
    for (double alpha : {1.5, 2.0, 3.0, 5.0}) {
        auto seq = beta_iteration_min_free(alpha, 50);
        REQUIRE(seq.size() == 51);
        for (int n = 0; n <= 50; ++n) {
            CHECK(std::abs(seq[static_cast<size_t>(n)] -
                           beta_min_free_closed_form(alpha, n)) < 1e-12);
        }
        // the limit is α(α²+1)/(α+1)
        const double limit = alpha * (alpha * alpha + 1.0) / (alpha + 1.0);
        CHECK(beta_min_free_closed_form(alpha, 400) ==
              doctest::Approx(limit).epsilon(1e-12));
    }
}

TEST_CASE("dyadic budget: windows, totals, and bound on a log drift") {
    const double eps = 0.1, alpha = 2.0;  // L = ε^{1-α} = 10
    std::vector<DiagnosticsRecord> traj;
    for (int k = 0; k <= 20050; ++k) {  // runs just past t = 2L = 20
        const double t = k * 0.001;
        traj.push_back(record_at(t, {eps * std::log1p(t), 0.0}));
    }
    auto budget = dyadic_fourier_budget(traj, eps, alpha);
    REQUIRE(budget.windows.size() == 5);
    const double expected_lo[5] = {0.625, 1.25, 2.5, 5.0, 10.0};
    for (int i = 0; i < 5; ++i) {
        const auto& w = budget.windows[static_cast<size_t>(i)];
        CHECK(w.t_lo == doctest::Approx(expected_lo[i]).epsilon(1e-12));
        CHECK(w.t_hi == doctest::Approx(2.0 * expected_lo[i]).epsilon(1e-12));
        const double expected_var =
            eps * std::log((1.0 + w.t_hi) / (1.0 + w.t_lo));
        CHECK(w.variation == doctest::Approx(expected_var).epsilon(1e-2));
        CHECK(w.n_samples > 100);
    }
    CHECK(budget.total ==
          doctest::Approx(eps * std::log(21.0 / 1.625)).epsilon(1e-2));
    CHECK(budget.bound == doctest::Approx(eps * (1.0 + std::log(10.0))).epsilon(1e-14));
    CHECK(budget.ratio == doctest::Approx(budget.total / budget.bound).epsilon(1e-12));
}

TEST_CASE("dyadic budget error paths") {
    const double eps = 0.1, alpha = 2.0;
    std::vector<DiagnosticsRecord> shortTraj;
    for (double t = 0.0; t <= 19.0; t += 0.5) shortTraj.push_back(record_at(t, {0.0, 0.0}));
    CHECK_THROWS_AS(dyadic_fourier_budget(shortTraj, eps, alpha), CoverageError);
    CHECK_THROWS_AS(dyadic_fourier_budget({}, eps, alpha), CoverageError);
    std::vector<DiagnosticsRecord> ok;
    for (double t = 0.0; t <= 21.0; t += 0.5) ok.push_back(record_at(t, {0.0, 0.0}));
    CHECK_THROWS_AS(dyadic_fourier_budget(ok, eps, 1.0), ConfigError);
    CHECK_THROWS_AS(dyadic_fourier_budget(ok, 1.5, alpha), ConfigError);
    auto zero = dyadic_fourier_budget(ok, eps, alpha);
    CHECK(zero.total == 0.0);  // steady trajectory: h_1 constant
}

TEST_CASE("third-derivative budget matches the separable closed form") {
    auto grid = make_grid(64);
    std::vector<std::pair<double, PeriodicField>> snaps;
    for (int k = 0; k <= 130; ++k) {
        const double t = 4.0 + 0.05 * k;
        const double a = 1.0 / t;
        snaps.emplace_back(
            t, sample(grid, [a](double th) { return 1.0 + a * std::cos(2.0 * th); }));
    }
    // φ = a(t)cos 2θ, ∂³φ = 8 a sin 2θ; ∮|8a sin 2θ|² = 64πa².
    // ∫_5^10 64π t^{-2} dt = 6.4π
    const double b2 = third_derivative_budget(snaps, 10.0, 2.0);
    CHECK(b2 == doctest::Approx(6.4 * pi).epsilon(1e-3));
    // p = 3: ∮|8a sin 2θ|³ = 512 a³·(8/3); ∫_5^10 t^{-3}dt = 3/200
    const double b3 = third_derivative_budget(snaps, 10.0, 3.0);
    CHECK(b3 == doctest::Approx(512.0 * 8.0 / 3.0 * 3.0 / 200.0).epsilon(1e-3));

    CHECK_THROWS_AS(third_derivative_budget(snaps, 100.0, 2.0), CoverageError);
    CHECK_THROWS_AS(third_derivative_budget({}, 10.0, 2.0), CoverageError);
}

TEST_CASE("positivity_window reports the first band violation") {
    std::vector<DiagnosticsRecord> traj;
    for (int k = 0; k <= 10; ++k) {
        DiagnosticsRecord r;
        r.t = k;
        r.h_min = (k >= 7) ? 0.4 : 0.8;  // crosses h_bar/2 = 0.5 at t = 7
        r.h_max = 1.2;
        traj.push_back(r);
    }
    auto hit = positivity_window(traj, 1.0);
    REQUIRE(hit.has_value());
    CHECK(*hit == doctest::Approx(7.0));
    for (auto& r : traj) r.h_min = 0.8;
    CHECK(!positivity_window(traj, 1.0).has_value());
    traj[3].h_max = 2.5;  // crosses 2 h_bar
    auto hi = positivity_window(traj, 1.0);
    REQUIRE(hi.has_value());
    CHECK(*hi == doctest::Approx(3.0));
}

TEST_CASE("xi_limit averages the tail and flags convergence") {
    std::vector<DiagnosticsRecord> traj;
    for (double t = 0.0; t <= 100.0; t += 1.0) {
        traj.push_back(record_at(t, {0.25, -0.1}));
    }
    auto xi = xi_limit(traj);
    CHECK(xi.xi_1.real() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(xi.xi_1.imag() == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(std::abs(xi.xi_m1 - std::conj(xi.xi_1)) < 1e-14);
    CHECK(xi.uncertainty == doctest::Approx(0.0));
    CHECK(xi.converged);

    std::vector<DiagnosticsRecord> drift;
    for (double t = 0.0; t <= 100.0; t += 1.0) {
        drift.push_back(record_at(t, {0.01 * t, 0.0}));
    }
    auto xd = xi_limit(drift);
    CHECK(!xd.converged);
    CHECK(xd.uncertainty == doctest::Approx(0.5).epsilon(1e-12));  // TV over [50,100]
}

TEST_CASE("fit_lambda_envelope recovers the exact envelope constant") {
    const double eps = 0.05, alpha = 2.0, C0 = 0.7;
    std::vector<DiagnosticsRecord> traj;
    for (double t = 0.0; t <= 50.0; t += 0.5) {
        DiagnosticsRecord r;
        r.t = t;
        const double lam = lambda_envelope(t, eps, C0, alpha);
        r.E = lam * lam;
        traj.push_back(r);
    }
    auto env = fit_lambda_envelope(traj, eps, alpha);
    CHECK(env.C == doctest::Approx(C0).epsilon(1e-10));
    CHECK(env.dominates);
    CHECK(env.max_ratio == doctest::Approx(1.0).epsilon(1e-9));

    // Faster-than-envelope decay still yields a dominating fit.
    for (auto& r : traj) r.E = eps * eps * std::exp(-2.0 * r.t);
    auto env2 = fit_lambda_envelope(traj, eps, alpha);
    CHECK(env2.dominates);
    CHECK(env2.C > 0.0);
}
