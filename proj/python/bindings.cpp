// Python bindings for the thin-film core: grid operations, model kernels,
// diagnostics, the beta iteration, and a one-call scenario runner.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <mutex>

#include "thinfilm/harness.hpp"
#include "thinfilm/io.hpp"

namespace py = pybind11;
using namespace thinfilm;

namespace {

GridPtr cached_grid(int n) {
    static std::mutex mu;
    static std::map<int, GridPtr> cache;
    std::scoped_lock lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = make_grid(n);
    return slot;
}

PeriodicField to_field(const std::vector<double>& values) {
    return PeriodicField(cached_grid(static_cast<int>(values.size())), values);
}

py::dict report_dict(const TrajectoryReport& report) {
    py::dict d;
    const char* status = report.status == RunStatus::Completed    ? "completed"
                         : report.status == RunStatus::Touchdown ? "touchdown"
                                                                  : "stiffness";
    d["status"] = status;
    d["termination_time"] = report.termination_time;
    d["accepted_steps"] = report.accepted_steps;
    d["rejected_steps"] = report.rejected_steps;
    std::vector<double> t, mass_v, E, e, J, D, phi, h_min, h_max;
    for (const auto& r : report.records) {
        t.push_back(r.t);
        mass_v.push_back(r.mass);
        E.push_back(r.E);
        e.push_back(r.e);
        J.push_back(r.J);
        D.push_back(r.D_accum);
        phi.push_back(r.phi_h1_norm);
        h_min.push_back(r.h_min);
        h_max.push_back(r.h_max);
    }
    d["t"] = t;
    d["mass"] = mass_v;
    d["E"] = E;
    d["e"] = e;
    d["J"] = J;
    d["D_accum"] = D;
    d["phi_h1"] = phi;
    d["h_min"] = h_min;
    d["h_max"] = h_max;
    if (report.fit_E) d["fit_E_slope"] = report.fit_E->slope;
    d["config"] = scenario_to_keys(report.config);
    return d;
}

}  // namespace

PYBIND11_MODULE(_thinfilm, m) {
    m.doc() = "pseudospectral thin-film simulator core";

    m.def("nodes", [](int n) {
        auto grid = cached_grid(n);
        std::vector<double> out(static_cast<size_t>(grid->size()));
        for (int j = 0; j < grid->size(); ++j) out[static_cast<size_t>(j)] = grid->node(j);
        return out;
    }, py::arg("n_points"), "grid nodes theta_j = 2 pi j / N");

    m.def("derivative", [](const std::vector<double>& values, int k) {
        return derivative(to_field(values), k).values();
    }, py::arg("values"), py::arg("k"), "k-th spectral derivative, k in 1..4");

    m.def("integrate", [](const std::vector<double>& values) {
        return integrate(to_field(values));
    }, py::arg("values"), "integral over the circle (rectangle rule)");

    m.def("dealias", [](const std::vector<double>& values) {
        return dealias(to_field(values)).values();
    }, py::arg("values"), "zero modes with |n| > N/3");

    m.def("fourier_coefficient", [](const std::vector<double>& values, int n) {
        return fourier_coefficient(to_field(values), n);
    }, py::arg("values"), py::arg("n"));

    m.def("steady_state", [](int n_points, double h_bar, double kappa_m1, double kappa_1) {
        return steady_state(SteadyStateParams{h_bar, kappa_m1, kappa_1},
                            cached_grid(n_points)).values();
    }, py::arg("n_points"), py::arg("h_bar"), py::arg("kappa_m1") = 0.0,
       py::arg("kappa_1") = 0.0, "h = h_bar + kappa_m1 cos + kappa_1 sin");

    m.def("w_field", [](const std::vector<double>& values) {
        return w_field(to_field(values)).values();
    }, py::arg("values"), "w = h_theta + h_thetathetatheta");

    m.def("rhs", [](const std::vector<double>& values, double alpha, double sigma) {
        return rhs(to_field(values), ModelParams{alpha, sigma}).values();
    }, py::arg("values"), py::arg("alpha"), py::arg("sigma") = 0.0,
       "-d_theta [h^{alpha+2} psi_sigma(w)]");

    m.def("mass", [](const std::vector<double>& values) {
        return mass(to_field(values));
    }, py::arg("values"));

    m.def("energy_E", [](const std::vector<double>& values) {
        return energy_E(to_field(values));
    }, py::arg("values"));

    m.def("energy_e", [](const std::vector<double>& values) {
        return energy_e(to_field(values));
    }, py::arg("values"));

    m.def("dissipation_J", [](const std::vector<double>& values, double alpha, double sigma) {
        return dissipation_J(to_field(values), ModelParams{alpha, sigma});
    }, py::arg("values"), py::arg("alpha"), py::arg("sigma") = 0.0);

    m.def("h1_norm", [](const std::vector<double>& values) {
        return h1_norm(to_field(values));
    }, py::arg("values"));

    m.def("beta_table", [](double alpha, int n) {
        const BetaTable t = beta_iteration(alpha, n);
        py::dict d;
        d["alpha"] = t.alpha;
        d["betas"] = t.betas;
        d["steps_to_fixed_point"] = t.steps_to_fixed_point;
        d["fixed_point"] = t.fixed_point;
        d["linear_limit"] = t.linear_limit;
        return d;
    }, py::arg("alpha"), py::arg("n") = 10);

    m.def("run_config", [](const std::string& text) {
        const auto keys = parse_config_text(text);
        return report_dict(run_scenario(scenario_from_keys(keys)));
    }, py::arg("text"), "parse a key=value config and run the scenario");

    m.def("run_config_file", [](const std::string& path) {
        return report_dict(run_scenario(load_scenario(path, {})));
    }, py::arg("path"));

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DegeneracyError>(m, "DegeneracyError", PyExc_ValueError);
}
