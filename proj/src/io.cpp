#include "thinfilm/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace thinfilm {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot files are little-endian; add byte swapping for this host");

const char* kCsvHeader = "t,mass,E,e,J,D_accum,re_h1,im_h1,phi_h1,h_min,h_max";

std::string g17(double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_field(const std::string& s) {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw IoError("records.csv: bad numeric field '" + s + "'");
    return v;
}

nlohmann::ordered_json fit_json(const DecayFit& fit) {
    return {{"t_lo", fit.t_lo},       {"t_hi", fit.t_hi},
            {"slope", fit.slope},     {"intercept", fit.intercept},
            {"r_squared", fit.r_squared}, {"n_points", fit.n_points}};
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
    if (records.empty()) throw IoError("refusing to write empty records.csv");
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << g17(r.t) << ',' << g17(r.mass) << ',' << g17(r.E) << ',' << g17(r.e)
            << ',' << g17(r.J) << ',' << g17(r.D_accum) << ',' << g17(r.h_1.real())
            << ',' << g17(r.h_1.imag()) << ',' << g17(r.phi_h1_norm) << ','
            << g17(r.h_min) << ',' << g17(r.h_max) << '\n';
    }
}

std::vector<DiagnosticsRecord> read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("records.csv: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw IoError("records.csv: unexpected header '" + line + "'");
    std::vector<DiagnosticsRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 11) {
            throw IoError("records.csv: expected 11 fields, got " +
                          std::to_string(fields.size()));
        }
        DiagnosticsRecord r;
        r.t = parse_field(fields[0]);
        r.mass = parse_field(fields[1]);
        r.E = parse_field(fields[2]);
        r.e = parse_field(fields[3]);
        r.J = parse_field(fields[4]);
        r.D_accum = parse_field(fields[5]);
        r.h_1 = {parse_field(fields[6]), parse_field(fields[7])};
        r.h_m1 = std::conj(r.h_1);
        r.phi_h1_norm = parse_field(fields[8]);
        r.h_min = parse_field(fields[9]);
        r.h_max = parse_field(fields[10]);
        records.push_back(r);
    }
    return records;
}

void write_field_f64(const std::string& path, const std::vector<double>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const uint64_t count = values.size();
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!out) throw IoError("short write to '" + path + "'");
}

std::vector<double> read_field_f64(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!in || count > (1ull << 32)) throw IoError("bad length prefix in '" + path + "'");
    std::vector<double> values(count);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw IoError("truncated snapshot '" + path + "'");
    return values;
}

std::string snapshot_filename(double t) {
    char buf[48];
    snprintf(buf, sizeof buf, "t_%.9g.f64", t);
    return buf;
}

nlohmann::ordered_json report_to_json(const TrajectoryReport& report) {
    nlohmann::ordered_json j;
    j["config"] = scenario_to_keys(report.config);
    switch (report.status) {
        case RunStatus::Completed: j["status"] = "completed"; break;
        case RunStatus::Touchdown: j["status"] = "touchdown"; break;
        case RunStatus::Stiffness: j["status"] = "stiffness"; break;
    }
    j["termination_time"] = report.termination_time;
    j["steps"] = {{"accepted", report.accepted_steps}, {"rejected", report.rejected_steps}};
    j["max_guard_excess"] = report.max_guard_excess;

    j["fits"] = nlohmann::ordered_json::object();
    j["fits"]["E"] = report.fit_E ? fit_json(*report.fit_E) : nlohmann::ordered_json();
    j["fits"]["phi_h1"] =
        report.fit_phi ? fit_json(*report.fit_phi) : nlohmann::ordered_json();

    if (report.envelope) {
        j["envelope"] = {{"epsilon", report.envelope->epsilon},
                         {"alpha", report.envelope->alpha},
                         {"C", report.envelope->C},
                         {"dominates", report.envelope->dominates},
                         {"max_ratio", report.envelope->max_ratio}};
    } else {
        j["envelope"] = nullptr;
    }

    j["beta_table"] = {{"alpha", report.beta_table.alpha},
                       {"betas", report.beta_table.betas},
                       {"steps_to_fixed_point", report.beta_table.steps_to_fixed_point},
                       {"fixed_point", report.beta_table.fixed_point},
                       {"linear_limit", report.beta_table.linear_limit}};

    if (report.dyadic_budget) {
        nlohmann::ordered_json windows = nlohmann::ordered_json::array();
        for (const auto& w : report.dyadic_budget->windows) {
            windows.push_back({{"t_lo", w.t_lo},
                               {"t_hi", w.t_hi},
                               {"variation", w.variation},
                               {"n_samples", w.n_samples}});
        }
        j["dyadic_budget"] = {{"epsilon", report.dyadic_budget->epsilon},
                              {"alpha", report.dyadic_budget->alpha},
                              {"windows", windows},
                              {"total", report.dyadic_budget->total},
                              {"bound", report.dyadic_budget->bound},
                              {"ratio", report.dyadic_budget->ratio}};
    } else {
        j["dyadic_budget"] = nullptr;
    }

    if (report.d3_t_bar) {
        j["third_derivative_budget"] = {
            {"t_bar", *report.d3_t_bar},
            {"p_alpha", report.d3_budget_alpha ? nlohmann::ordered_json(*report.d3_budget_alpha)
                                               : nlohmann::ordered_json()},
            {"p_alpha_plus_1",
             report.d3_budget_alpha_plus ? nlohmann::ordered_json(*report.d3_budget_alpha_plus)
                                         : nlohmann::ordered_json()}};
    } else {
        j["third_derivative_budget"] = nullptr;
    }

    j["xi"] = {{"re_xi_1", report.xi.xi_1.real()},
               {"im_xi_1", report.xi.xi_1.imag()},
               {"uncertainty", report.xi.uncertainty},
               {"converged", report.xi.converged}};

    j["positivity_violation_time"] =
        report.violation_time ? nlohmann::ordered_json(*report.violation_time)
                              : nlohmann::ordered_json();
    return j;
}

void write_run_outputs(const TrajectoryReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream csv(fs::path(out_dir) / "records.csv", std::ios::binary);
        if (!csv) throw IoError("cannot write records.csv under '" + out_dir + "'");
        write_records_csv(csv, report.records);
    }
    {
        std::ofstream json(fs::path(out_dir) / "report.json", std::ios::binary);
        if (!json) throw IoError("cannot write report.json under '" + out_dir + "'");
        json << report_to_json(report).dump(2) << '\n';
    }
    if (!report.snapshots.empty()) {
        const fs::path fields = fs::path(out_dir) / "fields";
        fs::create_directories(fields);
        for (const auto& [t, field] : report.snapshots) {
            write_field_f64((fields / snapshot_filename(t)).string(), field.values());
        }
    }
}

}  // namespace thinfilm
