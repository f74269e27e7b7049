#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "thinfilm/harness.hpp"

namespace thinfilm {

namespace {

std::string trim(const std::string& s) {
    const auto from = s.find_first_not_of(" \t\r");
    if (from == std::string::npos) return "";
    const auto to = s.find_last_not_of(" \t\r");
    return s.substr(from, to - from + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-integer value '" + value + "'");
    }
}

// "2:cos:1.0,3:sin:0.5"
std::vector<ModeSpec> parse_modes(const std::string& value) {
    std::vector<ModeSpec> modes;
    for (const auto& entry : split(value, ',')) {
        if (entry.empty()) continue;
        const auto parts = split(entry, ':');
        if (parts.size() != 3 || (parts[1] != "cos" && parts[1] != "sin")) {
            throw ConfigError("config: bad mode entry '" + entry +
                              "' (want n:cos:amp or n:sin:amp)");
        }
        ModeSpec m;
        m.n = static_cast<int>(parse_long("init.modes", parts[0]));
        m.is_sin = parts[1] == "sin";
        m.amplitude = parse_double("init.modes", parts[2]);
        modes.push_back(m);
    }
    if (modes.empty()) throw ConfigError("config: init.modes is empty");
    return modes;
}

std::string format_double(double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void ScenarioConfig::validate() const {
    if (!(alpha > 1.0)) throw ConfigError("config: alpha must exceed 1");
    if (!(sigma >= 0.0)) throw ConfigError("config: sigma must be non-negative");
    if (!(epsilon > 0.0)) throw ConfigError("config: epsilon must be positive");
    if (!(h_bar > 0.0)) throw ConfigError("config: h_bar must be positive");
    if (!(t_end > 0.0)) throw ConfigError("config: t_end must be positive");
    if (!(output_interval > 0.0)) throw ConfigError("config: output_interval must be positive");
    controller.validate();
    if (n_points < 16 || n_points % 2 != 0) {
        throw ConfigError("config: n_points must be even and at least 16");
    }
    if (init.kind == InitialSpec::Kind::Modes) {
        for (const auto& m : init.modes) {
            if (m.n < 1 || m.n >= n_points / 2) {
                throw ConfigError("config: mode index " + std::to_string(m.n) +
                                  " outside 1..n_points/2-1");
            }
        }
    }
    if (init.kind == InitialSpec::Kind::Random &&
        (init.random_lo < 1 || init.random_hi < init.random_lo ||
         init.random_hi >= n_points / 2)) {
        throw ConfigError("config: init.random range outside 1..n_points/2-1");
    }
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> keys;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not a key=value pair: '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key");
        }
        if (!keys.emplace(key, value).second) {
            throw ConfigError("config: duplicate key '" + key + "'");
        }
    }
    return keys;
}

ScenarioConfig scenario_from_keys(const std::map<std::string, std::string>& keys) {
    ScenarioConfig cfg;
    int init_kinds = 0;
    for (const auto& [key, value] : keys) {
        if (key == "n_points") {
            cfg.n_points = static_cast<int>(parse_long(key, value));
        } else if (key == "alpha") {
            cfg.alpha = parse_double(key, value);
        } else if (key == "sigma") {
            cfg.sigma = parse_double(key, value);
        } else if (key == "epsilon") {
            cfg.epsilon = parse_double(key, value);
        } else if (key == "h_bar") {
            cfg.h_bar = parse_double(key, value);
        } else if (key == "t_end") {
            cfg.t_end = parse_double(key, value);
        } else if (key == "output_interval") {
            cfg.output_interval = parse_double(key, value);
        } else if (key == "rel_tol") {
            cfg.controller.rel_tol = parse_double(key, value);
        } else if (key == "dt_min") {
            cfg.controller.dt_min = parse_double(key, value);
        } else if (key == "dt_max") {
            cfg.controller.dt_max = parse_double(key, value);
        } else if (key == "dt_init") {
            cfg.controller.dt_init = parse_double(key, value);
        } else if (key == "safety") {
            cfg.controller.safety = parse_double(key, value);
        } else if (key == "energy_guard_tol") {
            cfg.controller.energy_guard_tol = parse_double(key, value);
        } else if (key == "seed") {
            cfg.seed = static_cast<unsigned long>(parse_long(key, value));
        } else if (key == "snapshots") {
            if (value == "none") {
                cfg.snapshots = SnapshotPolicy::None;
            } else if (value == "dyadic") {
                cfg.snapshots = SnapshotPolicy::Dyadic;
            } else {
                throw ConfigError("config: snapshots must be 'none' or 'dyadic'");
            }
        } else if (key == "init.modes") {
            cfg.init.kind = InitialSpec::Kind::Modes;
            cfg.init.modes = parse_modes(value);
            ++init_kinds;
        } else if (key == "init.steady") {
            const auto parts = split(value, ',');
            if (parts.size() != 3) {
                throw ConfigError("config: init.steady wants 'h_bar,kappa_m1,kappa_1'");
            }
            cfg.init.kind = InitialSpec::Kind::Steady;
            cfg.init.steady = {parse_double(key, parts[0]), parse_double(key, parts[1]),
                               parse_double(key, parts[2])};
            ++init_kinds;
        } else if (key == "init.file") {
            cfg.init.kind = InitialSpec::Kind::File;
            cfg.init.file = value;
            ++init_kinds;
        } else if (key == "init.random") {
            const auto parts = split(value, ':');
            if (parts.size() != 2) {
                throw ConfigError("config: init.random wants 'n_lo:n_hi'");
            }
            cfg.init.kind = InitialSpec::Kind::Random;
            cfg.init.random_lo = static_cast<int>(parse_long(key, parts[0]));
            cfg.init.random_hi = static_cast<int>(parse_long(key, parts[1]));
            ++init_kinds;
        } else if (key == "fit.t_lo") {
            cfg.fit_t_lo = parse_double(key, value);
        } else if (key == "fit.t_hi") {
            cfg.fit_t_hi = parse_double(key, value);
        } else if (key == "label") {
            cfg.label = value;
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    if (init_kinds > 1) {
        throw ConfigError("config: more than one init.* key given");
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::map<std::string, std::string> keys;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open '" + path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        keys = parse_config_text(text.str());
    }
    for (const auto& [key, value] : overrides) {
        keys[key] = value;  // command line wins
    }
    return scenario_from_keys(keys);
}

std::map<std::string, std::string> scenario_to_keys(const ScenarioConfig& cfg) {
    std::map<std::string, std::string> keys;
    keys["n_points"] = std::to_string(cfg.n_points);
    keys["alpha"] = format_double(cfg.alpha);
    keys["sigma"] = format_double(cfg.sigma);
    keys["epsilon"] = format_double(cfg.epsilon);
    keys["h_bar"] = format_double(cfg.h_bar);
    keys["t_end"] = format_double(cfg.t_end);
    keys["output_interval"] = format_double(cfg.output_interval);
    keys["rel_tol"] = format_double(cfg.controller.rel_tol);
    keys["dt_min"] = format_double(cfg.controller.dt_min);
    keys["dt_max"] = format_double(cfg.controller.dt_max);
    keys["dt_init"] = format_double(cfg.controller.dt_init);
    keys["safety"] = format_double(cfg.controller.safety);
    keys["energy_guard_tol"] = format_double(cfg.controller.energy_guard_tol);
    keys["seed"] = std::to_string(cfg.seed);
    keys["snapshots"] = cfg.snapshots == SnapshotPolicy::Dyadic ? "dyadic" : "none";
    switch (cfg.init.kind) {
        case InitialSpec::Kind::Modes: {
            std::string entry;
            for (const auto& m : cfg.init.modes) {
                if (!entry.empty()) entry += ',';
                entry += std::to_string(m.n);
                entry += m.is_sin ? ":sin:" : ":cos:";
                entry += format_double(m.amplitude);
            }
            keys["init.modes"] = entry;
            break;
        }
        case InitialSpec::Kind::Steady:
            keys["init.steady"] = format_double(cfg.init.steady.h_bar) + "," +
                                  format_double(cfg.init.steady.kappa_m1) + "," +
                                  format_double(cfg.init.steady.kappa_1);
            break;
        case InitialSpec::Kind::File:
            keys["init.file"] = cfg.init.file;
            break;
        case InitialSpec::Kind::Random:
            keys["init.random"] = std::to_string(cfg.init.random_lo) + ":" +
                                  std::to_string(cfg.init.random_hi);
            break;
    }
    if (cfg.fit_t_lo) keys["fit.t_lo"] = format_double(*cfg.fit_t_lo);
    if (cfg.fit_t_hi) keys["fit.t_hi"] = format_double(*cfg.fit_t_hi);
    if (!cfg.label.empty()) keys["label"] = cfg.label;
    return keys;
}

}  // namespace thinfilm
