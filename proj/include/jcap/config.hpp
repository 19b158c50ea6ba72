#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jcap/trial.hpp"

namespace jcap {

namespace detail {
inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_double_list(const std::string& v) {
    std::vector<double> out;
    for (const auto& tok : split(v, ','))
        if (!trim(tok).empty()) out.push_back(std::stod(trim(tok)));
    return out;
}
}  // namespace detail

inline DynamicClass parse_class(const std::string& s) {
    if (s == "low") return DynamicClass::low;
    if (s == "medium") return DynamicClass::medium;
    if (s == "high") return DynamicClass::high;
    throw std::invalid_argument("unknown dynamic class: " + s);
}

/// Applies one key=value pair to the config. Unknown keys are errors; every
/// key is also exposed as a CLI flag of the same name.
inline void apply_config_key(CampaignConfig& cfg, const std::string& key,
                             const std::string& value) {
    using detail::parse_double_list;
    if (key == "sir_db_list") {
        cfg.sir_db_list = parse_double_list(value);
    } else if (key == "sinr_offset_db_list") {
        cfg.sinr_offset_db_list = parse_double_list(value);
    } else if (key == "classes") {
        cfg.classes.clear();
        for (const auto& tok : detail::split(value, ','))
            if (!detail::trim(tok).empty()) cfg.classes.push_back(parse_class(detail::trim(tok)));
    } else if (key == "n_trials") {
        cfg.n_trials = std::stoi(value);
    } else if (key == "master_seed") {
        cfg.master_seed = std::stoull(value);
    } else if (key == "workers") {
        cfg.workers = std::stoi(value);
    } else if (key == "prn") {
        cfg.trial.prn = std::stoi(value);
    } else if (key == "duration_s") {
        cfg.trial.duration = std::stod(value);
    } else if (key == "code_doppler") {
        cfg.trial.code_doppler = std::stoi(value) != 0;
    } else if (key == "el_spacing_chips") {
        cfg.trial.plan.el_spacing = std::stod(value);
    } else if (key == "integration_time_s") {
        cfg.trial.plan.integration_time = std::stod(value);
    } else if (key == "stage_plan") {
        // duration:bn[:fll_weight] entries, e.g. "1.5:18,1.5:7,0:2" (last
        // duration 0 = remainder). When fll_weight is omitted the stage runs a
        // pure PLL (weight 0), matching the built-in default plan.
        cfg.trial.plan.stages.clear();
        auto toks = detail::split(value, ',');
        for (std::size_t i = 0; i < toks.size(); ++i) {
            auto parts = detail::split(detail::trim(toks[i]), ':');
            if (parts.size() != 2 && parts.size() != 3)
                throw std::invalid_argument("bad stage_plan entry: " + toks[i]);
            double w = parts.size() == 3 ? std::stod(parts[2]) : 0.0;
            cfg.trial.plan.stages.push_back({std::stod(parts[0]), std::stod(parts[1]), w});
        }
    } else if (key == "start_bit") {
        cfg.trial.start_bit = std::stoi(value);
    } else if (key == "f0_range_hz") {
        cfg.trial.f0_range = std::stod(value);
    } else if (key == "fc_hz") {
        cfg.trial.fc = std::stod(value);
    } else if (key == "use_table_thresholds") {
        cfg.use_table_thresholds = std::stoi(value) != 0;
    } else if (key == "orbit_samples") {
        cfg.orbit_samples = std::stoi(value);
    } else if (key == "sweep_rate_min") {
        cfg.sweep_rate_min = std::stod(value);
    } else if (key == "sweep_rate_max") {
        cfg.sweep_rate_max = std::stod(value);
    } else if (key == "sweep_rate_step") {
        cfg.sweep_rate_step = std::stod(value);
    } else if (key == "sweep_fddot") {
        cfg.sweep_fddot = std::stod(value);
    } else if (key == "sweep_sinr_offset_db") {
        cfg.sweep_sinr_offset_db = std::stod(value);
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

/// Flat key=value config file; '#' starts a comment.
inline CampaignConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    CampaignConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        apply_config_key(cfg, detail::trim(line.substr(0, eq)),
                         detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

/// Serializes the effective config back to the key=value format (used in the
/// run manifest for provenance).
inline std::string dump_config(const CampaignConfig& cfg) {
    std::ostringstream os;
    auto list = [](const std::vector<double>& v) {
        std::ostringstream s;
        for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
        return s.str();
    };
    os << "sir_db_list=" << list(cfg.sir_db_list) << "\n";
    os << "sinr_offset_db_list=" << list(cfg.sinr_offset_db_list) << "\n";
    os << "classes=";
    for (std::size_t i = 0; i < cfg.classes.size(); ++i)
        os << (i ? "," : "") << to_string(cfg.classes[i]);
    os << "\n";
    os << "n_trials=" << cfg.n_trials << "\n";
    os << "master_seed=" << cfg.master_seed << "\n";
    os << "workers=" << cfg.workers << "\n";
    os << "prn=" << cfg.trial.prn << "\n";
    os << "duration_s=" << cfg.trial.duration << "\n";
    os << "code_doppler=" << int(cfg.trial.code_doppler) << "\n";
    os << "el_spacing_chips=" << cfg.trial.plan.el_spacing << "\n";
    os << "integration_time_s=" << cfg.trial.plan.integration_time << "\n";
    os << "stage_plan=";
    for (std::size_t i = 0; i < cfg.trial.plan.stages.size(); ++i)
        os << (i ? "," : "") << cfg.trial.plan.stages[i].duration << ":"
           << cfg.trial.plan.stages[i].bn << ":" << cfg.trial.plan.stages[i].fll_weight;
    os << "\n";
    os << "start_bit=" << cfg.trial.start_bit << "\n";
    os << "f0_range_hz=" << cfg.trial.f0_range << "\n";
    os << "fc_hz=" << cfg.trial.fc << "\n";
    os << "use_table_thresholds=" << int(cfg.use_table_thresholds) << "\n";
    os << "orbit_samples=" << cfg.orbit_samples << "\n";
    os << "sweep_rate_min=" << cfg.sweep_rate_min << "\n";
    os << "sweep_rate_max=" << cfg.sweep_rate_max << "\n";
    os << "sweep_rate_step=" << cfg.sweep_rate_step << "\n";
    os << "sweep_fddot=" << cfg.sweep_fddot << "\n";
    os << "sweep_sinr_offset_db=" << cfg.sweep_sinr_offset_db << "\n";
    return os.str();
}

}  // namespace jcap
