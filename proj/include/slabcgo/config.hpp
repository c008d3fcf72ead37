#pragma once

#include <map>
#include <sstream>

#include "slabcgo/core.hpp"

namespace slabcgo {

/// Experiment description: flat key/value pairs grouped in sections, mapped
/// onto typed fields. Unknown keys are rejected so typos surface early.
struct ExperimentConfig {
    std::string experiment = "factorize-check";

    // geometry
    double L = 1.0;
    double box_half = 1.5;
    double R = 0.5, Rp = 0.7, Rpp = 0.95;

    // materials
    double mu0 = 1.0, eps0 = 1.0, omega = 1.0;
    double contrast = 0.1;     // relative bump amplitude scale
    double bump_sigma = 0.3;
    double sigma_conductivity = 0.0;

    // phase
    Vec3 xi{0.9, 0.4, 0.3};
    std::string scenario = "same";  // same | opp
    std::vector<double> tau_list{4, 8, 16, 32};

    // grids
    int cell_n = 32;
    double cell_side = 4.0;
    int modes = 20;
    int transverse_n = 48;
    int nz = 16;
    int interior_n = 20;

    std::string out_dir = ".";
    std::uint64_t seed = 7;

    void validate() const {
        if (tau_list.empty()) throw std::invalid_argument("config: tau list must not be empty");
        for (std::size_t i = 1; i < tau_list.size(); ++i)
            if (tau_list[i] <= tau_list[i - 1])
                throw std::invalid_argument("config: tau list must be strictly increasing");
        if (L <= 0 || omega <= 0 || mu0 <= 0 || eps0 <= 0)
            throw std::invalid_argument("config: geometry and material scales must be positive");
        if (!(0 < R && R < Rp && Rp < Rpp)) throw std::invalid_argument("config: need 0 < R < R' < R''");
        if (scenario != "same" && scenario != "opp") throw std::invalid_argument("config: unknown scenario");
    }
};

namespace detail {

inline std::string tau_to_string(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << v[i] << (i + 1 < v.size() ? " " : "");
    return os.str();
}

inline std::vector<double> tau_from_string(const std::string& s) {
    std::istringstream is(s);
    std::vector<double> v;
    double x;
    while (is >> x) v.push_back(x);
    return v;
}

}  // namespace detail

/// Section-qualified key/value view of the config (the serialization format).
inline std::map<std::string, std::string> config_to_kv(const ExperimentConfig& c) {
    std::map<std::string, std::string> kv;
    auto put = [&](const std::string& k, auto v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        kv[k] = os.str();
    };
    put("run.experiment", c.experiment);
    put("run.out_dir", c.out_dir);
    put("run.seed", c.seed);
    put("geometry.L", c.L);
    put("geometry.box_half", c.box_half);
    put("geometry.R", c.R);
    put("geometry.Rp", c.Rp);
    put("geometry.Rpp", c.Rpp);
    put("material.mu0", c.mu0);
    put("material.eps0", c.eps0);
    put("material.omega", c.omega);
    put("material.contrast", c.contrast);
    put("material.bump_sigma", c.bump_sigma);
    put("material.sigma_conductivity", c.sigma_conductivity);
    put("phase.xi_x", c.xi.x);
    put("phase.xi_y", c.xi.y);
    put("phase.xi_z", c.xi.z);
    put("phase.scenario", c.scenario);
    kv["phase.tau_list"] = detail::tau_to_string(c.tau_list);
    put("grid.cell_n", c.cell_n);
    put("grid.cell_side", c.cell_side);
    put("grid.modes", c.modes);
    put("grid.transverse_n", c.transverse_n);
    put("grid.nz", c.nz);
    put("grid.interior_n", c.interior_n);
    return kv;
}

inline ExperimentConfig config_from_kv(const std::map<std::string, std::string>& kv) {
    ExperimentConfig c;
    auto get = [&](const std::string& k, auto& target) {
        auto it = kv.find(k);
        if (it == kv.end()) return;
        std::istringstream is(it->second);
        is >> target;
        if (is.fail()) throw std::invalid_argument("config: bad value for " + k);
    };
    for (const auto& [k, v] : kv) {
        static const std::map<std::string, int> known = {
            {"run.experiment", 0}, {"run.out_dir", 0}, {"run.seed", 0},
            {"geometry.L", 0}, {"geometry.box_half", 0}, {"geometry.R", 0},
            {"geometry.Rp", 0}, {"geometry.Rpp", 0},
            {"material.mu0", 0}, {"material.eps0", 0}, {"material.omega", 0},
            {"material.contrast", 0}, {"material.bump_sigma", 0}, {"material.sigma_conductivity", 0},
            {"phase.xi_x", 0}, {"phase.xi_y", 0}, {"phase.xi_z", 0}, {"phase.scenario", 0},
            {"phase.tau_list", 0},
            {"grid.cell_n", 0}, {"grid.cell_side", 0}, {"grid.modes", 0},
            {"grid.transverse_n", 0}, {"grid.nz", 0}, {"grid.interior_n", 0}};
        if (!known.count(k)) throw std::invalid_argument("config: unknown key " + k);
    }
    get("run.experiment", c.experiment);
    get("run.out_dir", c.out_dir);
    get("run.seed", c.seed);
    get("geometry.L", c.L);
    get("geometry.box_half", c.box_half);
    get("geometry.R", c.R);
    get("geometry.Rp", c.Rp);
    get("geometry.Rpp", c.Rpp);
    get("material.mu0", c.mu0);
    get("material.eps0", c.eps0);
    get("material.omega", c.omega);
    get("material.contrast", c.contrast);
    get("material.bump_sigma", c.bump_sigma);
    get("material.sigma_conductivity", c.sigma_conductivity);
    get("phase.xi_x", c.xi.x);
    get("phase.xi_y", c.xi.y);
    get("phase.xi_z", c.xi.z);
    get("phase.scenario", c.scenario);
    if (kv.count("phase.tau_list")) c.tau_list = detail::tau_from_string(kv.at("phase.tau_list"));
    get("grid.cell_n", c.cell_n);
    get("grid.cell_side", c.cell_side);
    get("grid.modes", c.modes);
    get("grid.transverse_n", c.transverse_n);
    get("grid.nz", c.nz);
    get("grid.interior_n", c.interior_n);
    return c;
}

/// Sectioned flat text: "[section]" lines followed by "key = value".
inline std::string serialize_config(const ExperimentConfig& c) {
    auto kv = config_to_kv(c);
    std::ostringstream os;
    std::string current;
    for (const auto& [k, v] : kv) {
        auto dotpos = k.find('.');
        std::string sec = k.substr(0, dotpos), key = k.substr(dotpos + 1);
        if (sec != current) {
            os << "[" << sec << "]\n";
            current = sec;
        }
        os << key << " = " << v << "\n";
    }
    return os.str();
}

inline ExperimentConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line, section;
    while (std::getline(in, line)) {
        auto h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line.front() == '[') {
            if (line.back() != ']') throw std::invalid_argument("config: bad section line: " + line);
            section = line.substr(1, line.size() - 2);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: expected key = value: " + line);
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            auto a = s.find_first_not_of(" \t");
            auto b = s.find_last_not_of(" \t");
            s = (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
        };
        trim(key);
        trim(val);
        kv[section + "." + key] = val;
    }
    return config_from_kv(kv);
}

}  // namespace slabcgo
