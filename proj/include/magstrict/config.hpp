#ifndef MAGSTRICT_CONFIG_HPP
#define MAGSTRICT_CONFIG_HPP

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "magstrict/contributions.hpp"
#include "magstrict/errors.hpp"
#include "magstrict/fem.hpp"

namespace magstrict {

/// Benchmark run configuration. File format is flat key=value text with
/// '#' comments; every key has a CLI flag of the same name, and CLI values
/// override the file.
struct RunConfig {
    int r = 4;
    std::string scheme = "tangent";  // tangent | midpoint
    double k = 1e-5;
    double T = 0.1;
    double alpha = 1.0;
    double theta = 1.0;
    double Cexch = 1.0;  // exchange constant C_e
    double Ce = 0.0;     // elastic tensor constant C^e
    double Cm = 0.0;     // magnetic tensor constant C^m
    double rho = 1.0;
    double s = 4.0;  // initial-data parameter
    std::string pi_kind = "zero";  // zero | applied_field | uniaxial_anisotropy
    Vec3 pi_f{0.0, 0.0, 0.0};
    Vec3 pi_axis{0.0, 0.0, 1.0};
    double pi_c_ani = 0.0;
    std::string pi_sign = "literal";  // literal | physical
    std::string out = "run.csv";
    int cadence = 10;  // record a diagnostics row every this many steps
    std::string quadrature = "lumped";  // lumped | consistent
    double tol = 1e-10;
    double midpoint_eps = 1e-10;
    int midpoint_max_sweeps = 200;
    bool check_invariants = true;

    void validate() const {
        if (r < 1) throw ConfigError("r must be >= 1");
        if (!(T > 0.0)) throw ConfigError("T must be positive");
        if (!(k > 0.0)) throw ConfigError("k must be positive");
        if (k > T) throw ConfigError("k must not exceed T");
        if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
        if (theta < 0.0 || theta > 1.0) throw ConfigError("theta must lie in [0,1]");
        if (scheme != "tangent" && scheme != "midpoint")
            throw ConfigError("scheme must be 'tangent' or 'midpoint'");
        if (quadrature != "lumped" && quadrature != "consistent")
            throw ConfigError("quadrature must be 'lumped' or 'consistent'");
        if (pi_kind != "zero" && pi_kind != "applied_field" && pi_kind != "uniaxial_anisotropy")
            throw ConfigError("pi.kind must be zero, applied_field or uniaxial_anisotropy");
        if (pi_sign != "literal" && pi_sign != "physical")
            throw ConfigError("pi.sign must be 'literal' or 'physical'");
        if (cadence < 1) throw ConfigError("cadence must be >= 1");
        if (!(tol > 0.0)) throw ConfigError("tol must be positive");
        if (!(midpoint_eps > 0.0)) throw ConfigError("midpoint.eps must be positive");
        if (midpoint_max_sweeps < 1) throw ConfigError("midpoint.max_sweeps must be >= 1");
    }

    Contribution contribution(double horizon, double domain_area) const {
        const PiSign sign = (pi_sign == "literal") ? PiSign::literal : PiSign::physical;
        Contribution c;
        if (pi_kind == "applied_field")
            c = Contribution::applied_field(pi_f, sign);
        else if (pi_kind == "uniaxial_anisotropy")
            c = Contribution::uniaxial_anisotropy(pi_axis, pi_c_ani, sign);
        else
            return Contribution::zero();
        const double sup = pi_sup_bound(c);
        c.declared_bound = sup * sup * domain_area * horizon;
        return c;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse number from '" + value + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse integer from '" + value + "'");
    }
}

inline Vec3 parse_vec3(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    Vec3 v{};
    std::string cell;
    for (int c = 0; c < 3; ++c) {
        if (!std::getline(in, cell, ',')) throw ConfigError("key '" + key + "': expected 3 comma-separated numbers");
        v[c] = parse_double(key, trim(cell));
    }
    if (std::getline(in, cell, ','))
        throw ConfigError("key '" + key + "': expected exactly 3 components");
    return v;
}

} // namespace detail

/// Apply one key=value pair (shared by the file parser, CLI overrides, and
/// sweep variation).
inline void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_int;
    using detail::parse_vec3;
    if (key == "r") cfg.r = parse_int(key, value);
    else if (key == "scheme") cfg.scheme = value;
    else if (key == "k") cfg.k = parse_double(key, value);
    else if (key == "T") cfg.T = parse_double(key, value);
    else if (key == "alpha") cfg.alpha = parse_double(key, value);
    else if (key == "theta") cfg.theta = parse_double(key, value);
    else if (key == "Cexch") cfg.Cexch = parse_double(key, value);
    else if (key == "Ce") cfg.Ce = parse_double(key, value);
    else if (key == "Cm") cfg.Cm = parse_double(key, value);
    else if (key == "rho") cfg.rho = parse_double(key, value);
    else if (key == "s") cfg.s = parse_double(key, value);
    else if (key == "pi.kind") cfg.pi_kind = value;
    else if (key == "pi.f") cfg.pi_f = parse_vec3(key, value);
    else if (key == "pi.axis") cfg.pi_axis = parse_vec3(key, value);
    else if (key == "pi.C_ani") cfg.pi_c_ani = parse_double(key, value);
    else if (key == "pi.sign") cfg.pi_sign = value;
    else if (key == "out") cfg.out = value;
    else if (key == "cadence") cfg.cadence = parse_int(key, value);
    else if (key == "quadrature") cfg.quadrature = value;
    else if (key == "tol") cfg.tol = parse_double(key, value);
    else if (key == "midpoint.eps") cfg.midpoint_eps = parse_double(key, value);
    else if (key == "midpoint.max_sweeps") cfg.midpoint_max_sweeps = parse_int(key, value);
    else if (key == "check_invariants") cfg.check_invariants = parse_int(key, value) != 0;
    else throw ConfigError("unknown config key '" + key + "'");
}

inline RunConfig parse_config_file(const std::string& path, RunConfig base = RunConfig()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
        const std::string key = detail::trim(trimmed.substr(0, eq));
        const std::string value = detail::trim(trimmed.substr(eq + 1));
        try {
            apply_config_key(base, key, value);
        } catch (const ConfigError& err) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + err.what());
        }
    }
    return base;
}

} // namespace magstrict

#endif
