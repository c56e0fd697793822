#pragma once

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowmotion/core.hpp"
#include "slowmotion/dynamics.hpp"
#include "slowmotion/error.hpp"
#include "slowmotion/stationary.hpp"

namespace slowmotion {

struct ConfigKey {
    const char* name;
    const char* default_value;
    const char* help;
};

/// Every recognised key with its default; the CLI registers one flag per entry.
inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"eps", "0.08", "viscosity"},
        {"ell", "1", "interval length"},
        {"n", "400", "interior node count"},
        {"dt", "auto", "time step or auto"},
        {"T", "200", "time horizon"},
        {"flux", "burgers", "burgers or power"},
        {"gamma", "3", "exponent of the power flux"},
        {"a0", "0.4", "initial sign change"},
        {"shape", "scaled_sine", "scaled_sine or piecewise_linear"},
        {"amplitude", "0.5", "initial amplitude"},
        {"orientation", "paper_u0meta", "paper_u0meta or corollary"},
        {"k_max", "8", "number of eigenpairs"},
        {"output_dir", ".", "directory for CSV output"},
        {"xi", "", "interface position; empty means ell/2"},
        {"xi0", "", "reduced ODE start; empty means a0"},
        {"eps_list", "", "comma separated eps values"},
        {"xi_list", "", "comma separated xi values"},
        {"a0_list", "", "comma separated a0 values"},
        {"xi_count", "19", "family lattice size when xi_list is empty"},
        {"stride", "1", "record stride in time"},
        {"snapshots", "", "comma separated snapshot times"},
        {"state", "tanh", "spectrum base state: tanh or zero"},
        {"construction", "tanh", "family construction: tanh or exact"},
        {"branch", "all", "all, positive, negative, metastable or ns"},
        {"theta", "asymptotic", "reduced speed: asymptotic or spectral"},
        {"delta", "0.05", "exit displacement"},
        {"track", "true", "track the projected interface"},
        {"flame", "false", "write the flame front y = -integral of u alongside snapshots"},
    };
    return keys;
}

struct RunConfig {
    double eps = 0.08;
    double ell = 1.0;
    std::size_t n = 400;
    std::optional<double> dt;
    double T = 200.0;
    std::string flux_name = "burgers";
    double gamma = 3.0;
    double a0 = 0.4;
    InitialShape shape = InitialShape::scaled_sine;
    double amplitude = 0.5;
    Orientation orientation = Orientation::paper_u0meta;
    std::size_t k_max = 8;
    std::string output_dir = ".";
    std::optional<double> xi;
    std::optional<double> xi0;
    std::vector<double> eps_list;
    std::vector<double> xi_list;
    std::vector<double> a0_list;
    std::size_t xi_count = 19;
    double stride = 1.0;
    std::vector<double> snapshots;
    std::string state = "tanh";
    std::string construction = "tanh";
    std::string branch = "all";
    std::string theta = "asymptotic";
    double delta = 0.05;
    bool track = true;
    bool flame = false;

    Grid grid() const { return Grid(ell, n); }
    FluxFunction flux() const { return flux_name == "burgers" ? burgers_flux() : power_flux(gamma); }
    double xi_or_center() const { return xi.value_or(0.5 * ell); }
    InitialDatum datum(double a) const { return {a, shape, amplitude, orientation}; }
    InitialDatum datum() const { return datum(a0); }
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& key, const std::string& msg) {
    fail(ErrorKind::Config, "key '" + key + "': " + msg);
}

inline double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && *b == ' ') ++b;
    while (e > b && e[-1] == ' ') --e;
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || !std::isfinite(v)) config_error(key, "not a finite number: '" + s + "'");
    return v;
}

inline std::size_t parse_count(const std::string& key, const std::string& s) {
    const double v = parse_double(key, s);
    if (v < 1.0 || v != std::floor(v)) config_error(key, "expected a positive integer: '" + s + "'");
    return static_cast<std::size_t>(v);
}

inline bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    config_error(key, "expected true or false: '" + s + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t end = s.find(',', start);
        const std::string item = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
        if (!item.empty()) out.push_back(parse_double(key, item));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

inline std::string parse_choice(const std::string& key, const std::string& s, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (s == a) return s;
    std::string msg = "unknown value '" + s + "', expected one of";
    for (const char* a : allowed) msg += std::string(" ") + a;
    config_error(key, msg);
}

}  // namespace detail

/// Builds a validated configuration from key/value strings; missing keys take their defaults.
inline RunConfig make_config(const std::map<std::string, std::string>& values) {
    std::map<std::string, std::string> v;
    for (const auto& k : config_keys()) v[k.name] = k.default_value;
    for (const auto& [key, value] : values) {
        if (!v.count(key)) detail::config_error(key, "unknown key");
        v[key] = value;
    }
    using namespace detail;
    RunConfig c;
    c.eps = parse_double("eps", v["eps"]);
    if (!(c.eps > 0.0)) config_error("eps", "must be positive");
    c.ell = parse_double("ell", v["ell"]);
    if (!(c.ell > 0.0)) config_error("ell", "must be positive");
    c.n = parse_count("n", v["n"]);
    if (c.n < 3) config_error("n", "needs at least 3 interior nodes");
    if (v["dt"] != "auto") {
        c.dt = parse_double("dt", v["dt"]);
        if (!(*c.dt > 0.0)) config_error("dt", "must be positive or auto");
    }
    c.T = parse_double("T", v["T"]);
    if (c.T < 0.0) config_error("T", "must be nonnegative");
    c.flux_name = parse_choice("flux", v["flux"], {"burgers", "power"});
    c.gamma = parse_double("gamma", v["gamma"]);
    if (c.flux_name == "power" && !(c.gamma >= 2.0)) config_error("gamma", "must be at least 2");
    c.a0 = parse_double("a0", v["a0"]);
    if (!(c.a0 > 0.0 && c.a0 < c.ell)) config_error("a0", "must lie in (0, ell)");
    c.shape = parse_choice("shape", v["shape"], {"scaled_sine", "piecewise_linear"}) == "scaled_sine"
                  ? InitialShape::scaled_sine
                  : InitialShape::piecewise_linear;
    c.amplitude = parse_double("amplitude", v["amplitude"]);
    if (!(c.amplitude > 0.0)) config_error("amplitude", "must be positive");
    c.orientation = parse_choice("orientation", v["orientation"], {"paper_u0meta", "corollary"}) == "corollary"
                        ? Orientation::corollary
                        : Orientation::paper_u0meta;
    c.k_max = parse_count("k_max", v["k_max"]);
    if (c.k_max < 2) config_error("k_max", "must be at least 2");
    c.output_dir = v["output_dir"];
    if (c.output_dir.empty()) config_error("output_dir", "must not be empty");
    if (!v["xi"].empty()) {
        c.xi = parse_double("xi", v["xi"]);
        if (!(*c.xi > 0.0 && *c.xi < c.ell)) config_error("xi", "must lie in (0, ell)");
    }
    if (!v["xi0"].empty()) {
        c.xi0 = parse_double("xi0", v["xi0"]);
        if (!(*c.xi0 >= 0.0 && *c.xi0 < c.ell)) config_error("xi0", "must lie in [0, ell)");
    }
    c.eps_list = parse_list("eps_list", v["eps_list"]);
    for (double e : c.eps_list)
        if (!(e > 0.0)) config_error("eps_list", "values must be positive");
    c.xi_list = parse_list("xi_list", v["xi_list"]);
    for (double x : c.xi_list)
        if (!(x > 0.0 && x < c.ell)) config_error("xi_list", "values must lie in (0, ell)");
    c.a0_list = parse_list("a0_list", v["a0_list"]);
    for (double a : c.a0_list)
        if (!(a > 0.0 && a < c.ell)) config_error("a0_list", "values must lie in (0, ell)");
    c.xi_count = parse_count("xi_count", v["xi_count"]);
    c.stride = parse_double("stride", v["stride"]);
    if (!(c.stride > 0.0)) config_error("stride", "must be positive");
    c.snapshots = parse_list("snapshots", v["snapshots"]);
    for (double t : c.snapshots)
        if (t < 0.0) config_error("snapshots", "times must be nonnegative");
    c.state = parse_choice("state", v["state"], {"tanh", "zero"});
    c.construction = parse_choice("construction", v["construction"], {"tanh", "exact"});
    c.branch = parse_choice("branch", v["branch"], {"all", "positive", "negative", "metastable", "ns"});
    c.theta = parse_choice("theta", v["theta"], {"asymptotic", "spectral"});
    c.delta = parse_double("delta", v["delta"]);
    if (!(c.delta > 0.0)) config_error("delta", "must be positive");
    c.track = parse_bool("track", v["track"]);
    c.flame = parse_bool("flame", v["flame"]);
    return c;
}

}  // namespace slowmotion
