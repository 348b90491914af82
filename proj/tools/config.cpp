#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "peacock/errors.hpp"
#include "peacock/measure.hpp"

namespace peacock::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double to_num(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + " is not a number: '" + s + "'");
    }
}

}  // namespace

bool RunConfig::has(const std::string& section) const { return sections.count(section) > 0; }

bool RunConfig::has(const std::string& section, const std::string& key) const {
    auto it = sections.find(section);
    return it != sections.end() && it->second.count(key) > 0;
}

std::string RunConfig::get(const std::string& section, const std::string& key) const {
    auto it = sections.find(section);
    if (it == sections.end() || !it->second.count(key))
        throw ConfigError("missing [" + section + "] " + key);
    return it->second.at(key);
}

std::string RunConfig::get_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double RunConfig::num(const std::string& section, const std::string& key) const {
    return to_num(get(section, key), "[" + section + "] " + key);
}

double RunConfig::num_or(const std::string& section, const std::string& key,
                         double fallback) const {
    return has(section, key) ? num(section, key) : fallback;
}

void RunConfig::set(const std::string& section, const std::string& key,
                    const std::string& value) {
    sections[section][key] = value;
}

RunConfig parse_run_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3)
                throw ConfigError("bad section header at line " + std::to_string(lineno));
            section = trim(t.substr(1, t.size() - 2));
            cfg.sections[section];
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos || section.empty())
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
        cfg.sections[section][key] = value;
    }
    return cfg;
}

RunConfig parse_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return parse_run_config_text(os.str());
}

std::vector<double> parse_grid_spec(const std::string& spec) {
    std::string s = trim(spec);
    if (s.empty()) throw ConfigError("empty grid spec");
    std::vector<double> out;
    if (s.rfind("linspace:", 0) == 0) {
        std::vector<std::string> parts = split(s.substr(9), ',');
        if (parts.size() != 3) throw ConfigError("linspace needs lo,hi,n: '" + s + "'");
        double lo = to_num(parts[0], "linspace lo");
        double hi = to_num(parts[1], "linspace hi");
        double nd = to_num(parts[2], "linspace n");
        std::size_t n = static_cast<std::size_t>(nd);
        if (!(nd == static_cast<double>(n)) || n < 2 || !(hi > lo))
            throw ConfigError("linspace needs hi > lo and integer n >= 2: '" + s + "'");
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        return out;
    }
    for (const std::string& p : split(s, ',')) out.push_back(to_num(p, "grid entry"));
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i])) throw ConfigError("grid entry is not finite");
        if (i && !(out[i] > out[i - 1]))
            throw ConfigError("grid must be strictly increasing: '" + s + "'");
    }
    return out;
}

std::function<double(double)> parse_h_spec(const std::string& spec) {
    std::string s = trim(spec);
    if (s == "linear") return [](double t) { return t; };
    if (s == "sqrt") return [](double t) { return std::sqrt(t); };
    if (s.rfind("power:", 0) == 0) {
        double p = to_num(s.substr(6), "power exponent");
        return [p](double t) { return std::pow(t, p); };
    }
    if (s.rfind("affine:", 0) == 0) {
        std::vector<std::string> parts = split(s.substr(7), ',');
        if (parts.size() != 2) throw ConfigError("affine needs c0,c1: '" + s + "'");
        double c0 = to_num(parts[0], "affine c0");
        double c1 = to_num(parts[1], "affine c1");
        return [c0, c1](double t) { return c0 + c1 * t; };
    }
    if (s.rfind("const:", 0) == 0) {
        double c = to_num(s.substr(6), "const value");
        return [c](double) { return c; };
    }
    throw ConfigError("unknown scale map: '" + s + "'");
}

std::unique_ptr<MarkovKernel> make_kernel(const std::string& name, double rate) {
    if (!(rate > 0.0)) throw ConfigError("kernel rate must be positive");
    if (name == "erlang") return std::make_unique<ErlangWalkKernel>(rate);
    if (name == "reflected_laplace") return std::make_unique<ReflectedLaplaceWalkKernel>(rate);
    throw ConfigError("unknown kernel: '" + name + "'");
}

std::vector<double> time_grid(const RunConfig& cfg) {
    return parse_grid_spec(cfg.get("grids", "times"));
}

std::vector<double> x_grid(const RunConfig& cfg) {
    return parse_grid_spec(cfg.get("grids", "x"));
}

Tolerance tolerance_of(const RunConfig& cfg) {
    Tolerance tol;
    tol.relative = cfg.num_or("tolerances", "relative", tol.relative);
    tol.absolute_floor = cfg.num_or("tolerances", "absolute_floor", tol.absolute_floor);
    if (!(tol.relative > 0.0) || !(tol.absolute_floor > 0.0))
        throw ConfigError("tolerances must be positive");
    return tol;
}

std::string output_dir(const RunConfig& cfg) { return cfg.get_or("output", "dir", "out"); }

namespace {

PhiSpec phi_by_name(const RunConfig& cfg, const Measure& base) {
    std::string name = cfg.get("family", "phi");
    if (name == "exp_tilt") return phi_exp_tilt(base);
    if (name == "shift_concave")
        return phi_shift_concave(base, cfg.num_or("family", "gauge_rate", 1.0));
    if (name == "power")
        return phi_power(cfg.num_or("family", "p", 3.0), cfg.num_or("family", "drift", 0.5));
    throw ConfigError("unknown phi builtin: '" + name + "'");
}

ConcaveGauge gauge_by_name(const std::string& name) {
    if (name == "identity") return gauge_identity();
    if (name == "arctan") return gauge_arctan();
    throw ConfigError("unknown gauge: '" + name + "'");
}

TimeFamily base_scale_family(const RunConfig& cfg, const std::vector<double>& times) {
    Measure y = parse_measure_config(cfg.get("family", "base"));
    return scale_family(y, parse_h_spec(cfg.get_or("family", "h", "linear")), times);
}

}  // namespace

TimeFamily build_family(const RunConfig& cfg) {
    std::string kind = cfg.get("family", "kind");
    std::vector<double> times = time_grid(cfg);

    if (kind == "list") {
        TimeFamily fam;
        fam.times = times;
        for (const std::string& m : split(cfg.get("family", "laws"), ';'))
            fam.laws.push_back(parse_measure_config(m));
        if (fam.laws.size() != fam.times.size())
            throw ConfigError("family list needs one law per time");
        return fam;
    }
    if (kind == "scale") return base_scale_family(cfg, times);
    if (kind == "phi") {
        Measure y = parse_measure_config(cfg.get("family", "base"));
        return phi_family(y, phi_by_name(cfg, y), times);
    }
    if (kind == "censored_plus") {
        Measure y = parse_measure_config(cfg.get("family", "base"));
        ConcaveGauge gauge = gauge_by_name(cfg.get_or("family", "gauge", "identity"));
        return censored_plus_family(y, gauge, parse_h_spec(cfg.get_or("family", "g", "linear")),
                                    times);
    }
    if (kind == "subordinate") {
        Measure y = parse_measure_config(cfg.get("family", "inner_base"));
        SubordinationSpec spec;
        spec.inner = scale_family(y, parse_h_spec(cfg.get_or("family", "inner_h", "linear")),
                                  parse_grid_spec(cfg.get("family", "inner_times")));
        std::unique_ptr<MarkovKernel> kernel =
            make_kernel(cfg.get("family", "kernel"), cfg.num_or("family", "rate", 1.0));
        spec.kernel = kernel.get();
        return subordinate(spec, times, x_grid(cfg));
    }
    if (kind == "translate") {
        Measure y = parse_measure_config(cfg.get("family", "by"));
        return translate_family(base_scale_family(cfg, times), y);
    }
    if (kind == "scale_mixture") {
        Measure y = parse_measure_config(cfg.get("family", "mix"));
        return scale_mixture_family(base_scale_family(cfg, times), y);
    }
    if (kind == "interpolate") {
        std::vector<Measure> anchors;
        for (const std::string& m : split(cfg.get("family", "anchors"), ';'))
            anchors.push_back(parse_measure_config(m));
        return interpolate_family(anchors, parse_grid_spec(cfg.get("family", "anchor_times")),
                                  times);
    }
    if (kind == "censor") {
        CensorSpec spec;
        spec.cuts = parse_grid_spec(cfg.get("family", "cuts"));
        return censor_transform(base_scale_family(cfg, times), spec);
    }
    throw ConfigError("unknown family kind: '" + kind + "'");
}

}  // namespace peacock::cli
