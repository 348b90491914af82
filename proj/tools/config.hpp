#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "peacock/constructions.hpp"
#include "peacock/time_family.hpp"
#include "peacock/totalpos.hpp"
#include "peacock/verdict.hpp"

namespace peacock::cli {

// ============================================================================
// Run configuration.
//
// Flat INI: [section] headers, key = value lines, full-line # comments.
// Values keep their inner '=' signs, so measure mini-language strings pass
// through verbatim. Typed readers throw ConfigError with the offending
// section and key.
// ============================================================================

struct RunConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double num(const std::string& section, const std::string& key) const;
    double num_or(const std::string& section, const std::string& key, double fallback) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
};

RunConfig parse_run_config_text(const std::string& text);
RunConfig parse_run_config(const std::string& path);

// Grid values: a comma list "0.5,1,2" or "linspace:lo,hi,n" with n >= 2.
std::vector<double> parse_grid_spec(const std::string& spec);

// Scale maps by name: linear, sqrt, power:p, affine:c0,c1, const:c.
std::function<double(double)> parse_h_spec(const std::string& spec);

// Kernels by name: erlang, reflected_laplace; rate > 0.
std::unique_ptr<MarkovKernel> make_kernel(const std::string& name, double rate);

// The [family] block. kind selects the construction; base laws use the
// measure mini-language; transform kinds build their base from base= and h=.
TimeFamily build_family(const RunConfig& cfg);

// Common parsed pieces.
std::vector<double> time_grid(const RunConfig& cfg);
std::vector<double> x_grid(const RunConfig& cfg);
Tolerance tolerance_of(const RunConfig& cfg);
std::string output_dir(const RunConfig& cfg);

}  // namespace peacock::cli
