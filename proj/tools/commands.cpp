#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "peacock/azema_yor.hpp"
#include "peacock/errors.hpp"
#include "peacock/measure.hpp"
#include "peacock/mrl.hpp"

namespace peacock::cli {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::string path = dir + "/" + name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    return f;
}

void verdict_row(std::ofstream& f, const std::string& check, const std::string& time,
                 const OrderVerdict& v) {
    f << check << ',' << time << ',' << (v.holds ? 1 : 0) << ',' << fmt(v.worst_violation)
      << ',' << fmt(v.worst_raw) << ',' << fmt(v.tolerance_used) << ',' << fmt(v.row_lo)
      << ',' << fmt(v.row_hi) << ',' << fmt(v.col_lo) << ',' << fmt(v.col_hi) << ','
      << csv_safe(v.note) << '\n';
}

MinorMode mode_of(const RunConfig& cfg) {
    std::string m = cfg.get_or("tp2", "mode", "all");
    if (m == "all") return MinorMode::AllPairs;
    if (m == "adjacent") return MinorMode::Adjacent;
    throw ConfigError("unknown minor mode: '" + m + "'");
}

std::vector<std::string> check_list(const RunConfig& cfg) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : cfg.get_or("mrl", "checks", "mrl") + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ' && c != '\t') {
            cur += c;
        }
    }
    if (out.empty()) throw ConfigError("[mrl] checks is empty");
    return out;
}

std::vector<double> number_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) throw ConfigError(what + " has an empty entry");
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cur, &used));
            if (used != cur.size()) throw std::invalid_argument(cur);
        } catch (const std::exception&) {
            throw ConfigError(what + " entry is not a number: '" + cur + "'");
        }
        cur.clear();
    };
    for (char c : s) {
        if (c == ',') {
            flush();
        } else if (c != ' ' && c != '\t') {
            cur += c;
        }
    }
    flush();
    return out;
}

}  // namespace

int cmd_mrl(const RunConfig& cfg) {
    TimeFamily fam = build_family(cfg);
    std::vector<double> xs = x_grid(cfg);
    Tolerance tol = tolerance_of(cfg);
    std::string dir = output_dir(cfg);

    std::ofstream curves = open_out(dir, "hl_curves.csv");
    curves << "time,x,psi\n";
    for (std::size_t k = 0; k < fam.size(); ++k)
        for (double x : xs)
            curves << fmt(fam.times[k]) << ',' << fmt(x) << ','
                   << fmt(barycentre(fam.laws[k], x)) << '\n';

    std::ofstream verdicts = open_out(dir, "verdicts.csv");
    verdicts << "check,time,holds,worst,raw,tolerance,row_lo,row_hi,col_lo,col_hi,note\n";

    bool all_hold = true;
    for (const std::string& check : check_list(cfg)) {
        if (check == "mrl") {
            OrderVerdict v = check_family_mrl(fam, xs, tol);
            all_hold = all_hold && v.holds;
            verdict_row(verdicts, check, "", v);
        } else if (check == "peacock") {
            OrderVerdict v = check_peacock(fam, xs, tol);
            all_hold = all_hold && v.holds;
            verdict_row(verdicts, check, "", v);
        } else if (check == "madan_yor") {
            std::vector<double> as = parse_grid_spec(cfg.get("grids", "a"));
            for (std::size_t k = 0; k < fam.size(); ++k) {
                OrderVerdict v = check_madan_yor(fam.laws[k], as, tol);
                all_hold = all_hold && v.holds;
                verdict_row(verdicts, check, fmt(fam.times[k]), v);
            }
        } else if (check == "dmrl") {
            for (std::size_t k = 0; k < fam.size(); ++k) {
                OrderVerdict v = check_dmrl(fam.laws[k], xs, tol);
                all_hold = all_hold && v.holds;
                verdict_row(verdicts, check, fmt(fam.times[k]), v);
            }
        } else {
            throw ConfigError("unknown mrl check: '" + check + "'");
        }
    }
    return all_hold ? 0 : 1;
}

int cmd_tp2(const RunConfig& cfg) {
    Tolerance tol = tolerance_of(cfg);
    MinorMode mode = mode_of(cfg);
    std::string dir = output_dir(cfg);
    std::string source = cfg.get_or("tp2", "source", "family");

    OrderVerdict v;
    if (source == "family") {
        v = isf_tp2_check(build_family(cfg), x_grid(cfg), mode, tol);
    } else if (source == "kernel") {
        std::unique_ptr<MarkovKernel> k =
            make_kernel(cfg.get("tp2", "kernel"), cfg.num_or("tp2", "rate", 1.0));
        v = spacetime_tp2(*k, parse_grid_spec(cfg.get("tp2", "states")),
                          cfg.num_or("tp2", "origin", 0.0), x_grid(cfg), mode, tol);
    } else if (source == "grid") {
        Tp2Grid grid;
        if (cfg.has("tp2", "file")) {
            grid = tp2_grid_from_csv(cfg.get("tp2", "file"));
        } else {
            grid.rows = parse_grid_spec(cfg.get("tp2", "rows"));
            grid.cols = parse_grid_spec(cfg.get("tp2", "cols"));
            grid.values = number_list(cfg.get("tp2", "values"), "[tp2] values");
            if (grid.values.size() != grid.rows.size() * grid.cols.size())
                throw ConfigError("[tp2] values length must be rows x cols");
        }
        v = tp2_check(grid, mode, tol);
    } else {
        throw ConfigError("unknown tp2 source: '" + source + "'");
    }

    std::ofstream minors = open_out(dir, "minors.csv");
    minors << "source,mode,holds,worst,raw,tolerance,row_lo,row_hi,col_lo,col_hi,note\n";
    minors << source << ',' << cfg.get_or("tp2", "mode", "all") << ',' << (v.holds ? 1 : 0)
           << ',' << fmt(v.worst_violation) << ',' << fmt(v.worst_raw) << ','
           << fmt(v.tolerance_used) << ',' << fmt(v.row_lo) << ',' << fmt(v.row_hi) << ','
           << fmt(v.col_lo) << ',' << fmt(v.col_hi) << ',' << csv_safe(v.note) << '\n';
    return v.holds ? 0 : 1;
}

int cmd_embed(const RunConfig& cfg) {
    TimeFamily fam = build_family(cfg);
    std::vector<double> times = cfg.has("embed", "times")
                                    ? parse_grid_spec(cfg.get("embed", "times"))
                                    : time_grid(cfg);
    PathConfig pcfg;
    pcfg.dt = cfg.num_or("embed", "dt", pcfg.dt);
    pcfg.horizon = cfg.num_or("embed", "horizon", pcfg.horizon);
    double paths = cfg.num_or("embed", "paths", static_cast<double>(pcfg.paths));
    if (!(paths >= 1.0) || paths != std::floor(paths))
        throw ConfigError("[embed] paths must be a positive integer");
    pcfg.paths = static_cast<std::size_t>(paths);
    double seed = cfg.num_or("embed", "seed", 0.0);
    if (seed < 0.0 || seed != std::floor(seed))
        throw ConfigError("[embed] seed must be a non-negative integer");
    pcfg.seed = static_cast<std::uint64_t>(seed);

    double ks_max = cfg.num_or("embed", "ks_max", 0.01);
    double censored_max = cfg.num_or("embed", "censored_max", 0.01);
    double violation_max = cfg.num_or("embed", "violation_max", 1e-3);
    double bins = cfg.num_or("embed", "bins", 10.0);
    if (!(bins >= 1.0) || bins != std::floor(bins))
        throw ConfigError("[embed] bins must be a positive integer");

    EmbeddingReport rep = simulate_embedding(fam, times, pcfg);

    bool ks_ok = true;
    try {
        for (double ks : verify_embedding(rep, fam, times)) ks_ok = ks_ok && ks <= ks_max;
    } catch (const InsufficientPaths&) {
        // everything censored: the censoring verdict below carries the failure
        rep.ks.assign(rep.times.size(), std::numeric_limits<double>::quiet_NaN());
        ks_ok = false;
    }

    bool censor_ok = rep.censored_fraction() <= censored_max;
    bool viol_ok = static_cast<double>(rep.monotonicity_violations) <=
                   violation_max * static_cast<double>(rep.pair_count);

    bool mart_ok = true;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        try {
            MartingaleTable table = verify_martingale(rep, times[k], times[k + 1],
                                                      static_cast<std::size_t>(bins));
            mart_ok = mart_ok && table.pass;
        } catch (const InsufficientPaths&) {
            if (censor_ok) throw;  // not a censoring artifact: the run is misconfigured
            mart_ok = false;
        }
    }

    std::string dir = output_dir(cfg);
    std::filesystem::create_directories(dir);
    write_embedding_csv(dir + "/report.csv", rep);
    write_embedding_summary_csv(dir + "/summary.csv", rep);

    return (ks_ok && censor_ok && viol_ok && mart_ok) ? 0 : 1;
}

int cmd_verify(const RunConfig& cfg) {
    int worst = -1;
    if (cfg.has("mrl")) worst = std::max(worst, cmd_mrl(cfg));
    if (cfg.has("tp2")) worst = std::max(worst, cmd_tp2(cfg));
    if (cfg.has("embed")) worst = std::max(worst, cmd_embed(cfg));
    if (worst < 0) throw ConfigError("verify needs at least one of [mrl], [tp2], [embed]");
    return worst;
}

}  // namespace peacock::cli
