#include "peacock/azema_yor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "peacock/errors.hpp"
#include "peacock/mrl.hpp"
#include "peacock/rng.hpp"

namespace peacock {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// ============================================================================
// Barrier tables.
//
// The barrier of a marginal is its barycentre function on a quantile-span
// grid with knots doubled at atoms, so the jump the closed-interval survival
// makes there is kept as a jump instead of being smeared over a knot gap.
// Beyond the recorded top the barycentre is the identity; below the grid it
// is flat at the leftmost value (zero for centered laws below their support).
// ============================================================================

struct PsiTable {
    std::vector<double> xs;
    std::vector<double> vs;
    double upper = std::numeric_limits<double>::infinity();

    double eval(double x) const {
        if (x >= upper) return x;
        if (x <= xs.front()) return vs.front();
        if (x >= xs.back()) return std::max(x, vs.back());
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t j = static_cast<std::size_t>(it - xs.begin());
        double x1 = xs[j - 1];
        double x2 = xs[j];
        double w = x2 > x1 ? (x - x1) / (x2 - x1) : 0.0;
        return vs[j - 1] + w * (vs[j] - vs[j - 1]);
    }

    // Rightmost point whose barrier value is at most s. A falling step that
    // fires crossed this point on the way down, so it is the stopped value;
    // the raw end-of-step position overshoots by O(sqrt(dt)), which an ECDF
    // comparison against an atomic target reads as a total-variation error.
    // A one-ulp knot pair encodes a jump and inverts to its left knot.
    double invert_fall(double s, double b) const {
        auto it = std::upper_bound(vs.begin(), vs.end(), s);
        std::size_t j = static_cast<std::size_t>(it - vs.begin());
        if (j == 0) return b;
        if (j == vs.size()) return std::min(s, upper);
        double x1 = xs[j - 1];
        double x2 = xs[j];
        if (x2 == std::nextafter(x1, std::numeric_limits<double>::infinity())) return x1;
        double v1 = vs[j - 1];
        double v2 = vs[j];
        if (!(v2 > v1)) return x2;
        return x1 + (s - v1) / (v2 - v1) * (x2 - x1);
    }
};

PsiTable build_table(const Measure& law) {
    PsiTable t;
    t.upper = law.upper_support();
    std::vector<double> knots = quantile_span_grid(law, 513, 1e-6);
    for (const Atom& a : law.atoms()) {
        knots.push_back(a.position);
        knots.push_back(std::nextafter(a.position, std::numeric_limits<double>::infinity()));
    }
    if (std::isfinite(t.upper)) knots.push_back(t.upper);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    t.xs = std::move(knots);
    t.vs.resize(t.xs.size());
    for (std::size_t i = 0; i < t.xs.size(); ++i) t.vs[i] = barycentre(law, t.xs[i]);
    // quadrature noise must not break the partition assumption of the
    // bisections over vs
    for (std::size_t i = 1; i < t.vs.size(); ++i) t.vs[i] = std::max(t.vs[i], t.vs[i - 1]);
    return t;
}

int resolve_threads(int requested) {
    if (requested > 0) return std::min(requested, 64);
    if (const char* env = std::getenv("PEACOCK_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return std::min(n, 64);
    }
    return 1;
}

std::size_t exact_time_index(const std::vector<double>& grid, double t, const char* what) {
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.end() || *it != t)
        throw PreconditionFailed(std::string(what) + " has no entry at t=" + num(t));
    return static_cast<std::size_t>(it - grid.begin());
}

}  // namespace

EmbeddingReport simulate_embedding(const TimeFamily& fam, const std::vector<double>& times,
                                   const PathConfig& cfg) {
    // a single marginal is a legitimate embedding target, so the family
    // check here is structural only
    if (fam.times.size() != fam.laws.size())
        throw PreconditionFailed("family times and laws differ in length");
    if (fam.times.empty()) throw PreconditionFailed("family has no marginals");
    for (std::size_t i = 0; i < fam.times.size(); ++i) {
        if (!std::isfinite(fam.times[i])) throw PreconditionFailed("family time is not finite");
        if (i && !(fam.times[i] > fam.times[i - 1]))
            throw PreconditionFailed("family times must be strictly increasing");
    }
    if (!(cfg.dt > 0.0)) throw ConfigError("step dt must be positive");
    if (!(cfg.horizon > 0.0) || cfg.horizon / cfg.dt > 1e8)
        throw ConfigError("horizon must be positive with at most 1e8 steps");
    if (cfg.paths < 1) throw ConfigError("path count must be at least 1");
    if (times.empty()) throw PreconditionFailed("embedding needs at least one time");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw PreconditionFailed("embedding times must be strictly increasing");

    std::vector<const Measure*> laws(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::size_t idx = exact_time_index(fam.times, times[k], "family");
        const Measure& law = fam.laws[idx];
        double spread = 1.0 + std::fabs(law.quantile(0.9) - law.quantile(0.1));
        if (std::fabs(law.mean()) > 1e-9 * spread)
            throw NotCentered("marginal at t=" + num(times[k]) + " has mean " +
                              num(law.mean()));
        laws[k] = &law;
    }

    std::vector<PsiTable> psi(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) psi[k] = build_table(*laws[k]);

    const std::size_t K = times.size();
    const std::size_t n = cfg.paths;
    const std::size_t max_steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    const double sdt = std::sqrt(cfg.dt);

    EmbeddingReport rep;
    rep.times = times;
    rep.stopped.assign(K, std::vector<double>(n, 0.0));
    rep.stop_times.assign(K, std::vector<double>(n, 0.0));
    rep.censored.assign(n, 0);
    rep.path_count = n;
    rep.pair_count = n * (K - 1);
    rep.dt = cfg.dt;

    int workers = resolve_threads(cfg.threads);
    std::vector<std::size_t> censored_by(workers, 0);
    std::vector<std::size_t> violations_by(workers, 0);

    auto run_range = [&](int worker, std::size_t lo, std::size_t hi) {
        std::size_t censored = 0;
        std::size_t violations = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            RngStream rs(cfg.seed, i);
            double b = 0.0;
            double s = 0.0;
            double prev_b = 0.0;
            double last_m = 0.0;
            std::size_t v = 0;
            bool dead = false;
            bool moved = false;
            for (std::size_t k = 0; k < K; ++k) {
                if (dead) {
                    rep.stop_times[k][i] = cfg.horizon;
                    rep.stopped[k][i] = b;
                    continue;
                }
                bool pair_flagged = false;
                while (psi[k].eval(b) > s) {
                    if (k + 1 < K && !pair_flagged && s >= psi[k + 1].eval(b)) {
                        pair_flagged = true;
                        ++violations;
                    }
                    if (v >= max_steps) {
                        dead = true;
                        break;
                    }
                    prev_b = b;
                    b += sdt * rs.normal();
                    if (b > s) s = b;
                    ++v;
                    moved = true;
                }
                if (dead) {
                    ++censored;
                    rep.censored[i] = 1;
                    rep.stop_times[k][i] = cfg.horizon;
                    rep.stopped[k][i] = b;
                    continue;
                }
                // the recorded value is where the path crossed into the
                // stopping set during the firing step: a rising step enters
                // at the top of the support, a falling step at the barrier
                // level of the running max, and a stop with no step taken
                // repeats the previous record
                double m;
                if (!moved) {
                    m = last_m;
                } else if (b > prev_b) {
                    m = std::isfinite(psi[k].upper) ? psi[k].upper : b;
                } else {
                    m = psi[k].invert_fall(s, b);
                }
                rep.stop_times[k][i] = static_cast<double>(v) * cfg.dt;
                rep.stopped[k][i] = m;
                last_m = m;
                moved = false;
            }
        }
        censored_by[worker] = censored;
        violations_by[worker] = violations;
    };

    if (workers <= 1) {
        run_range(0, 0, n);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (n + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            std::size_t lo = std::min(n, static_cast<std::size_t>(w) * chunk);
            std::size_t hi = std::min(n, lo + chunk);
            pool.emplace_back(run_range, w, lo, hi);
        }
        for (std::thread& th : pool) th.join();
    }

    for (int w = 0; w < workers; ++w) {
        rep.censored_paths += censored_by[w];
        rep.monotonicity_violations += violations_by[w];
    }
    rep.horizon_fail = rep.censored_fraction() > 0.01;
    return rep;
}

std::vector<double> verify_embedding(EmbeddingReport& report, const TimeFamily& fam,
                                     const std::vector<double>& times) {
    if (report.ks.size() != report.times.size())
        report.ks.assign(report.times.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t q = 0; q < times.size(); ++q) {
        std::size_t k = exact_time_index(report.times, times[q], "report");
        std::size_t idx = exact_time_index(fam.times, times[q], "family");
        const Measure& law = fam.laws[idx];

        std::vector<double> vals;
        vals.reserve(report.path_count);
        for (std::size_t i = 0; i < report.path_count; ++i)
            if (!report.censored[i]) vals.push_back(report.stopped[k][i]);
        if (vals.empty()) throw InsufficientPaths("all paths censored at t=" + num(times[q]));
        std::sort(vals.begin(), vals.end());

        // two-sided distance against the mixed law: per run of tied values,
        // the ECDF at x meets the cdf and the ECDF below x meets
        // P(X < x) = 1 - survival(x), so atoms on both sides line up
        double n = static_cast<double>(vals.size());
        double d = 0.0;
        std::size_t i = 0;
        while (i < vals.size()) {
            std::size_t j = i;
            while (j < vals.size() && vals[j] == vals[i]) ++j;
            double x = vals[i];
            d = std::max(d, std::fabs(static_cast<double>(j) / n - law.cdf(x)));
            d = std::max(d, std::fabs(static_cast<double>(i) / n - (1.0 - law.survival(x))));
            i = j;
        }
        report.ks[k] = d;
        out[q] = d;
    }
    return out;
}

MartingaleTable verify_martingale(const EmbeddingReport& report, double t1, double t2,
                                  std::size_t bins) {
    if (bins < 1) throw ConfigError("martingale check needs at least one bin");
    if (!(t1 < t2)) throw PreconditionFailed("martingale check needs t1 < t2");
    std::size_t k1 = exact_time_index(report.times, t1, "report");
    std::size_t k2 = exact_time_index(report.times, t2, "report");

    std::vector<std::pair<double, double>> pts;  // (M_t1, M_t2)
    pts.reserve(report.path_count);
    for (std::size_t i = 0; i < report.path_count; ++i)
        if (!report.censored[i])
            pts.emplace_back(report.stopped[k1][i], report.stopped[k2][i]);
    // ties in the bin variable keep path order; breaking them by the later
    // value would sort the future into the bins and fake a drift
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::size_t m = pts.size();
    if (m < 100 * bins)
        throw InsufficientPaths("need at least " + std::to_string(100 * bins) +
                                " uncensored paths for " + std::to_string(bins) + " bins, have " +
                                std::to_string(m));

    MartingaleTable table;
    table.pass = true;
    std::size_t base = m / bins;
    std::size_t extra = m % bins;
    std::size_t start = 0;
    for (std::size_t bnum = 0; bnum < bins; ++bnum) {
        std::size_t count = base + (bnum < extra ? 1 : 0);
        MartingaleBin bin;
        bin.count = count;
        bin.lo = pts[start].first;
        bin.hi = pts[start + count - 1].first;
        double acc = 0.0;
        for (std::size_t i = start; i < start + count; ++i)
            acc += pts[i].second - pts[i].first;
        bin.mean_residual = acc / static_cast<double>(count);
        double var = 0.0;
        for (std::size_t i = start; i < start + count; ++i) {
            double r = pts[i].second - pts[i].first - bin.mean_residual;
            var += r * r;
        }
        var /= static_cast<double>(count);
        bin.stderr_residual = std::sqrt(var / static_cast<double>(count));
        bin.pass = std::fabs(bin.mean_residual) <= 3.0 * bin.stderr_residual + 1e-3;
        table.pass = table.pass && bin.pass;
        table.bins.push_back(bin);
        start += count;
    }
    return table;
}

void write_embedding_csv(const std::string& path, const EmbeddingReport& report) {
    std::string out = "path,time,T,M,censored\n";
    char buf[160];
    for (std::size_t i = 0; i < report.path_count; ++i) {
        for (std::size_t k = 0; k < report.times.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%d\n", i, report.times[k],
                          report.stop_times[k][i], report.stopped[k][i],
                          report.censored[i] ? 1 : 0);
            out += buf;
        }
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << out;
}

void write_embedding_summary_csv(const std::string& path, const EmbeddingReport& report) {
    if (report.ks.size() != report.times.size())
        throw PreconditionFailed("summary needs verify_embedding to fill KS distances");
    std::string out = "time,ks,censored_frac,monotonicity_violations\n";
    char buf[160];
    for (std::size_t k = 0; k < report.times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu\n", report.times[k], report.ks[k],
                      report.censored_fraction(), report.monotonicity_violations);
        out += buf;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << out;
}

}  // namespace peacock
