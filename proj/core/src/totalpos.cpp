#include "peacock/totalpos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "peacock/csv.hpp"
#include "peacock/errors.hpp"
#include "peacock/mrl.hpp"

namespace peacock {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

// Raw-determinant floor for minors touching a zero entry; see the header.
constexpr double kZeroMinorFloor = 1e-12;

void require_increasing(const std::vector<double>& v, const char* what) {
    if (v.empty()) {
        throw PreconditionFailed(std::string(what) + " grid is empty");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw PreconditionFailed(std::string(what) + " grid has a non-finite label");
        }
        if (i > 0 && v[i] <= v[i - 1]) {
            throw PreconditionFailed(std::string(what) +
                                     " grid labels must be strictly increasing");
        }
    }
}

void require_grid(const Tp2Grid& g) {
    require_increasing(g.rows, "row");
    require_increasing(g.cols, "col");
    if (g.values.size() != g.rows.size() * g.cols.size()) {
        throw PreconditionFailed("value buffer does not match the grid shape");
    }
    for (double v : g.values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw PreconditionFailed("grid entries must be finite and nonnegative");
        }
    }
}

double uniform_spacing(const std::vector<double>& xs, const char* what) {
    if (xs.size() < 2) {
        throw PreconditionFailed(std::string(what) + " grid needs at least two points");
    }
    const double h = xs[1] - xs[0];
    if (!(h > 0.0)) {
        throw PreconditionFailed(std::string(what) + " grid must be increasing");
    }
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
        if (std::fabs(xs[i + 1] - xs[i] - h) > 1e-9 * h) {
            throw PreconditionFailed(std::string(what) + " grid must be equally spaced");
        }
    }
    return h;
}

void require_samples(const std::vector<double>& xs, const std::vector<double>& fs,
                     const char* what) {
    if (xs.size() != fs.size()) {
        throw PreconditionFailed(std::string(what) + " samples and grid differ in length");
    }
    for (double f : fs) {
        if (!std::isfinite(f) || f < 0.0) {
            throw PreconditionFailed(std::string(what) +
                                     " samples must be finite and nonnegative");
        }
    }
}

// Tracks the minimum normalized minor together with its index witness.
struct MinorScan {
    double worst = 0.0;
    double raw = 0.0;
    std::size_t r1 = 0, r2 = 0, c1 = 0, c2 = 0;
    bool any = false;

    void feed(double a, double b, double c, double d, std::size_t i1, std::size_t i2,
              std::size_t j1, std::size_t j2) {
        const double ad = a * d;
        const double bc = b * c;
        const double det = ad - bc;
        double m = det / std::max({std::fabs(ad), std::fabs(bc), 1e-300});
        if (det < 0.0 && det > -kZeroMinorFloor &&
            (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0)) {
            m = 0.0;
        }
        if (!any || m < worst) {
            worst = m;
            raw = det;
            r1 = i1;
            r2 = i2;
            c1 = j1;
            c2 = j2;
            any = true;
        }
    }
};

OrderVerdict verdict_from(const MinorScan& scan, const Tp2Grid& grid, Tolerance tol) {
    OrderVerdict v;
    v.tolerance_used = tol.at(1.0);
    if (scan.any) {
        v.worst_violation = scan.worst;
        v.worst_raw = scan.raw;
        v.row_lo = grid.rows[scan.r1];
        v.row_hi = grid.rows[scan.r2];
        v.col_lo = grid.cols[scan.c1];
        v.col_hi = grid.cols[scan.c2];
    }
    v.holds = v.worst_violation >= -v.tolerance_used;
    return v;
}

// Composite Simpson weights for equally spaced samples; a trailing
// three-eighths block absorbs an odd panel count.
std::vector<double> simpson_weights(std::size_t npts, double h) {
    std::vector<double> w(npts, 0.0);
    if (npts < 2) {
        return w;
    }
    if (npts == 2) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    const std::size_t panels = npts - 1;
    const std::size_t main = panels % 2 == 0 ? panels : panels - 3;
    if (main > 0) {
        w[0] += h / 3.0;
        for (std::size_t i = 1; i < main; ++i) {
            w[i] += (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
        }
        w[main] += h / 3.0;
    }
    if (panels % 2 == 1) {
        const double c = 3.0 * h / 8.0;
        w[main] += c;
        w[main + 1] += 3.0 * c;
        w[main + 2] += 3.0 * c;
        w[main + 3] += c;
    }
    return w;
}

// Exact discrete convolution with a rectangle weight per step node.
std::vector<double> rect_fold(const std::vector<double>& a, const std::vector<double>& b,
                              double h) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            continue;
        }
        const double ai = a[i] * h;
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += ai * b[j];
        }
    }
    return out;
}

int integer_horizon(double t) {
    const double r = std::nearbyint(t);
    if (!(std::fabs(t - r) <= 1e-9) || r < 1.0 || r > 1e9) {
        throw PreconditionFailed("walk horizons are whole step counts starting at 1");
    }
    return static_cast<int>(r);
}

double parse_num(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("grid csv holds a non-numeric cell: '" + s + "'");
    }
}

}  // namespace

Tp2Grid kernel_on_grid(std::vector<double> rows, std::vector<double> cols,
                       const std::function<double(double, double)>& k) {
    require_increasing(rows, "row");
    require_increasing(cols, "col");
    Tp2Grid g;
    g.rows = std::move(rows);
    g.cols = std::move(cols);
    g.values.resize(g.rows.size() * g.cols.size());
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
        for (std::size_t j = 0; j < g.cols.size(); ++j) {
            g.at(i, j) = k(g.rows[i], g.cols[j]);
        }
    }
    return g;
}

void tp2_grid_to_csv(const std::string& path, const Tp2Grid& grid) {
    require_grid(grid);
    CsvTable t;
    t.header.push_back("k");
    for (double c : grid.cols) {
        t.header.push_back(fmt17(c));
    }
    for (std::size_t i = 0; i < grid.rows.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(fmt17(grid.rows[i]));
        for (std::size_t j = 0; j < grid.cols.size(); ++j) {
            row.push_back(fmt17(grid.at(i, j)));
        }
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

Tp2Grid tp2_grid_from_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.header.size() < 2 || t.header[0] != "k") {
        throw ConfigError("grid csv must have a 'k' corner cell and column labels");
    }
    Tp2Grid g;
    for (std::size_t j = 1; j < t.header.size(); ++j) {
        g.cols.push_back(parse_num(t.header[j]));
    }
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size()) {
            throw ConfigError("grid csv row length does not match the header");
        }
        g.rows.push_back(parse_num(row[0]));
        for (std::size_t j = 1; j < row.size(); ++j) {
            g.values.push_back(parse_num(row[j]));
        }
    }
    require_grid(g);
    return g;
}

OrderVerdict tp2_check(const Tp2Grid& grid, MinorMode mode, Tolerance tol) {
    require_grid(grid);
    const std::size_t R = grid.rows.size();
    const std::size_t C = grid.cols.size();
    if (mode == MinorMode::Adjacent) {
        for (double v : grid.values) {
            if (v <= 0.0) {
                throw ModeInvalid(
                    "adjacent minors need strictly positive entries; use all-pairs");
            }
        }
    }
    MinorScan scan;
    if (mode == MinorMode::Adjacent) {
        for (std::size_t i = 0; i + 1 < R; ++i) {
            for (std::size_t j = 0; j + 1 < C; ++j) {
                scan.feed(grid.at(i, j), grid.at(i, j + 1), grid.at(i + 1, j),
                          grid.at(i + 1, j + 1), i, i + 1, j, j + 1);
            }
        }
    } else {
        for (std::size_t i1 = 0; i1 < R; ++i1) {
            for (std::size_t i2 = i1 + 1; i2 < R; ++i2) {
                const double* top = grid.values.data() + i1 * C;
                const double* bot = grid.values.data() + i2 * C;
                for (std::size_t j1 = 0; j1 < C; ++j1) {
                    for (std::size_t j2 = j1 + 1; j2 < C; ++j2) {
                        scan.feed(top[j1], top[j2], bot[j1], bot[j2], i1, i2, j1, j2);
                    }
                }
            }
        }
    }
    return verdict_from(scan, grid, tol);
}

OrderVerdict log_concavity_check(const std::vector<double>& xs,
                                 const std::vector<double>& fs, Tolerance tol) {
    uniform_spacing(xs, "sample");
    require_samples(xs, fs, "density");
    std::size_t lo = fs.size();
    std::size_t hi = 0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (fs[i] > 0.0) {
            lo = std::min(lo, i);
            hi = i;
        }
    }
    if (lo == fs.size()) {
        throw PreconditionFailed("density has no positive samples");
    }
    for (std::size_t i = lo; i <= hi; ++i) {
        if (fs[i] == 0.0) {
            std::ostringstream os;
            os << "zero sample at x=" << xs[i] << " splits the positive block";
            throw NonIntervalSupport(os.str());
        }
    }
    OrderVerdict v;
    v.tolerance_used = tol.at(1.0);
    bool any = false;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        const double center = fs[i] * fs[i];
        const double sides = fs[i - 1] * fs[i + 1];
        const double m = (center - sides) / std::max(center, sides);
        if (!any || m < v.worst_violation) {
            v.worst_violation = m;
            v.worst_raw = center - sides;
            v.col_lo = xs[i - 1];
            v.col_hi = xs[i + 1];
            any = true;
        }
    }
    v.holds = v.worst_violation >= -v.tolerance_used;
    return v;
}

Tp2Grid compose_kernels(const Tp2Grid& k1, const Tp2Grid& k2,
                        const std::vector<double>& weights) {
    require_grid(k1);
    require_grid(k2);
    if (k1.cols.size() != k2.rows.size()) {
        throw PreconditionFailed("intermediate grids differ in size");
    }
    for (std::size_t j = 0; j < k1.cols.size(); ++j) {
        if (k1.cols[j] != k2.rows[j]) {
            throw PreconditionFailed("intermediate grids must share nodes exactly");
        }
    }
    if (weights.size() != k1.cols.size()) {
        throw PreconditionFailed("need one weight per intermediate node");
    }
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw PreconditionFailed("composition weights must be finite and nonnegative");
        }
    }
    Tp2Grid r;
    r.rows = k1.rows;
    r.cols = k2.cols;
    r.values.assign(r.rows.size() * r.cols.size(), 0.0);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        for (std::size_t j = 0; j < weights.size(); ++j) {
            const double f = weights[j] * k1.at(i, j);
            if (f == 0.0) {
                continue;
            }
            for (std::size_t k = 0; k < r.cols.size(); ++k) {
                r.at(i, k) += f * k2.at(j, k);
            }
        }
    }
    return r;
}

ConvTable convolution_power(const std::vector<double>& xs, const std::vector<double>& f,
                            int n) {
    if (n < 1) {
        throw PreconditionFailed("convolution power needs n >= 1");
    }
    const double h = uniform_spacing(xs, "density");
    require_samples(xs, f, "density");
    const std::size_t m = xs.size();
    std::vector<double> g = f;
    for (int p = 2; p <= n; ++p) {
        const std::size_t glen = g.size();
        std::vector<double> out(glen + m - 1, 0.0);
        for (std::size_t j = 0; j < out.size(); ++j) {
            const std::size_t lo = j >= glen ? j - (glen - 1) : 0;
            const std::size_t hi = std::min(j, m - 1);
            const std::vector<double> w = simpson_weights(hi - lo + 1, h);
            double s = 0.0;
            for (std::size_t i = lo; i <= hi; ++i) {
                s += w[i - lo] * f[i] * g[j - i];
            }
            out[j] = s;
        }
        g = std::move(out);
    }
    ConvTable t;
    t.xs.resize(g.size());
    const double left = n * xs.front();
    for (std::size_t j = 0; j < g.size(); ++j) {
        t.xs[j] = left + static_cast<double>(j) * h;
        if (!std::isfinite(g[j])) {
            throw QuadratureFailure("convolution power produced a non-finite value");
        }
    }
    t.values = std::move(g);
    return t;
}

Tp2Grid walk_table(const std::vector<double>& xs, const std::vector<double>& f,
                   int n_steps, std::size_t max_cols) {
    if (n_steps < 1) {
        throw PreconditionFailed("walk needs at least one step");
    }
    return nonstationary_walk_table(
        xs, std::vector<std::vector<double>>(static_cast<std::size_t>(n_steps), f),
        max_cols);
}

Tp2Grid nonstationary_walk_table(const std::vector<double>& xs,
                                 const std::vector<std::vector<double>>& steps,
                                 std::size_t max_cols) {
    if (steps.empty()) {
        throw PreconditionFailed("walk needs at least one step density");
    }
    const double h = uniform_spacing(xs, "step");
    if (xs.front() != 0.0) {
        throw PreconditionFailed("walk step grid must start at 0");
    }
    for (const auto& s : steps) {
        require_samples(xs, s, "step");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(steps.size());
    rows.push_back(steps.front());
    for (std::size_t k = 1; k < steps.size(); ++k) {
        rows.push_back(rect_fold(rows.back(), steps[k], h));
    }
    const std::size_t full = rows.back().size();
    const std::vector<std::size_t> keep = downsample_indices(full, max_cols);
    Tp2Grid g;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        g.rows.push_back(static_cast<double>(k + 1));
    }
    for (std::size_t idx : keep) {
        g.cols.push_back(static_cast<double>(idx) * h);
    }
    g.values.resize(g.rows.size() * g.cols.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t j = 0; j < keep.size(); ++j) {
            g.at(k, j) = keep[j] < rows[k].size() ? rows[k][keep[j]] : 0.0;
        }
    }
    return g;
}

OrderVerdict nonstationary_walk_tp2(const std::vector<double>& xs,
                                    const std::vector<std::vector<double>>& steps,
                                    std::size_t max_cols, Tolerance tol) {
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const OrderVerdict lc = log_concavity_check(xs, steps[i], tol);
        if (!lc.holds) {
            std::ostringstream os;
            os << "step " << (i + 1) << " is not log-concave (worst margin "
               << lc.worst_violation << " near x=" << lc.col_lo << ")";
            throw PreconditionFailed(os.str());
        }
    }
    return tp2_check(nonstationary_walk_table(xs, steps, max_cols),
                     MinorMode::AllPairs, tol);
}

std::vector<std::size_t> downsample_indices(std::size_t n, std::size_t max_count) {
    std::vector<std::size_t> idx;
    if (n == 0) {
        return idx;
    }
    max_count = std::max<std::size_t>(max_count, 2);
    if (n <= max_count) {
        idx.resize(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        return idx;
    }
    for (std::size_t k = 0; k < max_count; ++k) {
        const double pos = static_cast<double>(k) * static_cast<double>(n - 1) /
                           static_cast<double>(max_count - 1);
        const std::size_t i = static_cast<std::size_t>(std::llround(pos));
        if (idx.empty() || i > idx.back()) {
            idx.push_back(i);
        }
    }
    return idx;
}

double laplace_convolution_density(double rate, int n, double x) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw PreconditionFailed("step rate must be positive");
    }
    if (n < 1) {
        throw PreconditionFailed("fold count must be >= 1");
    }
    const double ax = std::fabs(x);
    if (n == 1) {
        return 0.5 * rate * std::exp(-rate * ax);
    }
    // p_n(x) = (c/2)^n e^{-c|x|}/(n-1)! * sum_k (n-1+k)!/(k!(n-1-k)!) (2c)^{-k} |x|^{n-1-k},
    // evaluated in log space so large fold counts neither overflow nor lose the tail.
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const int e = n - 1 - k;
        if (ax == 0.0 && e != 0) {
            continue;
        }
        double lt = std::lgamma(static_cast<double>(n + k)) -
                    std::lgamma(static_cast<double>(k + 1)) -
                    std::lgamma(static_cast<double>(n - k)) -
                    k * std::log(2.0 * rate);
        if (e != 0) {
            lt += e * std::log(ax);
        }
        logs.push_back(lt);
        mx = std::max(mx, lt);
    }
    double s = 0.0;
    for (double lt : logs) {
        s += std::exp(lt - mx);
    }
    return std::exp(n * std::log(0.5 * rate) - rate * ax -
                    std::lgamma(static_cast<double>(n)) + mx + std::log(s));
}

ErlangWalkKernel::ErlangWalkKernel(double rate) : rate_(rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw PreconditionFailed("step rate must be positive");
    }
}

double ErlangWalkKernel::weight(double t, double x, double y) const {
    const int n = integer_horizon(t);
    const double d = y - x;
    if (d < 0.0) {
        return 0.0;
    }
    if (d == 0.0) {
        return n == 1 ? rate_ : 0.0;
    }
    return std::exp(n * std::log(rate_) + (n - 1) * std::log(d) - rate_ * d -
                    std::lgamma(static_cast<double>(n)));
}

std::string ErlangWalkKernel::describe() const {
    std::ostringstream os;
    os << "one-sided exponential walk, rate " << rate_;
    return os.str();
}

ReflectedLaplaceWalkKernel::ReflectedLaplaceWalkKernel(double rate) : rate_(rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw PreconditionFailed("step rate must be positive");
    }
}

double ReflectedLaplaceWalkKernel::weight(double t, double x, double y) const {
    const int n = integer_horizon(t);
    if (x < 0.0 || y < 0.0) {
        throw PreconditionFailed("reflected walk states live on the nonnegative half-line");
    }
    return laplace_convolution_density(rate_, n, y - x) +
           laplace_convolution_density(rate_, n, y + x);
}

std::string ReflectedLaplaceWalkKernel::describe() const {
    std::ostringstream os;
    os << "reflected two-sided exponential walk, rate " << rate_;
    return os.str();
}

DriftKernel::DriftKernel(double drift) : drift_(drift) {
    if (!std::isfinite(drift)) {
        throw PreconditionFailed("drift must be finite");
    }
}

double DriftKernel::weight(double t, double x, double y) const {
    if (!(t > 0.0)) {
        throw PreconditionFailed("horizon must be positive");
    }
    const double sd = std::sqrt(t);
    const double z = (y - x - drift_ * t) / sd;
    return std::exp(-0.5 * z * z) / (sd * kSqrt2Pi);
}

std::string DriftKernel::describe() const {
    std::ostringstream os;
    os << "gaussian walk with drift " << drift_;
    return os.str();
}

MatrixChainKernel::MatrixChainKernel(std::vector<double> states,
                                     std::vector<std::vector<double>> p)
    : states_(std::move(states)), p_(std::move(p)) {
    require_increasing(states_, "state");
    if (p_.size() != states_.size()) {
        throw PreconditionFailed("transition matrix size does not match the state count");
    }
    for (const auto& row : p_) {
        if (row.size() != states_.size()) {
            throw PreconditionFailed("transition matrix must be square");
        }
        double sum = 0.0;
        for (double v : row) {
            if (!std::isfinite(v) || v < 0.0) {
                throw PreconditionFailed("transition probabilities must be nonnegative");
            }
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-8) {
            std::ostringstream os;
            os << "transition row sums to " << sum << ", not 1";
            throw PreconditionFailed(os.str());
        }
    }
}

std::size_t MatrixChainKernel::index_of(double s) const {
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (states_[i] == s) {
            return i;
        }
    }
    std::ostringstream os;
    os << "state " << s << " is not a chain node";
    throw PreconditionFailed(os.str());
}

double MatrixChainKernel::weight(double t, double x, double y) const {
    const int n = integer_horizon(t);
    const std::size_t from = index_of(x);
    const std::size_t to = index_of(y);
    std::vector<double> v(states_.size(), 0.0);
    v[from] = 1.0;
    for (int step = 0; step < n; ++step) {
        std::vector<double> next(states_.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < v.size(); ++j) {
                next[j] += v[i] * p_[i][j];
            }
        }
        v = std::move(next);
    }
    return v[to];
}

std::string MatrixChainKernel::describe() const {
    std::ostringstream os;
    os << "finite chain on " << states_.size() << " states";
    return os.str();
}

Tp2Grid spacetime_slice(const MarkovKernel& kernel, const std::vector<double>& times,
                        double x0, const std::vector<double>& ys) {
    return kernel_on_grid(times, ys,
                          [&](double t, double y) { return kernel.weight(t, x0, y); });
}

OrderVerdict spacetime_tp2(const MarkovKernel& kernel, const std::vector<double>& times,
                           double x0, const std::vector<double>& ys, MinorMode mode,
                           Tolerance tol) {
    require_increasing(times, "time");
    require_increasing(ys, "state");
    const double unit = times.front();
    const Tp2Grid one = kernel_on_grid(
        ys, ys, [&](double a, double b) { return kernel.weight(unit, a, b); });
    const OrderVerdict base = tp2_check(one, MinorMode::AllPairs, tol);
    if (!base.holds) {
        std::ostringstream os;
        os << kernel.describe() << ": one-step kernel has a negative minor ("
           << base.worst_violation << " on states [" << base.row_lo << ", " << base.row_hi
           << "] x [" << base.col_lo << ", " << base.col_hi << "])";
        throw PreconditionFailed(os.str());
    }
    return tp2_check(spacetime_slice(kernel, times, x0, ys), mode, tol);
}

double slice_mass(const MarkovKernel& kernel, double t, double x0,
                  const std::vector<double>& ys) {
    const double h = uniform_spacing(ys, "state");
    const std::vector<double> w = simpson_weights(ys.size(), h);
    double mass = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        mass += w[i] * kernel.weight(t, x0, ys[i]);
    }
    return mass;
}

Tp2Grid isf_grid(const TimeFamily& family, const std::vector<double>& xs) {
    validate_family(family);
    require_increasing(xs, "state");
    Tp2Grid g;
    g.rows = family.times;
    g.cols = xs;
    g.values.resize(g.rows.size() * g.cols.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            // Exact-arithmetic C can dip a few ulp under 0 past the support edge.
            g.at(i, j) = std::max(0.0, family.laws[i].integrated_survival(xs[j]));
        }
    }
    return g;
}

OrderVerdict isf_tp2_check(const TimeFamily& family, const std::vector<double>& xs,
                           MinorMode mode, Tolerance tol) {
    return tp2_check(isf_grid(family, xs), mode, tol);
}

}  // namespace peacock
