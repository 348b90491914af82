#include "peacock/mrl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "peacock/quadrature.hpp"

namespace peacock {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double mrl(const Measure& mu, double x) {
    double s = mu.survival(x);
    if (!(s > 0.0)) return 0.0;
    return std::max(mu.integrated_survival(x), 0.0) / s;
}

double barycentre(const Measure& mu, double x) {
    double s = mu.survival(x);
    if (!(s > 0.0)) return x;
    return x + std::max(mu.integrated_survival(x), 0.0) / s;
}

// ----------------------------------------------------------------------------
// Barycentre curves.
// ----------------------------------------------------------------------------

double BarycentreCurve::eval(double x) const {
    if (x <= xs.front()) return values.front();
    if (x >= xs.back()) return values.back() + (x - xs.back());
    // last knot at or before x
    std::size_t lo = 0, hi = xs.size() - 1;
    while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (xs[mid] <= x)
            lo = mid;
        else
            hi = mid;
    }
    if (xs[lo] == x) return values[lo];
    double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
}

double BarycentreCurve::inverse_sup(double s) const {
    if (s < values.front()) return -kInf;
    if (s >= values.back()) return xs.back() + (s - values.back());
    // rightmost knot with value <= s
    std::size_t lo = 0, hi = values.size() - 1;
    while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (values[mid] <= s)
            lo = mid;
        else
            hi = mid;
    }
    // values[lo] <= s < values[hi]
    return xs[lo] + (s - values[lo]) * (xs[hi] - xs[lo]) / (values[hi] - values[lo]);
}

BarycentreCurve barycentre_curve(const Measure& mu, std::size_t points) {
    BarycentreCurve c;

    if (mu.purely_atomic()) {
        // Exact step curve: on (a_i, a_{i+1}] the barycentre is the mean of
        // the atoms from i+1 up. Doubled knots encode each jump.
        const auto& atoms = mu.atoms();
        std::size_t n = atoms.size();
        std::vector<double> level(n);  // level[i] = barycentre at x = a_i
        double w = 0.0, m = 0.0;
        for (std::size_t i = n; i-- > 0;) {
            w += atoms[i].mass;
            m += atoms[i].mass * atoms[i].position;
            level[i] = m / w;
        }
        level[n - 1] = atoms[n - 1].position;  // exact at the top atom
        for (std::size_t i = 0; i < n; ++i) {
            c.xs.push_back(atoms[i].position);
            c.values.push_back(level[i]);
            if (i + 1 < n) {
                c.xs.push_back(std::nextafter(atoms[i].position, kInf));
                c.values.push_back(level[i + 1]);
            }
        }
        return c;
    }

    std::vector<double> grid = quantile_span_grid(mu, points, 1e-10);
    for (const Atom& at : mu.atoms()) {
        grid.push_back(at.position);
        grid.push_back(std::nextafter(at.position, kInf));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    c.xs = std::move(grid);
    c.values.reserve(c.xs.size());
    double run = -kInf;
    for (double x : c.xs) {
        // enforce monotone knot values against floating noise
        run = std::max(run, barycentre(mu, x));
        c.values.push_back(run);
    }
    return c;
}

// ----------------------------------------------------------------------------
// Order checks.
// ----------------------------------------------------------------------------

void validate_family(const TimeFamily& family) {
    if (family.times.size() != family.laws.size())
        throw PreconditionFailed("family times and laws differ in length");
    if (family.times.size() < 2)
        throw PreconditionFailed("family needs at least two times");
    for (std::size_t i = 0; i < family.times.size(); ++i) {
        if (!std::isfinite(family.times[i]))
            throw PreconditionFailed("family time is not finite");
        if (i && !(family.times[i] > family.times[i - 1]))
            throw PreconditionFailed("family times must be strictly increasing");
    }
}

namespace {

void require_probes(const std::vector<double>& xs) {
    if (xs.size() < 2) throw PreconditionFailed("need at least two probe points");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i])) throw PreconditionFailed("probe is not finite");
        if (i && !(xs[i] > xs[i - 1]))
            throw PreconditionFailed("probes must be strictly increasing");
    }
}

}  // namespace

OrderVerdict compare_mrl(const Measure& mu1, const Measure& mu2,
                         const std::vector<double>& xs, Tolerance tol) {
    if (xs.empty()) throw PreconditionFailed("need at least one probe point");
    OrderVerdict v;
    double scale = 0.0;
    bool first = true;
    for (double x : xs) {
        double l1 = mrl(mu1, x), l2 = mrl(mu2, x);
        scale = std::max({scale, l1, l2});
        double margin = l2 - l1;
        if (first || margin < v.worst_violation) {
            v.worst_violation = margin;
            v.col_lo = v.col_hi = x;
            first = false;
        }
    }
    v.worst_violation = std::min(v.worst_violation, 0.0);
    v.worst_raw = v.worst_violation;
    v.tolerance_used = tol.at(scale);
    v.holds = v.worst_violation >= -v.tolerance_used;
    return v;
}

OrderVerdict check_family_mrl(const TimeFamily& family, const std::vector<double>& xs,
                              Tolerance tol) {
    validate_family(family);
    if (xs.empty()) throw PreconditionFailed("need at least one probe point");
    OrderVerdict v;
    double scale = 0.0;
    bool first = true;
    for (std::size_t k = 0; k + 1 < family.size(); ++k) {
        for (double x : xs) {
            double p0 = barycentre(family.at(k), x);
            double p1 = barycentre(family.at(k + 1), x);
            scale = std::max({scale, std::fabs(p0), std::fabs(p1)});
            double margin = p1 - p0;
            if (first || margin < v.worst_violation) {
                v.worst_violation = margin;
                v.row_lo = family.times[k];
                v.row_hi = family.times[k + 1];
                v.col_lo = v.col_hi = x;
                first = false;
            }
        }
    }
    v.worst_violation = std::min(v.worst_violation, 0.0);
    v.worst_raw = v.worst_violation;
    v.tolerance_used = tol.at(scale);
    v.holds = v.worst_violation >= -v.tolerance_used;
    return v;
}

OrderVerdict check_peacock(const TimeFamily& family, const std::vector<double>& xs,
                           Tolerance tol) {
    validate_family(family);
    if (xs.empty()) throw PreconditionFailed("need at least one probe point");
    OrderVerdict v;

    double mean0 = family.at(0).mean();
    double mean_scale = std::fabs(mean0), drift = 0.0, drift_at = family.times[0];
    for (std::size_t k = 1; k < family.size(); ++k) {
        double mk = family.at(k).mean();
        mean_scale = std::max(mean_scale, std::fabs(mk));
        if (std::fabs(mk - mean0) > drift) {
            drift = std::fabs(mk - mean0);
            drift_at = family.times[k];
        }
    }

    double scale = 0.0;
    bool first = true;
    for (std::size_t k = 0; k + 1 < family.size(); ++k) {
        for (double x : xs) {
            double c0 = family.at(k).integrated_survival(x);
            double c1 = family.at(k + 1).integrated_survival(x);
            scale = std::max({scale, c0, c1});
            double margin = c1 - c0;
            if (first || margin < v.worst_violation) {
                v.worst_violation = margin;
                v.row_lo = family.times[k];
                v.row_hi = family.times[k + 1];
                v.col_lo = v.col_hi = x;
                first = false;
            }
        }
    }
    v.worst_violation = std::min(v.worst_violation, 0.0);
    v.worst_raw = v.worst_violation;
    v.tolerance_used = tol.at(scale);
    v.holds = v.worst_violation >= -v.tolerance_used;

    if (drift > tol.at(std::max(1.0, mean_scale))) {
        v.holds = false;
        v.note = "NonConstantMean: mean moves by " + std::to_string(drift) +
                 " at t=" + std::to_string(drift_at);
    }
    return v;
}

OrderVerdict check_madan_yor(const Measure& mu, const std::vector<double>& as,
                             Tolerance tol) {
    require_probes(as);
    if (!(as.front() > 0.0)) throw PreconditionFailed("probes must be positive");
    double mean = mu.mean();
    double mass_scale = std::max(1.0, mu.integrated_survival(0.0));
    if (std::fabs(mean) > tol.at(mass_scale))
        throw NotCentered("madan-yor check needs a centered law, mean=" +
                          std::to_string(mean));

    OrderVerdict v;
    double scale = 0.0;
    bool first = true;
    double prev = barycentre(mu, as[0]) / as[0];
    scale = std::max(scale, std::fabs(prev));
    for (std::size_t i = 1; i < as.size(); ++i) {
        double cur = barycentre(mu, as[i]) / as[i];
        scale = std::max(scale, std::fabs(cur));
        double margin = prev - cur;  // want non-increasing
        if (first || margin < v.worst_violation) {
            v.worst_violation = margin;
            v.col_lo = as[i - 1];
            v.col_hi = as[i];
            first = false;
        }
        prev = cur;
    }
    v.worst_violation = std::min(v.worst_violation, 0.0);
    v.worst_raw = v.worst_violation;
    v.tolerance_used = tol.at(scale);
    v.holds = v.worst_violation >= -v.tolerance_used;
    return v;
}

OrderVerdict check_dmrl(const Measure& mu, const std::vector<double>& xs,
                        Tolerance tol) {
    require_probes(xs);
    OrderVerdict v;
    double scale = 0.0;
    bool first = true;
    double prev = mrl(mu, xs[0]);
    scale = std::max(scale, prev);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        double cur = mrl(mu, xs[i]);
        scale = std::max(scale, cur);
        double margin = prev - cur;
        if (first || margin < v.worst_violation) {
            v.worst_violation = margin;
            v.col_lo = xs[i - 1];
            v.col_hi = xs[i];
            first = false;
        }
        prev = cur;
    }
    v.worst_violation = std::min(v.worst_violation, 0.0);
    v.worst_raw = v.worst_violation;
    v.tolerance_used = tol.at(scale);
    v.holds = v.worst_violation >= -v.tolerance_used;
    return v;
}

}  // namespace peacock
