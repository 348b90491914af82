#include "peacock/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <mutex>

#include "peacock/errors.hpp"

namespace peacock {

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol) {
    if (a == b) return 0.0;
    double error = 0.0;
    double l1 = 0.0;
    // Ask for more than we accept; the estimator stops refining once its own
    // target is met, which would otherwise leave the estimate on the boundary.
    double q = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 15, rel_tol / 16.0, &error, &l1);
    // The error estimate is absolute; accept when it meets the relative target
    // against the L1 mass of the integrand (robust when q itself is near zero).
    double scale = std::max(std::fabs(q), l1);
    if (error > rel_tol * std::max(scale, 1e-300) && error > 1e-14) {
        throw QuadratureFailure("adaptive refinement stalled at estimated error " +
                                std::to_string(error) + " on [" + std::to_string(a) +
                                ", " + std::to_string(b) + "]");
    }
    return q;
}

namespace {

// Newton iteration on the Legendre recurrence; standard construction.
GaussLegendre build_rule(int n) {
    GaussLegendre r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double pi = 3.14159265358979323846;
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

}  // namespace

const GaussLegendre& GaussLegendre::rule(int n) {
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

PanelRule gauss_legendre_on(double a, double b, int n) {
    const GaussLegendre& gl = GaussLegendre::rule(n);
    PanelRule pr;
    pr.x.resize(n);
    pr.w.resize(n);
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        pr.x[i] = mid + half * gl.nodes[i];
        pr.w[i] = half * gl.weights[i];
    }
    return pr;
}

PanelRule composite_gauss_legendre(double a, double b, int panels, int points) {
    PanelRule out;
    out.x.reserve(static_cast<std::size_t>(panels) * points);
    out.w.reserve(static_cast<std::size_t>(panels) * points);
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        PanelRule pr = gauss_legendre_on(a + p * h, a + (p + 1) * h, points);
        out.x.insert(out.x.end(), pr.x.begin(), pr.x.end());
        out.w.insert(out.w.end(), pr.w.begin(), pr.w.end());
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> xs(n);
    if (n == 1) {
        xs[0] = lo;
        return xs;
    }
    double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) xs[i] = lo + step * static_cast<double>(i);
    xs.back() = hi;
    return xs;
}

}  // namespace peacock
