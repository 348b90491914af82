#pragma once

#include <functional>
#include <vector>

namespace peacock {

// Adaptive Gauss-Kronrod on a finite window. Throws QuadratureFailure when the
// requested relative accuracy cannot be reached.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol = 1e-10);

// Fixed Gauss-Legendre rule on [-1, 1]; nodes/weights are computed once per
// order and cached. Orders up to a few thousand are fine.
struct GaussLegendre {
    std::vector<double> nodes;    // ascending in (-1, 1)
    std::vector<double> weights;

    static const GaussLegendre& rule(int n);
};

// Nodes/weights of an n-point Gauss-Legendre rule mapped onto [a, b].
struct PanelRule {
    std::vector<double> x;
    std::vector<double> w;
};

PanelRule gauss_legendre_on(double a, double b, int n);

// Composite rule: `panels` equal panels over [a, b], `points` Gauss-Legendre
// points per panel. The node set depends only on (a, b, panels, points), so
// sums over it can be shared between integrands.
PanelRule composite_gauss_legendre(double a, double b, int panels, int points);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace peacock
