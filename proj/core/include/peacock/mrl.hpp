#pragma once

#include <vector>

#include "peacock/measure.hpp"
#include "peacock/time_family.hpp"
#include "peacock/verdict.hpp"

namespace peacock {

// ============================================================================
// Mean residual life and the barycentre transform.
//
// For an integrable law mu with survival S and integrated survival C,
//     mrl(x)  = C(x) / S(x)            while S(x) > 0,   0 beyond,
//     psi(x)  = x + mrl(x)             below the upper support,  x beyond.
// psi(x) is the barycentre of the part of mu at or above x. It is
// non-decreasing, satisfies psi(x) >= x with equality exactly from the upper
// support on, and tends to the mean on the far left.
// ============================================================================

double mrl(const Measure& mu, double x);
double barycentre(const Measure& mu, double x);

// Piecewise-linear sampling of the barycentre function. At every atom of mu
// the function jumps; the knot list carries both one-sided values, at the atom
// position and at the next representable point, so interpolation reproduces
// the jump instead of smearing it. Purely atomic laws get exact step curves.
//
// eval() extends with the left asymptote below the first knot and with unit
// slope above the last. inverse_sup(s) = sup{x : value(x) <= s}, which is
// -inf when s lies below the whole curve.
struct BarycentreCurve {
    std::vector<double> xs;      // non-decreasing knot positions
    std::vector<double> values;  // non-decreasing knot values

    double eval(double x) const;
    double inverse_sup(double s) const;
};

BarycentreCurve barycentre_curve(const Measure& mu, std::size_t points = 513);

// ============================================================================
// Order checks. All grid-based: verdicts report the worst margin seen on the
// supplied probe grid together with a witness location. Time axes go into the
// verdict rows, space into cols.
// ============================================================================

// mu1 precedes mu2 in the mean-residual-life order: mrl_1 <= mrl_2 on the grid.
OrderVerdict compare_mrl(const Measure& mu1, const Measure& mu2,
                         const std::vector<double>& xs, Tolerance tol = {});

// Each consecutive pair of family laws is mrl-ordered, checked through the
// monotonicity of the barycentre in the time parameter.
OrderVerdict check_family_mrl(const TimeFamily& family, const std::vector<double>& xs,
                              Tolerance tol = {});

// Constant mean across the family (note "NonConstantMean" on failure) and
// integrated survival non-decreasing in time at every probe.
OrderVerdict check_peacock(const TimeFamily& family, const std::vector<double>& xs,
                           Tolerance tol = {});

// For a centered law: a -> psi(a)/a non-increasing over the positive probes.
// Throws NotCentered when the mean is materially nonzero; positive probes are
// required.
OrderVerdict check_madan_yor(const Measure& mu, const std::vector<double>& as,
                             Tolerance tol = {});

// Mean residual life non-increasing over the probe grid.
OrderVerdict check_dmrl(const Measure& mu, const std::vector<double>& xs,
                        Tolerance tol = {});

}  // namespace peacock
