#pragma once

#include <functional>
#include <string>
#include <vector>

#include "peacock/measure.hpp"
#include "peacock/time_family.hpp"
#include "peacock/totalpos.hpp"

namespace peacock {

// ============================================================================
// Family constructions. Every builder returns a TimeFamily whose laws support
// both evaluation (survival, integrated survival, quantile) and sampling.
// Hypotheses on user-supplied evaluators are verified on sampling grids at
// build time and reported through typed errors; nothing is checked
// symbolically.
// ============================================================================

// ----------------------------------------------------------------------------
// Deformation families.
// ----------------------------------------------------------------------------

// Two-parameter map phi(lambda, y), strictly increasing in y for lambda > 0.
// tau_minus / tau_plus are the inf / sup of phi(lambda, .) over the driving
// law's support, finite or infinite.
struct PhiSpec {
    std::function<double(double, double)> value;
    std::function<double(double, double)> dlambda;  // d phi / d lambda
    std::function<double(double, double)> dy;       // d phi / d y, positive
    std::function<double(double, double)> ratio;    // dlambda / dy, non-decreasing in y
    std::function<double(double)> tau_minus;        // non-increasing in lambda
    std::function<double(double)> tau_plus;         // all +inf, or non-decreasing
    double bracket_lo = -1.0;                       // starting inversion bracket in y
    double bracket_hi = 1.0;
    std::string name = "phi";
};

// Exponential tilt e^{lambda y} / E[e^{lambda Y}] - 1. Centered at every
// lambda; identically zero at lambda = 0.
PhiSpec phi_exp_tilt(const Measure& base);

// phi0(y - lambda) - E[phi0(Y - lambda)] for the concave increasing gauge
// phi0(u) = -e^{-a u} / a. Centered at every lambda.
PhiSpec phi_shift_concave(const Measure& base, double a = 1.0);

// sgn(lambda y) |lambda y|^p + drift * lambda y with p > 1, drift > 0.
// Centered only against symmetric driving laws; the build-time centering
// check enforces that.
PhiSpec phi_power(double p = 3.0, double drift = 0.5);

// Solves phi(lambda, y) = z for y. The bracket starts at the spec hints and
// expands geometrically to a sign change; bisection with interleaved secant
// steps narrows it to 1e-12 relative width. Throws QuadratureFailure when no
// bracket exists.
double phi_inverse(const PhiSpec& spec, double lambda, double z);

// Law of phi(lambda_k, Y) per grid value. Build-time checks, in order:
// H1 (positive density and log-concave survival of Y), H2 (dy > 0 and ratio
// non-decreasing in y), H3 (tau monotonicity), centering E[phi(lambda,Y)]=0.
// Each failure throws HypothesisViolated with which() naming the hypothesis.
// Grid values where phi(lambda, .) is flat produce exact point masses.
TimeFamily phi_family(const Measure& y, const PhiSpec& spec,
                      const std::vector<double>& lambdas);

// ----------------------------------------------------------------------------
// Censored-plus families.
// ----------------------------------------------------------------------------

// Concave increasing gauge with varphi(0) = 0. tau is the supremum of
// varphi, finite or infinite; inverse is defined on [0, tau).
struct ConcaveGauge {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::function<double(double)> inverse;
    double tau = 0.0;
    std::string name = "gauge";
};

ConcaveGauge gauge_identity();  // varphi(u) = u, tau infinite
ConcaveGauge gauge_arctan();    // varphi(u) = arctan(u), tau = pi/2

// Law of varphi((Y - g(lambda))+) / h(lambda) per grid value, with the
// normalizer h(lambda) = E[varphi((Y - g(lambda))+)] computed as the
// integral of m(inverse(u) + g(lambda)) over u in (0, tau), m the survival
// of Y. Every marginal has mean 1 and an atom at 0 of mass P(Y <= g).
// HypothesisViolated carries which() = "base" (Y shape), "concavity" (gauge),
// or "monotonicity" (g); h(lambda) ~ 0 throws DegenerateScale.
TimeFamily censored_plus_family(const Measure& y, const ConcaveGauge& gauge,
                                const std::function<double(double)>& g,
                                const std::vector<double>& lambdas);

// ----------------------------------------------------------------------------
// Scale families.
// ----------------------------------------------------------------------------

// Law of h(t) Y per grid time, as exact affine images. Y must be centered
// (NotCentered); h must be finite, non-negative, and non-decreasing on the
// grid (PreconditionFailed). h(t) = 0 collapses to the point mass at 0.
TimeFamily scale_family(const Measure& y, const std::function<double(double)>& h,
                        const std::vector<double>& times);

// ----------------------------------------------------------------------------
// Subordination.
// ----------------------------------------------------------------------------

// Time change X_t = Y_{Lambda_t}. The inner family supplies the laws along
// the subordinated parameter; Lambda_t is distributed as the kernel's slice
// from 0, q(t, .) = weight(t, 0, .), which must be a density in the arrival
// point. A set deterministic map replaces the kernel (the delta-kernel case)
// and reparametrizes the inner family directly.
struct SubordinationSpec {
    TimeFamily inner;                             // centered, residual-monotone
    const MarkovKernel* kernel = nullptr;
    std::function<double(double)> deterministic;  // Lambda_t = deterministic(t)
    int panels = 64;                              // quadrature panels in lambda
    bool skip_inner_check = false;                // bypass the inner order gate
};

// Marginal ISF C(t, x) as the integral of q(t, lambda) C_inner(lambda, x)
// over lambda, truncated at the slice's 1 - 1e-10 quantile; the inner grid
// must cover that quantile (PreconditionFailed). The kernel must pass
// spacetime_tp2 from 0 over the inner parameter range. Sampling draws lambda
// from the cached quadrature table by piecewise-linear inversion, then one
// draw of the interpolated inner law.
TimeFamily subordinate(const SubordinationSpec& spec, const std::vector<double>& times,
                       const std::vector<double>& x_grid);

// ----------------------------------------------------------------------------
// Closure transformations.
// ----------------------------------------------------------------------------

// Law of X_t + Y for independent Y with log-concave survival, checked on a
// sampling grid (PreconditionFailed). When Y or a family law is purely
// atomic the convolution is an exact mixture of shifted laws; the density x
// density case tabulates the ISF through compose_kernels (continuous f_Y) or
// a support-aligned rule (f_Y with a support-edge jump) and reconstructs
// each row.
TimeFamily translate_family(const TimeFamily& fam, const Measure& y,
                            std::size_t grid_points = 513);

// Law of Y X_t for positive Y with a C1 density whose log is log-concave,
// checked through the TP2 grid test of f(y/z) (PreconditionFailed). A
// positive point mass scales exactly.
TimeFamily scale_mixture_family(const TimeFamily& fam, const Measure& y,
                                std::size_t grid_points = 257);

// Piecewise-linear interpolation in the measure between ordered anchors:
// on [c_n, c_{n+1}] the law is the convex combination with weights
// (c_{n+1}-t, t-c_n)/(c_{n+1}-c_n); anchor times reproduce the anchors
// exactly. Consecutive anchors must be ordered in mean residual life and
// times must stay inside the cut range (PreconditionFailed).
TimeFamily interpolate_family(const std::vector<Measure>& measures,
                              const std::vector<double>& cuts,
                              const std::vector<double>& times);

// Censoring cut points a0 < ... < ak, k >= 1; the composed transform applies
// the lowest pair first.
struct CensorSpec {
    std::vector<double> cuts;
};

// Moves the mass on [a, b] to atoms at a and b, preserving the mean:
//   alpha = (1/(b-a)) int_[a,b] (b - y) mu(dy),
//   beta  = (1/(b-a)) int_[a,b] (y - a) mu(dy).
// Purely atomic measures only; masses exactly at a or b are absorbed into
// the new atoms. A support disjoint from [a, b] returns mu unchanged.
Measure censor_measure(const Measure& mu, double a, double b);

// Applies the k-fold censoring to every law of a centered family that passes
// a sampled residual-order check (PreconditionFailed otherwise).
TimeFamily censor_transform(const TimeFamily& fam, const CensorSpec& spec);

// ----------------------------------------------------------------------------
// Sampled-curve reconstruction.
// ----------------------------------------------------------------------------

// Builds a measure from integrated-survival samples that may carry quadrature
// noise: slopes are pooled to the nearest non-decreasing fit (weighted
// isotonic regression), clamped to [-1, 0], re-integrated from the right
// end, and handed to measure_from_isf.
Measure measure_from_sampled_isf(const std::vector<double>& xs,
                                 const std::vector<double>& values,
                                 double asymptote);

}  // namespace peacock
