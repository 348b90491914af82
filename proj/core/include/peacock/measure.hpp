#pragma once

#include <memory>
#include <string>
#include <vector>

#include "peacock/errors.hpp"
#include "peacock/rng.hpp"

namespace peacock {

struct Atom {
    double position = 0.0;
    double mass = 0.0;
};

enum class MeasureKind { Analytic, Grid, Atomic, Derived };

class MeasureImpl;

// ============================================================================
// Measure: an integrable probability law on R.
//
// Tail conventions are closed on the left throughout: survival(x) is
// mu([x, +inf)), so an atom sitting exactly at x counts. survival is then
// non-increasing and left-continuous, and upper_support() is the smallest z
// with mu([z, +inf)) = 0 (+inf for unbounded laws).
//
// Measures are immutable; copies share the implementation and are safe to use
// concurrently.
// ============================================================================
class Measure {
public:
    // --- analytic families -------------------------------------------------
    static Measure exponential(double rate);
    static Measure gaussian(double sigma);
    static Measure gamma(double shape, double scale);
    static Measure uniform(double lo, double hi);
    static Measure laplace(double rate);          // density (c/2) e^{-c|x|}
    static Measure erlang(double rate, int n);    // n-fold convolution of exponential(rate)
    static Measure beta(double alpha, double beta);
    static Measure student_t(double dof);         // dof > 1 so the mean exists
    static Measure log_normal(double sigma, double scale = 1.0);  // scale * e^{sigma Z}

    // --- finitely supported ------------------------------------------------
    static Measure atomic(std::vector<Atom> atoms);
    static Measure two_point(double lo, double hi, double p_hi = 0.5);
    static Measure dirac(double at);
    static Measure grid(std::vector<double> xs, std::vector<double> weights);
    static Measure grid_from_csv(const std::string& path);  // header x,weight

    // Convex combination of laws; weights need not be normalized.
    static Measure mixture(std::vector<double> weights, std::vector<Measure> components);

    static Measure from_impl(std::shared_ptr<const MeasureImpl> impl);

    // --- queries -----------------------------------------------------------
    MeasureKind kind() const;
    double survival(double x) const;             // mu([x, +inf))
    double integrated_survival(double x) const;  // E[(X - x)^+]
    double mean() const;
    double upper_support() const;
    double lower_support() const;
    double quantile(double p) const;             // inf{x : P(X <= x) >= p}
    double cdf(double x) const;                  // P(X <= x)
    double pdf(double x) const;                  // throws when no density
    bool has_density() const;

    double sample(RngStream& stream) const;
    std::vector<double> sample(std::size_t n, RngStream& stream) const;

    // Atom list: complete for purely atomic laws, the discrete part for mixed
    // ones, empty for atomless laws. Positions are strictly increasing.
    const std::vector<Atom>& atoms() const;
    bool purely_atomic() const;

    // Law of scale*X + shift (scale >= 0; scale 0 collapses to dirac(shift)).
    Measure affine(double scale, double shift) const;
    Measure centered() const;  // X - E[X]

    std::string describe() const;
    const MeasureImpl& impl() const { return *impl_; }
    std::shared_ptr<const MeasureImpl> impl_ptr() const { return impl_; }

private:
    explicit Measure(std::shared_ptr<const MeasureImpl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const MeasureImpl> impl_;
};

// Implementation interface. Derived laws built by the construction layer
// subclass this; everything they override must honor the tail conventions
// documented on Measure.
class MeasureImpl {
public:
    virtual ~MeasureImpl() = default;

    virtual MeasureKind kind() const { return MeasureKind::Derived; }
    virtual double survival(double x) const = 0;
    virtual double integrated_survival(double x) const = 0;
    virtual double mean() const = 0;
    virtual double upper_support() const = 0;
    virtual double lower_support() const = 0;
    virtual double quantile(double p) const = 0;
    virtual double cdf(double x) const { return 1.0 - survival(x); }  // atomless default
    virtual double pdf(double) const {
        throw Error("NoDensity", "measure has no density: " + describe());
    }
    virtual bool has_density() const { return false; }
    virtual double sample(RngStream& stream) const { return quantile(stream.uniform_open01()); }
    virtual const std::vector<Atom>& atoms() const;
    virtual bool purely_atomic() const { return false; }
    virtual std::string describe() const = 0;
};

// Monotone bisection fallback for implementations without a closed quantile.
double numeric_quantile(const MeasureImpl& impl, double p, double bracket_lo,
                        double bracket_hi);

// ============================================================================
// Integrated survival curves.
//
// C(x) = E[(X-x)^+] sampled on an increasing grid, together with the recorded
// left asymptote l = E[X] (C(x) + x -> l as x -> -inf). A valid curve is
// convex, non-increasing, has slopes in [-1, 0], vanishes at the right end and
// meets the asymptote at the left end, all within the stated tolerances.
// ============================================================================
struct IsfCurve {
    std::vector<double> xs;
    std::vector<double> values;
    double asymptote = 0.0;
};

IsfCurve isf_curve(const Measure& mu, std::size_t points = 257, double tail_eps = 1e-10);

// Rebuilds the measure whose integrated survival is the piecewise-linear
// interpolant of the curve (extended with slope -1 left, 0 right): the atoms
// are the slope breaks. Throws InvalidIsf when the curve fails validation.
Measure measure_from_isf(const IsfCurve& curve);

// Grid helpers. Spans default to the [eps, 1-eps] quantile window.
std::vector<double> quantile_span_grid(const Measure& mu, std::size_t points = 257,
                                       double eps = 1e-6);

// Declarative one-line measure configs:
//   "kind=exp c=1.0"            "kind=gauss sigma=2.0"
//   "kind=gamma k=2 theta=1.5"  "kind=uniform a=0 b=1"
//   "kind=laplace c=1"          "kind=erlang c=1 n=3"
//   "kind=beta alpha=2 beta=2"  "kind=student nu=3"
//   "kind=atomic atoms=-1,1 masses=0.5,0.5"
//   "kind=grid file=path.csv"
// Optional trailing modifiers on any kind: "center=1", "scale=<a>", "shift=<b>".
Measure parse_measure_config(const std::string& text);

}  // namespace peacock
