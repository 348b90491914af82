#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "peacock/constructions.hpp"
#include "peacock/mrl.hpp"
#include "peacock/quadrature.hpp"
#include "peacock/rng.hpp"

using namespace peacock;

namespace {

bool close(double a, double b, double tol = 1e-13) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

template <typename Fn>
void expect_hypothesis(Fn fn, const std::string& which) {
    bool caught = false;
    try {
        fn();
    } catch (const HypothesisViolated& e) {
        caught = true;
        CHECK(e.which() == which);
    }
    CHECK(caught);
}

// Probe window over the family bulk; quadrature-built laws are checked away
// from the far tails where their survival drops below the grid resolution.
std::vector<double> bulk_probes(const TimeFamily& fam, std::size_t n, double eps = 1e-3) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Measure& law : fam.laws) {
        lo = std::min(lo, law.quantile(eps));
        hi = std::max(hi, law.quantile(1.0 - eps));
    }
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    return linspace(lo, hi, n);
}

std::vector<double> atom_probes(const TimeFamily& fam, const std::vector<double>& extra) {
    std::vector<double> base;
    for (const Measure& law : fam.laws)
        for (const Atom& at : law.atoms()) base.push_back(at.position);
    base.insert(base.end(), extra.begin(), extra.end());
    std::sort(base.begin(), base.end());
    std::vector<double> probes;
    for (double x : base)
        if (probes.empty() || x - probes.back() > 1e-12 * (1.0 + std::fabs(x)))
            probes.push_back(x);
    std::vector<double> filled;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        filled.push_back(probes[i]);
        if (i + 1 < probes.size()) filled.push_back(0.5 * (probes[i] + probes[i + 1]));
    }
    return filled;
}

}  // namespace

// Frozen reference values come from direct high-precision evaluation of the
// defining integrals, independent of the construction code paths.

TEST_CASE("scale family is exact affine scaling") {
    Measure tp = Measure::two_point(-1.0, 1.0);
    auto id = [](double t) { return t; };
    TimeFamily fam = scale_family(tp, id, {0.0, 0.5, 1.0, 2.0});
    REQUIRE(fam.size() == 4);
    CHECK(fam.laws[0].purely_atomic());
    CHECK(fam.laws[0].upper_support() == 0.0);
    for (std::size_t k = 0; k < fam.size(); ++k)
        CHECK(close(fam.laws[k].integrated_survival(0.0), 0.5 * fam.times[k], 1e-15));

    auto probes = linspace(-2.5, 2.5, 101);
    CHECK(check_family_mrl(fam, probes).holds);
    CHECK(isf_tp2_check(fam, probes).holds);

    // centered exponential driver under a concave clock
    TimeFamily ef = scale_family(Measure::exponential(1.0).centered(),
                                 [](double t) { return std::sqrt(t); }, {0.25, 1.0, 2.25, 4.0});
    auto ep = linspace(-4.5, 12.0, 151);
    CHECK(check_family_mrl(ef, ep).holds);
    CHECK(isf_tp2_check(ef, ep).holds);
    for (const Measure& law : ef.laws) CHECK(std::fabs(law.mean()) < 1e-12);

    CHECK_THROWS_AS(scale_family(Measure::exponential(1.0), id, {0.0, 1.0}), NotCentered);
    CHECK_THROWS_AS(scale_family(tp, [](double t) { return 1.0 - t; }, {0.0, 1.0}),
                    PreconditionFailed);
    CHECK_THROWS_AS(scale_family(tp, [](double t) { return t - 10.0; }, {0.0, 1.0}),
                    PreconditionFailed);
}

TEST_CASE("identity deformation leaves the law fixed") {
    Measure g = Measure::gaussian(1.0);
    PhiSpec spec;
    spec.name = "identity";
    spec.value = [](double, double y) { return y; };
    spec.dlambda = [](double, double) { return 0.0; };
    spec.dy = [](double, double) { return 1.0; };
    spec.ratio = [](double, double) { return 0.0; };
    spec.tau_minus = [](double) { return -std::numeric_limits<double>::infinity(); };
    spec.tau_plus = [](double) { return std::numeric_limits<double>::infinity(); };
    TimeFamily fam = phi_family(g, spec, {0.0, 1.0});
    for (double x : {-1.3, -0.2, 0.0, 0.7, 2.1}) {
        CHECK(close(fam.laws[0].survival(x), g.survival(x), 1e-10));
        CHECK(close(fam.laws[1].integrated_survival(x), g.integrated_survival(x), 1e-9));
    }
    CHECK(fam.laws[1].has_density());
    CHECK(close(fam.laws[1].pdf(0.4), g.pdf(0.4), 1e-9));
}

TEST_CASE("exponential tilt deformation matches frozen values") {
    Measure g = Measure::gaussian(1.0);
    PhiSpec spec = phi_exp_tilt(g);
    TimeFamily fam = phi_family(g, spec, {0.0, 0.4, 0.8});

    // lambda = 0 collapses to the point mass at 0
    CHECK(fam.laws[0].purely_atomic());
    CHECK(fam.laws[0].mean() == 0.0);

    const Measure& m8 = fam.laws[2];
    CHECK(close(m8.survival(0.4), 0.20593983855191397, 1e-9));
    CHECK(close(m8.integrated_survival(0.4), 0.20347046686480363, 1e-8));
    CHECK(std::fabs(m8.mean()) < 1e-9);
    CHECK(m8.lower_support() == doctest::Approx(-1.0));
    CHECK(m8.survival(-1.0) == 1.0);
    CHECK(close(m8.integrated_survival(-2.0), m8.mean() + 2.0, 1e-12));

    // quantile inverts the map through the base quantile
    double q = m8.quantile(0.75);
    CHECK(close(m8.cdf(q), 0.75, 1e-9));

    auto probes = linspace(-1.2, 6.0, 141);
    CHECK(check_family_mrl(fam, probes, Tolerance{1e-8, 1e-12}).holds);
    CHECK(isf_tp2_check(fam, probes, MinorMode::AllPairs, Tolerance{1e-8, 1e-12}).holds);
}

TEST_CASE("deformation barycentres move right in the parameter") {
    Measure g = Measure::gaussian(1.0);
    TimeFamily fam = phi_family(g, phi_exp_tilt(g), {0.3, 0.32, 0.6, 0.62});
    for (double x : linspace(-0.9, 3.5, 45)) {
        // finite-difference monotonicity across both tight pairs
        CHECK(barycentre(fam.laws[1], x) >= barycentre(fam.laws[0], x) - 1e-7);
        CHECK(barycentre(fam.laws[3], x) >= barycentre(fam.laws[2], x) - 1e-7);
    }
}

TEST_CASE("shift deformation matches frozen values") {
    Measure g = Measure::gaussian(1.0);
    PhiSpec spec = phi_shift_concave(g, 1.0);
    CHECK(close(spec.tau_plus(0.5), 2.7182818284590455, 1e-10));

    TimeFamily fam = phi_family(g, spec, {0.0, 0.25, 0.5});
    const Measure& m5 = fam.laws[2];
    CHECK(close(m5.survival(1.0), 0.5164815405621503, 1e-9));
    CHECK(close(m5.integrated_survival(1.0), 0.4284484827515251, 1e-8));
    for (const Measure& law : fam.laws) CHECK(std::fabs(law.mean()) < 1e-9);

    auto probes = linspace(-3.0, 4.5, 121);
    CHECK(check_family_mrl(fam, probes, Tolerance{1e-8, 1e-12}).holds);
    CHECK(isf_tp2_check(fam, probes, MinorMode::AllPairs, Tolerance{1e-8, 1e-12}).holds);
}

TEST_CASE("power deformation matches frozen values") {
    Measure g = Measure::gaussian(1.0);
    TimeFamily fam = phi_family(g, phi_power(3.0, 0.5), {0.0, 0.6, 1.2});
    CHECK(fam.laws[0].purely_atomic());

    const Measure& m = fam.laws[2];
    // root of u^3 + 0.5 u = 0.7 maps the threshold back to the base
    CHECK(close(m.survival(0.7), 0.2788425872716773, 1e-9));
    CHECK(close(m.integrated_survival(0.7), 1.3669499173801878, 1e-8));
    CHECK(std::fabs(m.mean()) < 1e-8);

    auto probes = linspace(-6.0, 6.0, 121);
    CHECK(check_family_mrl(fam, probes, Tolerance{1e-7, 1e-12}).holds);
    CHECK(isf_tp2_check(fam, probes, MinorMode::AllPairs, Tolerance{1e-7, 1e-12}).holds);
}

TEST_CASE("deformation hypothesis gates fire in order") {
    // H1: heavy tails are not log-concave
    expect_hypothesis(
        [] { phi_family(Measure::student_t(3.0), phi_exp_tilt(Measure::student_t(3.0)),
                        {0.0, 0.5}); },
        "H1");

    // H2: decreasing derivative ratio
    {
        PhiSpec bad;
        bad.value = [](double lam, double y) { return (1.0 - lam) * y; };
        bad.dlambda = [](double, double y) { return -y; };
        bad.dy = [](double lam, double) { return 1.0 - lam; };
        bad.ratio = [](double lam, double y) { return -y / (1.0 - lam); };
        bad.tau_minus = [](double) { return -std::numeric_limits<double>::infinity(); };
        bad.tau_plus = [](double) { return std::numeric_limits<double>::infinity(); };
        expect_hypothesis([&] { phi_family(Measure::gaussian(1.0), bad, {0.0, 0.5}); }, "H2");
    }

    // H3: shrinking upper range bound (ratio deliberately well-behaved)
    {
        PhiSpec bad;
        bad.value = [](double lam, double y) { return y / (1.0 + lam); };
        bad.dlambda = [](double, double) { return 0.0; };
        bad.dy = [](double lam, double) { return 1.0 / (1.0 + lam); };
        bad.ratio = [](double, double y) { return y; };
        bad.tau_minus = [](double lam) { return -1.0 / (1.0 + lam); };
        bad.tau_plus = [](double lam) { return 1.0 / (1.0 + lam); };
        expect_hypothesis(
            [&] { phi_family(Measure::uniform(-1.0, 1.0), bad, {0.0, 0.5, 1.0}); }, "H3");
    }

    // centering: odd powers of an asymmetric driver
    expect_hypothesis(
        [] {
            phi_family(Measure::exponential(1.0).centered(), phi_power(3.0, 0.5), {0.0, 0.5});
        },
        "centering");
}

TEST_CASE("censored construction matches frozen values") {
    Measure e = Measure::exponential(1.0);
    auto id = [](double lam) { return lam; };
    TimeFamily fam = censored_plus_family(e, gauge_identity(), id, {0.0, 0.35, 0.7});

    const Measure& m7 = fam.laws[2];
    // h(0.7) = e^{-0.7} = 0.4965853037914095
    CHECK(close(m7.survival(1.3), 0.2603936134347188, 1e-9));
    CHECK(close(m7.integrated_survival(1.3), 0.5243683440621856, 1e-9));
    CHECK(close(m7.mean(), 1.0, 1e-10));
    CHECK(close(barycentre(m7, 0.0), 1.0, 1e-10));

    REQUIRE(m7.atoms().size() == 1);
    CHECK(m7.atoms()[0].position == 0.0);
    CHECK(close(m7.atoms()[0].mass, 1.0 - std::exp(-0.7), 1e-12));
    CHECK(close(m7.cdf(0.0), m7.atoms()[0].mass, 1e-12));
    CHECK(m7.quantile(0.3) == 0.0);
    CHECK(close(m7.quantile(0.9), (std::log(10.0) - 0.7) / 0.4965853037914095, 1e-9));

    // every marginal keeps mean one, so the family is mrl-monotone iff TP2
    auto probes = linspace(0.0, 9.0, 121);
    CHECK(check_family_mrl(fam, probes, Tolerance{1e-8, 1e-12}).holds);
    CHECK(isf_tp2_check(fam, probes, MinorMode::AllPairs, Tolerance{1e-8, 1e-12}).holds);

    // constant shift gives a constant family
    TimeFamily flat = censored_plus_family(e, gauge_identity(),
                                           [](double) { return 0.2; }, {0.0, 1.0});
    for (double x : {0.0, 0.5, 1.7})
        CHECK(close(flat.laws[0].survival(x), flat.laws[1].survival(x), 1e-12));
}

TEST_CASE("censored construction with a bounded gauge") {
    Measure e = Measure::exponential(1.0);
    auto id = [](double lam) { return lam; };
    TimeFamily fam = censored_plus_family(e, gauge_arctan(), id, {0.0, 0.4});
    const Measure& m = fam.laws[1];

    // h(0.4) = 0.416570140726471 pins the survival through the frozen value
    double h = 0.416570140726471;
    CHECK(close(m.survival(1.0), std::exp(-(std::tan(h) + 0.4)), 1e-9));
    CHECK(close(m.upper_support(), 1.5707963267948966 / h, 1e-9));
    CHECK(m.survival(4.0) == 0.0);
    CHECK(close(m.mean(), 1.0, 1e-9));
    CHECK(close(m.integrated_survival(0.0), 1.0, 1e-9));
}

TEST_CASE("censored construction gates") {
    auto id = [](double lam) { return lam; };
    // survival of the driver loses mass too slowly
    expect_hypothesis(
        [&] { censored_plus_family(Measure::student_t(3.0), gauge_identity(), id, {0.0, 1.0}); },
        "base");

    // convex gauge
    {
        ConcaveGauge bad;
        bad.value = [](double u) { return std::exp(u) - 1.0; };
        bad.deriv = [](double u) { return std::exp(u); };
        bad.inverse = [](double v) { return std::log1p(v); };
        bad.tau = std::numeric_limits<double>::infinity();
        expect_hypothesis(
            [&] { censored_plus_family(Measure::exponential(1.0), bad, id, {0.0, 1.0}); },
            "concavity");
    }

    // decreasing shift
    expect_hypothesis(
        [&] {
            censored_plus_family(Measure::exponential(1.0), gauge_identity(),
                                 [](double lam) { return -lam; }, {0.0, 1.0});
        },
        "monotonicity");

    // shift beyond the driver support empties the normalizer
    CHECK_THROWS_AS(censored_plus_family(Measure::uniform(0.0, 1.0), gauge_identity(), id,
                                         {0.0, 2.0}),
                    DegenerateScale);
}

TEST_CASE("subordination through an Erlang walk matches frozen values") {
    TimeFamily inner = scale_family(Measure::two_point(-1.0, 1.0),
                                    [](double t) { return t; }, linspace(0.0, 20.0, 401));
    ErlangWalkKernel kernel(2.0);
    SubordinationSpec spec;
    spec.inner = inner;
    spec.kernel = &kernel;
    auto x_grid = linspace(-20.0, 20.0, 401);
    TimeFamily fam = subordinate(spec, {3.0, 6.0}, x_grid);

    const Measure& m6 = fam.laws[1];
    // at the origin the ISF is half the mean subordinator position
    CHECK(close(m6.integrated_survival(0.0), 1.5, 1e-8));
    CHECK(close(m6.integrated_survival(0.9), 1.0508159421512486, 1e-3));
    CHECK(std::fabs(m6.mean()) < 1e-8);
    CHECK(close(m6.integrated_survival(-0.9) - m6.integrated_survival(0.9), 0.9, 1e-8));

    std::vector<double> probes;
    for (std::size_t j = 0; j < x_grid.size(); j += 8) probes.push_back(x_grid[j]);
    CHECK(check_family_mrl(fam, probes, Tolerance{1e-6, 1e-10}).holds);
    CHECK(isf_tp2_check(fam, probes, MinorMode::AllPairs, Tolerance{1e-6, 1e-10}).holds);

    // sampler agrees with the quadrature table within Monte Carlo error
    RngStream rng(20250815, 3);
    const std::size_t n = 100000;
    for (double x : {0.0, 0.9, 2.5}) {
        double acc = 0.0, acc2 = 0.0;
        RngStream local(20250815, static_cast<std::uint64_t>(10.0 * x) + 5);
        for (std::size_t i = 0; i < n; ++i) {
            double v = std::max(m6.sample(local) - x, 0.0);
            acc += v;
            acc2 += v * v;
        }
        double mean = acc / n;
        double var = std::max(acc2 / n - mean * mean, 0.0);
        double serr = std::sqrt(var / n);
        CHECK(std::fabs(mean - m6.integrated_survival(x)) <= 3.0 * serr);
    }
    (void)rng;
}

TEST_CASE("deterministic time change reparametrizes the inner family") {
    TimeFamily inner = scale_family(Measure::two_point(-1.0, 1.0),
                                    [](double t) { return t; }, linspace(0.0, 20.0, 401));
    SubordinationSpec spec;
    spec.inner = inner;
    spec.deterministic = [](double t) { return t * t; };
    auto x_grid = linspace(-16.0, 16.0, 161);
    TimeFamily fam = subordinate(spec, {2.0, 3.0}, x_grid);
    for (double x : {-3.9, 0.0, 2.5, 3.9, 4.1})
        CHECK(close(fam.laws[0].survival(x), Measure::two_point(-4.0, 4.0).survival(x), 1e-12));
    for (double x : {0.0, 5.0, 8.9})
        CHECK(close(fam.laws[1].integrated_survival(x),
                    Measure::two_point(-9.0, 9.0).integrated_survival(x), 1e-12));
    CHECK(check_family_mrl(fam, x_grid).holds);

    CHECK_THROWS_AS(
        [&] {
            SubordinationSpec dec = spec;
            dec.deterministic = [](double t) { return 4.0 - t; };
            subordinate(dec, {2.0, 3.0}, x_grid);
        }(),
        PreconditionFailed);
}

TEST_CASE("subordination gates") {
    auto x_grid = linspace(-8.0, 8.0, 81);

    // inner family must be centered
    {
        TimeFamily bad;
        bad.times = {0.0, 1.0};
        bad.laws = {Measure::dirac(0.0), Measure::two_point(0.0, 2.0)};
        SubordinationSpec spec;
        spec.inner = bad;
        spec.deterministic = [](double t) { return t; };
        CHECK_THROWS_AS(subordinate(spec, {0.0, 1.0}, x_grid), PreconditionFailed);
    }

    // inner family must be residual-monotone unless overridden
    {
        TimeFamily shrink;
        shrink.times = {0.0, 1.0};
        shrink.laws = {Measure::two_point(-2.0, 2.0), Measure::two_point(-1.0, 1.0)};
        SubordinationSpec spec;
        spec.inner = shrink;
        spec.deterministic = [](double t) { return t; };
        CHECK_THROWS_AS(subordinate(spec, {0.0, 1.0}, x_grid), PreconditionFailed);
        spec.skip_inner_check = true;
        TimeFamily fam = subordinate(spec, {0.0, 1.0}, x_grid);
        CHECK(fam.laws[1].upper_support() == 1.0);
    }

    // inner grid must cover the kernel slice
    {
        TimeFamily narrow = scale_family(Measure::two_point(-1.0, 1.0),
                                         [](double t) { return t; }, linspace(0.0, 2.0, 41));
        ErlangWalkKernel kernel(2.0);
        SubordinationSpec spec;
        spec.inner = narrow;
        spec.kernel = &kernel;
        CHECK_THROWS_AS(subordinate(spec, {3.0, 6.0}, linspace(-2.0, 2.0, 81)),
                        PreconditionFailed);
    }
}

TEST_CASE("subordination through a reflected walk stays ordered") {
    TimeFamily inner = scale_family(Measure::two_point(-1.0, 1.0),
                                    [](double t) { return t; }, linspace(0.0, 40.0, 401));
    ReflectedLaplaceWalkKernel kernel(1.0);
    SubordinationSpec spec;
    spec.inner = inner;
    spec.kernel = &kernel;
    auto x_grid = linspace(-40.0, 40.0, 201);
    TimeFamily fam = subordinate(spec, {2.0, 4.0}, x_grid);

    // cross-check the origin value against the folded step density directly
    double expect_c0 = integrate_gk(
        [](double y) { return y * laplace_convolution_density(1.0, 4, y); }, 0.0, 60.0, 1e-10);
    CHECK(close(fam.laws[1].integrated_survival(0.0), expect_c0, 1e-6));

    std::vector<double> probes;
    for (std::size_t j = 0; j < x_grid.size(); j += 4) probes.push_back(x_grid[j]);
    CHECK(check_family_mrl(fam, probes, Tolerance{1e-6, 1e-10}).holds);
    CHECK(isf_tp2_check(fam, probes, MinorMode::AllPairs, Tolerance{1e-6, 1e-10}).holds);
}

TEST_CASE("translation by a point mass is an exact shift") {
    TimeFamily fam = scale_family(Measure::two_point(-1.0, 1.0),
                                  [](double t) { return t; }, {0.5, 1.0});
    TimeFamily out = translate_family(fam, Measure::dirac(0.7));
    for (double x : {-1.2, 0.0, 0.3, 1.5, 1.8}) {
        CHECK(out.laws[1].survival(x) == fam.laws[1].survival(x - 0.7));
        CHECK(close(barycentre(out.laws[1], x), barycentre(fam.laws[1], x - 0.7) + 0.7, 1e-13));
    }
}

TEST_CASE("translation of an atomic family by an exponential is exact") {
    TimeFamily fam = scale_family(Measure::two_point(-1.0, 1.0),
                                  [](double t) { return t; }, {0.5, 1.0});
    Measure e = Measure::exponential(1.0);
    TimeFamily out = translate_family(fam, e);

    auto surv = [&](double t, double x) {
        return 0.5 * e.survival(x - t) + 0.5 * e.survival(x + t);
    };
    auto isf = [&](double t, double x) {
        return 0.5 * e.integrated_survival(x - t) + 0.5 * e.integrated_survival(x + t);
    };
    for (double x : linspace(-2.5, 6.0, 35)) {
        CHECK(close(out.laws[1].survival(x), surv(1.0, x), 1e-13));
        CHECK(close(out.laws[1].integrated_survival(x), isf(1.0, x), 1e-13));
    }
    CHECK(close(out.laws[0].mean(), 1.0, 1e-12));

    auto probes = linspace(-2.5, 7.0, 141);
    CHECK(check_family_mrl(out, probes, Tolerance{1e-9, 1e-12}).holds);
    CHECK(isf_tp2_check(out, probes, MinorMode::AllPairs, Tolerance{1e-9, 1e-12}).holds);

    // sampling matches the mixture mean
    RngStream rng(20250815, 7);
    double acc = 0.0;
    for (int i = 0; i < 20000; ++i) acc += out.laws[1].sample(rng);
    CHECK(close(acc / 20000.0, 1.0, 2e-2));
}

TEST_CASE("translation of a gaussian family by a gaussian matches closed forms") {
    TimeFamily fam = scale_family(Measure::gaussian(1.0),
                                  [](double t) { return t; }, {0.6, 1.0});
    TimeFamily out = translate_family(fam, Measure::gaussian(1.0), 513);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double sigma = std::sqrt(fam.times[k] * fam.times[k] + 1.0);
        Measure ref = Measure::gaussian(sigma);
        for (double x : {-2.0, -0.5, 0.0, 0.8, 2.2}) {
            // pointwise survival reads a chord slope, first order in the knot
            // spacing; the ISF itself is second order
            CHECK(close(out.laws[k].survival(x), ref.survival(x), 1.2e-2));
            CHECK(close(out.laws[k].integrated_survival(x), ref.integrated_survival(x), 1e-4));
        }
        CHECK(std::fabs(out.laws[k].mean()) < 1e-9);
    }
    auto probes = bulk_probes(out, 101);
    CHECK(check_family_mrl(out, probes, Tolerance{1e-4, 1e-9}).holds);
    CHECK(isf_tp2_check(out, probes, MinorMode::AllPairs, Tolerance{1e-4, 1e-9}).holds);
}

TEST_CASE("translation by a density with a support edge") {
    TimeFamily fam = scale_family(Measure::gaussian(1.0),
                                  [](double t) { return t; }, {0.6, 1.0});
    TimeFamily out = translate_family(fam, Measure::exponential(1.0), 513);
    Measure phi = Measure::gaussian(1.0);
    // closed form: P(N(0,s^2) + E > x) = S_N(x/s) + e^{s^2/2 - x} Phi((x - s^2)/s)
    auto surv = [&](double s, double x) {
        return phi.survival(x / s) + std::exp(0.5 * s * s - x) * phi.cdf((x - s * s) / s);
    };
    for (std::size_t k = 0; k < out.size(); ++k) {
        double s = fam.times[k];
        for (double x : {-1.0, 0.0, 0.8, 2.0, 3.5})
            CHECK(close(out.laws[k].survival(x), surv(s, x), 1.5e-2));
        CHECK(close(out.laws[k].mean(), 1.0, 1e-9));
    }
    auto probes = bulk_probes(out, 101);
    CHECK(check_family_mrl(out, probes, Tolerance{1e-4, 1e-9}).holds);
    CHECK(isf_tp2_check(out, probes, MinorMode::AllPairs, Tolerance{1e-4, 1e-9}).holds);

    // a two-point translating law fails the survival log-concavity gate
    CHECK_THROWS_AS(translate_family(fam, Measure::two_point(-1.0, 1.0)), PreconditionFailed);
}

TEST_CASE("scale mixture by a lognormal matches frozen values") {
    TimeFamily fam = scale_family(Measure::two_point(-1.0, 1.0),
                                  [](double t) { return t; }, {1.0, 1.5});
    TimeFamily out = scale_mixture_family(fam, Measure::log_normal(0.6), 513);
    const Measure& m = out.laws[1];
    CHECK(close(m.integrated_survival(0.8), 0.5122357178990194, 4e-4));
    CHECK(close(m.integrated_survival(-0.8), 1.3122357178990196, 4e-4));
    // centered input stays centered through the mixing integral
    CHECK(std::fabs(m.mean()) < 1e-10);
    CHECK(close(m.integrated_survival(-0.8) - m.integrated_survival(0.8), 0.8, 1e-12));

    auto probes = bulk_probes(out, 101);
    CHECK(check_family_mrl(out, probes, Tolerance{1e-5, 1e-9}).holds);
    CHECK(isf_tp2_check(out, probes, MinorMode::AllPairs, Tolerance{1e-5, 1e-9}).holds);

    RngStream rng(20250815, 9);
    double acc = 0.0;
    for (int i = 0; i < 20000; ++i) acc += std::max(m.sample(rng) - 0.8, 0.0);
    CHECK(close(acc / 20000.0, 0.512, 3e-2));
}

TEST_CASE("scale mixture edge laws") {
    TimeFamily fam = scale_family(Measure::two_point(-1.0, 1.0),
                                  [](double t) { return t; }, {1.0, 1.5});
    // a positive point mass is the exact affine image
    TimeFamily ident = scale_mixture_family(fam, Measure::dirac(1.0));
    for (double x : {-1.6, -0.3, 0.0, 0.9, 1.4})
        CHECK(ident.laws[1].survival(x) == fam.laws[1].survival(x));

    TimeFamily doubled = scale_mixture_family(fam, Measure::dirac(2.0));
    CHECK(doubled.laws[1].upper_support() == 3.0);

    // a separated two-peak mixing law fails the multiplicative gate
    Measure split = Measure::mixture(
        {0.5, 0.5}, {Measure::log_normal(0.25), Measure::log_normal(0.25, 20.0)});
    CHECK_THROWS_AS(scale_mixture_family(fam, split), PreconditionFailed);

    // unsigned support and plural atoms are rejected
    CHECK_THROWS_AS(scale_mixture_family(fam, Measure::uniform(-1.0, 1.0)), PreconditionFailed);
    CHECK_THROWS_AS(scale_mixture_family(fam, Measure::two_point(1.0, 2.0)), PreconditionFailed);
}

TEST_CASE("interpolation hits anchors and averages the ISF") {
    std::vector<Measure> anchors = {Measure::two_point(-1.0, 1.0), Measure::two_point(-2.0, 2.0)};
    std::vector<double> cuts = {0.0, 1.0};
    TimeFamily fam = interpolate_family(anchors, cuts, {0.0, 0.25, 1.0});

    for (double x : {-1.5, 0.0, 0.7, 1.5})
        CHECK(fam.laws[0].survival(x) == anchors[0].survival(x));
    for (double x : linspace(-2.2, 2.2, 23))
        CHECK(close(fam.laws[1].integrated_survival(x),
                    0.75 * anchors[0].integrated_survival(x) +
                        0.25 * anchors[1].integrated_survival(x),
                    1e-14));
    auto probes = linspace(-2.5, 2.5, 101);
    CHECK(check_family_mrl(fam, probes).holds);
    CHECK(isf_tp2_check(fam, probes).holds);

    CHECK_THROWS_AS(interpolate_family(anchors, cuts, {0.0, 1.5}), PreconditionFailed);
    std::vector<Measure> reversed = {anchors[1], anchors[0]};
    CHECK_THROWS_AS(interpolate_family(reversed, cuts, {0.0, 0.5}), PreconditionFailed);
}

TEST_CASE("censoring a point mass splits it by the lever rule") {
    Measure out = censor_measure(Measure::dirac(0.0), -1.0, 1.0);
    REQUIRE(out.atoms().size() == 2);
    CHECK(out.atoms()[0].position == -1.0);
    CHECK(out.atoms()[0].mass == 0.5);
    CHECK(out.atoms()[1].mass == 0.5);
    CHECK(out.mean() == 0.0);

    // untouched support returns the measure unchanged
    Measure tp = Measure::two_point(-3.0, 3.0);
    Measure same = censor_measure(tp, -1.0, 1.0);
    CHECK(same.atoms().size() == 2);
    CHECK(same.atoms()[0].position == -3.0);

    // frozen split masses for the three-atom law
    Measure three = Measure::atomic({{-2.0, 0.15}, {0.0, 0.7}, {2.0, 0.15}});
    Measure cen = censor_measure(three, -1.0, 1.0);
    REQUIRE(cen.atoms().size() == 4);
    CHECK(close(cen.atoms()[1].mass, 0.35, 1e-15));
    CHECK(close(cen.atoms()[2].mass, 0.35, 1e-15));
    CHECK(std::fabs(cen.mean() - three.mean()) < 1e-15);

    CHECK_THROWS_AS(censor_measure(Measure::gaussian(1.0), -1.0, 1.0), PreconditionFailed);
    CHECK_THROWS_AS(censor_measure(tp, 1.0, -1.0), PreconditionFailed);
}

TEST_CASE("censoring composes ascending and keeps families ordered") {
    TimeFamily fam = scale_family(Measure::two_point(-1.0, 1.0),
                                  [](double t) { return t; }, {0.5, 1.0, 2.0});
    CensorSpec spec;
    spec.cuts = {-0.8, 0.0, 0.8};
    TimeFamily out = censor_transform(fam, spec);

    // explicit two-pair composition, lowest pair first
    Measure manual = censor_measure(censor_measure(fam.laws[2], -0.8, 0.0), 0.0, 0.8);
    REQUIRE(out.laws[2].atoms().size() == manual.atoms().size());
    for (std::size_t i = 0; i < manual.atoms().size(); ++i) {
        CHECK(out.laws[2].atoms()[i].position == manual.atoms()[i].position);
        CHECK(close(out.laws[2].atoms()[i].mass, manual.atoms()[i].mass, 1e-15));
    }
    for (std::size_t k = 0; k < out.size(); ++k)
        CHECK(std::fabs(out.laws[k].mean()) < 1e-15);

    auto probes = atom_probes(out, {-0.8, 0.0, 0.8, -2.5, 2.5});
    CHECK(check_family_mrl(out, probes, Tolerance{1e-10, 1e-13}).holds);
    CHECK(isf_tp2_check(out, probes, MinorMode::AllPairs, Tolerance{1e-10, 1e-13}).holds);

    // gates: non-atomic laws, uncentered input, disordered family
    TimeFamily dens = scale_family(Measure::gaussian(1.0), [](double t) { return t; },
                                   {0.5, 1.0});
    CHECK_THROWS_AS(censor_transform(dens, spec), PreconditionFailed);
    TimeFamily off;
    off.times = {0.0, 1.0};
    off.laws = {Measure::two_point(0.0, 2.0), Measure::two_point(-1.0, 3.0)};
    CHECK_THROWS_AS(censor_transform(off, spec), PreconditionFailed);
    TimeFamily shrink;
    shrink.times = {0.0, 1.0};
    shrink.laws = {Measure::two_point(-2.0, 2.0), Measure::two_point(-1.0, 1.0)};
    CHECK_THROWS_AS(censor_transform(shrink, spec), PreconditionFailed);
}

TEST_CASE("censoring preserves total positivity on random families") {
    RngStream rng(20250815, 11);
    for (int trial = 0; trial < 20; ++trial) {
        // scaling a centered two-atom law is residual-monotone for any weights;
        // richer atomic bases need not be, so the driver stays two-atom
        double p = 0.15 + 0.7 * rng.uniform01();
        double g = 0.8 + 2.2 * rng.uniform01();
        Measure base = Measure::atomic({{-(1.0 - p) * g, p}, {p * g, 1.0 - p}});
        TimeFamily fam = scale_family(base, [](double t) { return 1.0 + 0.5 * t; },
                                      {0.0, 0.7, 1.4});
        double c1 = -2.0 + 2.0 * rng.uniform01();
        double c2 = c1 + 0.4 + 1.5 * rng.uniform01();
        CensorSpec spec;
        spec.cuts = {c1, c2};
        TimeFamily out = censor_transform(fam, spec);

        auto probes = atom_probes(out, {c1, c2, -8.0, 8.0});
        CHECK(isf_tp2_check(out, probes, MinorMode::AllPairs, Tolerance{1e-10, 1e-13}).holds);
        CHECK(check_family_mrl(out, probes, Tolerance{1e-10, 1e-13}).holds);
        for (std::size_t k = 0; k < out.size(); ++k)
            CHECK(std::fabs(out.laws[k].mean() - fam.laws[k].mean()) < 1e-13);
    }
}

TEST_CASE("sampled curve reconstruction tolerates quadrature noise") {
    Measure g = Measure::gaussian(1.0);
    IsfCurve curve = isf_curve(g, 257);

    IsfCurve noisy = curve;
    for (std::size_t i = 0; i < noisy.values.size(); ++i)
        noisy.values[i] = std::max(0.0, noisy.values[i] + ((i % 2 == 0) ? 1e-9 : -1e-9));

    // the raw reconstruction rejects the broken convexity
    CHECK_THROWS_AS(measure_from_isf(noisy), InvalidIsf);

    // the projection recovers the clean curve, not the analytic law: knot
    // resolution bounds how well either reconstruction can track the latter
    Measure clean = measure_from_isf(curve);
    Measure recon = measure_from_sampled_isf(noisy.xs, noisy.values, noisy.asymptote);
    for (double x : {-2.0, -0.5, 0.0, 0.8, 2.0})
        CHECK(close(recon.integrated_survival(x), clean.integrated_survival(x), 1e-7));
    CHECK(std::fabs(recon.mean() - clean.mean()) < 1e-7);

    CHECK_THROWS_AS(measure_from_sampled_isf({0.0, 0.0, 1.0}, {1.0, 0.5, 0.2}, 0.0),
                    InvalidIsf);
}
