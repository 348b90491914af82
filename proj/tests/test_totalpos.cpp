#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "peacock/errors.hpp"
#include "peacock/measure.hpp"
#include "peacock/mrl.hpp"
#include "peacock/quadrature.hpp"
#include "peacock/rng.hpp"
#include "peacock/totalpos.hpp"

using namespace peacock;

namespace {

bool close(double a, double b, double tol = 1e-12) { return std::fabs(a - b) <= tol; }

Tp2Grid grid_of(std::vector<double> rows, std::vector<double> cols,
                std::vector<double> values) {
    Tp2Grid g;
    g.rows = std::move(rows);
    g.cols = std::move(cols);
    g.values = std::move(values);
    return g;
}

std::vector<double> sampled(const std::vector<double>& xs,
                            const std::function<double(double)>& f) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] = f(xs[i]);
    }
    return out;
}

double gamma_density(double shape, double rate, double x) {
    if (x < 0.0) {
        return 0.0;
    }
    if (x == 0.0) {
        return shape == 1.0 ? rate : 0.0;
    }
    return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
                    std::lgamma(shape));
}

double normal_density(double x, double sd) {
    return std::exp(-0.5 * (x / sd) * (x / sd)) / (sd * 2.5066282746310002);
}

double student3_density(double x) {
    return std::exp(std::lgamma(2.0) - std::lgamma(1.5) -
                    0.5 * std::log(3.0 * 3.141592653589793) -
                    2.0 * std::log1p(x * x / 3.0));
}

}  // namespace

TEST_CASE("minor scan basics") {
    SUBCASE("monotone 2x2 holds and reports the single minor") {
        auto v = tp2_check(grid_of({0, 1}, {0, 1}, {1, 1, 1, 2}));
        CHECK(v.holds);
        CHECK(close(v.worst_raw, 1.0));
        CHECK(close(v.worst_violation, 0.5));
        CHECK(v.row_lo == 0.0);
        CHECK(v.row_hi == 1.0);
    }
    SUBCASE("reversed 2x2 fails with the raw determinant") {
        auto v = tp2_check(grid_of({0, 1}, {0, 1}, {1, 2, 2, 1}));
        CHECK(!v.holds);
        CHECK(close(v.worst_raw, -3.0));
        CHECK(close(v.worst_violation, -0.75));
    }
    SUBCASE("rank-one grids have vanishing minors") {
        const std::vector<double> u = {1.0, 2.0, 5.0};
        const std::vector<double> w = {0.3, 0.7, 0.2};
        std::vector<double> vals;
        for (double a : u) {
            for (double b : w) {
                vals.push_back(a * b);
            }
        }
        auto v = tp2_check(grid_of({0, 1, 2}, {0, 1, 2}, vals));
        CHECK(v.holds);
        CHECK(std::fabs(v.worst_violation) <= 1e-12);
    }
    SUBCASE("single row or column is vacuous") {
        auto v = tp2_check(grid_of({1}, {0, 1, 2}, {0.2, 0.5, 0.3}));
        CHECK(v.holds);
        CHECK(v.worst_violation == 0.0);
        CHECK(std::isnan(v.row_lo));
    }
}

TEST_CASE("zero entries separate the two scan modes") {
    // Adjacent minors all touch the zero column and vanish; the violation
    // sits in the outer column pair and only the full scan reaches it.
    const Tp2Grid g = grid_of({0, 1}, {0, 1, 2}, {1, 0, 2, 1, 0, 1});
    auto v = tp2_check(g, MinorMode::AllPairs);
    CHECK(!v.holds);
    CHECK(close(v.worst_violation, -0.5));
    CHECK(close(v.worst_raw, -1.0));
    CHECK(v.col_lo == 0.0);
    CHECK(v.col_hi == 2.0);
    CHECK_THROWS_AS(tp2_check(g, MinorMode::Adjacent), ModeInvalid);
}

TEST_CASE("modes agree on strictly positive grids") {
    RngStream rng(404, 0);
    std::vector<double> labels = {0, 1, 2, 3, 4};
    for (int trial = 0; trial < 10; ++trial) {
        const double a = 0.3 + 1.9 * rng.uniform01();
        const double m = -0.8 + 1.6 * rng.uniform01();
        auto g = kernel_on_grid(labels, labels, [&](double x, double y) {
            const double d = y - x - m;
            return std::exp(-a * d * d);
        });
        auto all = tp2_check(g, MinorMode::AllPairs);
        auto adj = tp2_check(g, MinorMode::Adjacent);
        CHECK(all.holds);
        CHECK(adj.holds);
    }
    const Tp2Grid bad = grid_of({0, 1}, {0, 1}, {1, 2, 2, 1});
    CHECK(!tp2_check(bad, MinorMode::AllPairs).holds);
    CHECK(!tp2_check(bad, MinorMode::Adjacent).holds);
}

TEST_CASE("minors touching a zero entry are judged by raw determinant") {
    // Normalized this minor is -1; its raw value 1e-20 is harmless padding.
    auto v = tp2_check(grid_of({0, 1}, {0, 1}, {0.0, 1.0, 1e-20, 1.0}));
    CHECK(v.holds);
    // A raw violation past the floor still fails even with a zero factor.
    auto w = tp2_check(grid_of({0, 1}, {0, 1}, {0.0, 1.0, 1e-3, 1.0}));
    CHECK(!w.holds);
    CHECK(close(w.worst_violation, -1.0));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(tp2_check(grid_of({0, 1}, {0, 1}, {1, 1, 1, -0.5})),
                    PreconditionFailed);
    CHECK_THROWS_AS(tp2_check(grid_of({1, 0}, {0, 1}, {1, 1, 1, 1})),
                    PreconditionFailed);
    CHECK_THROWS_AS(tp2_check(grid_of({0, 1}, {0, 1}, {1, 1, 1})), PreconditionFailed);
}

TEST_CASE("grid csv round trip") {
    const char* path = "totalpos_grid_roundtrip.csv";
    auto g = kernel_on_grid({1, 2, 3}, {0.0, 0.5, 1.25},
                            [](double t, double y) { return t * 0.1 + y; });
    tp2_grid_to_csv(path, g);
    const Tp2Grid back = tp2_grid_from_csv(path);
    REQUIRE(back.rows == g.rows);
    REQUIRE(back.cols == g.cols);
    REQUIRE(back.values == g.values);
    std::remove(path);
}

TEST_CASE("log-concavity of sampled densities") {
    SUBCASE("gaussian holds") {
        const auto xs = linspace(-5.0, 5.0, 101);
        auto v = log_concavity_check(xs, sampled(xs, [](double x) {
                                         return normal_density(x, 1.0);
                                     }));
        CHECK(v.holds);
        CHECK(v.worst_violation >= -1e-12);
    }
    SUBCASE("two-sided exponential holds through the kink") {
        const auto xs = linspace(-4.0, 4.0, 161);
        auto v = log_concavity_check(xs, sampled(xs, [](double x) {
                                         return 0.75 * std::exp(-1.5 * std::fabs(x));
                                     }));
        CHECK(v.holds);
        CHECK(v.worst_violation >= -1e-9);
    }
    SUBCASE("heavy tails fail in the log-convex region") {
        const auto xs = linspace(-9.0, 9.0, 181);
        auto v = log_concavity_check(xs, sampled(xs, student3_density));
        CHECK(!v.holds);
        // frozen scan: worst normalized second-difference minor -1.66458e-3
        CHECK(v.worst_violation < -1.5e-3);
        CHECK(v.worst_violation > -2.0e-3);
        CHECK(std::fabs(v.col_lo) > 1.7);  // outside the inflection |x| < sqrt(3)
    }
    SUBCASE("interior zero splits the support") {
        CHECK_THROWS_AS(
            log_concavity_check({0, 1, 2, 3, 4}, {0.0, 1.0, 0.0, 2.0, 1.0}),
            NonIntervalSupport);
    }
    SUBCASE("leading and trailing zeros are fine") {
        auto v = log_concavity_check({0, 1, 2, 3, 4}, {0.0, 1.0, 2.0, 1.0, 0.0});
        CHECK(v.holds);
    }
    SUBCASE("non-uniform grid rejected") {
        CHECK_THROWS_AS(log_concavity_check({0, 1, 3}, {1.0, 1.0, 1.0}),
                        PreconditionFailed);
    }
    SUBCASE("negative sample rejected") {
        CHECK_THROWS_AS(log_concavity_check({0, 1, 2}, {1.0, -1.0, 1.0}),
                        PreconditionFailed);
    }
}

TEST_CASE("composition of step-indicator kernels is the overlap kernel") {
    const auto mids = linspace(0.0, 4.0, 17);
    const auto ends = linspace(0.0, 4.0, 9);
    const double h = mids[1] - mids[0];
    auto k1 = kernel_on_grid(ends, mids,
                             [](double x, double y) { return x >= y ? 1.0 : 0.0; });
    auto k2 = kernel_on_grid(mids, ends,
                             [](double y, double z) { return y >= z ? 1.0 : 0.0; });
    const auto r = compose_kernels(k1, k2, std::vector<double>(mids.size(), h));
    // r(x, z) = h * #{nodes in [z, x]}: the largest window holds all 17 nodes.
    CHECK(close(r.at(8, 0), 17.0 * h));
    CHECK(r.at(0, 8) == 0.0);
    auto v = tp2_check(r);
    CHECK(v.holds);
    CHECK(v.worst_violation >= 0.0);
}

TEST_CASE("composition with a rank-one factor is rank-one") {
    const std::vector<double> labels = {0, 1, 2};
    auto k1 = kernel_on_grid(labels, labels,
                             [](double x, double y) { return (1.0 + x) * (2.0 - 0.5 * y); });
    auto k2 = kernel_on_grid(labels, labels, [](double y, double z) {
        const double d = z - y;
        return std::exp(-0.7 * d * d);
    });
    auto r = compose_kernels(k1, k2, {0.5, 0.5, 0.5});
    auto v = tp2_check(r);
    CHECK(v.holds);
    CHECK(std::fabs(v.worst_violation) <= 1e-12);
}

TEST_CASE("composition preserves the minor property across random pairs") {
    const auto labels = linspace(-4.0, 4.0, 33);
    const double h = labels[1] - labels[0];
    const std::vector<double> w(labels.size(), h);
    for (int trial = 0; trial < 20; ++trial) {
        RngStream rng(777, static_cast<std::uint64_t>(trial));
        const double a1 = 0.3 + 1.9 * rng.uniform01();
        const double m1 = -0.8 + 1.6 * rng.uniform01();
        const double a2 = 0.3 + 1.9 * rng.uniform01();
        const double m2 = -0.8 + 1.6 * rng.uniform01();
        auto k1 = kernel_on_grid(labels, labels, [&](double x, double y) {
            const double d = y - x - m1;
            return std::exp(-a1 * d * d);
        });
        auto k2 = kernel_on_grid(labels, labels, [&](double y, double z) {
            const double d = z - y - m2;
            return std::exp(-a2 * d * d);
        });
        REQUIRE(tp2_check(k1).holds);
        REQUIRE(tp2_check(k2).holds);
        auto v = tp2_check(compose_kernels(k1, k2, w));
        CHECK(v.holds);
        CHECK(v.worst_violation >= -1e-9);
    }
}

TEST_CASE("composition validates shared nodes") {
    auto k1 = kernel_on_grid({0, 1}, {0, 1}, [](double, double) { return 1.0; });
    auto k2 = kernel_on_grid({0, 2}, {0, 1}, [](double, double) { return 1.0; });
    CHECK_THROWS_AS(compose_kernels(k1, k2, {1.0, 1.0}), PreconditionFailed);
    CHECK_THROWS_AS(compose_kernels(k1, k1, {1.0}), PreconditionFailed);
    CHECK_THROWS_AS(compose_kernels(k1, k1, {1.0, -1.0}), PreconditionFailed);
}

TEST_CASE("convolution power against closed forms") {
    const auto xs = linspace(0.0, 24.0, 481);
    const auto f = sampled(xs, [](double x) { return std::exp(-x); });
    SUBCASE("power one is the identity") {
        const auto t = convolution_power(xs, f, 1);
        CHECK(t.xs == xs);
        CHECK(t.values == f);
    }
    SUBCASE("two folds of a unit-rate one-sided exponential") {
        const auto t = convolution_power(xs, f, 2);
        REQUIRE(t.values.size() == 961);
        double sup = 0.0;
        for (std::size_t j = 0; j < t.values.size(); ++j) {
            sup = std::max(sup, std::fabs(t.values[j] - gamma_density(2.0, 1.0, t.xs[j])));
        }
        CHECK(sup < 1e-6);
        // frozen: the fold at x=1 reproduces x e^{-x} to quadrature accuracy
        CHECK(std::fabs(t.values[20] - 0.36787944117144233) < 1e-9);
    }
    SUBCASE("three folds") {
        const auto t = convolution_power(xs, f, 3);
        double sup = 0.0;
        for (std::size_t j = 0; j < t.values.size(); ++j) {
            sup = std::max(sup, std::fabs(t.values[j] - gamma_density(3.0, 1.0, t.xs[j])));
        }
        CHECK(sup < 1e-6);
    }
    SUBCASE("two-sided grids work for two-sided steps") {
        const auto zs = linspace(-12.0, 12.0, 481);
        const auto lap = sampled(zs, [](double x) {
            return laplace_convolution_density(1.3, 1, x);
        });
        const auto t = convolution_power(zs, lap, 2);
        double sup = 0.0;
        for (std::size_t j = 0; j < t.values.size(); ++j) {
            sup = std::max(sup, std::fabs(t.values[j] -
                                          laplace_convolution_density(1.3, 2, t.xs[j])));
        }
        // the integrand kink at s = y sits mid-range here, capping the
        // composite rule at second order; the 1e-6 target is for smooth folds
        CHECK(sup < 2e-3);
    }
    SUBCASE("non-finite input is rejected") {
        auto bad = f;
        bad[5] = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(convolution_power(xs, bad, 2), PreconditionFailed);
    }
}

TEST_CASE("one-sided discrete walk table is totally positive") {
    const auto xs = linspace(0.0, 24.0, 481);
    const auto f = sampled(xs, [](double x) { return std::exp(-x); });
    const auto g = walk_table(xs, f, 8);
    REQUIRE(g.rows.size() == 8);
    REQUIRE(g.cols.size() <= 129);
    auto v = tp2_check(g);
    CHECK(v.holds);
    CHECK(v.worst_violation >= -1e-12);

    SUBCASE("rectangle route tracks the accuracy route loosely") {
        const auto acc = convolution_power(xs, f, 2);
        double sup = 0.0;
        // walk row 2 on the master grid vs the quadrature fold at matching x
        const auto fine = walk_table(xs, f, 2, 4000);
        for (std::size_t j = 0; j < fine.cols.size(); ++j) {
            const std::size_t idx =
                static_cast<std::size_t>(std::llround(fine.cols[j] / 0.05));
            if (idx < acc.values.size()) {
                sup = std::max(sup, std::fabs(fine.at(1, j) - acc.values[idx]));
            }
        }
        CHECK(sup < 0.06);
        CHECK(sup > 1e-8);  // the routes must not silently share an implementation
    }
    SUBCASE("grid must start at the origin") {
        const auto ys = linspace(1.0, 25.0, 481);
        CHECK_THROWS_AS(walk_table(ys, f, 3), PreconditionFailed);
    }
}

TEST_CASE("nonstationary walk with distinct one-sided exponential steps") {
    const auto xs = linspace(0.0, 16.0, 321);
    std::vector<std::vector<double>> steps;
    for (double c : {1.0, 1.7, 2.6}) {
        steps.push_back(sampled(xs, [c](double x) { return c * std::exp(-c * x); }));
    }
    auto v = nonstationary_walk_tp2(xs, steps);
    CHECK(v.holds);
    CHECK(v.worst_violation >= -1e-12);

    SUBCASE("equal steps reduce to the stationary table") {
        const std::vector<std::vector<double>> same(3, steps[0]);
        const auto a = nonstationary_walk_table(xs, same);
        const auto b = walk_table(xs, steps[0], 3);
        CHECK(a.values == b.values);
        CHECK(a.cols == b.cols);
    }
    SUBCASE("a heavy-tailed step fails the precondition") {
        auto heavy = steps;
        heavy[1] = sampled(xs, student3_density);
        CHECK_THROWS_AS(nonstationary_walk_tp2(xs, heavy), PreconditionFailed);
    }
}

TEST_CASE("downsampling keeps endpoints and order") {
    auto idx = downsample_indices(7, 3);
    REQUIRE(idx.size() == 3);
    CHECK(idx.front() == 0);
    CHECK(idx[1] == 3);
    CHECK(idx.back() == 6);
    idx = downsample_indices(5, 100);
    REQUIRE(idx.size() == 5);
    CHECK(idx[4] == 4);
    idx = downsample_indices(3841, 129);
    CHECK(idx.size() <= 129);
    CHECK(idx.front() == 0);
    CHECK(idx.back() == 3840);
}

TEST_CASE("two-sided exponential fold density closed form") {
    // frozen oracle: direct numeric convolution at 30-digit precision
    CHECK(std::fabs(laplace_convolution_density(1.3, 1, 0.7) - 0.26164074562186338) <
          1e-12);
    CHECK(std::fabs(laplace_convolution_density(1.3, 3, 0.7) - 0.21448327173284278) <
          1e-12);
    CHECK(std::fabs(laplace_convolution_density(1.0, 5, 2.0) - 0.104144729678174635) <
          1e-12);
    CHECK(std::fabs(laplace_convolution_density(1.0, 20, 0.0) - 0.06429266031773258) <
          1e-12);
    SUBCASE("symmetry is exact") {
        for (int n : {1, 2, 5, 11}) {
            CHECK(laplace_convolution_density(0.8, n, 1.9) ==
                  laplace_convolution_density(0.8, n, -1.9));
        }
    }
    SUBCASE("numeric folds agree with the closed form") {
        const auto zs = linspace(-12.0, 12.0, 481);
        const auto lap = sampled(zs, [](double x) {
            return laplace_convolution_density(1.3, 1, x);
        });
        const auto t = convolution_power(zs, lap, 3);
        double sup = 0.0;
        for (std::size_t j = 0; j < t.values.size(); ++j) {
            sup = std::max(sup, std::fabs(t.values[j] -
                                          laplace_convolution_density(1.3, 3, t.xs[j])));
        }
        CHECK(sup < 2e-3);  // interior kinks; see the two-sided fold subcase
    }
    CHECK_THROWS_AS(laplace_convolution_density(-1.0, 2, 0.0), PreconditionFailed);
    CHECK_THROWS_AS(laplace_convolution_density(1.0, 0, 0.0), PreconditionFailed);
}

TEST_CASE("one-sided exponential walk kernel") {
    const ErlangWalkKernel k(1.0);
    // frozen: gamma(5, 1) density at 4
    CHECK(std::fabs(k.weight(5.0, 0.0, 4.0) - 0.1953668148131647) < 1e-12);
    CHECK(k.weight(5.0, 1.5, 5.5) == k.weight(5.0, 0.0, 4.0));
    CHECK(k.weight(3.0, 2.0, 1.0) == 0.0);
    CHECK_THROWS_AS(k.weight(2.5, 0.0, 1.0), PreconditionFailed);

    std::vector<double> times;
    for (int n = 1; n <= 20; ++n) {
        times.push_back(n);
    }
    const auto lam = linspace(0.4, 60.0, 129);
    auto v = spacetime_tp2(k, times, 0.0, lam);
    CHECK(v.holds);
    // frozen scan: every normalized minor clears +7.7e-3
    CHECK(v.worst_violation > 1e-3);

    SUBCASE("slices integrate to one") {
        const auto fine = linspace(0.0, 60.0, 4097);
        CHECK(std::fabs(slice_mass(k, 3.0, 0.0, fine) - 1.0) < 1e-8);
        CHECK(std::fabs(slice_mass(k, 17.0, 0.0, fine) - 1.0) < 1e-8);
    }
    SUBCASE("survival of the slice inherits the minor property") {
        const auto slice = spacetime_slice(k, times, 0.0, lam);
        const double h = lam[1] - lam[0];
        Tp2Grid surv = slice;
        for (std::size_t i = 0; i < surv.rows.size(); ++i) {
            double acc = 0.0;
            for (std::size_t j = surv.cols.size(); j-- > 0;) {
                acc += slice.at(i, j) * h;
                surv.at(i, j) = acc;
            }
        }
        CHECK(tp2_check(surv).holds);
    }
}

TEST_CASE("reflected two-sided exponential walk") {
    const ReflectedLaplaceWalkKernel k(1.0);
    // frozen: 2 p_5(2.0) with p the 5-fold two-sided exponential density
    CHECK(std::fabs(k.weight(5.0, 0.0, 2.0) - 0.20828945935634927) < 1e-12);
    CHECK_THROWS_AS(k.weight(2.0, -0.5, 1.0), PreconditionFailed);

    std::vector<double> times;
    for (int n = 1; n <= 20; ++n) {
        times.push_back(n);
    }
    SUBCASE("from the origin the space-time table is totally positive") {
        auto v = spacetime_tp2(k, times, 0.0, linspace(0.0, 30.0, 129));
        CHECK(v.holds);
        // frozen scan: minimum normalized minor +4.24e-5
        CHECK(v.worst_violation > 1e-6);
    }
    SUBCASE("an interior start genuinely breaks it") {
        std::vector<double> short_times(times.begin(), times.begin() + 8);
        auto v = spacetime_tp2(k, short_times, 0.3, linspace(0.0, 12.0, 61));
        CHECK(!v.holds);
        // frozen scan: worst normalized minor -3.04e-2 in the first two rows
        CHECK(v.worst_violation < -0.01);
        CHECK(v.row_lo == 1.0);
        CHECK(v.col_hi < 1.0);
    }
    SUBCASE("slice mass is one") {
        CHECK(std::fabs(slice_mass(k, 2.0, 0.0, linspace(0.0, 40.0, 4097)) - 1.0) <
              1e-8);
    }
}

TEST_CASE("gaussian drift kernel fails only across mixed-sign columns") {
    const DriftKernel k(0.4);
    const std::vector<double> times = {1.0, 2.0, 3.0, 4.0};
    SUBCASE("positive window holds") {
        auto v = spacetime_tp2(k, times, 0.0, linspace(0.5, 6.0, 23));
        CHECK(v.holds);
        CHECK(v.worst_violation > 1e-3);  // frozen scan: +1.29e-2
    }
    SUBCASE("window straddling the origin fails") {
        auto v = spacetime_tp2(k, times, 0.0, linspace(-6.0, 6.0, 25));
        CHECK(!v.holds);
        // frozen scan: worst normalized minor -0.99999863 at columns (-6, 0)
        CHECK(v.worst_violation < -0.9);
        CHECK(v.col_lo < 0.0);
        CHECK(v.col_hi <= 0.5);
    }
}

TEST_CASE("finite chain kernel") {
    const std::vector<double> states = {0, 1, 2};
    const std::vector<std::vector<double>> p = {
        {0.7, 0.3, 0.0}, {0.2, 0.5, 0.3}, {0.0, 0.3, 0.7}};
    const MatrixChainKernel k(states, p);
    SUBCASE("third power row, exact arithmetic") {
        CHECK(close(k.weight(3, 0.0, 0.0), 0.457));
        CHECK(close(k.weight(3, 0.0, 1.0), 0.372));
        CHECK(close(k.weight(3, 0.0, 2.0), 0.171));
    }
    SUBCASE("slice from the bottom state is totally positive") {
        auto v = spacetime_tp2(k, {1, 2, 3, 4, 5, 6}, 0.0, states);
        CHECK(v.holds);
        CHECK(v.worst_violation > 1e-3);  // frozen scan: +8.66e-2
    }
    SUBCASE("cyclic chain fails the one-step precondition") {
        const MatrixChainKernel cyc(states, {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
        CHECK_THROWS_AS(spacetime_tp2(cyc, {1, 2, 3}, 0.0, states),
                        PreconditionFailed);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(MatrixChainKernel(states, {{0.5, 0.5, 0.1},
                                                   {0.2, 0.5, 0.3},
                                                   {0.0, 0.3, 0.7}}),
                        PreconditionFailed);
        CHECK_THROWS_AS(k.weight(2, 0.5, 1.0), PreconditionFailed);
    }
}

TEST_CASE("integrated-survival grid of a family") {
    SUBCASE("constant family is rank-one by rows") {
        TimeFamily fam;
        fam.times = {0, 1, 2};
        for (int i = 0; i < 3; ++i) {
            fam.laws.push_back(Measure::gaussian(1.0));
        }
        auto v = isf_tp2_check(fam, linspace(-4.0, 4.0, 33));
        CHECK(v.holds);
        CHECK(std::fabs(v.worst_violation) <= 1e-12);
    }
    SUBCASE("linearly scaled symmetric two-point family") {
        TimeFamily fam;
        for (double t : {0.5, 1.0, 1.5, 2.0}) {
            fam.times.push_back(t);
            fam.laws.push_back(
                Measure::atomic({{-t, 0.5}, {t, 0.5}}));
        }
        const auto xs = linspace(-3.0, 3.0, 25);
        const auto g = isf_grid(fam, xs);
        // piecewise-linear integrated survival: C_t(0) = t/2 exactly
        CHECK(g.at(1, 12) == 0.5);
        CHECK(g.at(3, 12) == 1.0);
        auto v = tp2_check(g);
        CHECK(v.holds);
    }
    SUBCASE("mean-residual-order equivalence on expanding exponentials") {
        TimeFamily fam;
        for (double t : {0.0, 1.0, 2.0}) {
            fam.times.push_back(t);
            fam.laws.push_back(Measure::exponential(1.0 / (1.0 + 0.4 * t)));
        }
        const auto xs = linspace(0.0, 10.0, 41);
        auto tp = isf_tp2_check(fam, xs);
        auto mrl = check_family_mrl(fam, xs);
        CHECK(tp.holds);
        CHECK(mrl.holds);
    }
    SUBCASE("mean-residual-order equivalence on a shrinking family") {
        TimeFamily fam;
        for (double t : {0.0, 0.5, 1.0}) {
            fam.times.push_back(t);
            fam.laws.push_back(Measure::atomic({{-(2.0 - t), 0.5}, {2.0 - t, 0.5}}));
        }
        const auto xs = linspace(-2.5, 2.5, 41);
        auto tp = isf_tp2_check(fam, xs);
        auto mrl = check_family_mrl(fam, xs);
        CHECK(!tp.holds);
        CHECK(!mrl.holds);
        // the minor's right column lands where the smaller support has died
        CHECK(tp.col_hi >= 1.0);
        CHECK(tp.col_hi <= 2.0);
        CHECK(std::fabs(mrl.col_lo) <= 2.0);
    }
    SUBCASE("minor property forces columnwise growth in time") {
        TimeFamily fam;
        for (double t : {0.0, 1.0, 2.0, 3.0}) {
            fam.times.push_back(t);
            fam.laws.push_back(Measure::gaussian(std::sqrt(1.0 + t)));
        }
        const auto xs = linspace(-5.0, 5.0, 41);
        REQUIRE(isf_tp2_check(fam, xs).holds);
        const auto g = isf_grid(fam, xs);
        for (std::size_t j = 0; j < g.cols.size(); ++j) {
            for (std::size_t i = 0; i + 1 < g.rows.size(); ++i) {
                CHECK(g.at(i + 1, j) >= g.at(i, j) - 1e-12);
            }
        }
    }
}
