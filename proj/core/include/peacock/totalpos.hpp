#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "peacock/measure.hpp"
#include "peacock/time_family.hpp"
#include "peacock/verdict.hpp"

namespace peacock {

// ============================================================================
// Order-2 total positivity of nonnegative kernels sampled on finite grids.
//
// A kernel K is TP2 on rows x cols when every 2x2 minor taken with increasing
// row and column indices is nonnegative. Checks normalize each minor by the
// larger of its diagonal products, so verdict margins are dimensionless and
// comparable across kernels. Minors containing a zero entry are judged by
// their raw determinant against an absolute floor of 1e-12 instead: exact
// zero padding outside a row's support would otherwise normalize harmless
// roundoff into order-one violations.
// ============================================================================

struct Tp2Grid {
    std::vector<double> rows;    // strictly increasing
    std::vector<double> cols;    // strictly increasing
    std::vector<double> values;  // row-major, size rows*cols, nonnegative

    double& at(std::size_t i, std::size_t j) { return values[i * cols.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * cols.size() + j]; }
};

Tp2Grid kernel_on_grid(std::vector<double> rows, std::vector<double> cols,
                       const std::function<double(double, double)>& k);

// CSV layout: header "k", then the column grid; one row per row grid value.
void tp2_grid_to_csv(const std::string& path, const Tp2Grid& grid);
Tp2Grid tp2_grid_from_csv(const std::string& path);

// AllPairs scans every increasing index pair and is the default: with zero
// entries in the kernel, adjacent minors alone do not imply the rest.
// Adjacent scans only neighboring rows/columns, which suffices for strictly
// positive kernels and is linear in the grid size; requesting it for a kernel
// with nonpositive entries throws ModeInvalid.
enum class MinorMode { AllPairs, Adjacent };

OrderVerdict tp2_check(const Tp2Grid& grid, MinorMode mode = MinorMode::AllPairs,
                       Tolerance tol = {});

// Log-concavity of a sampled density on a uniform grid, via the normalized
// second-difference minors f_i^2 - f_{i-1} f_{i+1}. The positive samples must
// form a contiguous block; an interior zero throws NonIntervalSupport.
OrderVerdict log_concavity_check(const std::vector<double>& xs,
                                 const std::vector<double>& fs, Tolerance tol = {});

// ============================================================================
// Kernel composition. (K1 . K2)(x, z) = sum_k w_k K1(x, y_k) K2(y_k, z) over
// the shared intermediate nodes y_k = K1.cols = K2.rows. With nonnegative
// weights the composition of TP2 grids is TP2 exactly, minor by minor, so the
// discrete check inherits the property with no quadrature error.
// ============================================================================

Tp2Grid compose_kernels(const Tp2Grid& k1, const Tp2Grid& k2,
                        const std::vector<double>& weights);

// ============================================================================
// Random-walk tables. Two deliberately separate routes:
//
// convolution_power approximates the continuum n-fold convolution of a
// density sampled on a uniform grid, with composite-rule weights built per
// output point; use it when the values themselves must be accurate. The grid
// may sit anywhere on the line (the two-sided exponential case included).
//
// walk_table is the positivity route: plain rectangle-weight folds, so each
// row is an exact discrete convolution of the step sequence and the stacked
// table is a statement about the discrete walk itself rather than a
// quadrature approximation. Rows are powers 1..n_steps on the common final
// grid, zero-padded beyond each power's reach. The step grid must start at 0:
// one-sided steps keep every power's support left edge at the origin, which
// is what makes the stacked table a lattice the minor scan can read. Walks
// with two-sided steps are not TP2 this way; they enter through the reflected
// kernel below.
// ============================================================================

struct ConvTable {
    std::vector<double> xs;
    std::vector<double> values;
};

ConvTable convolution_power(const std::vector<double>& xs,
                            const std::vector<double>& f, int n);

Tp2Grid walk_table(const std::vector<double>& xs, const std::vector<double>& f,
                   int n_steps, std::size_t max_cols = 129);

// Time-inhomogeneous version: one step density per step, all on the same grid.
Tp2Grid nonstationary_walk_table(const std::vector<double>& xs,
                                 const std::vector<std::vector<double>>& steps,
                                 std::size_t max_cols = 129);

// Checks each step for log-concavity first (PreconditionFailed if one fails),
// then scans the stacked table of partial convolutions.
OrderVerdict nonstationary_walk_tp2(const std::vector<double>& xs,
                                    const std::vector<std::vector<double>>& steps,
                                    std::size_t max_cols = 129, Tolerance tol = {});

// Evenly spread index subset of {0..n-1} keeping both endpoints.
std::vector<std::size_t> downsample_indices(std::size_t n, std::size_t max_count);

// ============================================================================
// Markov transition kernels with closed-form space-time slices.
// ============================================================================

class MarkovKernel {
public:
    virtual ~MarkovKernel() = default;
    // Transition weight from x to y over horizon t (a density in y, or a
    // probability mass for chain kernels).
    virtual double weight(double t, double x, double y) const = 0;
    virtual std::string describe() const = 0;
};

// Walk with iid exponential(rate) steps observed at integer horizons: the
// position after n steps from x has a gamma(n, 1/rate) density at y - x.
class ErlangWalkKernel : public MarkovKernel {
public:
    explicit ErlangWalkKernel(double rate);
    double weight(double t, double x, double y) const override;
    std::string describe() const override;

private:
    double rate_;
};

// Absolute value of a walk with iid two-sided exponential steps: the free
// walk density folded at the origin, weight(n, x, y) = p_n(y-x) + p_n(y+x)
// for x, y >= 0, where p_n is the n-fold convolution of the step density.
// The one-step kernel is TP2 in (x, y); the space-time slice is TP2 only
// when started at the origin, and genuinely fails from interior starts.
class ReflectedLaplaceWalkKernel : public MarkovKernel {
public:
    explicit ReflectedLaplaceWalkKernel(double rate);
    double weight(double t, double x, double y) const override;
    std::string describe() const override;

private:
    double rate_;
};

// n-fold convolution of the two-sided exponential density (rate c) at x,
// evaluated from the closed-form polynomial-times-exponential expansion.
double laplace_convolution_density(double rate, int n, double x);

// Gaussian walk with linear drift: y - x ~ N(drift * t, t) over horizon t.
class DriftKernel : public MarkovKernel {
public:
    explicit DriftKernel(double drift);
    double weight(double t, double x, double y) const override;
    std::string describe() const override;

private:
    double drift_;
};

// Finite-state chain given by an explicit one-step stochastic matrix; the
// horizon is the (integer) number of steps and weights are entries of the
// matrix power.
class MatrixChainKernel : public MarkovKernel {
public:
    MatrixChainKernel(std::vector<double> states, std::vector<std::vector<double>> p);
    double weight(double t, double x, double y) const override;
    std::string describe() const override;

private:
    std::size_t index_of(double s) const;
    std::vector<double> states_;
    std::vector<std::vector<double>> p_;
};

// Space-time slice from a fixed start: rows are horizons, cols are arrival
// points, values are transition weights.
Tp2Grid spacetime_slice(const MarkovKernel& kernel, const std::vector<double>& times,
                        double x0, const std::vector<double>& ys);

// Verifies first that the one-step kernel (x, y) -> weight(times[0], x, y) is
// itself TP2 on ys x ys (PreconditionFailed otherwise), then scans the
// space-time slice from x0.
OrderVerdict spacetime_tp2(const MarkovKernel& kernel, const std::vector<double>& times,
                           double x0, const std::vector<double>& ys,
                           MinorMode mode = MinorMode::AllPairs, Tolerance tol = {});

// Composite-rule mass of one time slice over the ys window; slices of a
// proper transition kernel integrate to 1 once the window holds the support.
double slice_mass(const MarkovKernel& kernel, double t, double x0,
                  const std::vector<double>& ys);

// ============================================================================
// Integrated-survival table of a family: rows are times, cols are states,
// values C_t(x). Mean-residual-life monotonicity of the family is equivalent
// to this table being TP2, which makes the two checks mutual cross-checks.
// ============================================================================

Tp2Grid isf_grid(const TimeFamily& family, const std::vector<double>& xs);

OrderVerdict isf_tp2_check(const TimeFamily& family, const std::vector<double>& xs,
                           MinorMode mode = MinorMode::AllPairs, Tolerance tol = {});

}  // namespace peacock
