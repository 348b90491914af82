#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace peacock {

// Shared tolerance policy for order verdicts: comparisons are relative to the
// local magnitude of the quantities compared, with an absolute floor so that
// values near zero do not demand exact equality.
struct Tolerance {
    double relative = 1e-9;
    double absolute_floor = 1e-12;

    double at(double scale) const {
        return std::max(relative * std::fabs(scale), absolute_floor);
    }
};

// Outcome of a monotonicity / positivity check over a grid.
//
// worst_violation is the most negative margin observed (0 when every margin is
// clean); holds <=> worst_violation >= -tolerance_used. The witness window
// [row_lo,row_hi] x [col_lo,col_hi] locates the worst margin: rows are times
// (or the first grid axis), cols are states. Point witnesses set lo == hi;
// checks without a row axis leave rows NaN.
struct OrderVerdict {
    bool holds = true;
    double worst_violation = 0.0;
    double worst_raw = 0.0;  // unnormalized companion value (raw minor, raw difference)
    double tolerance_used = 0.0;

    double row_lo = std::numeric_limits<double>::quiet_NaN();
    double row_hi = std::numeric_limits<double>::quiet_NaN();
    double col_lo = std::numeric_limits<double>::quiet_NaN();
    double col_hi = std::numeric_limits<double>::quiet_NaN();

    std::string note;  // distinct failure labels, e.g. "NonConstantMean"
};

inline OrderVerdict make_pass(double tol) {
    OrderVerdict v;
    v.holds = true;
    v.tolerance_used = tol;
    return v;
}

}  // namespace peacock
