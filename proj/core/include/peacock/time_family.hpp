#pragma once

#include <string>
#include <vector>

#include "peacock/measure.hpp"

namespace peacock {

// A one-parameter family of laws sampled at finitely many parameter values.
// Families produced by the construction layer carry one law per grid time;
// order checks compare consecutive times.
struct TimeFamily {
    std::vector<double> times;  // strictly increasing, at least two entries
    std::vector<Measure> laws;  // one per time
    std::string note;           // human-readable provenance for reports

    const Measure& at(std::size_t k) const { return laws[k]; }
    std::size_t size() const { return times.size(); }
};

// Throws PreconditionFailed unless times are strictly increasing, finite, and
// matched one-to-one with laws.
void validate_family(const TimeFamily& family);

}  // namespace peacock
