#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace peacock {

// Every library failure derives from Error and carries a stable code string.
// The CLI maps codes to exit status: usage/precondition codes exit 2,
// mathematical verdict failures are reported through OrderVerdict instead.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& w) : Error("QuadratureFailure", w) {}
};

struct InvalidIsf : Error {
    explicit InvalidIsf(const std::string& w) : Error("InvalidIsf", w) {}
};

struct NotCentered : Error {
    explicit NotCentered(const std::string& w) : Error("NotCentered", w) {}
};

struct ModeInvalid : Error {
    explicit ModeInvalid(const std::string& w) : Error("ModeInvalid", w) {}
};

struct NonIntervalSupport : Error {
    explicit NonIntervalSupport(const std::string& w) : Error("NonIntervalSupport", w) {}
};

struct PreconditionFailed : Error {
    explicit PreconditionFailed(const std::string& w) : Error("PreconditionFailed", w) {}
};

// Carries which hypothesis failed ("H1", "H2", "H3", "centering", ...).
struct HypothesisViolated : Error {
    HypothesisViolated(std::string which, const std::string& w)
        : Error("HypothesisViolated", which + ": " + w), which_(std::move(which)) {}
    const std::string& which() const noexcept { return which_; }

private:
    std::string which_;
};

struct DegenerateScale : Error {
    explicit DegenerateScale(const std::string& w) : Error("DegenerateScale", w) {}
};

struct InsufficientPaths : Error {
    explicit InsufficientPaths(const std::string& w) : Error("InsufficientPaths", w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("ConfigError", w) {}
};

}  // namespace peacock
