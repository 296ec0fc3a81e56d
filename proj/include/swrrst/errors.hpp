#pragma once

#include <stdexcept>
#include <string>

namespace swrrst {

/// Invalid inputs: broken tensor symmetries, out-of-range indices,
/// malformed operators, violated preconditions.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A configured resource cap was exceeded (term count, operator string
/// length, dense oracle size, commutator series rank).
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A vanishing or near-vanishing energy denominator in the requested
/// amplitude domain.
struct SingularityError : std::runtime_error {
    SingularityError(const std::string& msg, std::string term, double denominator)
        : std::runtime_error(msg), offending_term(std::move(term)), abs_denominator(denominator) {}
    std::string offending_term;
    double abs_denominator;
};

/// The iterative solver failed to reach the requested tolerance.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& msg, double residual)
        : std::runtime_error(msg), final_residual(residual) {}
    double final_residual;
};

/// An operator does not have the structural form an operation requires
/// (e.g. non-diagonal external part where a number-polynomial form is needed).
struct StructureError : std::runtime_error {
    explicit StructureError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad run configuration or unparseable input file.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace swrrst
