#pragma once

#include <stdexcept>
#include <string>

namespace qpm {

// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape mismatch: non-square input, differing dims, mismatched sample spaces.
struct dimension_error : error {
    explicit dimension_error(const std::string& msg) : error(msg) {}
};

// A value lies outside the mathematical domain of an operation
// (eigenvalue outside the domain of a spectral function, non-finite entry).
struct domain_error : error {
    explicit domain_error(const std::string& msg) : error(msg) {}
};

// Input expected to be positive semidefinite has an eigenvalue below the
// allowed slack.
struct not_psd_error : error {
    explicit not_psd_error(const std::string& msg) : error(msg) {}
};

// An iterative computation failed to meet its stopping criterion
// (Jacobi sweep cap, geometric-mean ladder, Cesaro doubling).
struct convergence_error : error {
    explicit convergence_error(const std::string& msg) : error(msg) {}
};

// A theorem-level precondition does not hold (absolute continuity,
// nonzero expectation, probability normalisation).
struct precondition_error : error {
    explicit precondition_error(const std::string& msg) : error(msg) {}
};

}  // namespace qpm
