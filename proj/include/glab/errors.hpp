#ifndef GLAB_ERRORS_HPP
#define GLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace glab {

struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Query point outside the span of a rank-deficient polytope.
struct UnreachablePointError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace glab

#endif
