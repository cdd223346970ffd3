#ifndef HOMFE_COMMON_HPP
#define HOMFE_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace homfe {

using Index = std::int64_t;

/// Invalid user input or violated precondition (bad grid sizes, malformed
/// problem files, shape mismatches). The CLI maps this to its validation
/// exit code.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Breakdown of a numerical procedure (indefinite operator in CG, singular
/// frequency block, non-finite constitutive input).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace homfe

#endif
