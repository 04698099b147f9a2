#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace aqft {

/// Repo-wide default tolerance. Equality of operators and subspaces is always
/// a residual check (operator-norm residual or projector distance) against
/// this value, relative to the scale of the operands; callers may override.
inline constexpr double kDefaultTol = 1e-9;

using Complex = std::complex<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aqft
