#pragma once

#include <stdexcept>
#include <string>

namespace foliate {

// Matrix shapes do not line up.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Bad value for the requested operation: non-finite input, failed membership
// test, argument outside the supported range.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A stage or state stopped being finite mid-step. `index` is the stage (for a
// single step) or the step (for a trajectory run), -1 when not applicable.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what, int index_ = -1)
      : std::runtime_error(what), index(index_) {}
  int index;
};

// An iterative solve ran out of iterations; carries the last residual.
struct NonconvergenceError : std::runtime_error {
  NonconvergenceError(const std::string& what, double residual_)
      : std::runtime_error(what), residual(residual_) {}
  double residual;
};

// The leaf through the working point is singular (degenerate leaf gradient /
// generator span), so the requested construction has no unique answer.
struct SingularLeafError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknown catalogue name; the message lists the valid names.
struct CatalogError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A measured error is already at round-off, so the quantity (e.g. a
// convergence order) cannot be estimated.
struct PrecisionFloorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace foliate
