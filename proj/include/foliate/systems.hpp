#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "foliate/foliation.hpp"
#include "foliate/integrators.hpp"

namespace foliate {

using Params = std::map<std::string, double>;

/// A catalogue system in every representation it supports. `plain` is always
/// present (the full vector field); `foliate` is set when the field has a
/// registered tangent + invariant split; the split_* members carry the
/// Lorenz-style two-part splitting; `gradient` is the codimension-1 gradient
/// form consumed by the discrete-gradient scheme.
struct BuiltinSystem {
  std::string name;
  PlainSystem plain;
  std::optional<FoliateSystem> foliate;
  std::optional<PlainSystem> split_tangent;  // leaf-tangent part (midpoint target)
  std::optional<Matrix> split_linear;        // linear remainder, solved exactly
  std::optional<GradientSystem> gradient;
  Params params;  // fully resolved parameters
};

struct CatalogEntry {
  std::string name;
  std::string description;
  Params default_params;
  std::function<BuiltinSystem(const Params&)> build;
};

const std::vector<CatalogEntry>& system_catalog();
std::vector<std::string> system_names();

/// Builds a catalogue system with parameter overrides merged over the entry
/// defaults. Unknown names throw CatalogError (listing the valid names),
/// unknown or invalid parameters throw DomainError.
BuiltinSystem builtin_system(const std::string& name, const Params& overrides = {});

std::vector<std::string> method_names();

/// Builds the named one-step method for a built-in system. `tableau`
/// overrides the Runge-Kutta coefficients where that makes sense (rk / rkmk /
/// projection); methods that need a representation the system lacks throw
/// DomainError.
Stepper make_stepper(const BuiltinSystem& sys, const std::string& method,
                     const std::string& tableau = "", const SolveConfig& cfg = {});

/// The two-part foliate splitting for the Lorenz entry: leaf-tangent part by
/// implicit midpoint (which preserves the quadratic leaf function), linear
/// remainder solved exactly, composed in that order.
Stepper make_lorenz_split_stepper(const BuiltinSystem& lorenz, const SolveConfig& cfg = {},
                                  bool strang = false);

}  // namespace foliate
