#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "foliate/foliation.hpp"
#include "foliate/matrix.hpp"

namespace foliate {

/// Coefficients of an explicit Runge-Kutta method. Construction validates
/// sum(b) = 1, c_i = sum_j a_ij, and (for explicit tableaus) strict lower
/// triangularity of a.
struct ButcherTableau {
  std::string name;
  int stages = 0;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> c;
  int order = 0;
  bool explicit_stages = true;

  ButcherTableau(std::string name, std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double> c, int order, bool explicit_stages = true);

  static const ButcherTableau& euler();
  static const ButcherTableau& heun();
  static const ButcherTableau& rk4();
  /// Lookup by name ("euler" | "heun" | "rk4"); throws CatalogError listing
  /// the valid names.
  static const ButcherTableau& by_name(const std::string& name);
  static std::vector<std::string> names();
};

struct SolveConfig {
  double tol = 1e-12;
  int max_iter = 50;
};

/// A one-step map (x, tau) -> x' with the system baked in.
struct Stepper {
  std::string method;
  int order = 1;
  bool foliate_by_construction = false;
  std::function<Matrix(const Matrix&, double)> step;

  Matrix operator()(const Matrix& x, double tau) const { return step(x, tau); }
};

/// One explicit Runge-Kutta step. Throws DivergenceError naming the stage if
/// any stage value stops being finite.
Matrix rk_step(const ButcherTableau& tab, const StateMap& rhs, const Matrix& x, double tau);

/// Implicit midpoint x' = x + tau X((x + x')/2) by fixed-point iteration to
/// residual <= cfg.tol (infinity norm), then two extra sweeps so the iterate
/// settles onto the floating-point fixed point. Preserves quadratic
/// invariants of the field to the solve tolerance.
Matrix implicit_midpoint_step(const StateMap& rhs, const Matrix& x, double tau,
                              const SolveConfig& cfg = {});

/// Foliate Lie-Euler step x' = lambda(exp(tau a(x)), x + tau f(x)). First
/// order; the leaf invariants of x' follow the explicit Euler update of the
/// reduced dynamics exactly (up to exp round-off).
Matrix lie_euler_step(const FoliateSystem& sys, const Matrix& x, double tau);

/// Runge-Kutta-Munthe-Kaas step on the lifted pair (g, m): classical RK
/// stages for m' = f(m), RKMK stages (through exp and truncated dexpinv) for
/// the group part driven by xi = a(lambda(g_stage, m_stage)), recombined as
/// lambda(g1, m1). Foliate by construction for the linear actions used here;
/// order = tab.order. With the Euler tableau this reduces to lie_euler_step.
Matrix rkmk_step(const FoliateSystem& sys, const ButcherTableau& tab, const Matrix& x,
                 double tau);

struct ProjectionResult {
  Matrix state;
  std::vector<double> leaf;
};

/// One step of the projection method for a system with leaf map I and
/// reduced dynamics baked into `reduced`:
///   1. advance the reduced value I_n -> I_{n+1} (depends only on I_n),
///   2. advance the full state with `inner`,
///   3. project the predicted state onto the leaf I = I_{n+1} along dI(x~)^T
///      by Newton iteration on the multipliers.
/// Throws SingularLeafError when dI drops rank at the working point and
/// NonconvergenceError when Newton stalls.
ProjectionResult projection_step(const PlainSystem& sys, const Stepper& inner,
                                 const Stepper& reduced, const Matrix& x,
                                 const std::vector<double>& leaf_n, double tau,
                                 const SolveConfig& cfg = {});

/// Codimension-1 system written in gradient form
///   x' = (A(x) + h(I)/|grad I|^2) grad I,  A antisymmetric,
/// which is how the discrete-gradient scheme consumes it.
struct GradientSystem {
  std::string name;
  int dim = 0;
  std::function<Matrix(const Matrix&)> skew_operator;  // A(x), dim-by-dim
  std::function<double(const Matrix&)> leaf_value;     // I
  std::function<Matrix(const Matrix&)> leaf_gradient;  // grad I, dim-by-1
  std::function<double(double)> reduced_rhs;           // h
  Matrix default_ic;
};

/// Midpoint discrete-gradient step. Uses the Gonzalez discrete gradient
///   gbar = grad I(xbar) + [(I(x') - I(x) - grad I(xbar).(x'-x)) / |x'-x|^2] (x'-x)
/// together with Abar = A(xbar) and hbar = h((I(x)+I(x'))/2), solved by
/// fixed-point iteration. The update obeys I(x') - I(x) = tau hbar exactly at
/// the fixed point, so the leaf value follows a one-dimensional recursion.
Matrix discrete_gradient_step(const GradientSystem& sys, const Matrix& x, double tau,
                              const SolveConfig& cfg = {});

/// Sequential (Lie) composition of the parts at full tau; with strang =
/// true, composes all parts at tau/2 forward then backward (classical Strang
/// for two parts).
Matrix splitting_step(std::span<const Stepper> parts, const Matrix& x, double tau,
                      bool strang = false);

/// exp(tau Lambda) x for a linear field x' = Lambda x.
Matrix exact_linear_step(const Matrix& lambda, const Matrix& x, double tau);

// Stepper factories.
Stepper make_rk_stepper(const ButcherTableau& tab, const PlainSystem& sys);
Stepper make_implicit_midpoint_stepper(const PlainSystem& sys, const SolveConfig& cfg = {});
Stepper make_lie_euler_stepper(const FoliateSystem& sys);
Stepper make_rkmk_stepper(const FoliateSystem& sys, const ButcherTableau& tab);
/// Stateless facade over projection_step: each call re-reads the reduced
/// value as I(x_n), which agrees with the carried value to the projection
/// tolerance. The reduced integrator uses the same tableau as the inner one.
Stepper make_projection_stepper(const PlainSystem& sys, const ButcherTableau& tab,
                                const SolveConfig& cfg = {});
Stepper make_discrete_gradient_stepper(const GradientSystem& sys, const SolveConfig& cfg = {});
Stepper make_splitting_stepper(std::vector<Stepper> parts, std::string name, int order,
                               bool strang = false, bool foliate = false);
Stepper make_exact_linear_stepper(Matrix lambda, std::string name = "exact-linear");

}  // namespace foliate
