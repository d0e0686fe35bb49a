#pragma once

#include <string>

#include "foliate/matrix.hpp"

namespace foliate {

enum class Algebra { gl, so, sl, diag };
enum class Group { GL, SO, SL };

std::string to_string(Algebra a);
std::string to_string(Group g);

// Membership tolerances are fixed at construction; the defaults below are the
// ones every built-in uses.
inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kGroupTol = 1e-10;

bool algebra_member(const Matrix& m, Algebra algebra, double tol = kAlgebraTol);
bool group_member(const Matrix& m, Group group, double tol = kGroupTol);

/// Square matrix checked against a subalgebra membership test when built:
/// so(n) skew to tol*(1+|M|), sl(n) traceless to tol*(1+|M|), diag(n) exactly
/// diagonal off the diagonal. gl(n) accepts any square matrix.
class AlgebraElement {
 public:
  AlgebraElement(Matrix mat, Algebra algebra, double tol = kAlgebraTol);

  const Matrix& mat() const { return mat_; }
  Algebra algebra() const { return algebra_; }
  int dim() const { return mat_.rows(); }

 private:
  Matrix mat_;
  Algebra algebra_;
};

/// Invertible square matrix checked against a group membership test when
/// built: SO(n) |M^T M - I| <= tol, SL(n) |det - 1| <= tol, GL(n) det != 0.
class GroupElement {
 public:
  GroupElement(Matrix mat, Group group, double tol = kGroupTol);

  const Matrix& mat() const { return mat_; }
  Group group() const { return group_; }
  int dim() const { return mat_.rows(); }

 private:
  Matrix mat_;
  Group group_;
};

/// Matrix exponential by scaling and squaring around a diagonal [7/7] Pade
/// approximant; the input is scaled until its induced infinity norm is at
/// most 1/2, where the approximant error sits far below double round-off.
Matrix mat_exp_matrix(const Matrix& x);

/// exp(X) tagged with the group matching X's algebra membership: skew -> SO,
/// traceless -> SL, anything else -> GL. The returned element re-runs the
/// group membership check.
GroupElement mat_exp(const Matrix& x);

/// AB - BA.
Matrix commutator(const Matrix& a, const Matrix& b);

/// Truncated inverse of the differential of exp,
///   dexpinv(X, Y) = Y - 1/2 [X,Y] + 1/12 [X,[X,Y]] - ...
/// with Bernoulli-number weights, keeping nested commutators through grade
/// order-1. `order` is the classical order of the integrator the series
/// feeds (1..6).
Matrix dexpinv(const Matrix& x, const Matrix& y, int order);

/// Orthogonal projection (in the Frobenius metric) of a square matrix onto a
/// subalgebra: skew part for so(n), traceless part for sl(n), diagonal part
/// for diag(n), identity for gl(n).
AlgebraElement project_algebra(const Matrix& m, Algebra algebra);

}  // namespace foliate
