#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "foliate/matgroup.hpp"
#include "foliate/matrix.hpp"
#include "foliate/rng.hpp"

namespace foliate {

using StateMap = std::function<Matrix(const Matrix&)>;
using LeafMap = std::function<std::vector<double>(const Matrix&)>;
// Jacobian of a leaf map: k rows, one column per state entry (row-major order
// of the state matrix).
using LeafJacobian = std::function<Matrix(const Matrix&)>;
using ReducedMap = std::function<std::vector<double>(const std::vector<double>&)>;
using TangentGenerator = std::function<AlgebraElement(const Matrix&)>;

enum class ActionKind { RotationSO2, LeftMultiplication, AdjointConjugation };

std::string to_string(ActionKind k);

/// A matrix Lie group action on a matrix state space. Three concrete kinds:
///   rotation of the plane by SO(2)        (states are 2-by-1 columns),
///   left multiplication of n-by-p frames  (g . A = gA),
///   conjugation of n-by-n matrices        (g . L = g L g^-1).
/// Orbits of the action are the leaves of the foliation every built-in
/// system preserves.
class GroupAction {
 public:
  static GroupAction rotation_so2();
  static GroupAction left_multiplication(int n, int p, Group group = Group::SO);
  static GroupAction adjoint_conjugation(int n, Group group = Group::SO);

  ActionKind kind() const { return kind_; }
  Group group() const { return group_; }
  Algebra algebra() const { return algebra_; }
  int n() const { return n_; }
  int p() const { return p_; }
  int state_rows() const;
  int state_cols() const;
  int group_dim() const { return static_cast<int>(basis_.size()); }

  Matrix identity_element() const { return Matrix::identity(n_); }

  /// lambda(g, x) for an explicit group matrix g.
  Matrix evaluate(const Matrix& g, const Matrix& x) const;

  /// lambda(exp(sigma), x) for sigma in the algebra. Conjugation uses
  /// exp(-sigma) for the inverse factor, which is the exact inverse of the
  /// rational approximant behind mat_exp, so similarity holds to round-off.
  Matrix evaluate_exp(const Matrix& sigma, const Matrix& x) const;

  /// Infinitesimal generator xi_M(x): xi x for rotation/left multiplication,
  /// [xi, x] for conjugation.
  Matrix generator(const Matrix& xi, const Matrix& x) const;

  /// Basis of the acting Lie algebra as matrices.
  const std::vector<Matrix>& algebra_basis() const { return basis_; }

  Matrix random_algebra_element(Rng& rng, double scale = 1.0) const;
  Matrix random_group_element(Rng& rng, double scale = 1.0) const;

 private:
  GroupAction(ActionKind kind, int n, int p, Group group, Algebra algebra);

  ActionKind kind_;
  int n_;
  int p_;
  Group group_;
  Algebra algebra_;
  std::vector<Matrix> basis_;
};

/// A vector field presented in foliate form X(x) = a(x)_M(x) + f(x): a maps
/// states into the acting algebra (the part tangent to the leaves), f is the
/// group-invariant part. I collects leaf invariants and h the dynamics they
/// obey, leaf_jacobian is the optional closed-form dI.
struct FoliateSystem {
  std::string name;
  int state_rows = 0;
  int state_cols = 0;
  GroupAction action = GroupAction::rotation_so2();
  TangentGenerator tangent_gen;
  StateMap invariant_field;
  int leaf_dim = 0;
  LeafMap leaf_invariant;    // empty when no invariants are registered
  ReducedMap reduced_rhs;    // empty when no reduced dynamics are registered
  LeafJacobian leaf_jacobian;
  Matrix default_ic;
};

/// A vector field with no split attached; baselines (Euler, midpoint, RK)
/// run on these. Leaf data is optional and used by diagnostics only.
struct PlainSystem {
  std::string name;
  int state_rows = 0;
  int state_cols = 0;
  StateMap rhs;
  int leaf_dim = 0;
  LeafMap leaf_invariant;
  ReducedMap reduced_rhs;
  LeafJacobian leaf_jacobian;
  Matrix default_ic;
};

Matrix generator_field(const GroupAction& action, const AlgebraElement& xi, const Matrix& x);

/// a(x)_M(x) + f(x).
Matrix eval_field(const FoliateSystem& sys, const Matrix& x);

/// The full field of a foliate system as a plain system, leaf data carried
/// over.
PlainSystem to_plain(const FoliateSystem& sys);

struct OrthogonalParts {
  Matrix tangential;
  Matrix perpendicular;
};

/// Splits X(x) into its component inside span{xi_M(x)} and the Frobenius-
/// orthogonal remainder, by least squares against the generator basis with
/// rank tolerance 1e-10. On a singular leaf (zero generator span) the
/// tangential part is zero.
OrthogonalParts decompose_orthogonal(const StateMap& rhs, const GroupAction& action,
                                     const Matrix& x);

/// Minimal-norm algebra element xi with xi_M(x) equal to the tangential part
/// of X(x); the canonical choice of inverse of the (possibly non-injective)
/// generator map at x.
AlgebraElement minimal_norm_generator(const GroupAction& action, const Matrix& x,
                                      const Matrix& field_value);

/// Centered finite-difference Jacobian of a leaf map, step 1e-6 * (1 + |x|).
Matrix leaf_jacobian_fd(const LeafMap& leaf, const Matrix& x);

/// dI(x) . X as a vector of leaf-derivative components.
std::vector<double> apply_leaf_jacobian(const Matrix& jacobian, const Matrix& field_value);

/// Samples pairs of points on the same leaf (the second produced by acting
/// with a random group element on the first) and returns the largest
/// disagreement of dI.X between pair members. Small values are numerical
/// evidence that the field is foliate for the leaves of I; order-one values
/// contradict it. Uses `jacobian` when supplied, centered differences
/// otherwise.
double check_foliate_numeric(const StateMap& rhs, const LeafMap& leaf, const GroupAction& action,
                             int samples, std::uint64_t seed,
                             const LeafJacobian& jacobian = {});

}  // namespace foliate
