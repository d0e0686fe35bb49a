#include "foliate/foliation.hpp"

#include <algorithm>
#include <cmath>

#include "foliate/errors.hpp"

namespace foliate {

std::string to_string(ActionKind k) {
  switch (k) {
    case ActionKind::RotationSO2: return "rotation-SO2-on-R2";
    case ActionKind::LeftMultiplication: return "left-mult-on-matrices";
    case ActionKind::AdjointConjugation: return "adjoint-conjugation";
  }
  return "?";
}

namespace {

Algebra algebra_of(Group g) {
  switch (g) {
    case Group::SO: return Algebra::so;
    case Group::SL: return Algebra::sl;
    case Group::GL: return Algebra::gl;
  }
  return Algebra::gl;
}

std::vector<Matrix> make_basis(Algebra algebra, int n) {
  std::vector<Matrix> basis;
  auto unit = [n](int i, int j) {
    Matrix e(n, n);
    e(i, j) = 1.0;
    return e;
  };
  switch (algebra) {
    case Algebra::so:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) basis.push_back(unit(i, j) - unit(j, i));
      break;
    case Algebra::sl:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) basis.push_back(unit(i, j));
      for (int i = 0; i + 1 < n; ++i) basis.push_back(unit(i, i) - unit(i + 1, i + 1));
      break;
    case Algebra::gl:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) basis.push_back(unit(i, j));
      break;
    case Algebra::diag:
      for (int i = 0; i < n; ++i) basis.push_back(unit(i, i));
      break;
  }
  return basis;
}

}  // namespace

GroupAction::GroupAction(ActionKind kind, int n, int p, Group group, Algebra algebra)
    : kind_(kind), n_(n), p_(p), group_(group), algebra_(algebra),
      basis_(make_basis(algebra, n)) {}

GroupAction GroupAction::rotation_so2() {
  return GroupAction(ActionKind::RotationSO2, 2, 1, Group::SO, Algebra::so);
}

GroupAction GroupAction::left_multiplication(int n, int p, Group group) {
  if (n < 1 || p < 1) throw DomainError("left_multiplication: need n, p >= 1");
  return GroupAction(ActionKind::LeftMultiplication, n, p, group, algebra_of(group));
}

GroupAction GroupAction::adjoint_conjugation(int n, Group group) {
  if (n < 1) throw DomainError("adjoint_conjugation: need n >= 1");
  return GroupAction(ActionKind::AdjointConjugation, n, n, group, algebra_of(group));
}

int GroupAction::state_rows() const { return n_; }

int GroupAction::state_cols() const {
  return kind_ == ActionKind::AdjointConjugation ? n_ : p_;
}

namespace {

void require_state_shape(const GroupAction& a, const Matrix& x, const char* op) {
  if (x.rows() != a.state_rows() || x.cols() != a.state_cols()) {
    throw DimensionError(std::string(op) + ": state is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", action expects " +
                         std::to_string(a.state_rows()) + "x" + std::to_string(a.state_cols()));
  }
}

void require_group_shape(const GroupAction& a, const Matrix& g, const char* op) {
  if (g.rows() != a.n() || g.cols() != a.n()) {
    throw DimensionError(std::string(op) + ": group matrix must be " + std::to_string(a.n()) +
                         "x" + std::to_string(a.n()));
  }
}

}  // namespace

Matrix GroupAction::evaluate(const Matrix& g, const Matrix& x) const {
  require_group_shape(*this, g, "evaluate");
  require_state_shape(*this, x, "evaluate");
  if (kind_ == ActionKind::AdjointConjugation) {
    Matrix ginv = group_ == Group::SO ? g.transpose() : inverse(g);
    return g * x * ginv;
  }
  return g * x;
}

Matrix GroupAction::evaluate_exp(const Matrix& sigma, const Matrix& x) const {
  require_group_shape(*this, sigma, "evaluate_exp");
  require_state_shape(*this, x, "evaluate_exp");
  if (kind_ == ActionKind::AdjointConjugation) {
    return mat_exp_matrix(sigma) * x * mat_exp_matrix(-sigma);
  }
  return mat_exp_matrix(sigma) * x;
}

Matrix GroupAction::generator(const Matrix& xi, const Matrix& x) const {
  require_group_shape(*this, xi, "generator");
  require_state_shape(*this, x, "generator");
  if (kind_ == ActionKind::AdjointConjugation) return commutator(xi, x);
  return xi * x;
}

Matrix GroupAction::random_algebra_element(Rng& rng, double scale) const {
  Matrix xi(n_, n_);
  for (const Matrix& e : basis_) xi += (scale * rng.normal()) * e;
  return xi;
}

Matrix GroupAction::random_group_element(Rng& rng, double scale) const {
  return mat_exp_matrix(random_algebra_element(rng, scale));
}

Matrix generator_field(const GroupAction& action, const AlgebraElement& xi, const Matrix& x) {
  if (xi.algebra() != action.algebra() || xi.dim() != action.n()) {
    throw DomainError("generator_field: element is not in the action's algebra");
  }
  return action.generator(xi.mat(), x);
}

Matrix eval_field(const FoliateSystem& sys, const Matrix& x) {
  return generator_field(sys.action, sys.tangent_gen(x), x) + sys.invariant_field(x);
}

PlainSystem to_plain(const FoliateSystem& sys) {
  PlainSystem plain;
  plain.name = sys.name;
  plain.state_rows = sys.state_rows;
  plain.state_cols = sys.state_cols;
  plain.rhs = [sys](const Matrix& x) { return eval_field(sys, x); };
  plain.leaf_dim = sys.leaf_dim;
  plain.leaf_invariant = sys.leaf_invariant;
  plain.reduced_rhs = sys.reduced_rhs;
  plain.leaf_jacobian = sys.leaf_jacobian;
  plain.default_ic = sys.default_ic;
  return plain;
}

namespace {

constexpr double kRankTol = 1e-10;

// Gram-Schmidt with column pivoting on the generator vectors; returns the
// orthonormal vectors that survive the rank tolerance.
std::vector<Matrix> orthonormal_generator_span(const GroupAction& action, const Matrix& x) {
  std::vector<Matrix> raw;
  double max_norm = 0.0;
  for (const Matrix& e : action.algebra_basis()) {
    raw.push_back(action.generator(e, x));
    max_norm = std::max(max_norm, raw.back().norm_fro());
  }
  std::vector<Matrix> q;
  if (max_norm == 0.0) return q;
  std::vector<bool> used(raw.size(), false);
  for (std::size_t pass = 0; pass < raw.size(); ++pass) {
    // Pick the remaining column with the largest residual norm.
    int best = -1;
    double best_norm = 0.0;
    for (std::size_t c = 0; c < raw.size(); ++c) {
      if (used[c]) continue;
      double nc = raw[c].norm_fro();
      if (nc > best_norm) {
        best_norm = nc;
        best = static_cast<int>(c);
      }
    }
    if (best < 0 || best_norm <= kRankTol * max_norm) break;
    used[best] = true;
    Matrix v = (1.0 / best_norm) * raw[best];
    for (std::size_t c = 0; c < raw.size(); ++c) {
      if (used[c]) continue;
      raw[c] -= dot(v, raw[c]) * v;
    }
    q.push_back(std::move(v));
  }
  return q;
}

}  // namespace

OrthogonalParts decompose_orthogonal(const StateMap& rhs, const GroupAction& action,
                                     const Matrix& x) {
  Matrix field = rhs(x);
  Matrix tangential(field.rows(), field.cols());
  for (const Matrix& q : orthonormal_generator_span(action, x)) {
    tangential += dot(q, field) * q;
  }
  return {tangential, field - tangential};
}

AlgebraElement minimal_norm_generator(const GroupAction& action, const Matrix& x,
                                      const Matrix& field_value) {
  // Complete orthogonal decomposition of the generator map at x: with Q the
  // orthonormalized generator span and R(k, i) = <q_k, (e_i)_M(x)>, the
  // minimal-norm coefficients are c = R^T (R R^T)^-1 Q^T X. Rank-deficient
  // directions (non-free actions, singular leaves) drop out of Q, which is
  // exactly what makes the choice minimal-norm.
  const std::vector<Matrix>& basis = action.algebra_basis();
  int d = static_cast<int>(basis.size());
  std::vector<Matrix> gens;
  gens.reserve(static_cast<std::size_t>(d));
  for (const Matrix& e : basis) gens.push_back(action.generator(e, x));
  std::vector<Matrix> q = orthonormal_generator_span(action, x);
  int rank = static_cast<int>(q.size());

  Matrix xi(action.n(), action.n());
  if (rank > 0) {
    Matrix r(rank, d);
    Matrix w(rank, 1);
    for (int k = 0; k < rank; ++k) {
      for (int i = 0; i < d; ++i) r(k, i) = dot(q[static_cast<std::size_t>(k)], gens[static_cast<std::size_t>(i)]);
      w(k, 0) = dot(q[static_cast<std::size_t>(k)], field_value);
    }
    Matrix coeff = r.transpose() * solve(r * r.transpose(), w);
    for (int i = 0; i < d; ++i) xi += coeff(i, 0) * basis[static_cast<std::size_t>(i)];
  }
  return AlgebraElement(std::move(xi), action.algebra());
}

Matrix leaf_jacobian_fd(const LeafMap& leaf, const Matrix& x) {
  double step = 1e-6 * (1.0 + x.max_abs());
  std::vector<double> base = leaf(x);
  int k = static_cast<int>(base.size());
  Matrix jac(k, x.size());
  Matrix xp = x;
  for (int c = 0; c < x.size(); ++c) {
    double saved = xp[c];
    xp[c] = saved + step;
    std::vector<double> hi = leaf(xp);
    xp[c] = saved - step;
    std::vector<double> lo = leaf(xp);
    xp[c] = saved;
    for (int r = 0; r < k; ++r) jac(r, c) = (hi[r] - lo[r]) / (2.0 * step);
  }
  return jac;
}

std::vector<double> apply_leaf_jacobian(const Matrix& jacobian, const Matrix& field_value) {
  if (jacobian.cols() != field_value.size()) {
    throw DimensionError("apply_leaf_jacobian: column count does not match state size");
  }
  std::vector<double> out(static_cast<std::size_t>(jacobian.rows()), 0.0);
  for (int r = 0; r < jacobian.rows(); ++r) {
    double s = 0.0;
    for (int c = 0; c < jacobian.cols(); ++c) s += jacobian(r, c) * field_value[c];
    out[static_cast<std::size_t>(r)] = s;
  }
  return out;
}

double check_foliate_numeric(const StateMap& rhs, const LeafMap& leaf, const GroupAction& action,
                             int samples, std::uint64_t seed, const LeafJacobian& jacobian) {
  Rng rng(seed);
  auto jac_at = [&](const Matrix& x) {
    return jacobian ? jacobian(x) : leaf_jacobian_fd(leaf, x);
  };
  auto rate = [&](const Matrix& x) { return apply_leaf_jacobian(jac_at(x), rhs(x)); };

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Matrix x1(action.state_rows(), action.state_cols());
    for (int k = 0; k < x1.size(); ++k) x1[k] = rng.normal();
    Matrix x2 = action.evaluate(action.random_group_element(rng), x1);
    std::vector<double> r1 = rate(x1);
    std::vector<double> r2 = rate(x2);
    for (std::size_t i = 0; i < r1.size(); ++i) {
      worst = std::max(worst, std::abs(r1[i] - r2[i]));
    }
  }
  return worst;
}

}  // namespace foliate
