#include "foliate/matgroup.hpp"

#include <cmath>

#include "foliate/errors.hpp"

namespace foliate {

std::string to_string(Algebra a) {
  switch (a) {
    case Algebra::gl: return "gl";
    case Algebra::so: return "so";
    case Algebra::sl: return "sl";
    case Algebra::diag: return "diag";
  }
  return "?";
}

std::string to_string(Group g) {
  switch (g) {
    case Group::GL: return "GL";
    case Group::SO: return "SO";
    case Group::SL: return "SL";
  }
  return "?";
}

bool algebra_member(const Matrix& m, Algebra algebra, double tol) {
  if (!m.square()) return false;
  switch (algebra) {
    case Algebra::gl:
      return true;
    case Algebra::so:
      return (m + m.transpose()).max_abs() <= tol * (1.0 + m.max_abs());
    case Algebra::sl:
      return std::abs(m.trace()) <= tol * (1.0 + m.max_abs());
    case Algebra::diag: {
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
          if (i != j && m(i, j) != 0.0) return false;
      return true;
    }
  }
  return false;
}

bool group_member(const Matrix& m, Group group, double tol) {
  if (!m.square()) return false;
  switch (group) {
    case Group::GL:
      return std::abs(determinant(m)) > 0.0;
    case Group::SO:
      return (m.transpose() * m - Matrix::identity(m.rows())).max_abs() <= tol;
    case Group::SL:
      return std::abs(determinant(m) - 1.0) <= tol;
  }
  return false;
}

AlgebraElement::AlgebraElement(Matrix mat, Algebra algebra, double tol)
    : mat_(std::move(mat)), algebra_(algebra) {
  if (!mat_.square()) throw DimensionError("algebra element: matrix not square");
  if (!mat_.all_finite()) throw DomainError("algebra element: non-finite entries");
  if (!algebra_member(mat_, algebra_, tol)) {
    throw DomainError("algebra element: matrix fails " + to_string(algebra_) + "(" +
                      std::to_string(mat_.rows()) + ") membership");
  }
}

GroupElement::GroupElement(Matrix mat, Group group, double tol)
    : mat_(std::move(mat)), group_(group) {
  if (!mat_.square()) throw DimensionError("group element: matrix not square");
  if (!mat_.all_finite()) throw DomainError("group element: non-finite entries");
  if (!group_member(mat_, group_, tol)) {
    throw DomainError("group element: matrix fails " + to_string(group_) + "(" +
                      std::to_string(mat_.rows()) + ") membership");
  }
}

Matrix mat_exp_matrix(const Matrix& x) {
  if (!x.square()) throw DimensionError("mat_exp: matrix not square");
  if (!x.all_finite()) throw DomainError("mat_exp: non-finite entries");

  // Scale so the Pade approximant sees a norm of at most 1/2.
  double norm = x.norm_inf();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  Matrix xs = std::ldexp(1.0, -squarings) * x;

  // Diagonal [7/7] Pade coefficients for exp.
  static constexpr double b[8] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                  25200.0,    1512.0,    56.0,      1.0};
  int n = x.rows();
  Matrix x2 = xs * xs;
  Matrix x4 = x2 * x2;
  Matrix x6 = x4 * x2;
  Matrix ident = Matrix::identity(n);
  Matrix odd = xs * (b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * ident);
  Matrix even = b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * ident;
  Matrix f = solve(even - odd, even + odd);

  for (int s = 0; s < squarings; ++s) f = f * f;
  return f;
}

GroupElement mat_exp(const Matrix& x) {
  Matrix e = mat_exp_matrix(x);
  Group tag = Group::GL;
  if (algebra_member(x, Algebra::so)) {
    tag = Group::SO;
  } else if (algebra_member(x, Algebra::sl)) {
    tag = Group::SL;
  }
  return GroupElement(std::move(e), tag);
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  if (!a.square() || !b.square() || a.rows() != b.rows()) {
    throw DimensionError("commutator: need equal square matrices");
  }
  return a * b - b * a;
}

Matrix dexpinv(const Matrix& x, const Matrix& y, int order) {
  if (!x.square() || !y.square() || x.rows() != y.rows()) {
    throw DimensionError("dexpinv: need equal square matrices");
  }
  if (order < 1 || order > 6) throw DomainError("dexpinv: order must be in 1..6");
  // Bernoulli weights B_k / k! for k = 0..5.
  static constexpr double w[6] = {1.0, -1.0 / 2.0, 1.0 / 12.0, 0.0, -1.0 / 720.0, 0.0};
  Matrix result = y;
  Matrix term = y;  // ad_X^k applied to Y
  for (int k = 1; k < order; ++k) {
    term = commutator(x, term);
    if (w[k] != 0.0) result += w[k] * term;
  }
  return result;
}

AlgebraElement project_algebra(const Matrix& m, Algebra algebra) {
  if (!m.square()) throw DimensionError("project_algebra: matrix not square");
  switch (algebra) {
    case Algebra::gl:
      return AlgebraElement(m, Algebra::gl);
    case Algebra::so:
      return AlgebraElement(0.5 * (m - m.transpose()), Algebra::so);
    case Algebra::sl: {
      double shift = m.trace() / m.rows();
      return AlgebraElement(m - shift * Matrix::identity(m.rows()), Algebra::sl);
    }
    case Algebra::diag: {
      Matrix d(m.rows(), m.cols());
      for (int i = 0; i < m.rows(); ++i) d(i, i) = m(i, i);
      return AlgebraElement(std::move(d), Algebra::diag);
    }
  }
  throw DomainError("project_algebra: unknown algebra");
}

}  // namespace foliate
