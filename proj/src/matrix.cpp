#include "foliate/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "foliate/errors.hpp"

namespace foliate {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " differ");
  }
}

}  // namespace

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw DimensionError("matrix: negative dimension");
  data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(int rows, int cols, std::initializer_list<double> entries) : Matrix(rows, cols) {
  if (static_cast<int>(entries.size()) != size()) {
    throw DimensionError("matrix: entry count does not match rows*cols");
  }
  std::copy(entries.begin(), entries.end(), data_.begin());
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> entries) {
  Matrix m(static_cast<int>(entries.size()), 1);
  std::copy(entries.begin(), entries.end(), m.data_.begin());
  return m;
}

Matrix Matrix::column(std::initializer_list<double> entries) {
  return column(std::span<const double>(entries.begin(), entries.size()));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::trace() const {
  if (!square()) throw DimensionError("trace: matrix not square");
  double s = 0.0;
  for (int i = 0; i < rows_; ++i) s += (*this)(i, i);
  return s;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::norm_inf() const {
  double m = 0.0;
  for (int i = 0; i < rows_; ++i) {
    double row = 0.0;
    for (int j = 0; j < cols_; ++j) row += std::abs((*this)(i, j));
    m = std::max(m, row);
  }
  return m;
}

double Matrix::norm_fro() const { return std::sqrt(dot(*this, *this)); }

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix Matrix::vec() const {
  Matrix v(size(), 1);
  v.data_ = data_;
  return v;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "add");
  for (int k = 0; k < size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "subtract");
  for (int k = 0; k < size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) {
  a += b;
  return a;
}

Matrix operator-(Matrix a, const Matrix& b) {
  a -= b;
  return a;
}

Matrix operator-(const Matrix& a) {
  Matrix r = a;
  r *= -1.0;
  return r;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("multiply: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
  }
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix operator*(double s, Matrix a) {
  a *= s;
  return a;
}

Matrix operator*(Matrix a, double s) {
  a *= s;
  return a;
}

double dot(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "dot");
  double s = 0.0;
  for (int k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

namespace {

// LU with partial pivoting, in place; returns the permutation sign, fills
// `piv` with row swaps. Throws on exact singularity.
double lu_factor(Matrix& a, std::vector<int>& piv) {
  int n = a.rows();
  piv.resize(n);
  double sign = 1.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        p = i;
      }
    }
    piv[k] = p;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      sign = -sign;
    }
    if (a(k, k) == 0.0) throw DomainError("solve: matrix is singular");
    for (int i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      double lik = a(i, k);
      if (lik == 0.0) continue;
      for (int j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
    }
  }
  return sign;
}

}  // namespace

Matrix solve(const Matrix& a, const Matrix& b) {
  if (!a.square()) throw DimensionError("solve: matrix not square");
  if (a.rows() != b.rows()) throw DimensionError("solve: right-hand side has wrong row count");
  Matrix lu = a;
  std::vector<int> piv;
  lu_factor(lu, piv);
  Matrix x = b;
  int n = a.rows();
  for (int k = 0; k < n; ++k) {
    if (piv[k] != k)
      for (int j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv[k], j));
  }
  // Forward then back substitution.
  for (int j = 0; j < x.cols(); ++j) {
    for (int i = 1; i < n; ++i) {
      double s = x(i, j);
      for (int k = 0; k < i; ++k) s -= lu(i, k) * x(k, j);
      x(i, j) = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = x(i, j);
      for (int k = i + 1; k < n; ++k) s -= lu(i, k) * x(k, j);
      x(i, j) = s / lu(i, i);
    }
  }
  return x;
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

double determinant(const Matrix& a) {
  if (!a.square()) throw DimensionError("determinant: matrix not square");
  Matrix lu = a;
  std::vector<int> piv;
  double det;
  try {
    det = lu_factor(lu, piv);
  } catch (const DomainError&) {
    return 0.0;
  }
  for (int i = 0; i < a.rows(); ++i) det *= lu(i, i);
  return det;
}

std::vector<double> char_poly_coeffs(const Matrix& l) {
  if (!l.square()) throw DimensionError("char_poly_coeffs: matrix not square");
  int n = l.rows();
  // Power sums p_k = tr L^k, then Newton's identities.
  std::vector<double> p(n + 1, 0.0);
  Matrix pow = l;
  for (int k = 1; k <= n; ++k) {
    p[k] = pow.trace();
    if (k < n) pow = pow * l;
  }
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    double sign = 1.0;
    for (int i = 1; i <= k; ++i) {
      s += sign * e[k - i] * p[i];
      sign = -sign;
    }
    e[k] = s / k;
  }
  return {e.begin() + 1, e.end()};
}

}  // namespace foliate
