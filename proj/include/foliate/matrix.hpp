#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace foliate {

/// Dense row-major matrix of doubles. Column vectors are n-by-1; all state
/// spaces in this library (points in the plane, n-by-p frames, n-by-n
/// matrices) are represented this way so that the Frobenius inner product is
/// the one Euclidean metric used everywhere.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols);
  Matrix(int rows, int cols, std::initializer_list<double> entries);

  static Matrix identity(int n);
  static Matrix column(std::span<const double> entries);
  static Matrix column(std::initializer_list<double> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return static_cast<int>(data_.size()); }
  bool empty() const { return data_.empty(); }
  bool square() const { return rows_ == cols_ && rows_ > 0; }
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double& operator[](int k) { return data_[static_cast<std::size_t>(k)]; }
  double operator[](int k) const { return data_[static_cast<std::size_t>(k)]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Matrix transpose() const;
  double trace() const;
  double max_abs() const;   // entrywise max |a_ij|
  double norm_inf() const;  // induced infinity norm (max absolute row sum)
  double norm_fro() const;
  bool all_finite() const;

  /// Same entries reshaped as a size()-by-1 column (row-major order).
  Matrix vec() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(const Matrix& a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(Matrix a, double s);

/// Frobenius inner product <a, b> = sum a_ij b_ij. Shapes must match.
double dot(const Matrix& a, const Matrix& b);

/// Solves A X = B by LU with partial pivoting; A square and nonsingular.
Matrix solve(const Matrix& a, const Matrix& b);
Matrix inverse(const Matrix& a);
double determinant(const Matrix& a);

/// Elementary-symmetric coefficients (e1, ..., en) of the characteristic
/// polynomial det(tI - L) = t^n - e1 t^(n-1) + e2 t^(n-2) - ..., computed from
/// the power sums tr L^k by Newton's identities. Intended for the small
/// (n <= 4) matrices this library works with, where the coefficients pin down
/// the spectrum without an eigensolver.
std::vector<double> char_poly_coeffs(const Matrix& l);

}  // namespace foliate
