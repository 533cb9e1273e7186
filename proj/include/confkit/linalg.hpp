#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "confkit/error.hpp"

namespace confkit {

// Largest source/target dimension accepted by the dense routines.
inline constexpr int kMaxDim = 16;

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  static Vector unit(std::size_t n, std::size_t i) {
    Vector e(n);
    e[i] = 1.0;
    return e;
  }

  std::size_t size() const noexcept { return data_.size(); }
  int dim() const noexcept { return static_cast<int>(data_.size()); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }
  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  Vector& operator+=(const Vector& o);
  Vector& operator-=(const Vector& o);
  Vector& operator*=(double s);

  bool all_finite() const;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator-(Vector a);
Vector operator*(double s, Vector a);
Vector operator*(Vector a, double s);
Vector operator/(Vector a, double s);

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
double distance(const Vector& a, const Vector& b);
Vector normalized(const Vector& a);
Vector cross(const Vector& a, const Vector& b);

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}
  Matrix(int rows, int cols, std::initializer_list<double> row_major);

  static Matrix identity(int n);
  static Matrix from_columns(const std::vector<Vector>& columns, int rows);
  static Matrix from_rows(const std::vector<Vector>& rows);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  Vector row(int i) const;
  Vector col(int j) const;
  void set_col(int j, const Vector& v);
  Matrix transposed() const;
  double frobenius_norm() const;
  bool all_finite() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& v);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);

// Thin singular value decomposition A = U diag(values) V_kᵀ with k = min(n, m).
// `right` holds the full m×m right frame; its trailing columns span ker A when
// n < m. Frame columns are sign-normalized: the first nonzero entry of each
// column of `right` is positive.
struct SvdResult {
  std::vector<double> values;  // descending, length k
  Matrix left;                 // n × k, orthonormal columns
  Matrix right;                // m × m, orthogonal

  Matrix reconstruct() const;
};

SvdResult svd(const Matrix& a);

// Orthonormal basis of the orthogonal complement of span(vectors) in R^m.
// Throws DegenerateFrame when the Gram determinant of the input is ≤ 1e-12.
std::vector<Vector> orthonormal_complement(const std::vector<Vector>& vectors, int m);

// Solve the square system A x = b by partial-pivot elimination. Throws
// SingularPoint when a pivot falls below `pivot_tol` relative to ‖A‖.
Vector solve(const Matrix& a, const Vector& b, double pivot_tol = 1e-13);

using Evaluator = std::function<Vector(const Vector&)>;
using DomainPredicate = std::function<bool(const Vector&)>;

// (machine epsilon)^{1/3} · max(1, ‖x‖)
double default_fd_step(const Vector& x);

// Shortest decimal text that reads back to the same double.
std::string format_shortest(double x);

// Central-difference Jacobian. Probes outside `domain` raise DomainViolation.
Matrix fd_jacobian(const Evaluator& f, const Vector& x, double h,
                   const DomainPredicate& domain = {});

using OdeRhs = std::function<Vector(double, const Vector&)>;

Vector rk4_step(const OdeRhs& f, double t, const Vector& x, double dt);

// Flip `v` so its first entry with |v_i| > tol is positive.
void canonicalize_sign(Vector& v, double tol = 1e-12);

}  // namespace confkit
