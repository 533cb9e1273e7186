#include "confkit/linalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace confkit {

namespace {

void require_same_size(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionError,
                "vector sizes differ (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
}

}  // namespace

Vector& Vector::operator+=(const Vector& o) {
  require_same_size(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& o) {
  require_same_size(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

bool Vector::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator-(Vector a) { return a *= -1.0; }
Vector operator*(double s, Vector a) { return a *= s; }
Vector operator*(Vector a, double s) { return a *= s; }
Vector operator/(Vector a, double s) { return a *= 1.0 / s; }

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& a) {
  // Scaled to avoid overflow for far-out lifted points.
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : a) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

double distance(const Vector& a, const Vector& b) { return norm(a - b); }

Vector normalized(const Vector& a) {
  const double n = norm(a);
  if (n == 0.0) throw Error(ErrorCode::DegenerateFrame, "cannot normalize a zero vector");
  return a / n;
}

Vector cross(const Vector& a, const Vector& b) {
  if (a.size() != 3 || b.size() != 3) {
    throw Error(ErrorCode::DimensionError, "cross product needs 3-vectors");
  }
  return Vector{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

void canonicalize_sign(Vector& v, double tol) {
  for (double x : v) {
    if (std::abs(x) > tol) {
      if (x < 0.0) v *= -1.0;
      return;
    }
  }
}

Matrix::Matrix(int rows, int cols, std::initializer_list<double> row_major)
    : rows_(rows), cols_(cols), data_(row_major) {
  if (data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw Error(ErrorCode::DimensionError, "initializer does not match matrix shape");
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(const std::vector<Vector>& columns, int rows) {
  Matrix m(rows, static_cast<int>(columns.size()));
  for (int j = 0; j < m.cols(); ++j) m.set_col(j, columns[j]);
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix m(static_cast<int>(rows.size()), rows.front().dim());
  for (int i = 0; i < m.rows(); ++i) {
    if (rows[i].dim() != m.cols()) throw Error(ErrorCode::DimensionError, "ragged rows");
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Vector Matrix::row(int i) const {
  Vector r(cols_);
  for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
  return r;
}

Vector Matrix::col(int j) const {
  Vector c(rows_);
  for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void Matrix::set_col(int j, const Vector& v) {
  if (v.dim() != rows_) throw Error(ErrorCode::DimensionError, "column length mismatch");
  for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionError, "matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const Matrix& a, const Vector& v) {
  if (a.cols() != v.dim()) throw Error(ErrorCode::DimensionError, "matrix-vector shape mismatch");
  Vector r(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionError, "matrix difference shape mismatch");
  }
  Matrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

Matrix operator*(double s, Matrix a) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) *= s;
  return a;
}

Matrix SvdResult::reconstruct() const {
  const int n = left.rows();
  const int m = right.rows();
  const int k = static_cast<int>(values.size());
  Matrix a(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int l = 0; l < k; ++l) s += left(i, l) * values[l] * right(j, l);
      a(i, j) = s;
    }
  return a;
}

// One-sided (Hestenes) Jacobi: orthogonalize the columns of W = A V by plane
// rotations accumulated into V. Column norms of the converged W are the
// singular values.
SvdResult svd(const Matrix& a) {
  const int n = a.rows();
  const int m = a.cols();
  if (n < 1 || m < 1 || n > kMaxDim || m > kMaxDim) {
    throw Error(ErrorCode::InvalidInput, "svd supports 1..16 rows and columns");
  }
  if (!a.all_finite()) throw Error(ErrorCode::InvalidInput, "svd input has non-finite entries");

  Matrix w = a;
  Matrix v = Matrix::identity(m);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < m - 1; ++p) {
      for (int q = p + 1; q < m; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int i = 0; i < n; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < n; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (int i = 0; i < m; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(m);
  for (int j = 0; j < m; ++j) sigma[j] = norm(w.col(j));
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return sigma[x] > sigma[y]; });

  const int k = std::min(n, m);
  SvdResult out;
  out.values.resize(k);
  out.left = Matrix(n, k);
  out.right = Matrix(m, m);
  for (int j = 0; j < m; ++j) {
    Vector vj = v.col(order[j]);
    Vector canon = vj;
    canonicalize_sign(canon);
    const double flip = dot(canon, vj) >= 0.0 ? 1.0 : -1.0;
    out.right.set_col(j, flip * vj);
    if (j < k) {
      out.values[j] = sigma[order[j]];
      if (out.values[j] > 0.0) out.left.set_col(j, flip * w.col(order[j]) / out.values[j]);
    }
  }

  // Left vectors for vanishing singular values are undetermined; complete
  // them to an orthonormal set.
  const double cutoff = (out.values.empty() ? 0.0 : out.values.front()) * 1e-14;
  std::vector<Vector> good;
  int missing = 0;
  for (int j = 0; j < k; ++j) {
    if (out.values[j] > cutoff && out.values[j] > 0.0) {
      good.push_back(out.left.col(j));
    } else {
      ++missing;
    }
  }
  if (missing > 0) {
    std::vector<Vector> fill = orthonormal_complement(good, n);
    int next = 0;
    for (int j = 0; j < k; ++j) {
      if (!(out.values[j] > cutoff && out.values[j] > 0.0)) out.left.set_col(j, fill[next++]);
    }
  }
  return out;
}

std::vector<Vector> orthonormal_complement(const std::vector<Vector>& vectors, int m) {
  if (m < 1 || m > kMaxDim) throw Error(ErrorCode::InvalidInput, "dimension out of range");
  const int k = static_cast<int>(vectors.size());
  if (k > m) throw Error(ErrorCode::DegenerateFrame, "more vectors than dimensions");
  for (const Vector& v : vectors) {
    if (v.dim() != m) throw Error(ErrorCode::DimensionError, "vector dimension mismatch");
    if (!v.all_finite()) throw Error(ErrorCode::InvalidInput, "non-finite vector");
  }

  if (k > 0) {
    // Gram determinant through an unpivoted Cholesky factorization.
    Matrix g(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) g(i, j) = dot(vectors[i], vectors[j]);
    double det = 1.0;
    for (int j = 0; j < k; ++j) {
      double d = g(j, j);
      for (int l = 0; l < j; ++l) d -= g(j, l) * g(j, l);
      if (d <= 0.0) {
        det = 0.0;
        break;
      }
      det *= d;
      const double ljj = std::sqrt(d);
      g(j, j) = ljj;
      for (int i = j + 1; i < k; ++i) {
        double s = g(i, j);
        for (int l = 0; l < j; ++l) s -= g(i, l) * g(j, l);
        g(i, j) = s / ljj;
      }
    }
    if (!(det > 1e-12)) {
      throw Error(ErrorCode::DegenerateFrame, "input vectors are linearly dependent");
    }
  }

  // Twice-iterated modified Gram-Schmidt keeps the basis orthonormal to
  // roundoff even for nearly dependent input.
  std::vector<Vector> basis;
  auto orthogonalize = [&](Vector v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& q : basis) v -= dot(q, v) * q;
    return v;
  };
  for (const Vector& v : vectors) basis.push_back(normalized(orthogonalize(v)));

  std::vector<Vector> out;
  while (static_cast<int>(basis.size()) < m) {
    Vector best;
    double best_norm = -1.0;
    for (int i = 0; i < m; ++i) {
      Vector r = orthogonalize(Vector::unit(m, i));
      const double rn = norm(r);
      if (rn > best_norm + 1e-12) {
        best_norm = rn;
        best = std::move(r);
      }
    }
    Vector q = best / best_norm;
    canonicalize_sign(q);
    basis.push_back(q);
    out.push_back(q);
  }
  return out;
}

Vector solve(const Matrix& a, const Vector& b, double pivot_tol) {
  const int n = a.rows();
  if (a.cols() != n || b.dim() != n) throw Error(ErrorCode::DimensionError, "solve needs a square system");
  Matrix lu = a;
  Vector x = b;
  const double scale = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(lu(i, col)) > std::abs(lu(piv, col))) piv = i;
    if (std::abs(lu(piv, col)) <= pivot_tol * scale) {
      throw Error(ErrorCode::SingularPoint, "linear system is singular");
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(lu(piv, j), lu(col, j));
      std::swap(x[piv], x[col]);
    }
    for (int i = col + 1; i < n; ++i) {
      const double f = lu(i, col) / lu(col, col);
      for (int j = col; j < n; ++j) lu(i, j) -= f * lu(col, j);
      x[i] -= f * x[col];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
    x[i] = s / lu(i, i);
  }
  return x;
}

std::string format_shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double default_fd_step(const Vector& x) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, norm(x));
}

Matrix fd_jacobian(const Evaluator& f, const Vector& x, double h, const DomainPredicate& domain) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidInput, "finite-difference step must be positive");
  const int m = x.dim();
  Matrix jac;
  for (int j = 0; j < m; ++j) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    if (domain && (!domain(xp) || !domain(xm))) {
      throw Error(ErrorCode::DomainViolation, "finite-difference probe leaves the domain");
    }
    const Vector d = (f(xp) - f(xm)) / (2.0 * h);
    if (j == 0) jac = Matrix(d.dim(), m);
    jac.set_col(j, d);
  }
  return jac;
}

Vector rk4_step(const OdeRhs& f, double t, const Vector& x, double dt) {
  const Vector k1 = f(t, x);
  const Vector k2 = f(t + 0.5 * dt, x + (0.5 * dt) * k1);
  const Vector k3 = f(t + 0.5 * dt, x + (0.5 * dt) * k2);
  const Vector k4 = f(t + dt, x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace confkit
