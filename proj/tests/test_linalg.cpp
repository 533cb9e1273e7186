#include <cmath>
#include <random>

#include "confkit/linalg.hpp"
#include "doctest.h"

using namespace confkit;

namespace {

// Eigenvalues of a symmetric 2x2 matrix, closed form.
std::pair<double, double> sym2_eigen(double a, double b, double d) {
  const double mean = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  return {mean + rad, mean - rad};
}

Matrix random_matrix(int n, int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = g(rng);
  return a;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

}  // namespace

TEST_CASE("svd of small fixed matrices") {
  auto s = svd(Matrix::identity(2));
  CHECK(s.values[0] == doctest::Approx(1.0));
  CHECK(s.values[1] == doctest::Approx(1.0));

  s = svd(Matrix(2, 2, {3, 0, 0, 1}));
  CHECK(s.values[0] == doctest::Approx(3.0));
  CHECK(s.values[1] == doctest::Approx(1.0));

  const Matrix a(3, 2, {0, 1, 1, 0, 0, 0});
  s = svd(a);
  const Matrix ata = a.transposed() * a;
  const auto [l1, l2] = sym2_eigen(ata(0, 0), ata(0, 1), ata(1, 1));
  CHECK(s.values[0] == doctest::Approx(std::sqrt(l1)).epsilon(1e-12));
  CHECK(s.values[1] == doctest::Approx(std::sqrt(l2)).epsilon(1e-12));
}

TEST_CASE("svd reconstructs and frames are orthonormal") {
  std::mt19937_64 rng(11);
  for (auto [n, m] : {std::pair{2, 3}, {3, 3}, {2, 4}, {4, 2}, {5, 7}, {16, 16}, {1, 3}}) {
    const Matrix a = random_matrix(n, m, rng);
    const SvdResult s = svd(a);
    CHECK(max_abs_diff(s.reconstruct(), a) <= 1e-9 * a.frobenius_norm());
    for (std::size_t i = 1; i < s.values.size(); ++i) CHECK(s.values[i - 1] >= s.values[i]);
    const Matrix vtv = s.right.transposed() * s.right;
    CHECK(max_abs_diff(vtv, Matrix::identity(m)) <= 1e-10);
    const Matrix utu = s.left.transposed() * s.left;
    CHECK(max_abs_diff(utu, Matrix::identity(std::min(n, m))) <= 1e-10);

    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
      Vector v(m);
      for (int j = 0; j < m; ++j) v[j] = g(rng);
      const double av = norm(a * v), nv = norm(v);
      const double lo = n >= m ? s.values.back() : 0.0;
      CHECK(av >= lo * nv - 1e-8);
      CHECK(av <= s.values.front() * nv + 1e-8);
    }
  }
}

TEST_CASE("svd handles rank deficiency and zero") {
  const SvdResult z = svd(Matrix(2, 3));
  CHECK(z.values[0] == 0.0);
  const Matrix vtv = z.right.transposed() * z.right;
  CHECK(max_abs_diff(vtv, Matrix::identity(3)) <= 1e-12);

  const Matrix r1(3, 3, {1, 2, 3, 2, 4, 6, 1, 2, 3});
  const SvdResult s = svd(r1);
  CHECK(s.values[1] <= 1e-12 * s.values[0]);
  CHECK(max_abs_diff(s.reconstruct(), r1) <= 1e-9 * r1.frobenius_norm());
}

TEST_CASE("svd right frame columns have canonical sign") {
  std::mt19937_64 rng(3);
  const SvdResult s = svd(random_matrix(2, 3, rng));
  for (int j = 0; j < 3; ++j) {
    const Vector c = s.right.col(j);
    for (double x : c) {
      if (std::abs(x) > 1e-12) {
        CHECK(x > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("svd rejects non-finite input") {
  Matrix a = Matrix::identity(2);
  a(0, 1) = std::nan("");
  CHECK_THROWS_AS(svd(a), Error);
  try {
    svd(a);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
  }
}

TEST_CASE("orthonormal complement") {
  auto c = orthonormal_complement({Vector{0, 0, 1}}, 3);
  REQUIRE(c.size() == 2);
  for (const auto& v : c) {
    CHECK(std::abs(v[2]) < 1e-15);
    CHECK(norm(v) == doctest::Approx(1.0));
  }
  CHECK(std::abs(dot(c[0], c[1])) < 1e-15);

  const Vector diag = Vector{1, 1, 1} / std::sqrt(3.0);
  c = orthonormal_complement({diag}, 3);
  REQUIRE(c.size() == 2);
  CHECK(std::abs(dot(c[0], diag)) < 1e-14);
  CHECK(std::abs(dot(c[1], diag)) < 1e-14);
  CHECK(std::abs(dot(c[0], c[1])) < 1e-14);

  // Union spans R^3: |det| of the 3 columns is 1 (Gram determinant > 0.5).
  const Matrix u = Matrix::from_columns({diag, c[0], c[1]}, 3);
  const double det = u(0, 0) * (u(1, 1) * u(2, 2) - u(1, 2) * u(2, 1)) -
                     u(0, 1) * (u(1, 0) * u(2, 2) - u(1, 2) * u(2, 0)) +
                     u(0, 2) * (u(1, 0) * u(2, 1) - u(1, 1) * u(2, 0));
  CHECK(det * det > 0.5);

  CHECK(orthonormal_complement({Vector{1, 0}, Vector{0, 1}}, 2).empty());
  CHECK_THROWS_AS(orthonormal_complement({Vector{1, 2, 3}, Vector{2, 4, 6}}, 3), Error);
}

TEST_CASE("central-difference Jacobian") {
  const Matrix a(2, 3, {1, -2, 0.5, 3, 0, 4});
  const Matrix j = fd_jacobian([&](const Vector& x) { return a * x; }, Vector{0.3, -1, 2}, 1e-4);
  CHECK(max_abs_diff(j, a) <= 1e-9);

  const Matrix q = fd_jacobian([](const Vector& x) { return Vector{x[0] * x[0], x[1]}; },
                               Vector{1, 1}, 1e-4);
  CHECK(max_abs_diff(q, Matrix(2, 2, {2, 0, 0, 1})) <= 1e-7);

  const Matrix c = fd_jacobian([](const Vector&) { return Vector{5, 6}; }, Vector{1, 2}, 1e-4);
  CHECK(c.frobenius_norm() == 0.0);

  CHECK_THROWS_AS(fd_jacobian([](const Vector& x) { return x; }, Vector{0.0, 0.0}, 1e-3,
                              [](const Vector& x) { return x[0] > 0.0; }),
                  Error);
}

TEST_CASE("rk4 reproduces e") {
  Vector x{1.0};
  const OdeRhs f = [](double, const Vector& y) { return y; };
  for (int i = 0; i < 1000; ++i) x = rk4_step(f, i * 1e-3, x, 1e-3);
  CHECK(std::abs(x[0] - std::exp(1.0)) < 1e-9);
}

TEST_CASE("solve square system") {
  const Matrix a(3, 3, {2, 1, 0, 1, 3, 1, 0, 1, 4});
  const Vector b{1, 2, 3};
  const Vector x = solve(a, b);
  CHECK(norm(a * x - b) < 1e-13);
  CHECK_THROWS_AS(solve(Matrix(2, 2, {1, 2, 2, 4}), Vector{1, 1}), Error);
}
