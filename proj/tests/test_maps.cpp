#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "confkit/maps.hpp"
#include "doctest.h"

using namespace confkit;

namespace {

Vector random_point(int m, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector x(m);
  for (int i = 0; i < m; ++i) x[i] = u(rng);
  return x;
}

double rel_diff(const Matrix& a, const Matrix& b) {
  const Matrix d = a - b;
  return d.frobenius_norm() / std::max(1.0, a.frobenius_norm());
}

}  // namespace

TEST_CASE("builtin evaluations") {
  const Vector p = builtin("ortho_proj", {3, 2})(Vector{1, 2, 3});
  CHECK(p.dim() == 2);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 2.0);

  const Vector t = builtin("torus_fold")(Vector{0, 0, 5});
  CHECK(t[0] == doctest::Approx(3.0));
  CHECK(std::abs(t[1]) < 1e-15);
  CHECK(std::abs(t[2]) < 1e-15);

  // z1 = 1, z2 = i: complex product computed with std::complex.
  const std::complex<double> prod = std::complex<double>(1, 0) * std::complex<double>(0, 1);
  const Vector h = builtin("holo_product")(Vector{1, 0, 0, 1});
  CHECK(h[0] == doctest::Approx(prod.real()));
  CHECK(h[1] == doctest::Approx(prod.imag()));

  CHECK(builtin("arctan1d")(Vector{1.0})[0] == doctest::Approx(std::numbers::pi / 4));
  CHECK_THROWS_AS(builtin("nope"), Error);
}

TEST_CASE("map micro-syntax and composition") {
  CHECK(parse_map("ortho_proj:3,2").target_dim() == 2);
  const MapSpec c = compose(builtin("ortho_proj", {2, 1}), builtin("ortho_proj", {3, 2}));
  CHECK(c(Vector{1, 2, 3})[0] == 1.0);
  const MapSpec a = parse_map("arctan1d@ortho_proj:3,1");
  CHECK(a(Vector{0, 5, 5})[0] == 0.0);
  CHECK_THROWS_AS(compose(builtin("arctan1d"), builtin("ortho_proj", {3, 2})), Error);
  try {
    compose(builtin("arctan1d"), builtin("ortho_proj", {3, 2}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionError);
  }
  CHECK_THROWS_AS(parse_map("ortho_proj:3,x"), Error);
}

TEST_CASE("composition Jacobian matches finite differences") {
  const MapSpec c = parse_map("hopf_derived@torus_fold");
  std::mt19937_64 rng(5);
  int checked = 0;
  while (checked < 50) {
    const Vector x = random_point(3, 2.0, rng);
    if (!c.in_domain(x)) continue;
    CHECK(rel_diff(c.jacobian(x), c.fd_jacobian(x)) < 1e-6);
    ++checked;
  }
}

TEST_CASE("analytic Jacobians agree with finite differences") {
  std::mt19937_64 rng(17);
  for (const auto& entry : registry_listing()) {
    const MapSpec f = builtin(entry.name);
    if (!f.has_analytic_jacobian()) continue;
    int checked = 0, attempts = 0;
    while (checked < 100 && attempts < 10000) {
      ++attempts;
      const Vector x = random_point(f.source_dim(), 3.0, rng);
      if (!f.in_domain(x)) continue;
      const Matrix ja = f.jacobian(x), jf = f.fd_jacobian(x);
      CHECK_MESSAGE(rel_diff(ja, jf) < 1e-6, entry.name);
      ++checked;
    }
    CHECK(checked == 100);
  }
}

TEST_CASE("torus_fold image is bounded") {
  const MapSpec f = builtin("torus_fold");
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) CHECK(norm(f(random_point(3, 100.0, rng))) <= 3.0 + 1e-12);
}

TEST_CASE("helical_proj is constant along helices") {
  const double p = 1.0;
  const MapSpec f = builtin("helical_proj", {p});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.2, 5.0), ang(-3.0, 3.0), t(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double rho = u(rng), th = ang(rng), z = ang(rng);
    const Vector base = f(Vector{rho * std::cos(th), rho * std::sin(th), z});
    const double s = t(rng);
    const Vector moved = f(Vector{rho * std::cos(th + s), rho * std::sin(th + s),
                                  z + p * s / (2 * std::numbers::pi)});
    const Vector d = f.image_difference(moved, base);
    CHECK(norm(d) < 1e-9);
  }
  CHECK_FALSE(f.in_domain(Vector{0, 0, 1}));
  CHECK_THROWS_AS(f(Vector{0, 0, 1}), Error);
}

TEST_CASE("hopf_derived lands where the chart composition says") {
  // The origin goes to (0,0,0,-1) on S^3, i.e. z1 = 0; Hopf sends it to the
  // south pole of S^2, whose stereographic image is the origin.
  const Vector y = builtin("hopf_derived")(Vector{0, 0, 0});
  CHECK(std::abs(y[0]) < 1e-14);
  CHECK(std::abs(y[1]) < 1e-14);
}

TEST_CASE("registry listing") {
  const auto list = registry_listing();
  CHECK(list.size() >= 7);
  bool found_torus = false;
  for (const auto& e : list) {
    if (e.name == "torus_fold") {
      found_torus = true;
      CHECK(e.image_bound.has_value());
      CHECK(*e.image_bound == doctest::Approx(3.0));
    }
  }
  CHECK(found_torus);
}
