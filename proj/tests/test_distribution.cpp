#include <cmath>
#include <numbers>
#include <random>

#include "confkit/distribution.hpp"
#include "doctest.h"

using namespace confkit;

namespace {

Vector random_in_box(double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Vector{u(rng), u(rng), u(rng)};
}

Distribution contact(double eps) { return Distribution::from_coframe(CoframeField::contact(eps)); }

}  // namespace

TEST_CASE("frames of the projection and the helical map") {
  const auto d = Distribution::from_map(builtin("ortho_proj", {3, 2}));
  const DistributionFrame f = d.frame_at(Vector{1, 2, 3});
  REQUIRE(f.plane.size() == 2);
  REQUIRE(f.fiber.size() == 1);
  CHECK(std::abs(std::abs(f.fiber[0][2]) - 1.0) < 1e-14);
  for (const auto& v : f.plane) CHECK(std::abs(v[2]) < 1e-14);

  const MapSpec helix = builtin("helical_proj", {1.0});
  const double rho = 2.0, th = 0.7, c = 1.0 / (2 * std::numbers::pi);
  const Vector x{rho * std::cos(th), rho * std::sin(th), 0.3};
  const Vector tangent = normalized(Vector{-rho * std::sin(th), rho * std::cos(th), c});
  CHECK(norm(helix.jacobian(x) * tangent) < 1e-12);
  const auto hf = Distribution::from_map(helix).frame_at(x);
  CHECK(std::abs(std::abs(dot(hf.fiber[0], tangent)) - 1.0) < 1e-12);

  CHECK_THROWS_AS(Distribution::from_map(builtin("torus_fold")).frame_at(Vector{0.1, 0.2, 0.3}), Error);
}

TEST_CASE("hopf fibers keep the image fixed") {
  const auto d = Distribution::from_map(builtin("hopf_derived"));
  const MapSpec& f = d.map();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x = random_in_box(-1.5, 1.5, rng);
    if (!f.in_domain(x) || std::abs(1.0 - norm(Vector{x[0], x[1]})) < 0.2) continue;
    const Vector y0 = f(x);
    const OdeRhs along = [&](double, const Vector& p) { return d.unit_normal(p); };
    for (int i = 0; i < 200; ++i) x = rk4_step(along, 0.0, x, 5e-3);
    CHECK(norm(f(x) - y0) < 1e-5);
  }
}

TEST_CASE("frobenius residual") {
  const auto flat = Distribution::from_coframe(CoframeField::flat());
  const auto proj = Distribution::from_map(builtin("ortho_proj", {3, 2}));
  const double eps = 0.1;
  const auto con = contact(eps);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const Vector x = random_in_box(-10, 10, rng);
    CHECK(frobenius_residual(flat, x) <= 1e-8);
    CHECK(frobenius_residual(proj, x) <= 1e-8);
    // u = ω/|ω| with ω·curl ω = ε, so u·curl u = ε/(1 + ε²x²).
    CHECK(frobenius_residual(con, x) == doctest::Approx(eps / (1 + eps * eps * x[0] * x[0])).epsilon(1e-6));
  }
  CHECK(std::abs(frobenius_residual(con, Vector{0, 3, -2}) - eps) < 1e-6);

  const auto hopf = Distribution::from_map(builtin("hopf_derived"));
  int checked = 0;
  while (checked < 100) {
    const Vector x = random_in_box(-3, 3, rng);
    if (!hopf.map().in_domain(x) || std::abs(1 - std::hypot(x[0], x[1])) + std::abs(x[2]) < 1e-3) continue;
    CHECK(frobenius_residual(hopf, x) > 1e-3);
    ++checked;
  }
  CHECK_THROWS_AS(frobenius_residual(Distribution::from_map(builtin("holo_product")), Vector{1, 0, 0, 1}), Error);
}

TEST_CASE("lift_vector") {
  const auto proj = Distribution::from_map(builtin("ortho_proj", {3, 2}));
  const Vector v = proj.lift_vector(Vector{4, 5, 6}, Vector{1, 0});
  CHECK(norm(v - Vector{1, 0, 0}) < 1e-15);

  const MapSpec hopf = builtin("hopf_derived");
  const auto d = Distribution::from_map(hopf);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    const Vector x = random_in_box(-2, 2, rng);
    if (!hopf.in_domain(x)) continue;
    const Vector w{g(rng), g(rng)};
    const Vector lifted = d.lift_vector(x, w);
    CHECK(norm(hopf.jacobian(x) * lifted - w) < 1e-10 * std::max(1.0, norm(w)));
    CHECK(std::abs(dot(lifted, d.frame_at(x).fiber[0])) < 1e-10 * norm(lifted));
  }

  // ω̃(ṽ) = 0 with ṽ = (0, 1, dz) gives dz = −ε x₀.
  const double eps = 0.1, x0 = 2.5;
  const Vector up = contact(eps).lift_vector(Vector{x0, 1, 7}, Vector{0, 1});
  CHECK(up[2] == doctest::Approx(-eps * x0));
}

TEST_CASE("lifting along the projection is a translation") {
  const auto d = Distribution::from_map(builtin("ortho_proj", {3, 2}));
  const LiftedPath p = lift_path(d, Path::segment(Vector{0, 0}, Vector{1, 0}), Vector{0, 0, 2.5});
  CHECK(p.status == LiftStatus::Completed);
  CHECK(norm(p.end() - Vector{1, 0, 2.5}) < 1e-12);
  for (const auto& s : p.samples) CHECK(std::abs(s.x[2] - 2.5) < 1e-14);
  CHECK(p.max_error <= 1e-8);
  CHECK_THROWS_AS(lift_path(d, Path::segment(Vector{0, 0}, Vector{1, 0}), Vector{0.1, 0, 0}), Error);
}

TEST_CASE("lifting toward the removed axis") {
  const auto d = Distribution::from_map(builtin("punctured_proj"));
  const LiftedPath near = lift_path(d, Path::segment(Vector{1, 0}, Vector{0.01, 0}), Vector{1, 0, 0});
  CHECK(near.status == LiftStatus::Completed);
  CHECK(near.max_error <= 1e-8);
  CHECK(norm(near.end() - Vector{0.01, 0, 0}) < 1e-12);

  const LiftedPath into = lift_path(d, Path::segment(Vector{1, 0}, Vector{0, 0}), Vector{1, 0, 0});
  CHECK(into.status == LiftStatus::HitSingular);
  CHECK(into.t_stop > 0.99);
  CHECK(norm(into.end()) < 1.0 + 1e-12);
}

TEST_CASE("holonomy of the flat and contact coframes") {
  const auto flat = Distribution::from_coframe(CoframeField::flat());
  CHECK(norm(holonomy_defect(flat, Path::rectangle(0, 0, 2, 3), Vector{0, 0, 1})) <= 1e-8);
  CHECK(norm(holonomy_defect(flat, Path::circle(Vector{1, 1}, 2), Vector{3, 1, 0})) <= 1e-8);

  const double eps = 0.1;
  const auto con = contact(eps);
  for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 3.0}, {0.5, 0.5}, {4.0, 0.25}}) {
    const Vector defect = holonomy_defect(con, Path::rectangle(0, 0, a, b), Vector{0, 0, 0});
    // Green: Δz = −ε ∮ x dy = −ε·area.
    CHECK(std::abs(defect[2] + eps * a * b) <= 1e-4 * a * b);
    CHECK(std::abs(defect[0]) < 1e-12);
    const Vector back = holonomy_defect(con, Path::rectangle(0, 0, a, b).reversed(), Vector{0, 0, 0});
    CHECK(std::abs(back[2] + defect[2]) <= 1e-8);
  }
  // Off-center rectangle: the same area oracle applies.
  const Vector shifted = holonomy_defect(con, Path::rectangle(3, -1, 4, 1), Vector{3, -1, 5});
  CHECK(shifted[2] == doctest::Approx(-eps * 2.0).epsilon(1e-8));

  // Circle: Δz = −ε π r².
  const Vector circ = holonomy_defect(con, Path::circle(Vector{0.5, 0}, 1.0), Vector{1.5, 0, 0});
  CHECK(circ[2] == doctest::Approx(-eps * std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("holonomy is additive under concatenation") {
  const auto con = contact(0.1);
  const Path first = Path::rectangle(0, 0, 1, 1);
  const Path second = Path::circle(Vector{-1, 0}, 1.0);  // passes through the origin
  LiftOptions opts;
  opts.step = 2e-3;
  const Vector a = holonomy_defect(con, first, Vector{0, 0, 0}, opts);
  const Vector b = holonomy_defect(con, second, Vector{0, 0, 0}, opts);
  const Vector ab = holonomy_defect(con, first.then(second), Vector{0, 0, 0}, opts);
  CHECK(std::abs(ab[2] - (a[2] + b[2])) < 1e-8);
}

TEST_CASE("holonomy scales with area exactly when the field twists") {
  const auto con = contact(0.1);
  const auto flat = Distribution::from_coframe(CoframeField::flat());
  for (double side : {0.5, 0.1, 0.02}) {
    const Path loop = Path::rectangle(0.3, 0.3, 0.3 + side, 0.3 + side);
    const Vector start{0.3, 0.3, 0.0};
    CHECK(holonomy_defect(con, loop, start)[2] / (side * side) == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(std::abs(holonomy_defect(flat, loop, start)[2]) <= 1e-12);
  }
}

TEST_CASE("helical circle lift and holonomy agree") {
  const auto d = Distribution::from_map(builtin("helical_proj", {1.0}));
  const Path loop = Path::circle(Vector{5, 0.2}, 1.0);
  const Vector start{6, 0, 0.2};
  const LiftedPath lift = lift_path(d, loop, start);
  REQUIRE(lift.status == LiftStatus::Completed);
  CHECK(lift.max_error <= 1e-8);
  const Vector gap = holonomy_defect(d, loop, start);
  CHECK(norm(gap - (lift.end() - start)) < 1e-12);
  CHECK(norm(gap) > 1e-6);  // helical planes are not integrable
  // The endpoint lies over the start point, i.e. on the start's helix.
  CHECK(norm(d.base_difference(d.project(lift.end()), d.project(start))) < 1e-8);
}

TEST_CASE("lift accuracy improves at least quadratically with the step") {
  const auto d = Distribution::from_map(builtin("hopf_derived"));
  const Path loop = Path::circle(Vector{0.4, 0.1}, 0.3);
  // Find a start over loop(0) by lifting a segment from the image of a point.
  const Vector seed{0.2, -0.1, 0.3};
  const LiftedPath to_start = lift_path(d, Path::segment(d.project(seed), loop.at(0.0)), seed);
  REQUIRE(to_start.status == LiftStatus::Completed);
  const Vector start = to_start.end();

  LiftOptions fine;
  fine.step = 1e-4;
  const Vector reference = lift_path(d, loop, start, fine).end();
  double previous_error = 0.0, previous_drift = 0.0;
  for (double step : {0.04, 0.02}) {
    LiftOptions opts;
    opts.step = step;
    const LiftedPath p = lift_path(d, loop, start, opts);
    REQUIRE(p.status == LiftStatus::Completed);
    CHECK(p.max_error <= 1e-8);
    const double error = distance(p.end(), reference);
    if (previous_error > 0.0) {
      CHECK(previous_error / error >= 4.0);
      CHECK(previous_drift / p.max_drift >= 4.0);
    }
    previous_error = error;
    previous_drift = p.max_drift;
  }
}

TEST_CASE("lifts report escape to infinity") {
  // For the contact coframe z' = −εx y'; far along y with x = 1e3 the height
  // leaves any bounded ball.
  const auto con = contact(0.1);
  LiftOptions opts;
  opts.r_max = 50.0;
  const LiftedPath p = lift_path(con, Path::segment(Vector{1e1, 0}, Vector{1e1, 1e2}), Vector{10, 0, 0}, opts);
  CHECK(p.status == LiftStatus::Escaped);
  CHECK(p.t_stop > 0.0);
  CHECK(p.t_stop < 1.0);
  // |x|² = 100 + (100 t)² + (100 t)² = 2500 at the crossing.
  CHECK(p.t_stop == doctest::Approx(std::sqrt(2400.0 / 20000.0)).epsilon(2e-2));
}

TEST_CASE("checkpoints are hit exactly") {
  const auto d = Distribution::from_map(builtin("ortho_proj", {3, 2}));
  LiftOptions opts;
  opts.checkpoints = {0.0, 0.333, 0.5, 1.0};
  const LiftedPath p = lift_path(d, Path::segment(Vector{0, 0}, Vector{3, 0}), Vector{0, 0, 1}, opts);
  REQUIRE(p.checkpoint_points.size() == 4);
  CHECK((*p.checkpoint_points[1])[0] == doctest::Approx(0.999));
  CHECK((*p.checkpoint_points[2])[0] == doctest::Approx(1.5));
}

TEST_CASE("angle regularity") {
  const auto proj = Distribution::from_map(builtin("ortho_proj", {3, 2}));
  const auto flat_rows = angle_regularity(proj, {1, 5, 10}, 100);
  for (const auto& row : flat_rows) CHECK(std::isinf(row.delta));

  const auto con = angle_regularity(contact(0.1), {1, 5, 10}, 150, 0.1, 4);
  CHECK(std::isfinite(con.back().delta));
  // Normals (0, εx, 1)/|·| deviate by |atan(εx₁) − atan(εx₂)| ≤ ε|x₁ − x₂|, so
  // no pair closer than 1 can qualify.
  CHECK(con.back().delta >= 1.0);
  for (std::size_t i = 1; i < con.size(); ++i) CHECK(con[i].delta <= con[i - 1].delta);

  const auto hopf = angle_regularity(Distribution::from_map(builtin("hopf_derived")), {1, 5, 10}, 150, 0.1, 5);
  for (std::size_t i = 1; i < hopf.size(); ++i) CHECK(hopf[i].delta <= hopf[i - 1].delta);
  CHECK(std::isfinite(hopf.back().delta));
}

TEST_CASE("paths") {
  const Path r = Path::rectangle(0, 0, 2, 1);
  CHECK(r.closed());
  CHECK(r.length() == doctest::Approx(6.0));
  CHECK(norm(r.at(1.0 / 3.0) - Vector{2, 0}) < 1e-15);
  CHECK(norm(r.derivative(0.1) - Vector{6, 0}) < 1e-12);
  const Path c = Path::circle(Vector{0, 0}, 2);
  CHECK(norm(c.at(0.25) - Vector{0, 2}) < 1e-14);
  CHECK(norm(c.reversed().at(0.25) - Vector{0, -2}) < 1e-14);
  CHECK_FALSE(Path::segment(Vector{0, 0}, Vector{1, 0}).closed());
  CHECK_THROWS_AS(Path::segment(Vector{0, 0}, Vector{0, 0}), Error);
}

TEST_CASE("coframe parsing") {
  CHECK(parse_coframe("flat").name == "flat");
  CHECK(parse_coframe("contact:0.25").omega(Vector{2, 0, 0})[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(parse_coframe("spiral"), Error);
}
