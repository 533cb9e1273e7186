#include <cmath>
#include <numbers>

#include "confkit/modulus.hpp"
#include "doctest.h"

using namespace confkit;

namespace {

double min_length(const CurveFamily& f, const std::vector<double>& rho) {
  const auto l = curve_lengths(f, rho);
  return *std::min_element(l.begin(), l.end());
}

StaircaseSurface flat_surface(double width, double height, int n_along, int n_up, double step) {
  StaircaseConfig cfg;
  cfg.segment_start = Vector{0, 0};
  cfg.segment_end = Vector{width, 0};
  cfg.start_lift = Vector{0, 0, 0.7};
  cfg.max_height = height;
  cfg.initial_step = step;
  cfg.n_along = n_along;
  cfg.n_up = n_up;
  return build_staircase(Distribution::from_map(builtin("ortho_proj", {3, 2})), cfg);
}

}  // namespace

TEST_CASE("unit square crossings have modulus 1") {
  const GridComplex g{64, 64, 1.0, 1.0};
  const auto f = family_rectangle(g, GridSide::LeftRight, 4);
  CHECK(f.curves.size() == 64u * 5u);
  const auto m = modulus(f, g.areas());
  CHECK(m.value == doctest::Approx(1.0).epsilon(0.02));
  CHECK(m.value >= 1.0 - 1e-9);  // detours are no shorter than rows
  // The reported density is exactly admissible.
  CHECK(std::abs(min_length(f, m.density.rho) - 1.0) <= 1e-9);
  CHECK(m.final_constraint_violation <= 1e-9);
}

TEST_CASE("rectangle modulus is height over width") {
  const GridComplex g{128, 64, 2.0, 1.0};
  const auto lr = modulus(family_rectangle(g, GridSide::LeftRight, 4), g.areas());
  CHECK(lr.value == doctest::Approx(0.5).epsilon(0.03));
  const auto bt = modulus(family_rectangle(g, GridSide::BottomTop, 4), g.areas());
  CHECK(bt.value == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("annulus modulus matches 2pi / log ratio") {
  const auto edges = PolarComplex::geometric_edges(1.0, std::numbers::e, 1.02);
  const auto pc = PolarComplex::flat(edges, 64);
  const auto m = modulus(family_annulus(pc, 1.0, std::numbers::e), pc.areas());
  CHECK(m.value == doctest::Approx(2 * std::numbers::pi).epsilon(0.05));
}

TEST_CASE("more curves never lower the modulus") {
  const GridComplex g{32, 32, 1.0, 1.0};
  ModulusOptions o;
  o.rel_tol = 1e-6;
  const double m0 = modulus(family_rectangle(g, GridSide::LeftRight, 0), g.areas(), 2, o).value;
  const double m8 = modulus(family_rectangle(g, GridSide::LeftRight, 8), g.areas(), 2, o).value;
  CHECK(m8 >= m0 - 2e-5 * m0);

  // A subfamily: every other row only.
  auto full = family_rectangle(g, GridSide::LeftRight, 0);
  CurveFamily half = full;
  half.curves.clear();
  for (std::size_t i = 0; i < full.curves.size(); i += 2) half.curves.push_back(full.curves[i]);
  CHECK(modulus(half, g.areas(), 2, o).value <= m0 * (1 + 2e-5));
}

TEST_CASE("modulus is invariant under uniform scaling") {
  const GridComplex a{24, 16, 1.5, 1.0};
  const GridComplex b{24, 16, 15.0, 10.0};
  const double ma = modulus(family_rectangle(a), a.areas()).value;
  const double mb = modulus(family_rectangle(b), b.areas()).value;
  CHECK(mb == doctest::Approx(ma).epsilon(1e-4));
}

TEST_CASE("p = 1 modulus of straight crossings") {
  // With straight rows only, ρ ≡ 1/width gives area/width = height.
  const GridComplex g{16, 8, 2.0, 1.0};
  const auto m = modulus(family_rectangle(g, GridSide::LeftRight, 0), g.areas(), 1.0);
  CHECK(m.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(min_length(family_rectangle(g, GridSide::LeftRight, 0), m.density.rho) - 1.0) <= 1e-9);
}

TEST_CASE("modulus rejects bad inputs") {
  const GridComplex g{4, 4, 1.0, 1.0};
  CurveFamily empty;
  empty.cell_count = 16;
  CHECK_THROWS_AS(modulus(empty, g.areas()), Error);
  auto f = family_rectangle(g);
  CHECK_THROWS_AS(modulus(f, std::vector<double>(3, 1.0)), Error);
  CHECK_THROWS_AS(modulus(f, g.areas(), 0.5), Error);
  f.curves[0].cells[0].first = 99;
  CHECK_THROWS_AS(modulus(f, g.areas()), Error);
  CHECK_THROWS_AS(GridComplex({0, 4, 1.0, 1.0}).areas(), Error);
  CHECK_THROWS_AS(PolarComplex::flat({1.0, 0.5}, 8), Error);
}

TEST_CASE("lifted rays of a projection staircase recover 1/H") {
  const double H = 2.0;
  const auto s = flat_surface(1.0, H, 17, 9, 0.5);
  REQUIRE(s.status == "Completed");
  const auto cx = surface_complex(s);
  const auto f = family_lifted_rays(s, segment_grid_points(s));
  CHECK(f.curves.size() == 17u);
  for (const auto& c : f.curves) CHECK(c.length() == doctest::Approx(H));
  const auto m = modulus(f, cx.areas);
  CHECK(m.value == doctest::Approx(1.0 / H).epsilon(0.03));
}

TEST_CASE("truncated lifted rays") {
  const auto s = flat_surface(4.0, 6.0, 33, 9, 1.0);
  const auto cx = surface_complex(s);
  std::vector<Vector> middle;
  for (const Vector& b : segment_grid_points(s)) {
    if (b[0] >= 1.0 && b[0] <= 3.0) middle.push_back(b);
  }
  // Rays over the middle stay at distance = height from the lifted segment.
  double last = std::numeric_limits<double>::infinity();
  for (double R : {1.0, 2.0, 4.0}) {
    const auto f = family_lifted_rays(s, middle, R);
    // Mesh distances from a line of seeds run slightly short of the height.
    for (const auto& c : f.curves) CHECK(c.length() == doctest::Approx(R).epsilon(1e-2));
    const double m = modulus(f, cx.areas).value;
    CHECK(m <= last * (1 + 1e-6));
    last = m;
  }
  CHECK_THROWS_AS(family_lifted_rays(s, middle, 50.0), Error);
  CHECK_THROWS_AS(family_lifted_rays(s, {}), Error);
  CHECK_THROWS_AS(family_lifted_rays(s, {Vector{0.01, 0.0}}), Error);
}

TEST_CASE("parabolic density integral") {
  const double r0 = 2.0, alpha = 0.7;
  // Midpoint-rule oracle.
  const auto numeric = [&](double a, double b) {
    const int n = 200000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += parabolic_density(a + (b - a) * (i + 0.5) / n, alpha, r0);
    return s * (b - a) / n;
  };
  for (auto [a, b] : {std::pair{1.0, 5.0}, {2.5, 3.0}, {3.0, 100.0}}) {
    CHECK(parabolic_density_integral(a, b, alpha, r0) == doctest::Approx(numeric(a, b)).epsilon(1e-6));
  }
  CHECK(parabolic_density(1.5, alpha, r0) == 0.0);
  CHECK(alpha_min(std::exp(std::exp(2.0)), std::numbers::e) == doctest::Approx(0.5));
}

TEST_CASE("flat plane parabolicity bounds decrease") {
  const std::vector<double> cutoffs{1e2, 1e3, 1e4};
  const double r0 = std::numbers::e;
  auto extra = cutoffs;
  extra.push_back(r0);
  const auto pc = PolarComplex::flat(PolarComplex::geometric_edges(1.0, 1e4, 1.05, extra), 32);
  const auto t = parabolicity_bound(pc, {0.5, 1.0}, cutoffs);
  REQUIRE(t.best_by_cutoff.size() == 3);
  CHECK(t.strictly_decreasing);
  // α_min rows: exact radial averages give ρ-length exactly 1, energy ≈ 2π α² ∫ dr/(r ln² r) + inner part.
  for (const auto& row : t.rows) {
    if (!row.alpha_is_minimal) continue;
    CHECK(row.min_curve_length == doctest::Approx(1.0).epsilon(1e-9));
    const double L = std::log(row.cutoff);
    const double oracle = 2 * std::numbers::pi * row.alpha * row.alpha * (1.0 - 1.0 / L);
    CHECK(row.m_upper == doctest::Approx(oracle).epsilon(0.02));
  }
  CHECK(t.best_by_cutoff[1] == doctest::Approx(2 * std::numbers::pi / std::pow(std::log(std::log(1e3)), 2) *
                                               (1 - 1 / std::log(1e3)))
                                   .epsilon(0.02));
}

TEST_CASE("hyperbolic plane parabolicity bounds stay large") {
  const std::vector<double> cutoffs{5.0, 10.0, 20.0};
  const double r0 = std::numbers::e;
  auto extra = cutoffs;
  extra.push_back(r0);
  const auto pc = PolarComplex::hyperbolic(PolarComplex::geometric_edges(1.0, 20.0, 1.02, extra), 32, 1.0);
  const auto t = parabolicity_bound(pc, {0.5, 1.0, 2.0}, cutoffs);
  for (double b : t.best_by_cutoff) CHECK(b >= 0.2);
  CHECK(t.verdict == "hyperbolic-indicated");
}

TEST_CASE("parabolicity input checks") {
  const auto pc = PolarComplex::flat(PolarComplex::geometric_edges(1.0, 100.0, 1.1, {std::numbers::e, 50.0}), 8);
  CHECK_THROWS_AS(parabolicity_bound(pc, {0.0}, {50.0}), Error);
  CHECK_THROWS_AS(parabolicity_bound(pc, {1.0}, {47.0}), Error);   // not an edge
  CHECK_THROWS_AS(parabolicity_bound(pc, {1.0}, {500.0}), Error);  // beyond the complex
  CHECK_THROWS_AS(parabolicity_bound(pc, {1.0}, {}), Error);
}

TEST_CASE("surface parabolicity on a flat staircase") {
  StaircaseConfig cfg;
  cfg.segment_start = Vector{-40, 0};
  cfg.segment_end = Vector{40, 0};
  cfg.start_lift = Vector{-40, 0, 0};
  cfg.max_height = 40;
  cfg.initial_step = 5;
  cfg.n_along = 161;
  cfg.n_up = 11;
  cfg.max_step = 5;
  cfg.bidirectional = true;
  const auto s = build_staircase(Distribution::from_map(builtin("ortho_proj", {3, 2})), cfg);
  MeshOptions mo;
  mo.seed_window = std::pair{39.5, 40.5};
  ParabolicityOptions po;
  po.seed_radius = 0.5;
  const auto t = parabolicity_bound(s, {1.0}, {10.0, 30.0}, po, mo);
  REQUIRE(t.best_by_cutoff.size() == 2);
  CHECK(t.strictly_decreasing);
  for (const auto& row : t.rows) {
    if (row.alpha_is_minimal) CHECK(row.min_curve_length >= 1.0 - 1e-9);
  }
}
