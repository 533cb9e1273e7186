#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "confkit/linalg.hpp"
#include "confkit/maps.hpp"

namespace confkit {

inline constexpr double kRankTolerance = 1e-9;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Singular spectrum of F'(x) restricted to (ker F')^⊥.
struct EccentricitySpectrum {
  Vector point;
  int rank = 0;
  std::vector<double> restricted_singular_values;  // top n, descending
  double eccentricity = kInfinity;                 // +inf when rank < n

  bool full_rank() const { return std::isfinite(eccentricity); }
};

EccentricitySpectrum eccentricity_at(const MapSpec& f, const Vector& x,
                                     double rank_tol = kRankTolerance);

// Eccentricity of an already evaluated Jacobian (n × m).
EccentricitySpectrum eccentricity_of(const Matrix& jacobian, double rank_tol = kRankTolerance);

struct UniformBox {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t count = 1000;
  std::uint64_t seed = 0;
};

// Points with inner ≤ radius ≤ outer, where radius is the Euclidean norm or,
// when `cylindrical`, the distance from the axis spanned by the last
// coordinate (the remaining coordinates are drawn from [-height, height]).
struct AnnularShell {
  double inner = 1.0;
  double outer = 2.0;
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  bool cylindrical = false;
  double height = 1.0;
};

struct ListedPoints {
  std::vector<Vector> points;
};

using SamplingPlan = std::variant<UniformBox, AnnularShell, ListedPoints>;

std::vector<Vector> draw_samples(const SamplingPlan& plan, int dim);

struct QcProfile {
  std::size_t samples = 0;            // in-domain samples analysed
  std::size_t skipped = 0;            // samples outside the domain
  double k_max = 0.0;                 // +inf when any sample is rank deficient
  std::vector<double> quantile_levels;
  std::vector<double> quantiles;      // nearest-rank quantiles of K
  std::size_t rank_deficient_count = 0;
};

// Sampled eccentricity profile; k_max is a lower bound for the true
// coefficient of quasiconformality. Throws EmptySample when no sample lies in
// the domain.
QcProfile global_qc_profile(const MapSpec& f, const SamplingPlan& plan, unsigned threads = 0,
                            std::vector<double> quantile_levels = {0.5, 0.9, 0.99});

struct Triple {
  double a, b, c;
};

// Triples (a, a+d, a+2d) for a on a uniform grid over [lo, hi] and spacings d.
struct TripleGrid {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t count = 64;
  std::vector<double> spacings = {0.25, 1.0, 4.0};
};

using TripleSampler = std::variant<TripleGrid, std::vector<Triple>>;

struct HConditionReport {
  double h_estimate = 1.0;
  Triple worst_triple{};
  bool unbounded_flag = false;
};

// sup over triples of max(r, 1/r) with r = |f(a)-f(b)| / |f(b)-f(c)|.
// Requires a 1-D map; throws InvalidInput if the samples show f is not
// strictly monotone. A degenerate triple (equal values) reports h = +inf.
HConditionReport h_condition_test(const MapSpec& f, const TripleSampler& triples,
                                  double cap = 100.0);

}  // namespace confkit
