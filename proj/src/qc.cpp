#include "confkit/qc.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "confkit/parallel.hpp"

namespace confkit {

EccentricitySpectrum eccentricity_of(const Matrix& jacobian, double rank_tol) {
  const int n = jacobian.rows();
  const SvdResult s = svd(jacobian);
  EccentricitySpectrum out;
  const double top = s.values.empty() ? 0.0 : s.values.front();
  for (double v : s.values) {
    if (top > 0.0 && v > rank_tol * top) ++out.rank;
  }
  out.restricted_singular_values.assign(n, 0.0);
  for (int i = 0; i < n && i < static_cast<int>(s.values.size()); ++i) {
    out.restricted_singular_values[i] = s.values[i];
  }
  if (out.rank == n) out.eccentricity = top / s.values[n - 1];
  return out;
}

EccentricitySpectrum eccentricity_at(const MapSpec& f, const Vector& x, double rank_tol) {
  EccentricitySpectrum out = eccentricity_of(f.jacobian(x), rank_tol);
  out.point = x;
  return out;
}

std::vector<Vector> draw_samples(const SamplingPlan& plan, int dim) {
  std::vector<Vector> out;
  if (const auto* box = std::get_if<UniformBox>(&plan)) {
    std::mt19937_64 rng(box->seed);
    std::uniform_real_distribution<double> u(box->lo, box->hi);
    out.reserve(box->count);
    for (std::size_t i = 0; i < box->count; ++i) {
      Vector x(dim);
      for (int j = 0; j < dim; ++j) x[j] = u(rng);
      out.push_back(std::move(x));
    }
  } else if (const auto* shell = std::get_if<AnnularShell>(&plan)) {
    if (!(shell->outer >= shell->inner && shell->inner >= 0.0)) {
      throw Error(ErrorCode::InvalidInput, "annular shell needs 0 <= inner <= outer");
    }
    std::mt19937_64 rng(shell->seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> along(-shell->height, shell->height);
    const int radial_dim = shell->cylindrical ? dim - 1 : dim;
    if (radial_dim < 1) throw Error(ErrorCode::InvalidInput, "cylindrical shell needs dim >= 2");
    const double lo = std::pow(shell->inner, radial_dim), hi = std::pow(shell->outer, radial_dim);
    for (std::size_t i = 0; i < shell->count; ++i) {
      Vector dir(radial_dim);
      double len = 0.0;
      while (len < 1e-12) {
        for (int j = 0; j < radial_dim; ++j) dir[j] = gauss(rng);
        len = norm(dir);
      }
      // Volume-uniform radius inside the shell.
      const double r = std::pow(lo + (hi - lo) * unit(rng), 1.0 / radial_dim);
      Vector x(dim);
      for (int j = 0; j < radial_dim; ++j) x[j] = r * dir[j] / len;
      if (shell->cylindrical) x[dim - 1] = along(rng);
      out.push_back(std::move(x));
    }
  } else {
    const auto& listed = std::get<ListedPoints>(plan);
    for (const Vector& p : listed.points) {
      if (p.dim() != dim) throw Error(ErrorCode::DimensionError, "listed point has wrong dimension");
    }
    out = listed.points;
  }
  return out;
}

QcProfile global_qc_profile(const MapSpec& f, const SamplingPlan& plan, unsigned threads,
                            std::vector<double> quantile_levels) {
  const std::vector<Vector> points = draw_samples(plan, f.source_dim());
  std::vector<double> k(points.size(), -1.0);  // -1 marks out-of-domain samples
  parallel_for(points.size(), threads, [&](std::size_t i) {
    if (!f.in_domain(points[i])) return;
    k[i] = eccentricity_at(f, points[i]).eccentricity;
  });

  QcProfile out;
  std::vector<double> used;
  for (double v : k) {
    if (v < 0.0) {
      ++out.skipped;
      continue;
    }
    used.push_back(v);
    if (!std::isfinite(v)) ++out.rank_deficient_count;
  }
  if (used.empty()) throw Error(ErrorCode::EmptySample, "no sample lies in the domain of " + f.name());
  out.samples = used.size();
  std::sort(used.begin(), used.end());
  out.k_max = used.back();
  for (double q : quantile_levels) {
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidInput, "quantile level outside [0,1]");
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(used.size())));
    out.quantiles.push_back(used[std::clamp<std::size_t>(rank, 1, used.size()) - 1]);
  }
  out.quantile_levels = std::move(quantile_levels);
  return out;
}

HConditionReport h_condition_test(const MapSpec& f, const TripleSampler& sampler, double cap) {
  if (f.source_dim() != 1 || f.target_dim() != 1) {
    throw Error(ErrorCode::DimensionError, "h-condition needs a map R -> R");
  }
  std::vector<Triple> triples;
  if (const auto* grid = std::get_if<TripleGrid>(&sampler)) {
    if (grid->count < 1 || grid->spacings.empty()) {
      throw Error(ErrorCode::EmptySample, "triple grid is empty");
    }
    for (std::size_t i = 0; i < grid->count; ++i) {
      const double a = grid->count == 1
                           ? grid->lo
                           : grid->lo + (grid->hi - grid->lo) * static_cast<double>(i) /
                                            static_cast<double>(grid->count - 1);
      for (double d : grid->spacings) {
        if (!(d > 0.0)) throw Error(ErrorCode::InvalidInput, "triple spacing must be positive");
        triples.push_back({a, a + d, a + 2 * d});
      }
    }
  } else {
    triples = std::get<std::vector<Triple>>(sampler);
  }
  if (triples.empty()) throw Error(ErrorCode::EmptySample, "no triples to test");

  HConditionReport out;
  out.worst_triple = triples.front();
  int orientation = 0;
  for (const Triple& t : triples) {
    if (!(t.a < t.b && t.b < t.c)) throw Error(ErrorCode::InvalidInput, "triples must satisfy a < b < c");
    const double fa = f(Vector{t.a})[0], fb = f(Vector{t.b})[0], fc = f(Vector{t.c})[0];
    const double left = fb - fa, right = fc - fb;
    for (double step : {left, right}) {
      if (step == 0.0) continue;
      const int sign = step > 0.0 ? 1 : -1;
      if (orientation == 0) orientation = sign;
      if (sign != orientation) {
        throw Error(ErrorCode::InvalidInput, f.name() + " is not monotone on the sampled range");
      }
    }
    double h = kInfinity;
    if (left != 0.0 && right != 0.0) {
      const double ratio = std::abs(left) / std::abs(right);
      h = std::max(ratio, 1.0 / ratio);
    }
    if (h > out.h_estimate || (std::isinf(h) && !std::isinf(out.h_estimate))) {
      out.h_estimate = h;
      out.worst_triple = t;
    }
  }
  out.unbounded_flag = !(out.h_estimate <= cap);
  return out;
}

}  // namespace confkit
