#include "confkit/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "confkit/parallel.hpp"

namespace confkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<double> GridComplex::areas() const {
  if (nx < 1 || ny < 1 || !(width > 0.0) || !(height > 0.0)) {
    throw Error(ErrorCode::InvalidComplex, "grid needs positive size");
  }
  return std::vector<double>(cell_count(), (width / nx) * (height / ny));
}

PolarComplex PolarComplex::flat(std::vector<double> edges, int sectors) {
  PolarComplex c;
  c.edges = std::move(edges);
  c.sectors = sectors;
  c.areas();  // validates
  return c;
}

PolarComplex PolarComplex::hyperbolic(std::vector<double> edges, int sectors, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidComplex, "curvature radius must be positive");
  PolarComplex c = flat(std::move(edges), sectors);
  c.curvature_radius = radius;
  c.areas();
  return c;
}

std::vector<double> PolarComplex::geometric_edges(double r_in, double r_out, double ratio,
                                                  const std::vector<double>& extra) {
  if (!(r_in > 0.0 && r_out > r_in && ratio > 1.0)) {
    throw Error(ErrorCode::InvalidInput, "geometric edges need 0 < r_in < r_out and ratio > 1");
  }
  std::vector<double> e;
  for (double r = r_in; r < r_out * (1 - 1e-12); r *= ratio) e.push_back(r);
  e.push_back(r_out);
  for (double x : extra) {
    if (x > r_in && x < r_out) e.push_back(x);
  }
  std::sort(e.begin(), e.end());
  std::vector<double> out;
  for (double x : e) {
    if (out.empty() || x > out.back() * (1 + 1e-12)) {
      out.push_back(x);
    } else if (std::find(extra.begin(), extra.end(), x) != extra.end()) {
      out.back() = x;  // keep requested edges exact
    }
  }
  return out;
}

double PolarComplex::ring_area(int ring) const {
  const double a = edges.at(ring), b = edges.at(ring + 1);
  const double dtheta = 2 * std::numbers::pi / sectors;
  if (curvature_radius == 0.0) return 0.5 * dtheta * (b * b - a * a);
  const double c = curvature_radius;
  // ∫ c sinh(r/c) dr = c² (cosh(b/c) − cosh(a/c)), written to avoid cancellation.
  return dtheta * c * c * 2.0 * std::sinh((a + b) / (2 * c)) * std::sinh((b - a) / (2 * c));
}

std::vector<double> PolarComplex::areas() const {
  if (edges.size() < 2 || sectors < 1) throw Error(ErrorCode::InvalidComplex, "polar complex needs rings and sectors");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i]) || edges[i] < 0.0 || (i > 0 && !(edges[i] > edges[i - 1]))) {
      throw Error(ErrorCode::InvalidComplex, "ring edges must be finite, nonnegative and increasing");
    }
  }
  std::vector<double> out;
  out.reserve(cell_count());
  for (int r = 0; r < rings(); ++r) {
    const double a = ring_area(r);
    if (!std::isfinite(a) || !(a > 0.0)) throw Error(ErrorCode::InvalidComplex, "ring area is not finite");
    out.insert(out.end(), sectors, a);
  }
  return out;
}

double Curve::length() const {
  double s = 0.0;
  for (const auto& [c, ds] : cells) s += ds;
  return s;
}

std::vector<double> curve_lengths(const CurveFamily& family, const std::vector<double>& rho) {
  std::vector<double> out(family.curves.size());
  for (std::size_t i = 0; i < family.curves.size(); ++i) {
    double s = 0.0;
    for (const auto& [c, ds] : family.curves[i].cells) s += rho[c] * ds;
    out[i] = s;
  }
  return out;
}

// ---------------------------------------------------------------- solver

namespace {

void validate_family(const CurveFamily& family, const std::vector<double>& areas) {
  if (family.curves.empty()) throw Error(ErrorCode::InvalidFamily, "curve family is empty");
  if (areas.size() != family.cell_count) {
    throw Error(ErrorCode::InvalidComplex, "area count does not match the family's cell count");
  }
  for (double a : areas) {
    if (!std::isfinite(a) || !(a > 0.0)) throw Error(ErrorCode::InvalidComplex, "cell areas must be finite and positive");
  }
  for (const auto& c : family.curves) {
    if (c.cells.empty()) throw Error(ErrorCode::InvalidFamily, "a curve touches no cell");
    for (const auto& [cell, ds] : c.cells) {
      if (cell < 0 || static_cast<std::size_t>(cell) >= family.cell_count) {
        throw Error(ErrorCode::InvalidFamily, "curve references a cell outside the complex");
      }
      if (!(ds > 0.0) || !std::isfinite(ds)) throw Error(ErrorCode::InvalidFamily, "traversal lengths must be positive");
    }
  }
}

class Solver {
 public:
  Solver(const CurveFamily& f, const std::vector<double>& a, double p, const ModulusOptions& o)
      : family_(f), areas_(a), p_(p), opts_(o), lengths_(f.curves.size()) {}

  void lengths_of(const std::vector<double>& rho) {
    parallel_for(family_.curves.size(), opts_.threads, [&](std::size_t i) {
      double s = 0.0;
      for (const auto& [c, ds] : family_.curves[i].cells) s += rho[c] * ds;
      lengths_[i] = s;
    });
  }

  double energy(const std::vector<double>& rho) const {
    double e = 0.0;
    for (std::size_t c = 0; c < rho.size(); ++c) e += areas_[c] * std::pow(rho[c], p_);
    return e;
  }

  double min_length() const { return *std::min_element(lengths_.begin(), lengths_.end()); }

  // Rescale rho to exact admissibility and keep it when it improves the incumbent.
  void offer(const std::vector<double>& rho) {
    const double m = min_length();
    if (!(m > 0.0)) return;
    const double value = energy(rho) / std::pow(m, p_);
    if (value < best_value_) {
      best_value_ = value;
      best_rho_ = rho;
      for (double& r : best_rho_) r /= m;
    }
  }

  ModulusEstimate run();

 private:
  void dual_ascent(ModulusEstimate& out);
  void primal_subgradient(ModulusEstimate& out);

  const CurveFamily& family_;
  const std::vector<double>& areas_;
  double p_;
  const ModulusOptions& opts_;
  std::vector<double> lengths_;
  double best_value_ = kInf;
  std::vector<double> best_rho_;
};

void Solver::dual_ascent(ModulusEstimate& out) {
  const std::size_t nc = family_.curves.size(), ncell = areas_.size();
  const double q = 1.0 / (p_ - 1.0);
  std::vector<double> lambda(nc, 1.0), load(ncell), rho(ncell);
  const auto density_of = [&](const std::vector<double>& lam) {
    std::fill(load.begin(), load.end(), 0.0);
    for (std::size_t i = 0; i < nc; ++i) {
      if (lam[i] == 0.0) continue;
      for (const auto& [c, ds] : family_.curves[i].cells) load[c] += lam[i] * ds;
    }
    for (std::size_t c = 0; c < ncell; ++c) rho[c] = std::pow(load[c] / (p_ * areas_[c]), q);
  };

  // Scale the initial multipliers so the mean ρ-length is 1.
  density_of(lambda);
  lengths_of(rho);
  double mean = 0.0;
  for (double l : lengths_) mean += l;
  mean /= static_cast<double>(nc);
  if (mean > 0.0) {
    const double s = std::pow(1.0 / mean, p_ - 1.0);
    for (double& l : lambda) l *= s;
  }

  double theta = 1.0;
  double best_dual = -kInf;
  std::size_t since_dual_gain = 0;
  std::vector<double> history;
  std::size_t it = 0;
  for (; it < opts_.max_iterations; ++it) {
    density_of(lambda);
    lengths_of(rho);
    offer(rho);
    double lam_sum = 0.0, lam_len = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      lam_sum += lambda[i];
      lam_len += lambda[i] * lengths_[i];
    }
    const double dual = lam_sum - (1.0 - 1.0 / p_) * lam_len;
    out.dual_value = dual;
    if (dual > best_dual * (1 + 1e-12) + 1e-300) {
      best_dual = dual;
      since_dual_gain = 0;
    } else if (++since_dual_gain >= opts_.window) {
      theta *= 0.5;
      since_dual_gain = 0;
    }

    history.push_back(best_value_);
    if (history.size() > opts_.window) {
      const double old = history[history.size() - 1 - opts_.window];
      if (std::abs(old - best_value_) <= opts_.rel_tol * best_value_) {
        out.converged = true;
        break;
      }
    }
    if (best_value_ - best_dual <= 1e-9 * best_value_) {
      out.converged = true;
      break;
    }

    double g2 = 0.0;
    std::vector<double> grad(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      grad[i] = 1.0 - lengths_[i];
      if (lambda[i] == 0.0 && grad[i] < 0.0) grad[i] = 0.0;
      g2 += grad[i] * grad[i];
    }
    if (g2 == 0.0) {
      out.converged = true;
      break;
    }
    const double step = theta * std::max(best_value_ - dual, 0.0) / g2;
    if (!(step > 0.0)) {
      out.converged = true;
      break;
    }
    for (std::size_t i = 0; i < nc; ++i) lambda[i] = std::max(0.0, lambda[i] + step * grad[i]);
  }
  out.iterations = it;
}

void Solver::primal_subgradient(ModulusEstimate& out) {
  // Minimize the scale-free ratio Σ a ρ / min_γ ℓ_γ(ρ) over ρ ≥ 0.
  const std::size_t ncell = areas_.size();
  std::vector<double> rho = best_rho_;
  double theta = 1.0;
  std::size_t since_gain = 0;
  double last_best = best_value_;
  std::vector<double> history;
  std::size_t it = 0;
  for (; it < opts_.max_iterations; ++it) {
    lengths_of(rho);
    offer(rho);
    const std::size_t arg = std::min_element(lengths_.begin(), lengths_.end()) - lengths_.begin();
    const double m = lengths_[arg];
    const double mass = energy(rho);
    const double f = mass / m;
    history.push_back(best_value_);
    if (history.size() > opts_.window) {
      const double old = history[history.size() - 1 - opts_.window];
      if (std::abs(old - best_value_) <= opts_.rel_tol * best_value_) {
        out.converged = true;
        break;
      }
    }
    if (best_value_ < last_best) {
      last_best = best_value_;
      since_gain = 0;
    } else if (++since_gain >= opts_.window / 2) {
      theta *= 0.5;
      since_gain = 0;
    }
    std::vector<double> g(ncell);
    for (std::size_t c = 0; c < ncell; ++c) g[c] = areas_[c] / m;
    for (const auto& [c, ds] : family_.curves[arg].cells) g[c] -= f * ds / m;
    double g2 = 0.0;
    for (std::size_t c = 0; c < ncell; ++c) {
      if (rho[c] == 0.0 && g[c] > 0.0) g[c] = 0.0;
      g2 += g[c] * g[c];
    }
    if (g2 == 0.0) {
      out.converged = true;
      break;
    }
    const double target = best_value_ * (1.0 - 0.05 * theta);
    const double step = std::max(f - target, 0.0) / g2;
    for (std::size_t c = 0; c < ncell; ++c) rho[c] = std::max(0.0, rho[c] - step * g[c]);
    // Renormalize to keep the iterate on the admissible boundary.
    lengths_of(rho);
    const double mm = min_length();
    if (mm > 0.0) {
      for (double& r : rho) r /= mm;
    } else {
      rho = best_rho_;
    }
  }
  out.iterations = it;
  out.dual_value = kNaN;
}

ModulusEstimate Solver::run() {
  ModulusEstimate out;
  out.p = p_;
  // Deterministic incumbent: ρ ≡ 1 / mean curve length.
  double mean = 0.0;
  for (const auto& c : family_.curves) mean += c.length();
  mean /= static_cast<double>(family_.curves.size());
  std::vector<double> rho(areas_.size(), 1.0 / mean);
  lengths_of(rho);
  offer(rho);
  if (p_ > 1.0) {
    dual_ascent(out);
  } else {
    primal_subgradient(out);
  }
  out.value = best_value_;
  out.density = {best_rho_, areas_};
  lengths_of(best_rho_);
  out.final_constraint_violation = std::max(0.0, 1.0 - min_length());
  return out;
}

}  // namespace

ModulusEstimate modulus(const CurveFamily& family, const std::vector<double>& areas, double p,
                        const ModulusOptions& opts) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidInput, "modulus exponent must be >= 1");
  if (opts.window == 0) throw Error(ErrorCode::InvalidInput, "convergence window must be positive");
  validate_family(family, areas);
  return Solver(family, areas, p, opts).run();
}

// ---------------------------------------------------------------- families

CurveFamily family_rectangle(const GridComplex& grid, GridSide side, int k) {
  if (grid.nx < 2 || grid.ny < 2) throw Error(ErrorCode::InvalidComplex, "grid must be at least 2x2");
  if (k < 0) throw Error(ErrorCode::InvalidInput, "perturbation count must be nonnegative");
  const bool across = side == GridSide::LeftRight;
  // Work in (along, lane) coordinates: curves run along, lanes are rows/columns.
  const int n_along = across ? grid.nx : grid.ny;
  const int n_lanes = across ? grid.ny : grid.nx;
  const double step_along = across ? grid.width / grid.nx : grid.height / grid.ny;
  const double step_lane = across ? grid.height / grid.ny : grid.width / grid.nx;
  const auto cell = [&](int a, int lane) { return across ? grid.index(a, lane) : grid.index(lane, a); };
  const double corner = 0.5 * std::hypot(step_along, step_lane);

  CurveFamily f;
  f.description = std::string("rectangle ") + (across ? "left-right" : "bottom-top") + " crossings, k=" +
                  std::to_string(k);
  f.cell_count = grid.cell_count();
  for (int lane = 0; lane < n_lanes; ++lane) {
    Curve straight;
    for (int a = 0; a < n_along; ++a) straight.cells.push_back({cell(a, lane), step_along});
    f.curves.push_back(std::move(straight));
    const int other = lane + 1 < n_lanes ? lane + 1 : lane - 1;
    for (int q = 1; q <= k; ++q) {
      const int s = std::clamp(static_cast<int>(std::lround(static_cast<double>(q) * n_along / (k + 1))), 0,
                               n_along - 1);
      Curve detour;
      for (int a = 0; a < s; ++a) detour.cells.push_back({cell(a, lane), step_along});
      // Half of cell s in the lane, a quarter turn, half of cell s in the other lane.
      detour.cells.push_back({cell(s, lane), corner});
      detour.cells.push_back({cell(s, other), corner});
      for (int a = s + 1; a < n_along; ++a) detour.cells.push_back({cell(a, other), step_along});
      f.curves.push_back(std::move(detour));
    }
  }
  return f;
}

CurveFamily family_annulus(const PolarComplex& complex, double r_in, double r_out) {
  complex.areas();
  const auto edge_index = [&](double r) {
    for (std::size_t i = 0; i < complex.edges.size(); ++i) {
      if (std::abs(complex.edges[i] - r) <= 1e-12 * std::max(1.0, r)) return static_cast<int>(i);
    }
    throw Error(ErrorCode::InvalidComplex, "annulus radius " + std::to_string(r) + " is not a ring edge");
  };
  const int i0 = edge_index(r_in), i1 = edge_index(r_out);
  if (i1 <= i0) throw Error(ErrorCode::InvalidInput, "annulus needs r_in < r_out");
  CurveFamily f;
  f.description = "annulus radial crossings";
  f.cell_count = complex.cell_count();
  for (int s = 0; s < complex.sectors; ++s) {
    Curve c;
    for (int r = i0; r < i1; ++r) c.cells.push_back({complex.index(r, s), complex.edges[r + 1] - complex.edges[r]});
    f.curves.push_back(std::move(c));
  }
  return f;
}

SurfaceComplex surface_complex(const StaircaseSurface& s) {
  SurfaceComplex out;
  for (const Patch& p : s.patches) {
    out.patch_face_offset.push_back(out.areas.size());
    for (int r = 0; r + 1 < p.rows; ++r) {
      for (int c = 0; c + 1 < p.cols; ++c) {
        const Vector& a = p.vertex(r, c);
        const Vector& b = p.vertex(r, c + 1);
        const Vector& e = p.vertex(r + 1, c);
        const Vector& f = p.vertex(r + 1, c + 1);
        const auto tri = [](const Vector& x, const Vector& y, const Vector& z) {
          const Vector u = y - x, v = z - x;
          return 0.5 * std::sqrt(std::max(0.0, dot(u, u) * dot(v, v) - dot(u, v) * dot(u, v)));
        };
        out.areas.push_back(tri(a, b, f) + tri(a, f, e));
      }
    }
  }
  for (double& a : out.areas) {
    if (!(a > 0.0)) a = std::numeric_limits<double>::min();  // degenerate quad: keep the complex valid
  }
  return out;
}

std::vector<Vector> segment_grid_points(const StaircaseSurface& s) {
  std::vector<Vector> out;
  for (int j = 0; j < s.n_along; ++j) {
    const double t = static_cast<double>(j) / (s.n_along - 1);
    out.push_back(s.segment_start + t * (s.segment_end - s.segment_start));
  }
  return out;
}

CurveFamily family_lifted_rays(const StaircaseSurface& s, const std::vector<Vector>& base_points,
                               std::optional<double> radius, const MeshOptions& mesh_opts) {
  if (base_points.empty()) throw Error(ErrorCode::InvalidFamily, "no base rays given");
  if (s.patches.empty()) throw Error(ErrorCode::InvalidSurface, "surface has no patches");
  const SurfaceComplex cx = surface_complex(s);
  const Vector seg = s.segment_end - s.segment_start;
  const double seg_len2 = dot(seg, seg);

  std::vector<double> dist;
  TriangleMesh mesh;
  if (radius) {
    if (!(*radius > 0.0)) throw Error(ErrorCode::InvalidInput, "truncation radius must be positive");
    mesh = surface_mesh(s, mesh_opts);
    dist = geodesic_distances(mesh);
  }

  CurveFamily f;
  f.description = radius ? "lifted rays cut at geodesic radius " + std::to_string(*radius) : "lifted rays";
  f.cell_count = cx.areas.size();
  for (const Vector& b : base_points) {
    if (b.dim() != 2) throw Error(ErrorCode::DimensionError, "base points must be planar");
    const double t = dot(b - s.segment_start, seg) / seg_len2;
    const int j = static_cast<int>(std::lround(t * (s.n_along - 1)));
    const Vector grid = s.segment_start + (static_cast<double>(j) / (s.n_along - 1)) * seg;
    if (j < 0 || j >= s.n_along || distance(grid, b) > 1e-9 * std::max(1.0, std::sqrt(seg_len2))) {
      throw Error(ErrorCode::InvalidFamily, "base point is not a ray origin of the surface");
    }
    Curve curve;
    bool reached = !radius.has_value();
    bool started = false;
    for (std::size_t pi = 0; pi < s.patches.size() && !(radius && reached); ++pi) {
      const Patch& p = s.patches[pi];
      if (p.direction != 1) continue;
      const int c = j - p.col_offset;
      if (c < 0 || c >= p.cols) {
        if (started) break;  // the ray was abandoned
        continue;
      }
      started = true;
      for (int r = 0; r + 1 < p.rows; ++r) {
        double ds = distance(p.vertex(r, c), p.vertex(r + 1, c));
        if (radius) {
          const double da = dist[mesh.patch_vertex_ids[pi][r * p.cols + c]];
          const double db = dist[mesh.patch_vertex_ids[pi][(r + 1) * p.cols + c]];
          if (da >= *radius) {
            reached = true;
            break;
          }
          if (db >= *radius) {
            ds *= (*radius - da) / (db - da);
            reached = true;
          }
        }
        if (ds > 0.0) {
          const std::size_t base = cx.patch_face_offset[pi] + static_cast<std::size_t>(r) * (p.cols - 1);
          const bool left = c > 0, right = c + 1 < p.cols;
          const double share = left && right ? 0.5 * ds : ds;
          if (left) curve.cells.push_back({static_cast<int>(base + c - 1), share});
          if (right) curve.cells.push_back({static_cast<int>(base + c), share});
        }
        if (reached && radius) break;
      }
    }
    if (!started) throw Error(ErrorCode::InvalidFamily, "base point has no lifted ray on the surface");
    if (!reached) throw Error(ErrorCode::OutOfExtent, "a lifted ray ends before the truncation radius");
    if (curve.cells.empty()) throw Error(ErrorCode::InvalidFamily, "truncated ray touches no face");
    f.curves.push_back(std::move(curve));
  }
  return f;
}

// ---------------------------------------------------------------- parabolicity

double parabolic_density(double r, double alpha, double r0) {
  if (r < r0) return 0.0;
  const double knee = std::max(r0, std::numbers::e);
  const double at = r < knee ? r0 : r;
  return alpha / (at * std::log(at));
}

double parabolic_density_integral(double a, double b, double alpha, double r0) {
  if (b <= a) return 0.0;
  const double knee = std::max(r0, std::numbers::e);
  double total = 0.0;
  // Constant part on [r0, knee).
  const double c0 = std::max(a, r0), c1 = std::min(b, knee);
  if (c1 > c0) total += (c1 - c0) * alpha / (r0 * std::log(r0));
  // α/(r ln r) on [knee, ∞): antiderivative α ln ln r.
  const double t0 = std::max(a, knee);
  if (b > t0) total += alpha * (std::log(std::log(b)) - std::log(std::log(t0)));
  return total;
}

double alpha_min(double cutoff, double r0) {
  if (!(r0 > 1.0) || !(cutoff > r0)) throw Error(ErrorCode::InvalidInput, "need 1 < r0 < cutoff");
  return 1.0 / std::log(std::log(cutoff) / std::log(r0));
}

namespace {

void check_parabolicity_inputs(const std::vector<double>& alphas, const std::vector<double>& cutoffs,
                               const ParabolicityOptions& opts) {
  if (cutoffs.empty()) throw Error(ErrorCode::InvalidInput, "no cutoffs given");
  if (alphas.empty() && !opts.include_alpha_min) throw Error(ErrorCode::InvalidInput, "no alphas given");
  if (!(opts.r0 > 1.0)) throw Error(ErrorCode::InvalidInput, "r0 must exceed 1");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw Error(ErrorCode::InvalidInput, "alpha must be positive (alpha = 0 is never admissible)");
    }
  }
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (!(cutoffs[i] > opts.r0)) throw Error(ErrorCode::InvalidInput, "cutoffs must exceed r0");
    if (i > 0 && !(cutoffs[i] > cutoffs[i - 1])) throw Error(ErrorCode::InvalidInput, "cutoffs must increase");
  }
}

std::vector<std::pair<double, bool>> alpha_list(const std::vector<double>& alphas, double cutoff,
                                                const ParabolicityOptions& opts) {
  std::vector<std::pair<double, bool>> out;
  if (opts.include_alpha_min) out.push_back({alpha_min(cutoff, opts.r0), true});
  for (double a : alphas) out.push_back({a, false});
  return out;
}

void finish_table(ParabolicityTable& t, const std::vector<double>& cutoffs, const ParabolicityOptions& opts) {
  for (double R : cutoffs) {
    double best = kInf;
    for (const auto& row : t.rows) {
      if (row.cutoff == R && row.admissible) best = std::min(best, row.m_upper);
    }
    t.best_by_cutoff.push_back(std::isfinite(best) ? best : kNaN);
  }
  bool all_finite = true;
  for (double b : t.best_by_cutoff) all_finite = all_finite && std::isfinite(b);
  t.strictly_decreasing = all_finite && t.best_by_cutoff.size() >= 2;
  for (std::size_t i = 1; t.strictly_decreasing && i < t.best_by_cutoff.size(); ++i) {
    t.strictly_decreasing = t.best_by_cutoff[i] < t.best_by_cutoff[i - 1];
  }
  if (!all_finite) {
    t.verdict = "inconclusive";
  } else if (t.strictly_decreasing && t.best_by_cutoff.back() < opts.threshold) {
    t.verdict = "parabolic-indicated";
  } else if (t.best_by_cutoff.back() >= t.best_by_cutoff.front() && t.best_by_cutoff.back() >= opts.threshold) {
    t.verdict = "hyperbolic-indicated";
  } else {
    t.verdict = "inconclusive";
  }
}

}  // namespace

ParabolicityTable parabolicity_bound(const PolarComplex& complex, const std::vector<double>& alphas,
                                     const std::vector<double>& cutoffs, const ParabolicityOptions& opts) {
  check_parabolicity_inputs(alphas, cutoffs, opts);
  const std::vector<double> areas = complex.areas();
  const auto& e = complex.edges;
  const auto edge_index = [&](double r, const char* what) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (std::abs(e[i] - r) <= 1e-12 * std::max(1.0, r)) return static_cast<int>(i);
    }
    if (r > e.back()) throw Error(ErrorCode::OutOfExtent, std::string(what) + " exceeds the complex");
    throw Error(ErrorCode::InvalidComplex, std::string(what) + " " + std::to_string(r) + " is not a ring edge");
  };
  const int seed_edge = edge_index(opts.seed_radius, "seed radius");

  ParabolicityTable t;
  for (double R : cutoffs) {
    const int cut = edge_index(R, "cutoff");
    for (const auto& [alpha, minimal] : alpha_list(alphas, R, opts)) {
      // Ring values are exact radial averages, so radial ρ-lengths are exact.
      std::vector<double> rho(complex.rings());
      for (int i = 0; i < complex.rings(); ++i) {
        rho[i] = parabolic_density_integral(e[i], e[i + 1], alpha, opts.r0) / (e[i + 1] - e[i]);
      }
      std::vector<double> sector_lengths(complex.sectors, 0.0);
      double mass = 0.0;
      for (int i = 0; i < cut; ++i) {
        for (int s = 0; s < complex.sectors; ++s) {
          mass += rho[i] * rho[i] * areas[complex.index(i, s)];
          if (i >= seed_edge) sector_lengths[s] += rho[i] * (e[i + 1] - e[i]);
        }
      }
      ParabolicityRow row;
      row.alpha = alpha;
      row.alpha_is_minimal = minimal;
      row.cutoff = R;
      row.min_curve_length = *std::min_element(sector_lengths.begin(), sector_lengths.end());
      row.admissible = row.min_curve_length >= 1.0 - 1e-9;
      row.m_upper = row.admissible ? mass : kNaN;
      t.rows.push_back(row);
    }
  }
  finish_table(t, cutoffs, opts);
  return t;
}

ParabolicityTable parabolicity_bound(const StaircaseSurface& s, const std::vector<double>& alphas,
                                     const std::vector<double>& cutoffs, const ParabolicityOptions& opts,
                                     const MeshOptions& mesh_opts) {
  check_parabolicity_inputs(alphas, cutoffs, opts);
  const TriangleMesh mesh = surface_mesh(s, mesh_opts);
  std::vector<int> parent;
  const std::vector<double> dist = geodesic_distances(mesh, &parent);
  std::vector<double> r(dist.size());
  double extent = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (!std::isfinite(dist[i])) throw Error(ErrorCode::InvalidSurface, "surface mesh is disconnected");
    r[i] = opts.seed_radius + dist[i];
    extent = std::max(extent, r[i]);
  }
  if (cutoffs.back() > extent) throw Error(ErrorCode::OutOfExtent, "cutoff exceeds the meshed extent");

  std::vector<double> tri_area(mesh.triangles.size()), tri_r(mesh.triangles.size()), tri_r1(mesh.triangles.size());
  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vector u = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
    const Vector v = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
    tri_area[t] = 0.5 * std::sqrt(std::max(0.0, dot(u, u) * dot(v, v) - dot(u, v) * dot(u, v)));
    tri_r[t] = std::min({r[tri[0]], r[tri[1]], r[tri[2]]});
    tri_r1[t] = std::max({r[tri[0]], r[tri[1]], r[tri[2]]});
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      edge_tris[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(t));
    }
  }

  ParabolicityTable t;
  for (double R : cutoffs) {
    // Radial curves: parent chains of the first vertices past R.
    std::vector<int> ends;
    for (std::size_t v = 0; v < r.size(); ++v) {
      if (r[v] >= R && parent[v] >= 0 && r[parent[v]] < R) ends.push_back(static_cast<int>(v));
    }
    if (ends.empty()) throw Error(ErrorCode::OutOfExtent, "no radial curve reaches the cutoff");
    for (const auto& [alpha, minimal] : alpha_list(alphas, R, opts)) {
      std::vector<double> rho(mesh.triangles.size());
      double mass = 0.0;
      for (std::size_t k = 0; k < rho.size(); ++k) {
        // Supremum of ρ over the triangle's range of r, so every edge is charged at least ρ(r).
        const double a = tri_r[k], b = tri_r1[k];
        rho[k] = b >= opts.r0 ? parabolic_density(std::max(a, opts.r0), alpha, opts.r0) : 0.0;
        if (a <= R) mass += rho[k] * rho[k] * tri_area[k];
      }
      double min_len = kInf;
      for (int v : ends) {
        double len = 0.0;
        int cur = v;
        bool first = true;
        while (parent[cur] >= 0) {
          const int prev = parent[cur];
          double ds = distance(mesh.vertices[cur], mesh.vertices[prev]);
          if (first && r[cur] > r[prev]) ds *= std::min(1.0, (R - r[prev]) / (r[cur] - r[prev]));
          first = false;
          double edge_rho = kInf;
          for (int tri : edge_tris[{std::min(cur, prev), std::max(cur, prev)}]) edge_rho = std::min(edge_rho, rho[tri]);
          if (std::isfinite(edge_rho)) len += edge_rho * ds;
          cur = prev;
        }
        min_len = std::min(min_len, len);
      }
      ParabolicityRow row;
      row.alpha = alpha;
      row.alpha_is_minimal = minimal;
      row.cutoff = R;
      row.min_curve_length = min_len;
      row.admissible = min_len >= 1.0 - 1e-9;
      row.m_upper = row.admissible ? mass : kNaN;
      t.rows.push_back(row);
    }
  }
  finish_table(t, cutoffs, opts);
  return t;
}

}  // namespace confkit
