#include "confkit/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

#include "confkit/parallel.hpp"
#include "confkit/qc.hpp"

namespace confkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadMeasure {
  double k = 1.0;
  double k_f = 1.0;
  double angle = 0.0;
  bool degenerate = false;
};

QuadMeasure measure_quad(const Distribution& d, const Vector& v00, const Vector& v01,
                         const Vector& v10, const Vector& v11) {
  QuadMeasure out;
  const Vector along = 0.5 * ((v01 - v00) + (v11 - v10));
  const Vector up = 0.5 * ((v10 - v00) + (v11 - v01));
  const double la = norm(along), lu = norm(up);
  if (la == 0.0 || lu == 0.0) {
    out.degenerate = true;
    return out;
  }
  const Vector e1 = along / la;
  Vector e2 = up - dot(e1, up) * e1;
  if (norm(e2) <= 1e-9 * lu) {
    out.degenerate = true;
    return out;
  }
  e2 = normalized(e2);
  Vector center = 0.25 * (v00 + v01 + v10 + v11);
  if (!d.in_domain(center)) center = v00;
  const Matrix j = d.projection_jacobian(center);
  const int m = center.dim();
  const SvdResult tangent = svd(j * Matrix::from_columns({e1, e2}, m));
  out.k = tangent.values[1] > 0.0 ? tangent.values[0] / tangent.values[1] : kInf;
  const DistributionFrame frame = d.frame_at(center);
  out.k_f = eccentricity_of(j * Matrix::from_columns(frame.plane, m)).eccentricity;
  out.angle = plane_angle({e1, e2}, frame.plane);
  return out;
}

struct RayResult {
  bool completed = false;
  std::vector<Vector> points;  // n_up points
  Vector failure_image;
};

struct Attempt {
  bool all_completed = true;
  std::vector<RayResult> rays;  // indexed from the active lo column
  Patch patch;
  bool admissible = false;
  Vector worst_image;
};

class Builder {
 public:
  Builder(const Distribution& d, const StaircaseConfig& cfg) : d_(d), cfg_(cfg) {}

  StaircaseSurface run();

 private:
  Vector grid_point(int j) const {
    const double t = static_cast<double>(j) / (cfg_.n_along - 1);
    return cfg_.segment_start + t * (cfg_.segment_end - cfg_.segment_start);
  }

  Attempt attempt(int dir, int lo, int hi, const std::vector<Vector>& bottom, double height, double h) const;
  void sweep(int dir, StaircaseSurface& s);

  const Distribution& d_;
  const StaircaseConfig& cfg_;
  Vector up_;
  double max_step_ = kInf;
};

Attempt Builder::attempt(int dir, int lo, int hi, const std::vector<Vector>& bottom, double height,
                         double h) const {
  Attempt out;
  const int cols = hi - lo + 1;
  out.rays.resize(cols);
  LiftOptions opts = cfg_.lift;
  opts.checkpoints.clear();
  for (int k = 0; k < cfg_.n_up; ++k) opts.checkpoints.push_back(static_cast<double>(k) / (cfg_.n_up - 1));
  const Vector shift = (dir * height) * up_;
  const Vector rise = (dir * h) * up_;

  parallel_for(static_cast<std::size_t>(cols), cfg_.threads, [&](std::size_t c) {
    const int j = lo + static_cast<int>(c);
    const Vector from = grid_point(j) + shift;
    const Path ray = Path::segment(from, from + rise);
    RayResult& r = out.rays[c];
    LiftedPath lift;
    try {
      lift = lift_path(d_, ray, bottom[c], opts);
    } catch (const Error&) {
      r.failure_image = from;
      return;
    }
    if (lift.status != LiftStatus::Completed) {
      r.failure_image = ray.at(lift.t_stop);
      return;
    }
    r.completed = true;
    for (const auto& p : lift.checkpoint_points) r.points.push_back(*p);
  });
  for (const auto& r : out.rays) out.all_completed = out.all_completed && r.completed;
  if (!out.all_completed) return out;

  Patch& p = out.patch;
  p.direction = dir;
  p.h0 = height;
  p.h1 = height + h;
  p.rows = cfg_.n_up;
  p.cols = cols;
  p.col_offset = lo;
  p.vertices.resize(static_cast<std::size_t>(p.rows) * cols);
  p.image.resize(p.vertices.size());
  for (int r = 0; r < p.rows; ++r) {
    const double frac = static_cast<double>(r) / (p.rows - 1);
    for (int c = 0; c < cols; ++c) {
      p.vertices[static_cast<std::size_t>(r) * cols + c] = out.rays[c].points[r];
      p.image[static_cast<std::size_t>(r) * cols + c] = grid_point(lo + c) + shift + frac * rise;
    }
  }
  double worst = -1.0;
  try {
    for (int r = 0; r + 1 < p.rows; ++r) {
      for (int c = 0; c + 1 < cols; ++c) {
        const QuadMeasure q = measure_quad(d_, p.vertex(r, c), p.vertex(r, c + 1), p.vertex(r + 1, c),
                                           p.vertex(r + 1, c + 1));
        if (q.degenerate) {
          ++p.degenerate_quads;
          continue;
        }
        p.k_max = std::max(p.k_max, q.k);
        p.k_f_max = std::max(p.k_f_max, q.k_f);
        p.max_angle = std::max(p.max_angle, q.angle);
        const double badness = std::max(q.k / (cfg_.k_factor * q.k_f), q.angle / cfg_.angle_tol);
        if (badness > worst) {
          worst = badness;
          out.worst_image = p.image_at(r, c);
        }
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularPoint && e.code() != ErrorCode::DomainViolation) throw;
    out.admissible = false;
    return out;
  }
  out.admissible = p.k_max <= cfg_.k_factor * p.k_f_max + 1e-9 && p.max_angle <= cfg_.angle_tol;
  return out;
}

void Builder::sweep(int dir, StaircaseSurface& s) {
  int lo = 0, hi = cfg_.n_along - 1;
  std::vector<Vector> bottom = s.base_lift;
  double height = 0.0;
  double h = cfg_.initial_step > 0.0 ? cfg_.initial_step : cfg_.max_height / 4;
  int step = 0;
  const auto halt = [&](const std::string& status, const std::string& message) {
    if (s.status == "Completed" || status == "StepCollapse") s.status = status;
    if (!s.message.empty()) s.message += "; ";
    s.message += message;
  };

  while (height < cfg_.max_height * (1 - 1e-12)) {
    const double remaining = cfg_.max_height - height;
    double h_try = std::min({h, remaining, max_step_});
    std::optional<Attempt> accepted;
    bool stop = false;
    for (;;) {
      Attempt a = attempt(dir, lo, hi, bottom, height, h_try);
      if (!a.all_completed) {
        if (h_try * 0.5 >= cfg_.min_step) {
          h_try *= 0.5;
          continue;
        }
        // Rays that fail even at the smallest height mark the singular front;
        // continue on the largest contiguous run of good rays.
        int best_lo = -1, best_len = 0, run_lo = -1;
        for (int c = 0; c <= hi - lo + 1; ++c) {
          const bool good = c <= hi - lo && a.rays[c].completed;
          if (!good && c <= hi - lo) s.singular_front.push_back(a.rays[c].failure_image);
          if (good && run_lo < 0) run_lo = c;
          if (!good && run_lo >= 0) {
            if (c - run_lo > best_len) {
              best_len = c - run_lo;
              best_lo = run_lo;
            }
            run_lo = -1;
          }
        }
        halt("SingularFront", "rays abandoned at height " + std::to_string(dir * height));
        if (best_len < 2) {
          stop = true;
          break;
        }
        bottom = std::vector<Vector>(bottom.begin() + best_lo, bottom.begin() + best_lo + best_len);
        lo += best_lo;
        hi = lo + best_len - 1;
        h_try = std::min({h, remaining, max_step_});
        continue;
      }
      if (a.admissible) {
        accepted = std::move(a);
        const double doubled = 2 * h_try;
        if (doubled <= remaining * (1 + 1e-12) && doubled <= max_step_) {
          Attempt b = attempt(dir, lo, hi, bottom, height, std::min(doubled, remaining));
          if (b.all_completed && b.admissible) accepted = std::move(b);
        }
        break;
      }
      if (h_try * 0.5 < cfg_.min_step) {
        if (s.patches.empty() && dir > 0) {
          throw Error(ErrorCode::StepCollapse, "no admissible first step near (" +
                                                   std::to_string(a.worst_image[0]) + ", " +
                                                   std::to_string(a.worst_image[1]) + ")");
        }
        halt("StepCollapse", "no admissible step near (" + std::to_string(a.worst_image[0]) + ", " +
                                 std::to_string(a.worst_image[1]) + ")");
        stop = true;
        break;
      }
      h_try *= 0.5;
    }
    if (stop || !accepted) break;

    Patch p = std::move(accepted->patch);
    p.step = step++;
    const double used = p.h1 - p.h0;
    height = p.h1;
    h = used;
    if (dir > 0) {
      const std::size_t first = s.railing.empty() ? 0 : 1;
      for (int r = static_cast<int>(first); r < p.rows; ++r) s.railing.push_back(p.vertex(r, 0));
    }
    s.heights.push_back(dir * height);
    const int top = p.rows - 1;
    const Vector from = p.image_at(top, 0), to = p.image_at(top, p.cols - 1);
    const Vector rail_top = p.vertex(top, 0);
    s.patches.push_back(std::move(p));
    if (height >= cfg_.max_height * (1 - 1e-12)) break;

    // Next bottom row: lift of the horizontal segment at the new height.
    LiftOptions opts = cfg_.lift;
    opts.checkpoints.clear();
    for (int c = 0; c <= hi - lo; ++c) opts.checkpoints.push_back(static_cast<double>(c) / (hi - lo));
    LiftedPath row;
    try {
      row = lift_path(d_, Path::segment(from, to), rail_top, opts);
    } catch (const Error& e) {
      halt("SingularFront", std::string("horizontal lift failed: ") + e.what());
      break;
    }
    if (row.status != LiftStatus::Completed) {
      s.singular_front.push_back(from + row.t_stop * (to - from));
      halt("SingularFront", "horizontal lift stopped (" + std::string(to_string(row.status)) + ")");
      break;
    }
    bottom.clear();
    for (const auto& q : row.checkpoint_points) bottom.push_back(*q);
  }
  (dir > 0 ? s.h_infinity_up : s.h_infinity_down) = height;
}

StaircaseSurface Builder::run() {
  if (d_.base_dim() != 2) throw Error(ErrorCode::DimensionError, "staircases need a 2-dimensional base");
  if (cfg_.segment_start.dim() != 2 || cfg_.segment_end.dim() != 2 || cfg_.up.dim() != 2) {
    throw Error(ErrorCode::DimensionError, "segment and up direction must be planar");
  }
  if (cfg_.start_lift.dim() != d_.source_dim()) {
    throw Error(ErrorCode::DimensionError, "start point has the wrong dimension");
  }
  if (cfg_.n_along < 2 || cfg_.n_up < 2) throw Error(ErrorCode::InvalidInput, "grid counts must be >= 2");
  if (!(cfg_.k_factor > 1.0)) throw Error(ErrorCode::InvalidInput, "K factor must exceed 1");
  if (!(cfg_.max_height > 0.0) || !(cfg_.min_step > 0.0) || !(cfg_.angle_tol > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "heights and tolerances must be positive");
  }
  if (distance(cfg_.segment_start, cfg_.segment_end) == 0.0) {
    throw Error(ErrorCode::InvalidInput, "base segment has zero length");
  }
  up_ = normalized(cfg_.up);
  if (cfg_.max_step > 0.0) max_step_ = cfg_.max_step;

  StaircaseSurface s;
  s.map_name = d_.name();
  s.source_dim = d_.source_dim();
  s.segment_start = cfg_.segment_start;
  s.segment_end = cfg_.segment_end;
  s.up = up_;
  s.n_along = cfg_.n_along;

  LiftOptions opts = cfg_.lift;
  opts.checkpoints.clear();
  for (int j = 0; j < cfg_.n_along; ++j) opts.checkpoints.push_back(static_cast<double>(j) / (cfg_.n_along - 1));
  const LiftedPath base = lift_path(d_, Path::segment(cfg_.segment_start, cfg_.segment_end), cfg_.start_lift, opts);
  if (base.status != LiftStatus::Completed) {
    throw Error(ErrorCode::BadStart, "lift of the base segment stopped: " + std::string(to_string(base.status)));
  }
  for (const auto& p : base.checkpoint_points) s.base_lift.push_back(*p);

  s.heights.push_back(0.0);
  sweep(+1, s);
  if (cfg_.bidirectional) sweep(-1, s);
  std::sort(s.heights.begin(), s.heights.end());
  return s;
}

}  // namespace

StaircaseSurface build_staircase(const Distribution& d, const StaircaseConfig& cfg) {
  return Builder(d, cfg).run();
}

std::vector<QuadEccentricity> restriction_eccentricity(const Distribution& d, const StaircaseSurface& s) {
  std::vector<QuadEccentricity> out;
  for (std::size_t i = 0; i < s.patches.size(); ++i) {
    const Patch& p = s.patches[i];
    for (int r = 0; r + 1 < p.rows; ++r) {
      for (int c = 0; c + 1 < p.cols; ++c) {
        QuadEccentricity q{i, r, c, kInf, 0.0, false};
        try {
          const QuadMeasure m = measure_quad(d, p.vertex(r, c), p.vertex(r, c + 1), p.vertex(r + 1, c),
                                             p.vertex(r + 1, c + 1));
          q.k = m.k;
          q.angle = m.angle;
          q.degenerate = m.degenerate;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::SingularPoint && e.code() != ErrorCode::DomainViolation) throw;
          q.degenerate = true;
        }
        out.push_back(q);
      }
    }
  }
  return out;
}

std::vector<double> patch_eccentricity(const std::vector<QuadEccentricity>& quads, std::size_t patch_count) {
  std::vector<double> out(patch_count, 0.0);
  for (const auto& q : quads) {
    if (!q.degenerate && q.patch < patch_count) out[q.patch] = std::max(out[q.patch], q.k);
  }
  return out;
}

double continuation_discrepancy(const Distribution& d, const StaircaseConfig& cfg, double a0, double a1,
                                double b0, double b1) {
  if (!(0.0 <= a0 && a0 < a1 && a1 <= 1.0 && 0.0 <= b0 && b0 < b1 && b1 <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "sub-segments must be ordered parameter ranges in [0,1]");
  }
  const double lo = std::max(a0, b0), hi = std::min(a1, b1);
  if (!(lo < hi)) throw Error(ErrorCode::InvalidInput, "sub-segments do not overlap");

  // Starts: the lift of the full segment at the sub-segment left ends.
  LiftOptions opts = cfg.lift;
  opts.checkpoints = {a0, b0};
  const LiftedPath base = lift_path(d, Path::segment(cfg.segment_start, cfg.segment_end), cfg.start_lift, opts);
  if (base.status != LiftStatus::Completed) throw Error(ErrorCode::BadStart, "base lift failed");

  // Both sub-grids share the full grid's spacing so overlap columns coincide.
  const double spacing = 1.0 / (cfg.n_along - 1);
  const auto sub_config = [&](double t0, double t1, const Vector& start) {
    StaircaseConfig c = cfg;
    const Vector dir = cfg.segment_end - cfg.segment_start;
    c.segment_start = cfg.segment_start + t0 * dir;
    c.segment_end = cfg.segment_start + t1 * dir;
    c.start_lift = start;
    c.n_along = std::max(2, static_cast<int>(std::lround((t1 - t0) / spacing)) + 1);
    c.bidirectional = false;
    return c;
  };
  const StaircaseSurface sa = build_staircase(d, sub_config(a0, a1, *base.checkpoint_points[0]));
  const StaircaseSurface sb = build_staircase(d, sub_config(b0, b1, *base.checkpoint_points[1]));
  if (sa.patches.empty() || sb.patches.empty()) {
    throw Error(ErrorCode::StepCollapse, "a continuation produced no step");
  }
  const Patch& pa = sa.patches.front();
  const Patch& pb = sb.patches.front();
  double worst = 0.0;
  std::size_t matched = 0;
  for (int r = 0; r < pa.rows; ++r) {
    for (int c = 0; c < pa.cols; ++c) {
      for (int r2 = 0; r2 < pb.rows; ++r2) {
        for (int c2 = 0; c2 < pb.cols; ++c2) {
          if (distance(pa.image_at(r, c), pb.image_at(r2, c2)) > 1e-9) continue;
          worst = std::max(worst, distance(pa.vertex(r, c), pb.vertex(r2, c2)));
          ++matched;
        }
      }
    }
  }
  if (matched == 0) throw Error(ErrorCode::InvalidInput, "continuations share no vertex");
  return worst;
}

// ---------------------------------------------------------------- meshes

namespace {

struct CellKey {
  std::vector<long long> c;
  bool operator==(const CellKey& o) const { return c == o.c; }
};
struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (long long v : k.c) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

class VertexPool {
 public:
  VertexPool(double tol) : tol_(tol), cell_(std::max(tol, 1e-300) * 4) {}

  int find(const Vector& x) const {
    const CellKey base = key(x);
    int found = -1;
    visit(base, 0, CellKey{base.c}, [&](const CellKey& k) {
      auto it = cells_.find(k);
      if (it == cells_.end()) return;
      for (int id : it->second) {
        if (distance(points_[id], x) <= tol_ && (found < 0 || id < found)) found = id;
      }
    });
    return found;
  }

  int insert(const Vector& x) {
    const int existing = find(x);
    if (existing >= 0) return existing;
    const int id = static_cast<int>(points_.size());
    points_.push_back(x);
    cells_[key(x)].push_back(id);
    return id;
  }

  std::vector<Vector> take() { return std::move(points_); }

 private:
  CellKey key(const Vector& x) const {
    CellKey k;
    for (double v : x) k.c.push_back(static_cast<long long>(std::floor(v / cell_)));
    return k;
  }
  template <class F>
  void visit(const CellKey& base, std::size_t dim, CellKey current, F&& f) const {
    if (dim == base.c.size()) {
      f(current);
      return;
    }
    for (long long off = -1; off <= 1; ++off) {
      current.c[dim] = base.c[dim] + off;
      visit(base, dim + 1, current, f);
    }
  }

  double tol_, cell_;
  std::vector<Vector> points_;
  std::unordered_map<CellKey, std::vector<int>, CellHash> cells_;
};

}  // namespace

TriangleMesh surface_mesh(const StaircaseSurface& s, const MeshOptions& opts) {
  if (s.patches.empty()) throw Error(ErrorCode::InvalidSurface, "surface has no patches");
  VertexPool pool(opts.merge_tol);
  TriangleMesh mesh;
  for (const Patch& p : s.patches) {
    std::vector<int> ids(p.vertices.size());
    for (std::size_t i = 0; i < p.vertices.size(); ++i) ids[i] = pool.insert(p.vertices[i]);
    mesh.patch_vertex_ids.push_back(ids);
    for (int r = 0; r + 1 < p.rows; ++r) {
      for (int c = 0; c + 1 < p.cols; ++c) {
        const int a = ids[r * p.cols + c], b = ids[r * p.cols + c + 1];
        const int e = ids[(r + 1) * p.cols + c], f = ids[(r + 1) * p.cols + c + 1];
        if (a != b && b != f && a != f) mesh.triangles.push_back({a, b, f});
        if (a != f && f != e && a != e) mesh.triangles.push_back({a, f, e});
      }
    }
  }
  // Seeds: vertices of the lifted base segment inside the window.
  double arc = 0.0;
  for (std::size_t j = 0; j < s.base_lift.size(); ++j) {
    if (j > 0) arc += distance(s.base_lift[j - 1], s.base_lift[j]);
    if (opts.seed_window) {
      const auto [w0, w1] = *opts.seed_window;
      if (arc < w0 - 1e-9 || arc > w1 + 1e-9) continue;
    }
    const int id = pool.find(s.base_lift[j]);
    if (id >= 0) mesh.seeds.push_back(id);
  }
  mesh.vertices = pool.take();
  std::sort(mesh.seeds.begin(), mesh.seeds.end());
  mesh.seeds.erase(std::unique(mesh.seeds.begin(), mesh.seeds.end()), mesh.seeds.end());
  if (mesh.seeds.empty()) throw Error(ErrorCode::InvalidSurface, "no mesh vertex lies in the seed window");
  return mesh;
}

namespace {

// Distance at c from a planar front known at a and b, or +inf when the front
// does not reach c through the edge ab.
double planar_update(const Vector& a, double da, const Vector& b, double db, const Vector& c) {
  const Vector ab = b - a, ac = c - a;
  const double len = norm(ab);
  if (len == 0.0) return kInf;
  const double cx = dot(ac, ab) / len;
  const double cy2 = dot(ac, ac) - cx * cx;
  if (cy2 <= 0.0) return kInf;
  const double cy = std::sqrt(cy2);
  // Virtual point source at distances da, db from a and b, on the far side of ab.
  const double sx = (da * da - db * db + len * len) / (2 * len);
  const double sy2 = da * da - sx * sx;
  if (sy2 < 0.0) return kInf;
  const double sy = -std::sqrt(sy2);
  const double cross_x = sx + (cx - sx) * (-sy) / (cy - sy);
  if (cross_x < 0.0 || cross_x > len) return kInf;
  const double dc = std::hypot(cx - sx, cy - sy);
  return dc >= std::max(da, db) ? dc : kInf;
}

}  // namespace

std::vector<double> geodesic_distances(const TriangleMesh& mesh, std::vector<int>* parents) {
  const std::size_t n = mesh.vertices.size();
  std::vector<std::vector<int>> incident(n);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int v : mesh.triangles[t]) incident[v].push_back(static_cast<int>(t));
  }
  std::vector<double> dist(n, kInf);
  std::vector<char> done(n, 0);
  if (parents) parents->assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int s : mesh.seeds) {
    dist[s] = 0.0;
    heap.push({0.0, s});
  }
  while (!heap.empty()) {
    const auto [dv, v] = heap.top();
    heap.pop();
    if (done[v] || dv > dist[v]) continue;
    done[v] = 1;
    for (int t : incident[v]) {
      const auto& tri = mesh.triangles[t];
      for (int w : tri) {
        if (w == v || done[w]) continue;
        double best = dv + distance(mesh.vertices[v], mesh.vertices[w]);
        for (int u : tri) {
          if (u == v || u == w || !done[u]) continue;
          best = std::min(best, planar_update(mesh.vertices[v], dv, mesh.vertices[u], dist[u], mesh.vertices[w]));
        }
        if (best < dist[w]) {
          dist[w] = best;
          if (parents) (*parents)[w] = v;
          heap.push({best, w});
        }
      }
    }
  }
  return dist;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw Error(ErrorCode::InvalidInput, "slope fit needs at least two points");
  std::size_t first = n / 2;
  if (n - first < 2) first = n - 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = first; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorCode::InvalidInput, "slope fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) throw Error(ErrorCode::InvalidInput, "slope fit needs distinct radii");
  return (k * sxy - sx * sy) / denom;
}

GrowthProfile growth_profile(const TriangleMesh& mesh, std::vector<double> radii) {
  if (radii.empty()) throw Error(ErrorCode::InvalidInput, "no radii given");
  std::sort(radii.begin(), radii.end());
  if (!(radii.front() > 0.0)) throw Error(ErrorCode::InvalidInput, "radii must be positive");
  const std::vector<double> dist = geodesic_distances(mesh);
  GrowthProfile g;
  for (double d : dist) {
    if (!std::isfinite(d)) throw Error(ErrorCode::InvalidSurface, "surface mesh is disconnected");
    g.extent = std::max(g.extent, d);
  }
  if (radii.back() > g.extent) {
    throw Error(ErrorCode::OutOfExtent, "radius " + std::to_string(radii.back()) +
                                            " exceeds the meshed extent " + std::to_string(g.extent));
  }

  // Boundary: vertices on edges used by a single triangle.
  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++edge_use[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::vector<char> is_seed(mesh.vertices.size(), 0);
  for (int s : mesh.seeds) is_seed[s] = 1;
  g.complete_radius = kInf;
  for (const auto& [e, uses] : edge_use) {
    if (uses != 1) continue;
    for (int v : {e.first, e.second}) {
      if (!is_seed[v]) g.complete_radius = std::min(g.complete_radius, dist[v]);
    }
  }
  if (!std::isfinite(g.complete_radius)) g.complete_radius = g.extent;

  g.radii = radii;
  g.areas.assign(radii.size(), 0.0);
  g.lengths.assign(radii.size(), 0.0);
  for (const auto& t : mesh.triangles) {
    std::array<int, 3> v = t;
    std::sort(v.begin(), v.end(), [&](int a, int b) { return dist[a] < dist[b]; });
    const double d0 = dist[v[0]], d1 = dist[v[1]], d2 = dist[v[2]];
    const Vector& p0 = mesh.vertices[v[0]];
    const Vector& p1 = mesh.vertices[v[1]];
    const Vector& p2 = mesh.vertices[v[2]];
    const Vector e1 = p1 - p0, e2 = p2 - p0;
    const double area = 0.5 * std::sqrt(std::max(0.0, dot(e1, e1) * dot(e2, e2) - dot(e1, e2) * dot(e1, e2)));
    const auto point_on = [](const Vector& a, double da, const Vector& b, double db, double r) {
      return a + ((r - da) / (db - da)) * (b - a);
    };
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double r = radii[i];
      if (r <= d0) continue;
      if (r >= d2) {
        g.areas[i] += area;
        continue;
      }
      if (r <= d1) {
        g.areas[i] += area * ((r - d0) / (d1 - d0)) * ((r - d0) / (d2 - d0));
        g.lengths[i] += distance(point_on(p0, d0, p1, d1, r), point_on(p0, d0, p2, d2, r));
      } else {
        g.areas[i] += area * (1.0 - ((d2 - r) / (d2 - d0)) * ((d2 - r) / (d2 - d1)));
        g.lengths[i] += distance(point_on(p0, d0, p2, d2, r), point_on(p1, d1, p2, d2, r));
      }
    }
  }
  if (radii.size() >= 2) {
    g.area_exponent = loglog_slope(g.radii, g.areas);
    g.length_exponent = loglog_slope(g.radii, g.lengths);
    double integral = 0.0;
    for (std::size_t i = 1; i < radii.size(); ++i) {
      integral += 0.5 * (g.lengths[i] + g.lengths[i - 1]) * (radii[i] - radii[i - 1]);
    }
    const double gained = g.areas.back() - g.areas.front();
    g.coarea_mismatch = gained > 0.0 ? std::abs(integral - gained) / gained : 0.0;
  }
  return g;
}

GrowthProfile growth_profile(const StaircaseSurface& s, std::vector<double> radii, const MeshOptions& opts) {
  return growth_profile(surface_mesh(s, opts), std::move(radii));
}

}  // namespace confkit
