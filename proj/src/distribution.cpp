#include "confkit/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <sstream>

namespace confkit {

CoframeField CoframeField::flat() {
  return {"flat", [](const Vector&) { return Vector{0.0, 0.0, 1.0}; }};
}

CoframeField CoframeField::contact(double eps) {
  if (!std::isfinite(eps)) throw Error(ErrorCode::InvalidInput, "contact parameter must be finite");
  std::ostringstream name;
  name << "contact:" << format_shortest(eps);
  return {name.str(), [eps](const Vector& x) { return Vector{0.0, eps * x[0], 1.0}; }};
}

CoframeField parse_coframe(const std::string& spec) {
  if (spec == "flat") return CoframeField::flat();
  if (spec == "contact") return CoframeField::contact(0.1);
  if (spec.rfind("contact:", 0) == 0) {
    const auto values = parse_number_list(spec.substr(8));
    if (values.size() != 1) throw Error(ErrorCode::InvalidInput, "contact coframe takes one parameter");
    return CoframeField::contact(values[0]);
  }
  throw Error(ErrorCode::NotFound, "unknown coframe '" + spec + "' (expected flat or contact:eps)");
}

Distribution Distribution::from_map(MapSpec f) {
  if (f.source_dim() < f.target_dim()) {
    throw Error(ErrorCode::DimensionError, "a distribution needs m >= n");
  }
  Distribution d;
  d.name_ = f.name();
  d.map_ = std::move(f);
  return d;
}

Distribution Distribution::from_coframe(CoframeField omega) {
  if (!omega.omega) throw Error(ErrorCode::InvalidInput, "coframe has no 1-form");
  Distribution d;
  d.name_ = omega.name;
  d.coframe_ = std::move(omega);
  return d;
}

int Distribution::source_dim() const { return map_ ? map_->source_dim() : 3; }
int Distribution::base_dim() const { return map_ ? map_->target_dim() : 2; }

bool Distribution::in_domain(const Vector& x) const {
  if (map_) return map_->in_domain(x);
  return x.dim() == 3 && x.all_finite();
}

Vector Distribution::project(const Vector& x) const {
  if (map_) return (*map_)(x);
  if (x.dim() != 3) throw Error(ErrorCode::DimensionError, "coframe distributions live in R^3");
  return Vector{x[0], x[1]};
}

Vector Distribution::base_difference(const Vector& a, const Vector& b) const {
  return map_ ? map_->image_difference(a, b) : a - b;
}

namespace {

Vector coframe_at(const CoframeField& c, const Vector& x) {
  if (x.dim() != 3) throw Error(ErrorCode::DimensionError, "coframe distributions live in R^3");
  Vector w = c.omega(x);
  if (w.dim() != 3 || !w.all_finite()) throw Error(ErrorCode::InvalidInput, "coframe value is not a finite 3-vector");
  return w;
}

}  // namespace

DistributionFrame Distribution::frame_at(const Vector& x) const {
  DistributionFrame out;
  out.point = x;
  if (map_) {
    const int m = map_->source_dim(), n = map_->target_dim();
    const SvdResult s = svd(map_->jacobian(x));
    if (!(s.values[0] > 0.0) || s.values[n - 1] <= 1e-9 * s.values[0]) {
      throw Error(ErrorCode::SingularPoint, map_->name() + " has rank < " + std::to_string(n) + " here");
    }
    for (int j = 0; j < m; ++j) (j < n ? out.plane : out.fiber).push_back(s.right.col(j));
    return out;
  }
  Vector w = coframe_at(*coframe_, x);
  if (norm(w) == 0.0) throw Error(ErrorCode::SingularPoint, "coframe vanishes here");
  w = normalized(w);
  canonicalize_sign(w);
  out.fiber = {w};
  out.plane = orthonormal_complement(out.fiber, 3);
  return out;
}

Matrix Distribution::projection_jacobian(const Vector& x) const {
  if (map_) return map_->jacobian(x);
  if (x.dim() != 3) throw Error(ErrorCode::DimensionError, "coframe distributions live in R^3");
  return Matrix(2, 3, {1, 0, 0, 0, 1, 0});
}

Vector Distribution::lift_vector(const Vector& x, const Vector& v) const {
  if (v.dim() != base_dim()) throw Error(ErrorCode::DimensionError, "base vector has wrong dimension");
  if (map_) {
    // Minimum-norm preimage Jᵀ(JJᵀ)⁻¹v, which lies in (ker J)^⊥.
    const Matrix j = map_->jacobian(x);
    const Matrix jt = j.transposed();
    return jt * solve(j * jt, v);
  }
  const Vector w = coframe_at(*coframe_, x);
  if (std::abs(w[2]) <= 1e-12 * norm(w)) {
    throw Error(ErrorCode::SingularPoint, "coframe plane contains the vertical direction");
  }
  return Vector{v[0], v[1], -(w[0] * v[0] + w[1] * v[1]) / w[2]};
}

Vector Distribution::unit_normal(const Vector& x) const {
  if (source_dim() != 3 || base_dim() != 2) {
    throw Error(ErrorCode::Unsupported, "plane normals are only defined for m = 3, n = 2");
  }
  if (coframe_) {
    const Vector w = coframe_at(*coframe_, x);
    if (norm(w) == 0.0) throw Error(ErrorCode::SingularPoint, "coframe vanishes here");
    return normalized(w);
  }
  const Matrix j = map_->jacobian(x);
  const Vector r1 = j.row(0), r2 = j.row(1);
  const Vector c = cross(r1, r2);
  if (norm(c) <= 1e-9 * norm(r1) * norm(r2) || norm(c) == 0.0) {
    throw Error(ErrorCode::SingularPoint, map_->name() + " has rank < 2 here");
  }
  return normalized(c);
}

double frobenius_residual(const Distribution& d, const Vector& x) {
  if (d.source_dim() != 3 || d.base_dim() != 2) {
    throw Error(ErrorCode::Unsupported, "integrability test needs m = 3, n = 2");
  }
  if (!d.in_domain(x)) throw Error(ErrorCode::DomainViolation, "point outside the domain of " + d.name());
  const double h = default_fd_step(x);
  Matrix grad(3, 3);  // grad(i, k) = ∂u_i/∂x_k
  for (int k = 0; k < 3; ++k) {
    Vector plus = x, minus = x;
    plus[k] += h;
    minus[k] -= h;
    if (!d.in_domain(plus) || !d.in_domain(minus)) {
      throw Error(ErrorCode::DomainViolation, "difference stencil leaves the domain of " + d.name());
    }
    const Vector dp = (d.unit_normal(plus) - d.unit_normal(minus)) / (2 * h);
    for (int i = 0; i < 3; ++i) grad(i, k) = dp[i];
  }
  const Vector u = d.unit_normal(x);
  const Vector curl{grad(2, 1) - grad(1, 2), grad(0, 2) - grad(2, 0), grad(1, 0) - grad(0, 1)};
  return std::abs(dot(u, curl));
}

// ---------------------------------------------------------------- Path

Vector Path::Piece::at(double s) const {
  if (!arc) return a + s * (b - a);
  const double ang = angle0 + sweep * s;
  Vector p = center;
  p[0] += radius * std::cos(ang);
  p[1] += radius * std::sin(ang);
  return p;
}

Vector Path::Piece::velocity(double s) const {
  if (!arc) return b - a;
  const double ang = angle0 + sweep * s;
  Vector v(center.dim());
  v[0] = -radius * sweep * std::sin(ang);
  v[1] = radius * sweep * std::cos(ang);
  return v;
}

Path::Piece Path::Piece::reversed() const {
  Piece r = *this;
  if (!arc) {
    std::swap(r.a, r.b);
  } else {
    r.angle0 = angle0 + sweep;
    r.sweep = -sweep;
  }
  return r;
}

void Path::finish() {
  if (pieces_.empty()) throw Error(ErrorCode::InvalidInput, "path has no pieces of positive length");
  total_length_ = 0.0;
  for (const auto& p : pieces_) total_length_ += p.length;
  t_start_.clear();
  double acc = 0.0;
  for (const auto& p : pieces_) {
    t_start_.push_back(acc / total_length_);
    acc += p.length;
  }
}

Path Path::segment(const Vector& a, const Vector& b) { return polyline({a, b}); }

Path Path::polyline(const std::vector<Vector>& points) {
  if (points.size() < 2) throw Error(ErrorCode::InvalidInput, "a polyline needs at least two points");
  Path path;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i].dim() != points[0].dim() || points[i + 1].dim() != points[0].dim()) {
      throw Error(ErrorCode::DimensionError, "polyline points differ in dimension");
    }
    if (!points[i].all_finite() || !points[i + 1].all_finite()) {
      throw Error(ErrorCode::InvalidInput, "polyline points must be finite");
    }
    Piece p;
    p.a = points[i];
    p.b = points[i + 1];
    p.length = distance(p.a, p.b);
    if (p.length > 0.0) path.pieces_.push_back(std::move(p));
  }
  path.finish();
  return path;
}

Path Path::circle(const Vector& center, double radius) {
  if (center.dim() < 2 || !(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidInput, "circle needs a planar center and a positive radius");
  }
  Path path;
  Piece p;
  p.arc = true;
  p.center = center;
  p.radius = radius;
  p.sweep = 2 * std::numbers::pi;
  p.length = radius * p.sweep;
  path.pieces_.push_back(std::move(p));
  path.finish();
  return path;
}

Path Path::rectangle(double x0, double y0, double x1, double y1) {
  if (!(x1 > x0 && y1 > y0)) throw Error(ErrorCode::InvalidInput, "rectangle needs x0 < x1 and y0 < y1");
  return polyline({Vector{x0, y0}, Vector{x1, y0}, Vector{x1, y1}, Vector{x0, y1}, Vector{x0, y0}});
}

std::pair<std::size_t, double> Path::locate(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  std::size_t i = std::upper_bound(t_start_.begin(), t_start_.end(), t) - t_start_.begin();
  i = i == 0 ? 0 : i - 1;
  const double span = pieces_[i].length / total_length_;
  return {i, (t - t_start_[i]) / span};
}

Vector Path::at(double t) const {
  if (t >= 1.0) return pieces_.back().at(1.0);
  const auto [i, s] = locate(t);
  return pieces_[i].at(s);
}

Vector Path::derivative_on(std::size_t piece, double t) const {
  const Piece& p = pieces_.at(piece);
  const double span = p.length / total_length_;
  return p.velocity((t - t_start_[piece]) / span) / span;
}

Vector Path::derivative(double t) const { return derivative_on(locate(t).first, t); }

std::vector<double> Path::breakpoints() const {
  std::vector<double> out = t_start_;
  out.push_back(1.0);
  return out;
}

int Path::dim() const { return pieces_.front().arc ? pieces_.front().center.dim() : pieces_.front().a.dim(); }

bool Path::closed(double tol) const { return distance(at(0.0), at(1.0)) <= tol; }

Path Path::reversed() const {
  Path r;
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) r.pieces_.push_back(it->reversed());
  r.finish();
  return r;
}

Path Path::then(const Path& next) const {
  if (next.dim() != dim()) throw Error(ErrorCode::DimensionError, "cannot join paths of different dimension");
  Path r = *this;
  r.pieces_.insert(r.pieces_.end(), next.pieces_.begin(), next.pieces_.end());
  r.finish();
  return r;
}

// ---------------------------------------------------------------- lifting

std::string_view to_string(LiftStatus s) {
  switch (s) {
    case LiftStatus::Completed: return "Completed";
    case LiftStatus::Escaped: return "Escaped";
    case LiftStatus::HitSingular: return "HitSingular";
    case LiftStatus::StepCollapse: return "StepCollapse";
  }
  return "Unknown";
}

LiftedPath lift_path(const Distribution& d, const Path& base, const Vector& start,
                     const LiftOptions& opts) {
  if (base.dim() != d.base_dim() || start.dim() != d.source_dim()) {
    throw Error(ErrorCode::DimensionError, "path or start point has the wrong dimension");
  }
  if (!(opts.step > 0.0) || !(opts.min_step > 0.0) || !(opts.lift_tol > 0.0) || !(opts.r_max > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "lift options must be positive");
  }
  if (!d.in_domain(start)) throw Error(ErrorCode::BadStart, "start point outside the domain of " + d.name());
  const double start_err = norm(d.base_difference(d.project(start), base.at(0.0)));
  if (!(start_err <= opts.lift_tol)) {
    throw Error(ErrorCode::BadStart, "start point does not project to the path start (gap " +
                                         std::to_string(start_err) + ")");
  }

  std::vector<double> stops = base.breakpoints();
  for (double c : opts.checkpoints) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::InvalidInput, "checkpoints must lie in [0,1]");
    stops.push_back(c);
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  LiftedPath out;
  out.checkpoint_points.resize(opts.checkpoints.size());
  out.max_error = start_err;
  const auto record_checkpoints = [&](double t, const Vector& x) {
    for (std::size_t i = 0; i < opts.checkpoints.size(); ++i) {
      if (opts.checkpoints[i] == t) out.checkpoint_points[i] = x;
    }
  };

  double t = 0.0;
  Vector x = start;
  out.samples.push_back({t, x});
  record_checkpoints(t, x);
  double dt = opts.step;
  int streak = 0;
  std::size_t steps = 0;

  for (double stop : stops) {
    while (t < stop) {
      if (++steps > opts.max_steps) {
        out.status = LiftStatus::StepCollapse;
        out.t_stop = t;
        out.message = "step budget exhausted";
        return out;
      }
      double h = std::min(dt, stop - t);
      if (stop - (t + h) < 1e-14) h = stop - t;
      const double t1 = (t + h >= stop) ? stop : t + h;
      const std::size_t piece = base.piece_at(0.5 * (t + t1));
      bool ok = false;
      bool singular = false;
      Vector y;
      double drift = 0.0, err = 0.0;
      try {
        const OdeRhs rhs = [&](double s, const Vector& p) {
          return d.lift_vector(p, base.derivative_on(piece, s));
        };
        y = rk4_step(rhs, t, x, t1 - t);
        const Vector target = base.at(t1);
        drift = norm(d.base_difference(d.project(y), target));
        const double advance = norm(d.base_difference(target, base.at(t)));
        if (drift <= 1e-2 * advance + opts.lift_tol) {
          // Newton correction inside the plane.
          for (int it = 0; it < 8; ++it) {
            const Vector r = d.base_difference(target, d.project(y));
            err = norm(r);
            if (err <= 1e-3 * opts.lift_tol) break;
            y += d.lift_vector(y, r);
          }
          err = norm(d.base_difference(d.project(y), target));
          ok = err <= opts.lift_tol && y.all_finite();
        }
      } catch (const Error& e) {
        singular = e.code() == ErrorCode::SingularPoint || e.code() == ErrorCode::DomainViolation;
        ok = false;
        out.message = e.what();
      }
      if (!ok) {
        dt = 0.5 * (t1 - t);
        streak = 0;
        if (dt < opts.min_step) {
          out.status = singular ? LiftStatus::HitSingular : LiftStatus::StepCollapse;
          out.t_stop = t;
          if (out.message.empty()) out.message = "step size underflow";
          return out;
        }
        continue;
      }
      const double prev_norm = norm(x);
      t = t1;
      x = std::move(y);
      out.message.clear();
      out.samples.push_back({t, x});
      out.max_error = std::max(out.max_error, err);
      out.max_drift = std::max(out.max_drift, drift);
      const double now_norm = norm(x);
      if (now_norm > opts.r_max) {
        const double prev_t = out.samples[out.samples.size() - 2].t;
        const double frac = (opts.r_max - prev_norm) / (now_norm - prev_norm);
        out.status = LiftStatus::Escaped;
        out.t_stop = prev_t + std::clamp(frac, 0.0, 1.0) * (t - prev_t);
        return out;
      }
      if (++streak >= 4 && dt < opts.step) {
        dt = std::min(2 * dt, opts.step);
        streak = 0;
      }
    }
    record_checkpoints(stop, x);
  }
  out.status = LiftStatus::Completed;
  out.t_stop = 1.0;
  return out;
}

Vector holonomy_defect(const Distribution& d, const Path& loop, const Vector& start,
                       const LiftOptions& opts) {
  if (!loop.closed(1e-12)) throw Error(ErrorCode::InvalidInput, "holonomy needs a closed loop");
  const LiftedPath lift = lift_path(d, loop, start, opts);
  switch (lift.status) {
    case LiftStatus::Completed: break;
    case LiftStatus::Escaped:
      throw Error(ErrorCode::DomainViolation, "lift escaped to infinity at t = " + std::to_string(lift.t_stop));
    case LiftStatus::HitSingular:
      throw Error(ErrorCode::SingularPoint, "lift hit a singular point at t = " + std::to_string(lift.t_stop));
    case LiftStatus::StepCollapse:
      throw Error(ErrorCode::StepCollapse, "lift step collapsed at t = " + std::to_string(lift.t_stop));
  }
  return lift.end() - start;
}

// ---------------------------------------------------------------- angle regularity

double plane_angle(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.empty() || b.empty()) return 0.0;
  const int m = a.front().dim();
  std::vector<Vector> residual;
  for (const Vector& v : b) {
    Vector r = v;
    for (const Vector& u : a) r -= dot(u, v) * u;
    residual.push_back(std::move(r));
  }
  const double top = svd(Matrix::from_columns(residual, m)).values.front();
  return std::asin(std::min(1.0, top));
}

std::vector<AngleRegularityRow> angle_regularity(const Distribution& d, std::vector<double> radii,
                                                 std::size_t probe_count, double eps_angle,
                                                 std::uint64_t seed, const Vector& center) {
  if (radii.empty() || probe_count == 0) throw Error(ErrorCode::EmptySample, "no radii or probes requested");
  const int m = d.source_dim();
  const Vector c = center.dim() == 0 ? Vector(m) : center;
  if (c.dim() != m) throw Error(ErrorCode::DimensionError, "center has the wrong dimension");
  std::sort(radii.begin(), radii.end());
  if (!(radii.front() > 0.0)) throw Error(ErrorCode::InvalidInput, "radii must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct Probe {
    Vector x;
    std::vector<Vector> basis;  // the smaller of plane / fiber
  };
  std::vector<Probe> pool;
  std::vector<AngleRegularityRow> out;
  double delta = std::numeric_limits<double>::infinity();

  for (double r : radii) {
    const std::size_t old_size = pool.size();
    for (std::size_t i = 0; i < probe_count; ++i) {
      Vector dir(m);
      double len = 0.0;
      while (len < 1e-12) {
        for (int j = 0; j < m; ++j) dir[j] = gauss(rng);
        len = norm(dir);
      }
      const Vector x = c + (r * std::pow(unit(rng), 1.0 / m) / len) * dir;
      if (!d.in_domain(x)) continue;
      try {
        DistributionFrame f = d.frame_at(x);
        pool.push_back({x, f.fiber.size() < f.plane.size() ? std::move(f.fiber) : std::move(f.plane)});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularPoint) throw;
      }
    }
    for (std::size_t i = old_size; i < pool.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double dist = distance(pool[i].x, pool[j].x);
        if (dist >= delta) continue;
        if (plane_angle(pool[i].basis, pool[j].basis) > eps_angle) delta = dist;
      }
    }
    out.push_back({r, pool.size(), delta});
  }
  if (pool.empty()) throw Error(ErrorCode::EmptySample, "no probe landed in the domain of " + d.name());
  return out;
}

}  // namespace confkit
