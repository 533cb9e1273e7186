#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "confkit/linalg.hpp"
#include "confkit/maps.hpp"

namespace confkit {

// A 1-form field on R^3 whose kernel is the distribution plane.
struct CoframeField {
  std::string name;
  std::function<Vector(const Vector&)> omega;

  static CoframeField flat();                // dz
  static CoframeField contact(double eps);   // dz + eps·x dy
};

// Parses "flat" or "contact:eps".
CoframeField parse_coframe(const std::string& spec);

struct DistributionFrame {
  Vector point;
  std::vector<Vector> plane;  // orthonormal, spans the distribution plane
  std::vector<Vector> fiber;  // orthonormal complement of the plane
};

// Plane field on R^m with a projection to base coordinates in R^n.
//  * From a map F: plane = (ker F')^⊥, projection = F.
//  * From a coframe ω on R^3: plane = ker ω, projection (x, y, z) ↦ (x, y).
class Distribution {
 public:
  static Distribution from_map(MapSpec f);
  static Distribution from_coframe(CoframeField omega);

  int source_dim() const;
  int base_dim() const;
  const std::string& name() const { return name_; }
  bool is_map() const { return map_.has_value(); }
  const MapSpec& map() const { return *map_; }

  bool in_domain(const Vector& x) const;
  Vector project(const Vector& x) const;
  // a − b in base coordinates (periodic coordinates reduced).
  Vector base_difference(const Vector& a, const Vector& b) const;

  // Orthonormal frame of the plane and its complement; SingularPoint when the
  // plane is undefined (rank loss, or ω vanishing / tangent to the z-axis).
  DistributionFrame frame_at(const Vector& x) const;

  // Differential of the projection (F' for maps, [I 0] for coframes).
  Matrix projection_jacobian(const Vector& x) const;

  // The unique vector in the plane at x whose projection is v.
  Vector lift_vector(const Vector& x, const Vector& v) const;

  // Unit normal of the plane at x for m = 3, n = 2, oriented continuously:
  // ω/|ω| for coframes, (∇F₁ × ∇F₂)/|·| for maps. Unsupported otherwise.
  Vector unit_normal(const Vector& x) const;

 private:
  std::string name_;
  std::optional<MapSpec> map_;
  std::optional<CoframeField> coframe_;
};

// |u · curl u| for the unit normal u of the plane field; zero exactly when the
// field is integrable at x. Central differences with the default step.
double frobenius_residual(const Distribution& d, const Vector& x);

// Piecewise path in base coordinates parametrized by t ∈ [0, 1]; pieces are
// straight segments or circular arcs, each taking a share of the parameter
// proportional to its length.
class Path {
 public:
  static Path segment(const Vector& a, const Vector& b);
  static Path polyline(const std::vector<Vector>& points);
  // Full circle in the plane of the first two coordinates, counterclockwise,
  // starting at center + radius·e₁.
  static Path circle(const Vector& center, double radius);
  // Counterclockwise boundary of [x0, x1] × [y0, y1] starting at (x0, y0).
  static Path rectangle(double x0, double y0, double x1, double y1);

  Vector at(double t) const;
  Vector derivative(double t) const;  // d/dt, one-sided from the right at joints
  std::size_t piece_count() const { return pieces_.size(); }
  std::size_t piece_at(double t) const { return locate(t).first; }
  // d/dt of piece i's parametrization, extended past its ends.
  Vector derivative_on(std::size_t piece, double t) const;
  std::vector<double> breakpoints() const;  // includes 0 and 1
  double length() const { return total_length_; }
  int dim() const;
  bool closed(double tol = 1e-12) const;
  Path reversed() const;
  Path then(const Path& next) const;  // concatenation

 private:
  struct Piece {
    bool arc = false;
    Vector a, b;           // segment endpoints
    Vector center;         // arc
    double radius = 0.0, angle0 = 0.0, sweep = 0.0;
    double length = 0.0;
    Vector at(double s) const;       // s ∈ [0, 1]
    Vector velocity(double s) const; // d/ds
    Piece reversed() const;
  };
  void finish();
  std::pair<std::size_t, double> locate(double t) const;

  std::vector<Piece> pieces_;
  std::vector<double> t_start_;
  double total_length_ = 0.0;
};

enum class LiftStatus { Completed, Escaped, HitSingular, StepCollapse };

std::string_view to_string(LiftStatus s);

struct LiftOptions {
  double step = 1e-2;       // initial parameter step
  double min_step = 1e-12;
  double lift_tol = 1e-8;
  double r_max = 1e6;
  std::size_t max_steps = 10'000'000;
  std::vector<double> checkpoints;  // parameters the integrator must land on
};

struct LiftSample {
  double t;
  Vector x;
};

struct LiftedPath {
  std::vector<LiftSample> samples;
  LiftStatus status = LiftStatus::Completed;
  double t_stop = 1.0;          // parameter reached (crossing parameter when Escaped)
  double max_error = 0.0;       // sup |F(x(t)) − base(t)| over samples
  double max_drift = 0.0;       // largest RK4 defect before correction
  std::vector<std::optional<Vector>> checkpoint_points;  // aligned with options
  std::string message;

  const Vector& end() const { return samples.back().x; }
};

// Horizontal lift of `base` starting at `start` (BadStart unless the start
// projects to base(0) within lift_tol).
LiftedPath lift_path(const Distribution& d, const Path& base, const Vector& start,
                     const LiftOptions& opts = {});

// x(end) − x(start) of the lift of a closed loop.
Vector holonomy_defect(const Distribution& d, const Path& loop, const Vector& start,
                       const LiftOptions& opts = {});

struct AngleRegularityRow {
  double radius;
  std::size_t probes;
  double delta;  // +inf when no probe pair deviates by more than eps_angle
};

// Smallest distance between probe pairs whose planes deviate by more than
// eps_angle (largest principal angle). Probes are pooled across radii, so the
// table is nonincreasing in r.
std::vector<AngleRegularityRow> angle_regularity(const Distribution& d,
                                                 std::vector<double> radii,
                                                 std::size_t probe_count,
                                                 double eps_angle = 0.1,
                                                 std::uint64_t seed = 0,
                                                 const Vector& center = {});

// Largest principal angle between two planes given by orthonormal bases.
double plane_angle(const std::vector<Vector>& a, const std::vector<Vector>& b);

}  // namespace confkit
