#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "confkit/linalg.hpp"
#include "confkit/staircase.hpp"

namespace confkit {

// nx × ny cells covering [0, width] × [0, height]; cell (i, j) has index j·nx + i.
struct GridComplex {
  int nx = 1, ny = 1;
  double width = 1.0, height = 1.0;

  int index(int i, int j) const { return j * nx + i; }
  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * ny; }
  std::vector<double> areas() const;
};

// Rings [edges[i], edges[i+1]] × sectors of angle 2π/sectors in geodesic polar
// coordinates. curvature_radius = 0 is the Euclidean plane; c > 0 is the
// hyperbolic plane of curvature −1/c².
struct PolarComplex {
  std::vector<double> edges;
  int sectors = 64;
  double curvature_radius = 0.0;

  static PolarComplex flat(std::vector<double> edges, int sectors);
  static PolarComplex hyperbolic(std::vector<double> edges, int sectors, double c);
  // Edges r_in · q^k up to r_out (last edge exactly r_out), with `extra` edges
  // inserted so cutoffs fall on ring boundaries.
  static std::vector<double> geometric_edges(double r_in, double r_out, double ratio,
                                             const std::vector<double>& extra = {});

  int rings() const { return static_cast<int>(edges.size()) - 1; }
  int index(int ring, int sector) const { return ring * sectors + sector; }
  std::size_t cell_count() const { return static_cast<std::size_t>(rings()) * sectors; }
  double ring_area(int ring) const;  // area of one cell of the ring
  std::vector<double> areas() const;
};

struct Curve {
  std::vector<std::pair<int, double>> cells;  // (cell index, traversal length ds)
  double length() const;
};

struct CurveFamily {
  std::string description;
  std::size_t cell_count = 0;
  std::vector<Curve> curves;
};

struct DensityField {
  std::vector<double> rho;
  std::vector<double> areas;
};

struct ModulusOptions {
  std::size_t max_iterations = 20000;
  std::size_t window = 50;       // convergence window
  double rel_tol = 1e-5;         // relative change of the value over the window
  unsigned threads = 0;
};

struct ModulusEstimate {
  double value = 0.0;
  double p = 2.0;
  std::string bound = "UpperBound";
  std::size_t iterations = 0;
  bool converged = false;
  double final_constraint_violation = 0.0;  // max(0, 1 − min ρ-length)
  double dual_value = 0.0;                  // Lagrangian dual at the last multipliers
  DensityField density;
};

// Upper bound for min Σ ρᵖ·area subject to Σ ρ·ds ≥ 1 on every curve.
ModulusEstimate modulus(const CurveFamily& family, const std::vector<double>& areas, double p = 2.0,
                        const ModulusOptions& opts = {});

// ρ-length of each curve.
std::vector<double> curve_lengths(const CurveFamily& family, const std::vector<double>& rho);

enum class GridSide { LeftRight, BottomTop };

// One crossing per row (or column) plus k single-step staircase detours per row.
CurveFamily family_rectangle(const GridComplex& grid, GridSide side = GridSide::LeftRight, int k = 4);

// Radial crossings of rings [r_in, r_out], one per sector.
CurveFamily family_annulus(const PolarComplex& complex, double r_in, double r_out);

// Quad faces of the upward patches of a staircase.
struct SurfaceComplex {
  std::vector<double> areas;
  std::vector<std::size_t> patch_face_offset;  // first face index per patch
};

SurfaceComplex surface_complex(const StaircaseSurface& s);

// Lifted rays over the given base points of I as curves over the quad faces;
// each vertex-column edge charges half its length to each adjacent face
// column. With `radius`, each ray is cut where its geodesic distance from the
// seed reaches the radius (OutOfExtent when a ray stops short of it).
CurveFamily family_lifted_rays(const StaircaseSurface& s, const std::vector<Vector>& base_points,
                               std::optional<double> radius = std::nullopt,
                               const MeshOptions& mesh_opts = {});

// Base points of every column of the segment grid.
std::vector<Vector> segment_grid_points(const StaircaseSurface& s);

struct ParabolicityOptions {
  double r0 = std::numbers::e;
  double seed_radius = 1.0;   // distance offset: r = seed_radius + geodesic distance
  double threshold = 0.1;
  bool include_alpha_min = true;
};

struct ParabolicityRow {
  double alpha;
  bool alpha_is_minimal;  // row uses α_min(R)
  double cutoff;
  bool admissible;
  double min_curve_length;  // smallest ρ-length of the radial curves
  double m_upper;           // Σ ρ²·area over r ≤ R (NaN when not admissible)
};

struct ParabolicityTable {
  std::vector<ParabolicityRow> rows;
  std::vector<double> best_by_cutoff;  // min admissible M_upper per cutoff
  bool strictly_decreasing = false;
  std::string verdict;  // parabolic-indicated | hyperbolic-indicated | inconclusive
};

// ρ(r) = α / (r ln r) for r ≥ max(r0, e); ρ(r0) on [r0, max(r0, e)); 0 below r0.
double parabolic_density(double r, double alpha, double r0);
// ∫ ρ dr over [a, b] for the density above.
double parabolic_density_integral(double a, double b, double alpha, double r0);
// 1 / ln(ln R / ln r0).
double alpha_min(double cutoff, double r0);

// Seed: cells with r ≤ seed_radius (the unit disk for the defaults).
ParabolicityTable parabolicity_bound(const PolarComplex& complex, const std::vector<double>& alphas,
                                     const std::vector<double>& cutoffs,
                                     const ParabolicityOptions& opts = {});

// Seed: the lifted base segment (or the mesh options' window) of a surface.
// Triangles carry the supremum of ρ over their range of r.
ParabolicityTable parabolicity_bound(const StaircaseSurface& s, const std::vector<double>& alphas,
                                     const std::vector<double>& cutoffs,
                                     const ParabolicityOptions& opts = {},
                                     const MeshOptions& mesh_opts = {});

}  // namespace confkit
