#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "confkit/distribution.hpp"
#include "confkit/linalg.hpp"

namespace confkit {

struct StaircaseConfig {
  Vector segment_start;  // I in base coordinates (n = 2)
  Vector segment_end;
  Vector start_lift;     // over segment_start
  Vector up{0.0, 1.0};   // ray direction in the base plane
  double k_factor = 2.0;
  double angle_tol = 0.2;    // rad
  double max_height = 1.0;
  double initial_step = 0.0;  // 0: max_height / 4
  double min_step = 1e-6;
  double max_step = 0.0;      // 0: unlimited
  int n_along = 9;            // vertices along I
  int n_up = 5;               // vertex rows per step
  bool bidirectional = false;  // also sweep along −up
  LiftOptions lift;
  unsigned threads = 0;
};

// One step S̃ᵢ: a rows × cols vertex grid. Row 0 is the lift of the horizontal
// segment at height h0, column c is the ray lifted from row 0's vertex c.
struct Patch {
  int step = 0;
  int direction = 1;  // +1 along up, −1 against it
  double h0 = 0.0, h1 = 0.0;
  int rows = 0, cols = 0;
  int col_offset = 0;  // column index of column 0 within the full segment grid
  std::vector<Vector> vertices;  // row-major
  std::vector<Vector> image;     // base coordinates of each vertex
  double k_max = 0.0;            // largest restriction eccentricity over quads
  double k_f_max = 0.0;          // largest eccentricity of the map on the plane
  double max_angle = 0.0;        // largest tangent-plane / distribution angle
  std::size_t degenerate_quads = 0;

  const Vector& vertex(int r, int c) const { return vertices[static_cast<std::size_t>(r) * cols + c]; }
  const Vector& image_at(int r, int c) const { return image[static_cast<std::size_t>(r) * cols + c]; }
};

struct StaircaseSurface {
  std::string map_name;
  int source_dim = 0;
  Vector segment_start, segment_end, up;
  int n_along = 0;
  std::vector<Vector> base_lift;  // Ĩ at the n_along grid parameters
  std::vector<Patch> patches;
  std::vector<Vector> railing;   // lifted ray through the leftmost active column
  std::vector<double> heights;   // signed heights reached, ascending
  std::vector<Vector> singular_front;
  double h_infinity_up = 0.0;    // height reached along +up
  double h_infinity_down = 0.0;  // height reached along −up (bidirectional)
  std::string status = "Completed";  // Completed | SingularFront | StepCollapse
  std::string message;
};

StaircaseSurface build_staircase(const Distribution& d, const StaircaseConfig& cfg);

struct QuadEccentricity {
  std::size_t patch;
  int row, col;
  double k;           // restriction eccentricity of the quad's tangent plane
  double angle;       // angle to the distribution plane
  bool degenerate;
};

// Eccentricity of dF restricted to the discrete tangent plane of each quad.
std::vector<QuadEccentricity> restriction_eccentricity(const Distribution& d,
                                                       const StaircaseSurface& s);

// Per-patch maximum of non-degenerate quads.
std::vector<double> patch_eccentricity(const std::vector<QuadEccentricity>& quads,
                                       std::size_t patch_count);

// Largest vertex distance between two staircases built on overlapping
// sub-segments [a0, a1] and [b0, b1] (parameters of cfg's segment) at vertices
// of their first steps with equal base coordinates.
double continuation_discrepancy(const Distribution& d, const StaircaseConfig& cfg, double a0,
                                double a1, double b0, double b1);

struct TriangleMesh {
  std::vector<Vector> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> seeds;  // vertices at distance 0
  std::vector<std::vector<int>> patch_vertex_ids;  // mesh id of each patch vertex
};

struct MeshOptions {
  double merge_tol = 1e-7;
  // Seed window as arc length along the lifted segment; empty = whole segment.
  std::optional<std::pair<double, double>> seed_window;
};

TriangleMesh surface_mesh(const StaircaseSurface& s, const MeshOptions& opts = {});

// Geodesic distance from the seeds: Dijkstra ordering with planar-wave
// triangle updates. Unreached vertices get +inf. `parents`, when given,
// receives for each vertex the neighbour it was last updated from (−1 for
// seeds and unreached vertices).
std::vector<double> geodesic_distances(const TriangleMesh& mesh, std::vector<int>* parents = nullptr);

struct GrowthProfile {
  std::vector<double> radii;
  std::vector<double> lengths;  // L(r)
  std::vector<double> areas;    // A(r)
  double area_exponent = 0.0;
  double length_exponent = 0.0;
  double extent = 0.0;           // largest distance on the mesh
  double complete_radius = 0.0;  // smallest distance to a non-seed boundary vertex
  double coarea_mismatch = 0.0;  // |∫L dr − A| / A at the largest radius
};

GrowthProfile growth_profile(const TriangleMesh& mesh, std::vector<double> radii);
GrowthProfile growth_profile(const StaircaseSurface& s, std::vector<double> radii,
                             const MeshOptions& opts = {});

// Least-squares slope of log y against log x over the upper half of the data.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace confkit
