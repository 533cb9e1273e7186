#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "confkit/distribution.hpp"
#include "confkit/io.hpp"

namespace confkit {

// Runs the command line `args` (without the program name). Returns 0 on
// success, 1 on usage errors and 2 when a library operation fails.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "segment:x0,y0,x1,y1", "rect:x0,y0,x1,y1", "circle:cx,cy,r" or
// "polyline:x,y;x,y;...".
Path parse_path(const std::string& spec);

struct DemoOptions {
  std::string map = "ortho_proj:3,2";
  double window = 0.0;  // > 0: artificial image window half-width
  std::vector<double> probe;  // source point the construction starts from
  int n_along = 17;
  int n_up = 5;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

// End-to-end pipeline: rank check, image boundedness probe, staircase, growth
// exponents, image and lifted modulus. "status" is "rejected" when the map is
// rank deficient.
Json demo_liouville(const DemoOptions& opts);

}  // namespace confkit
