#include "confkit/maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace confkit {

MapSpec::MapSpec(MapDefinition def) {
  if (def.m < 1 || def.n < 1 || def.m > kMaxDim || def.n > kMaxDim) {
    throw Error(ErrorCode::InvalidInput, "map dimensions must lie in 1..16");
  }
  if (!def.eval) throw Error(ErrorCode::InvalidInput, "map '" + def.name + "' has no evaluator");
  if (def.periods.empty()) def.periods.resize(def.n);
  if (static_cast<int>(def.periods.size()) != def.n) {
    throw Error(ErrorCode::DimensionError, "periods must have one entry per target coordinate");
  }
  def_ = std::make_shared<const MapDefinition>(std::move(def));
}

bool MapSpec::in_domain(const Vector& x) const {
  if (x.dim() != def_->m || !x.all_finite()) return false;
  return !def_->domain || def_->domain(x);
}

void MapSpec::check_point(const Vector& x) const {
  if (x.dim() != def_->m) {
    throw Error(ErrorCode::DimensionError, name() + " expects a point of dimension " +
                                               std::to_string(def_->m));
  }
  if (!in_domain(x)) {
    throw Error(ErrorCode::DomainViolation,
                "point outside the domain of " + name() + " (" + def_->domain_description + ")");
  }
}

Vector MapSpec::operator()(const Vector& x) const {
  check_point(x);
  Vector y = def_->eval(x);
  if (!y.all_finite()) throw Error(ErrorCode::InvalidInput, name() + " produced a non-finite value");
  return y;
}

Matrix MapSpec::fd_jacobian(const Vector& x) const {
  check_point(x);
  const MapDefinition& d = *def_;
  return confkit::fd_jacobian(
      [&](const Vector& p) {
        Vector y = d.eval(p);
        // Keep periodic coordinates on the branch of the base point.
        if (std::any_of(d.periods.begin(), d.periods.end(), [](auto& p) { return p.has_value(); })) {
          const Vector y0 = d.eval(x);
          for (int i = 0; i < d.n; ++i) {
            if (d.periods[i]) {
              const double per = *d.periods[i];
              y[i] = y0[i] + (y[i] - y0[i]) - per * std::round((y[i] - y0[i]) / per);
            }
          }
        }
        return y;
      },
      x, default_fd_step(x), [this](const Vector& p) { return in_domain(p); });
}

Matrix MapSpec::jacobian(const Vector& x) const {
  if (!def_->jacobian) return fd_jacobian(x);
  check_point(x);
  Matrix j = def_->jacobian(x);
  if (!j.all_finite()) throw Error(ErrorCode::InvalidInput, name() + " Jacobian is not finite");
  return j;
}

Vector MapSpec::image_difference(const Vector& a, const Vector& b) const {
  Vector d = a - b;
  for (int i = 0; i < d.dim(); ++i) {
    if (def_->periods[i]) {
      const double per = *def_->periods[i];
      d[i] -= per * std::round(d[i] / per);
    }
  }
  return d;
}

namespace {

void expect_params(const std::string& name, const std::vector<double>& params, std::size_t count) {
  if (params.size() != count) {
    throw Error(ErrorCode::InvalidInput, name + " takes " + std::to_string(count) + " parameter(s)");
  }
}

MapSpec make_ortho_proj(int m, int k) {
  if (m < 1 || k < 1 || k > m || m > kMaxDim) {
    throw Error(ErrorCode::InvalidInput, "ortho_proj needs 1 <= k <= m <= 16");
  }
  MapDefinition d;
  d.name = "ortho_proj:" + std::to_string(m) + "," + std::to_string(k);
  d.m = m;
  d.n = k;
  d.eval = [k](const Vector& x) {
    Vector y(k);
    for (int i = 0; i < k; ++i) y[i] = x[i];
    return y;
  };
  d.jacobian = [m, k](const Vector&) {
    Matrix j(k, m);
    for (int i = 0; i < k; ++i) j(i, i) = 1.0;
    return j;
  };
  return MapSpec(std::move(d));
}

MapSpec make_arctan1d() {
  MapDefinition d;
  d.name = "arctan1d";
  d.m = d.n = 1;
  d.eval = [](const Vector& x) { return Vector{std::atan(x[0])}; };
  d.jacobian = [](const Vector& x) { return Matrix(1, 1, {1.0 / (1.0 + x[0] * x[0])}); };
  d.image_bound = std::numbers::pi / 2;
  return MapSpec(std::move(d));
}

MapSpec make_identity1d() {
  MapDefinition d;
  d.name = "identity1d";
  d.m = d.n = 1;
  d.eval = [](const Vector& x) { return x; };
  d.jacobian = [](const Vector&) { return Matrix(1, 1, {1.0}); };
  return MapSpec(std::move(d));
}

MapSpec make_torus_fold(double big_r, double small_r) {
  if (!(big_r > small_r && small_r > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "torus_fold needs R0 > r0 > 0");
  }
  std::ostringstream name;
  name << "torus_fold:" << format_shortest(big_r) << "," << format_shortest(small_r);
  MapDefinition d;
  d.name = name.str();
  d.m = d.n = 3;
  d.eval = [=](const Vector& p) {
    const double ring = big_r + small_r * std::cos(p[1]);
    return Vector{ring * std::cos(p[0]), ring * std::sin(p[0]), small_r * std::sin(p[1])};
  };
  d.jacobian = [=](const Vector& p) {
    const double ring = big_r + small_r * std::cos(p[1]);
    const double cx = std::cos(p[0]), sx = std::sin(p[0]);
    const double cy = std::cos(p[1]), sy = std::sin(p[1]);
    return Matrix(3, 3,
                  {-ring * sx, -small_r * sy * cx, 0.0,  //
                   ring * cx, -small_r * sy * sx, 0.0,   //
                   0.0, small_r * cy, 0.0});
  };
  d.image_bound = big_r + small_r;
  return MapSpec(std::move(d));
}

MapSpec make_holo_product() {
  MapDefinition d;
  d.name = "holo_product";
  d.m = 4;
  d.n = 2;
  // Coordinates (x1, y1, x2, y2) with z1 = x1 + i y1, z2 = x2 + i y2.
  d.eval = [](const Vector& p) {
    return Vector{p[0] * p[2] - p[1] * p[3], p[0] * p[3] + p[1] * p[2]};
  };
  d.jacobian = [](const Vector& p) {
    return Matrix(2, 4, {p[2], -p[3], p[0], -p[1],  //
                         p[3], p[2], p[1], p[0]});
  };
  return MapSpec(std::move(d));
}

// 1 - Z for the Hopf image of the inverse stereographic point of u, written
// without cancellation: 2[(q-1)² + w²(2q + w² + 2)] / (s+1)², q = u0²+u1², w = u2.
double hopf_pole_gap(const Vector& u) {
  const double q = u[0] * u[0] + u[1] * u[1];
  const double w2 = u[2] * u[2];
  const double s = q + w2;
  return 2.0 * ((q - 1.0) * (q - 1.0) + w2 * (2.0 * q + w2 + 2.0)) / ((s + 1.0) * (s + 1.0));
}

MapSpec make_hopf_derived() {
  MapDefinition d;
  d.name = "hopf_derived";
  d.m = 3;
  d.n = 2;
  d.domain = [](const Vector& u) { return hopf_pole_gap(u) > 1e-10; };
  d.domain_description = "unit circle {x^2+y^2=1, z=0} removed (maps to the pole)";
  d.eval = [](const Vector& u) {
    const double s = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    const double p0 = 2 * u[0] / (s + 1), p1 = 2 * u[1] / (s + 1), p2 = 2 * u[2] / (s + 1);
    const double p3 = (s - 1) / (s + 1);
    const double x = 2 * (p0 * p2 + p1 * p3);
    const double y = 2 * (p1 * p2 - p0 * p3);
    const double gap = hopf_pole_gap(u);
    return Vector{x / gap, y / gap};
  };
  d.jacobian = [](const Vector& u) {
    const double s = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    const double sp1 = s + 1;
    // inverse stereographic R^3 → S^3 ⊂ R^4
    Matrix j1(4, 3);
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) {
        j1(i, k) = (i == k ? 2.0 / sp1 : 0.0) - 4.0 * u[i] * u[k] / (sp1 * sp1);
      }
      j1(3, i) = 4.0 * u[i] / (sp1 * sp1);
    }
    const double p0 = 2 * u[0] / sp1, p1 = 2 * u[1] / sp1, p2 = 2 * u[2] / sp1, p3 = (s - 1) / sp1;
    // Hopf map R^4 → R^3: (2 z1 conj(z2), |z1|² - |z2|²)
    const Matrix j2(3, 4,
                    {2 * p2, 2 * p3, 2 * p0, 2 * p1,   //
                     -2 * p3, 2 * p2, 2 * p1, -2 * p0,  //
                     2 * p0, 2 * p1, -2 * p2, -2 * p3});
    // stereographic S^2 → R^2 from the north pole
    const double x = 2 * (p0 * p2 + p1 * p3);
    const double y = 2 * (p1 * p2 - p0 * p3);
    const double gap = hopf_pole_gap(u);
    const Matrix j3(2, 3, {1 / gap, 0, x / (gap * gap),  //
                           0, 1 / gap, y / (gap * gap)});
    return j3 * (j2 * j1);
  };
  return MapSpec(std::move(d));
}

MapSpec make_helical_proj(double pitch) {
  if (!(pitch > 0.0)) throw Error(ErrorCode::InvalidInput, "helical_proj pitch must be positive");
  std::ostringstream name;
  name << "helical_proj:" << format_shortest(pitch);
  const double k = pitch / (2 * std::numbers::pi);
  MapDefinition d;
  d.name = name.str();
  d.m = 3;
  d.n = 2;
  d.domain = [](const Vector& p) { return std::hypot(p[0], p[1]) > 1e-9; };
  d.domain_description = "z-axis removed";
  d.eval = [k](const Vector& p) {
    return Vector{std::hypot(p[0], p[1]), p[2] - k * std::atan2(p[1], p[0])};
  };
  d.jacobian = [k](const Vector& p) {
    const double r2 = p[0] * p[0] + p[1] * p[1];
    const double r = std::sqrt(r2);
    return Matrix(2, 3, {p[0] / r, p[1] / r, 0.0,  //
                         k * p[1] / r2, -k * p[0] / r2, 1.0});
  };
  d.periods = {std::nullopt, pitch};
  return MapSpec(std::move(d));
}

MapSpec make_punctured_proj() {
  MapDefinition d;
  d.name = "punctured_proj";
  d.m = 3;
  d.n = 2;
  d.domain = [](const Vector& p) { return std::hypot(p[0], p[1]) > 1e-12; };
  d.domain_description = "z-axis removed";
  d.eval = [](const Vector& p) { return Vector{p[0], p[1]}; };
  d.jacobian = [](const Vector&) { return Matrix(2, 3, {1, 0, 0, 0, 1, 0}); };
  return MapSpec(std::move(d));
}

MapSpec make_contact_adapted(double eps) {
  std::ostringstream name;
  name << "contact_adapted:" << format_shortest(eps);
  MapDefinition d;
  d.name = name.str();
  d.m = 3;
  d.n = 2;
  d.eval = [eps](const Vector& p) { return Vector{p[0], p[1] - eps * p[0] * p[2]}; };
  d.jacobian = [eps](const Vector& p) {
    return Matrix(2, 3, {1, 0, 0,  //
                         -eps * p[2], 1, -eps * p[0]});
  };
  return MapSpec(std::move(d));
}

}  // namespace

MapSpec builtin(const std::string& name, const std::vector<double>& params) {
  const bool defaults = params.empty();
  if (name == "ortho_proj") {
    if (defaults) return make_ortho_proj(3, 2);
    expect_params(name, params, 2);
    const int m = static_cast<int>(params[0]), k = static_cast<int>(params[1]);
    if (m != params[0] || k != params[1]) {
      throw Error(ErrorCode::InvalidInput, "ortho_proj dimensions must be integers");
    }
    return make_ortho_proj(m, k);
  }
  if (name == "arctan1d") {
    expect_params(name, params, 0);
    return make_arctan1d();
  }
  if (name == "identity1d") {
    expect_params(name, params, 0);
    return make_identity1d();
  }
  if (name == "torus_fold") {
    if (defaults) return make_torus_fold(2.0, 1.0);
    expect_params(name, params, 2);
    return make_torus_fold(params[0], params[1]);
  }
  if (name == "holo_product") {
    expect_params(name, params, 0);
    return make_holo_product();
  }
  if (name == "hopf_derived") {
    expect_params(name, params, 0);
    return make_hopf_derived();
  }
  if (name == "helical_proj") {
    if (defaults) return make_helical_proj(1.0);
    expect_params(name, params, 1);
    return make_helical_proj(params[0]);
  }
  if (name == "punctured_proj") {
    expect_params(name, params, 0);
    return make_punctured_proj();
  }
  if (name == "contact_adapted") {
    if (defaults) return make_contact_adapted(0.1);
    expect_params(name, params, 1);
    return make_contact_adapted(params[0]);
  }
  throw Error(ErrorCode::NotFound, "no builtin map named '" + name + "'");
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(ErrorCode::InvalidInput, "malformed number '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

MapSpec parse_map(const std::string& spec) {
  if (const auto at = spec.find('@'); at != std::string::npos) {
    return compose(parse_map(spec.substr(0, at)), parse_map(spec.substr(at + 1)));
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return builtin(spec);
  return builtin(spec.substr(0, colon), parse_number_list(spec.substr(colon + 1)));
}

MapSpec compose(const MapSpec& outer, const MapSpec& inner) {
  if (inner.target_dim() != outer.source_dim()) {
    throw Error(ErrorCode::DimensionError, "cannot compose " + outer.name() + " after " +
                                               inner.name() + ": dimensions differ");
  }
  MapDefinition d;
  d.name = outer.name() + "@" + inner.name();
  d.m = inner.source_dim();
  d.n = outer.target_dim();
  d.eval = [outer, inner](const Vector& x) { return outer(inner(x)); };
  d.jacobian = [outer, inner](const Vector& x) { return outer.jacobian(inner(x)) * inner.jacobian(x); };
  d.domain = [outer, inner](const Vector& x) {
    if (!inner.in_domain(x)) return false;
    const Vector y = inner.definition().eval(x);
    return y.all_finite() && outer.in_domain(y);
  };
  d.domain_description = inner.domain_description() + "; preimage of (" + outer.domain_description() + ")";
  d.image_bound = outer.image_bound();
  d.periods = outer.periods();
  return MapSpec(std::move(d));
}

std::vector<RegistryEntry> registry_listing() {
  struct Row {
    const char* name;
    const char* params;
  };
  static constexpr Row rows[] = {
      {"ortho_proj", "m,k (default 3,2)"}, {"arctan1d", ""},
      {"torus_fold", "R0,r0 (default 2,1)"}, {"holo_product", ""},
      {"hopf_derived", ""},                  {"helical_proj", "p (default 1)"},
      {"punctured_proj", ""},                {"contact_adapted", "eps (default 0.1)"},
      {"identity1d", ""},
  };
  std::vector<RegistryEntry> out;
  for (const Row& r : rows) {
    const MapSpec map = builtin(r.name);
    out.push_back({r.name, r.params, map.source_dim(), map.target_dim(), map.domain_description(),
                   map.image_bound(), map.has_analytic_jacobian()});
  }
  return out;
}

}  // namespace confkit
