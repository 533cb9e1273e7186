#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "confkit/linalg.hpp"

namespace confkit {

using JacobianProvider = std::function<Matrix(const Vector&)>;

struct MapDefinition {
  std::string name;
  int m = 0;  // source dimension
  int n = 0;  // target dimension
  Evaluator eval;
  JacobianProvider jacobian;  // empty: central-difference fallback
  DomainPredicate domain;     // empty: all of R^m
  std::string domain_description = "R^m";
  std::optional<double> image_bound;
  // Per target coordinate: the period when that coordinate is only defined
  // modulo a constant (e.g. an angle-derived coordinate), otherwise empty.
  std::vector<std::optional<double>> periods;
};

// A smooth map R^m → R^n with a domain predicate. Immutable; copies share the
// underlying definition.
class MapSpec {
 public:
  explicit MapSpec(MapDefinition def);

  const std::string& name() const { return def_->name; }
  int source_dim() const { return def_->m; }
  int target_dim() const { return def_->n; }
  const std::string& domain_description() const { return def_->domain_description; }
  std::optional<double> image_bound() const { return def_->image_bound; }
  bool has_analytic_jacobian() const { return static_cast<bool>(def_->jacobian); }
  const std::vector<std::optional<double>>& periods() const { return def_->periods; }

  bool in_domain(const Vector& x) const;

  // Throws DomainViolation outside the domain and InvalidInput when the
  // evaluator produces a non-finite value.
  Vector operator()(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;
  Matrix fd_jacobian(const Vector& x) const;

  // a − b with periodic coordinates reduced to their principal range.
  Vector image_difference(const Vector& a, const Vector& b) const;

  const MapDefinition& definition() const { return *def_; }

 private:
  void check_point(const Vector& x) const;

  std::shared_ptr<const MapDefinition> def_;
};

// Builtin maps; `params` empty selects the defaults listed in registry_listing().
//   ortho_proj        m,k      (3,2)   orthogonal projection R^m → R^k
//   arctan1d                           x ↦ arctan x
//   torus_fold        R0,r0    (2,1)   R^3 → plane → cylinder → torus
//   holo_product                       (z1,z2) ↦ z1 z2 on C^2 ≅ R^4
//   hopf_derived                       stereographic ∘ Hopf ∘ inverse stereographic
//   helical_proj      p        (1)     projection along helices of pitch p
//   punctured_proj                     R^3 minus the z-axis → R^2 minus origin
//   contact_adapted   eps      (0.1)   (x, y - eps·x·z), fibers tangent to (0, eps·x, 1)
//   identity1d                         x ↦ x
MapSpec builtin(const std::string& name, const std::vector<double>& params = {});

// Comma-separated list of reals ("1,2.5,-3"); InvalidInput on malformed items.
std::vector<double> parse_number_list(const std::string& text);

// Parses the `name:param,param` micro-syntax, e.g. "ortho_proj:3,2";
// "outer@inner" composes two such maps.
MapSpec parse_map(const std::string& spec);

MapSpec compose(const MapSpec& outer, const MapSpec& inner);

struct RegistryEntry {
  std::string name;
  std::string params;
  int m;
  int n;
  std::string domain;
  std::optional<double> image_bound;
  bool analytic_jacobian;
};

std::vector<RegistryEntry> registry_listing();

}  // namespace confkit
