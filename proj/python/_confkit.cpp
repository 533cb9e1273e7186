#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "confkit/cli.hpp"
#include "confkit/distribution.hpp"
#include "confkit/error.hpp"
#include "confkit/maps.hpp"
#include "confkit/modulus.hpp"
#include "confkit/qc.hpp"
#include "confkit/staircase.hpp"

namespace py = pybind11;
using namespace confkit;

namespace {

py::object to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<long long>());
    case Json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& e : j) out.append(to_py(e));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return out;
    }
    default: return py::none();
  }
}

Json from_py(const py::handle& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Distribution distribution(const std::optional<std::string>& map, const std::optional<std::string>& coframe) {
  if (map && coframe) throw Error(ErrorCode::InvalidInput, "give either map or coframe");
  if (coframe) return Distribution::from_coframe(parse_coframe(*coframe));
  if (!map) throw Error(ErrorCode::InvalidInput, "map or coframe is required");
  return Distribution::from_map(parse_map(*map));
}

py::dict modulus_dict(const CurveFamily& f, const ModulusEstimate& m) {
  py::dict d;
  d["family"] = f.description;
  d["curves"] = f.curves.size();
  d["value"] = m.value;
  d["p"] = m.p;
  d["bound"] = m.bound;
  d["iterations"] = m.iterations;
  d["converged"] = m.converged;
  d["final_constraint_violation"] = m.final_constraint_violation;
  d["density"] = m.density.rho;
  return d;
}

}  // namespace

PYBIND11_MODULE(_confkit, m) {
  m.doc() = "Quasiconformal map analysis, distribution lifting, staircase surfaces and discrete moduli";

  py::register_exception<Error>(m, "ConfkitError");

  m.def("list_maps", [] {
    py::list out;
    for (const auto& e : registry_listing()) {
      py::dict d;
      d["name"] = e.name;
      d["params"] = e.params;
      d["m"] = e.m;
      d["n"] = e.n;
      d["domain"] = e.domain;
      d["image_bound"] = e.image_bound;
      d["analytic_jacobian"] = e.analytic_jacobian;
      out.append(d);
    }
    return out;
  });

  m.def(
      "eccentricity",
      [](const std::string& map, const std::vector<double>& x) {
        const auto e = eccentricity_at(parse_map(map), Vector(x));
        py::dict d;
        d["K"] = e.eccentricity;
        d["rank"] = e.rank;
        d["singular_values"] = e.restricted_singular_values;
        return d;
      },
      py::arg("map"), py::arg("point"));

  m.def(
      "qc_profile",
      [](const std::string& map, std::size_t samples, std::pair<double, double> box, std::uint64_t seed,
         unsigned threads) {
        const auto p = global_qc_profile(parse_map(map), UniformBox{box.first, box.second, samples, seed}, threads);
        py::dict d;
        d["samples"] = p.samples;
        d["skipped"] = p.skipped;
        d["K_max"] = p.k_max;
        d["quantile_levels"] = p.quantile_levels;
        d["quantiles"] = p.quantiles;
        d["rank_deficient_count"] = p.rank_deficient_count;
        return d;
      },
      py::arg("map"), py::arg("samples") = 1000, py::arg("box") = std::pair{-1.0, 1.0}, py::arg("seed") = 0,
      py::arg("threads") = 0);

  m.def(
      "h_condition",
      [](const std::string& map, const std::vector<std::array<double, 3>>& triples, double cap) {
        std::vector<Triple> ts;
        for (const auto& t : triples) ts.push_back({t[0], t[1], t[2]});
        const auto r = h_condition_test(parse_map(map), ts, cap);
        py::dict d;
        d["h_estimate"] = r.h_estimate;
        d["worst_triple"] = std::array<double, 3>{r.worst_triple.a, r.worst_triple.b, r.worst_triple.c};
        d["unbounded_flag"] = r.unbounded_flag;
        return d;
      },
      py::arg("map"), py::arg("triples"), py::arg("cap") = 100.0);

  m.def(
      "frobenius_residual",
      [](const std::vector<double>& x, std::optional<std::string> map, std::optional<std::string> coframe) {
        return frobenius_residual(distribution(map, coframe), Vector(x));
      },
      py::arg("point"), py::kw_only(), py::arg("map") = py::none(), py::arg("coframe") = py::none());

  m.def(
      "lift_path",
      [](const std::string& path, const std::vector<double>& start, std::optional<std::string> map,
         std::optional<std::string> coframe, double step) {
        LiftOptions o;
        o.step = step;
        const auto p = lift_path(distribution(map, coframe), parse_path(path), Vector(start), o);
        py::dict d;
        d["status"] = std::string(to_string(p.status));
        d["t_stop"] = p.t_stop;
        d["max_error"] = p.max_error;
        std::vector<double> ts;
        std::vector<std::vector<double>> xs;
        for (const auto& s : p.samples) {
          ts.push_back(s.t);
          xs.push_back(s.x.values());
        }
        d["t"] = ts;
        d["x"] = xs;
        return d;
      },
      py::arg("path"), py::arg("start"), py::kw_only(), py::arg("map") = py::none(), py::arg("coframe") = py::none(),
      py::arg("step") = 1e-2);

  m.def(
      "holonomy",
      [](const std::string& loop, const std::vector<double>& start, std::optional<std::string> map,
         std::optional<std::string> coframe) {
        return holonomy_defect(distribution(map, coframe), parse_path(loop), Vector(start)).values();
      },
      py::arg("loop"), py::arg("start"), py::kw_only(), py::arg("map") = py::none(), py::arg("coframe") = py::none());

  m.def(
      "build_staircase",
      [](std::array<double, 4> segment, const std::vector<double>& start, std::optional<std::string> map,
         std::optional<std::string> coframe, double height, double step, int n_along, int n_up, bool bidirectional,
         unsigned threads) {
        StaircaseConfig cfg;
        cfg.segment_start = Vector{segment[0], segment[1]};
        cfg.segment_end = Vector{segment[2], segment[3]};
        cfg.start_lift = Vector(start);
        cfg.max_height = height;
        cfg.initial_step = step;
        cfg.n_along = n_along;
        cfg.n_up = n_up;
        cfg.bidirectional = bidirectional;
        cfg.threads = threads;
        return to_py(surface_to_json(build_staircase(distribution(map, coframe), cfg)));
      },
      py::arg("segment"), py::arg("start"), py::kw_only(), py::arg("map") = py::none(),
      py::arg("coframe") = py::none(), py::arg("height") = 1.0, py::arg("step") = 0.0, py::arg("n_along") = 9,
      py::arg("n_up") = 5, py::arg("bidirectional") = false, py::arg("threads") = 0);

  m.def(
      "growth_profile",
      [](const py::dict& surface, const std::vector<double>& radii,
         std::optional<std::pair<double, double>> seed_window) {
        MeshOptions o;
        o.seed_window = seed_window;
        const auto g = growth_profile(surface_from_json(from_py(surface)), radii, o);
        py::dict d;
        d["radii"] = g.radii;
        d["lengths"] = g.lengths;
        d["areas"] = g.areas;
        d["area_exponent"] = g.area_exponent;
        d["length_exponent"] = g.length_exponent;
        d["complete_radius"] = g.complete_radius;
        d["coarea_mismatch"] = g.coarea_mismatch;
        return d;
      },
      py::arg("surface"), py::arg("radii"), py::arg("seed_window") = py::none());

  m.def(
      "modulus_rectangle",
      [](int nx, int ny, double width, double height, const std::string& side, int k, double p) {
        const GridComplex g{nx, ny, width, height};
        const auto f = family_rectangle(g, side == "bt" ? GridSide::BottomTop : GridSide::LeftRight, k);
        return modulus_dict(f, modulus(f, g.areas(), p));
      },
      py::arg("nx") = 64, py::arg("ny") = 64, py::arg("width") = 1.0, py::arg("height") = 1.0,
      py::arg("side") = "lr", py::arg("k") = 4, py::arg("p") = 2.0);

  m.def(
      "modulus_annulus",
      [](double r_in, double r_out, double ratio, int sectors, double p) {
        const auto pc = PolarComplex::flat(PolarComplex::geometric_edges(r_in, r_out, ratio), sectors);
        const auto f = family_annulus(pc, r_in, r_out);
        return modulus_dict(f, modulus(f, pc.areas(), p));
      },
      py::arg("r_in") = 1.0, py::arg("r_out") = std::exp(1.0), py::arg("ratio") = 1.02, py::arg("sectors") = 64,
      py::arg("p") = 2.0);

  m.def(
      "modulus_lifted",
      [](const py::dict& surface, std::optional<double> radius, double p) {
        const auto s = surface_from_json(from_py(surface));
        const auto f = family_lifted_rays(s, segment_grid_points(s), radius);
        return modulus_dict(f, modulus(f, surface_complex(s).areas, p));
      },
      py::arg("surface"), py::arg("radius") = py::none(), py::arg("p") = 2.0);

  m.def(
      "parabolicity",
      [](const std::vector<double>& cutoffs, const std::vector<double>& alphas, const std::string& complex,
         double r_max, double ratio, int sectors, double curvature_radius) {
        std::vector<double> extra = cutoffs;
        extra.push_back(std::exp(1.0));
        const auto edges = PolarComplex::geometric_edges(1.0, r_max, ratio, extra);
        const auto pc = complex == "hyperbolic" ? PolarComplex::hyperbolic(edges, sectors, curvature_radius)
                                                : PolarComplex::flat(edges, sectors);
        const auto t = parabolicity_bound(pc, alphas, cutoffs);
        py::list rows;
        for (const auto& r : t.rows) {
          py::dict d;
          d["alpha"] = r.alpha;
          d["alpha_is_minimal"] = r.alpha_is_minimal;
          d["cutoff"] = r.cutoff;
          d["admissible"] = r.admissible;
          d["min_curve_length"] = r.min_curve_length;
          d["m_upper"] = r.m_upper;
          rows.append(d);
        }
        py::dict d;
        d["rows"] = rows;
        d["best_by_cutoff"] = t.best_by_cutoff;
        d["strictly_decreasing"] = t.strictly_decreasing;
        d["verdict"] = t.verdict;
        return d;
      },
      py::arg("cutoffs"), py::arg("alphas") = std::vector<double>{}, py::arg("complex") = "flat",
      py::arg("r_max") = 1e4, py::arg("ratio") = 1.05, py::arg("sectors") = 32, py::arg("curvature_radius") = 100.0);

  m.def(
      "demo_liouville",
      [](const std::string& map, double window, unsigned threads) {
        DemoOptions o;
        o.map = map;
        o.window = window;
        o.threads = threads;
        return to_py(demo_liouville(o));
      },
      py::arg("map") = "ortho_proj:3,2", py::arg("window") = 0.0, py::arg("threads") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command line in-process; returns (exit_code, stdout, stderr).");
}
