#include "confkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "confkit/error.hpp"
#include "confkit/maps.hpp"
#include "confkit/modulus.hpp"
#include "confkit/qc.hpp"
#include "confkit/staircase.hpp"

namespace confkit {

namespace {

std::vector<double> numbers(const std::string& text, std::size_t expected, const char* what) {
  const auto xs = parse_number_list(text);
  if (expected != 0 && xs.size() != expected) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " needs " + std::to_string(expected) + " numbers");
  }
  return xs;
}

std::string fmt(double x) { return csv_number(x); }

}  // namespace

Path parse_path(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidInput, "path needs kind:params, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon), body = spec.substr(colon + 1);
  if (kind == "segment") {
    const auto v = numbers(body, 4, "segment");
    return Path::segment(Vector{v[0], v[1]}, Vector{v[2], v[3]});
  }
  if (kind == "rect") {
    const auto v = numbers(body, 4, "rect");
    return Path::rectangle(v[0], v[1], v[2], v[3]);
  }
  if (kind == "circle") {
    const auto v = numbers(body, 3, "circle");
    return Path::circle(Vector{v[0], v[1]}, v[2]);
  }
  if (kind == "polyline") {
    std::vector<Vector> pts;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ';')) pts.emplace_back(numbers(item, 0, "polyline"));
    return Path::polyline(pts);
  }
  throw Error(ErrorCode::InvalidInput, "unknown path kind '" + kind + "'");
}

// ---------------------------------------------------------------- demo

Json demo_liouville(const DemoOptions& opts) {
  const MapSpec f = parse_map(opts.map);
  Json report;
  report["map"] = f.name();
  const QcProfile qc = global_qc_profile(f, UniformBox{-2.0, 2.0, 200, opts.seed}, opts.threads);
  report["K_max"] = json_number(qc.k_max);
  report["rank_deficient_count"] = qc.rank_deficient_count;
  if (qc.rank_deficient_count > 0) {
    report["status"] = "rejected";
    report["verdict"] = "rejected: Jacobian rank below 2 at sampled points, not conformal in the sense of Gromov";
    return report;
  }
  if (f.target_dim() != 2 || f.source_dim() <= 2) {
    throw Error(ErrorCode::Unsupported, "the pipeline needs a map R^m -> R^2 with m > 2");
  }

  // Sampled sup |F| over growing boxes, sharpened by a pattern search from the
  // best sample; cumulative over the boxes.
  Json sups = Json::array();
  std::vector<double> sup_values;
  double sup = 0.0;
  bool diverging = false;
  for (double half : {1.0, 4.0, 16.0, 64.0}) {
    const auto value = [&](const Vector& x) {
      for (double xi : x) {
        if (std::abs(xi) > half) return -1.0;
      }
      if (!f.in_domain(x)) return -1.0;
      const double v = norm(f(x));
      return std::isfinite(v) ? v : -1.0;
    };
    Vector best;
    double best_value = -1.0;
    for (const Vector& x : draw_samples(UniformBox{-half, half, 400, opts.seed}, f.source_dim())) {
      const double v = value(x);
      if (v > best_value) {
        best_value = v;
        best = x;
      }
    }
    // A finite maximum settles long before the step underflows; a pole keeps
    // the value growing as the step shrinks.
    double settled = -1.0;
    for (double step = half / 8; best_value >= 0.0 && step > 1e-10 * half;) {
      if (settled < 0.0 && step < 1e-4 * half) settled = best_value;
      bool moved = false;
      for (int i = 0; i < f.source_dim() && !moved; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vector y = best;
          y[i] += sgn * step;
          const double v = value(y);
          if (v > best_value) {
            best_value = v;
            best = y;
            moved = true;
            break;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    const bool pole = settled > 0.0 && best_value > 10.0 * settled;
    diverging = diverging || pole;
    sup = std::max(sup, best_value);
    sup_values.push_back(sup);
    sups.push_back({{"box", half}, {"sup_norm", json_number(sup)}, {"diverging_ascent", pole}});
  }
  const bool bounded = f.image_bound().has_value() ||
                       (!diverging && sup_values.back() <= 1.05 * sup_values[sup_values.size() - 2]);
  report["image_sup_by_box"] = sups;
  report["bounded_image"] = bounded;

  // Staircase over a segment through F(probe).
  Vector probe(f.source_dim());
  if (!opts.probe.empty()) {
    if (static_cast<int>(opts.probe.size()) != f.source_dim()) throw Error(ErrorCode::DimensionError, "probe dimension");
    probe = Vector(opts.probe);
  } else {
    for (int i = 0; i < f.source_dim(); ++i) probe[i] = 0.5 / (1 << i);
  }
  const double w = opts.window > 0.0 ? opts.window : 2.0;
  const Distribution d = Distribution::from_map(f);
  const Vector c = f(probe);
  StaircaseConfig cfg;
  cfg.segment_start = Vector{c[0] - w, c[1]};
  cfg.segment_end = Vector{c[0] + w, c[1]};
  cfg.max_height = 2 * w;
  cfg.n_along = opts.n_along;
  cfg.n_up = opts.n_up;
  cfg.threads = opts.threads;
  report["window"] = w;
  report["artificial_window"] = opts.window > 0.0;

  Json stair;
  StaircaseSurface s;
  try {
    const LiftedPath to_start = lift_path(d, Path::segment(c, cfg.segment_start), probe);
    if (to_start.status != LiftStatus::Completed) {
      throw Error(ErrorCode::StepCollapse, "cannot reach the segment start: " + std::string(to_string(to_start.status)));
    }
    cfg.start_lift = to_start.end();
    s = build_staircase(d, cfg);
    stair["status"] = s.status;
    stair["h_infinity"] = json_number(s.h_infinity_up);
    stair["patches"] = s.patches.size();
    double k = 0.0;
    for (const auto& p : s.patches) k = std::max(k, p.k_max);
    stair["k_max"] = json_number(k);
  } catch (const Error& e) {
    stair["status"] = "failed";
    stair["error"] = std::string(e.what());
    report["staircase"] = stair;
    report["status"] = "partial";
    report["verdict"] = "construction halted";
    return report;
  }
  report["staircase"] = stair;
  const double h = s.h_infinity_up;

  // Geodesic balls around the middle of the lifted segment, within the radius
  // where they stay complete.
  Json growth;
  try {
    double arc = 0.0;
    for (std::size_t j = 1; j <= s.base_lift.size() / 2; ++j) arc += distance(s.base_lift[j - 1], s.base_lift[j]);
    MeshOptions mesh;
    mesh.seed_window = std::pair{arc - 1e-9, arc + 1e-9};
    const double complete = growth_profile(s, {1e-12}, mesh).complete_radius;
    const GrowthProfile g = growth_profile(s, {0.2 * complete, 0.4 * complete, 0.6 * complete, 0.8 * complete}, mesh);
    growth["radii"] = to_json(g.radii);
    growth["areas"] = to_json(g.areas);
    growth["lengths"] = to_json(g.lengths);
    growth["area_exponent"] = json_number(g.area_exponent);
    growth["length_exponent"] = json_number(g.length_exponent);
  } catch (const Error& e) {
    growth["error"] = std::string(e.what());
  }
  report["growth"] = growth;

  const GridComplex image{32, 32, 2 * w, h};
  ModulusOptions mo;
  mo.threads = opts.threads;
  const double m_image = modulus(family_rectangle(image, GridSide::BottomTop, 4), image.areas(), 2, mo).value;
  report["M_image"] = json_number(m_image);

  // Truncation radii: fractions of the smallest geodesic height any ray reaches.
  const TriangleMesh mesh = surface_mesh(s);
  const std::vector<double> dist = geodesic_distances(mesh);
  std::vector<double> reach(s.n_along, 0.0);
  for (std::size_t pi = 0; pi < s.patches.size(); ++pi) {
    const Patch& p = s.patches[pi];
    if (p.direction != 1) continue;
    for (int c = 0; c < p.cols; ++c) {
      const double top = dist[mesh.patch_vertex_ids[pi][static_cast<std::size_t>(p.rows - 1) * p.cols + c]];
      reach[p.col_offset + c] = std::max(reach[p.col_offset + c], top);
    }
  }
  const double r_reach = *std::min_element(reach.begin(), reach.end());
  const SurfaceComplex cx = surface_complex(s);
  Json lifted = Json::array();
  std::vector<double> values;
  for (double frac : {0.25, 0.5, 0.9}) {
    const double radius = frac * r_reach;
    Json row;
    row["radius"] = json_number(radius);
    try {
      const double v = modulus(family_lifted_rays(s, segment_grid_points(s), radius), cx.areas, 2, mo).value;
      row["M_upper"] = json_number(v);
      values.push_back(v);
    } catch (const Error& e) {
      row["M_upper"] = nullptr;
      row["error"] = std::string(e.what());
    }
    lifted.push_back(row);
  }
  report["M_lifted"] = lifted;
  bool decreasing = values.size() >= 2;
  for (std::size_t i = 1; i < values.size(); ++i) decreasing = decreasing && values[i] < values[i - 1];
  report["M_lifted_decreasing"] = decreasing;
  report["contradiction_indicators"] = {{"M_image_positive", m_image > 0.0}, {"M_lifted_decreasing", decreasing}};

  report["status"] = "completed";
  if (bounded) {
    report["verdict"] = m_image > 0.0 && decreasing ? "contradiction indicated" : "inconclusive";
  } else if (opts.window > 0.0) {
    report["verdict"] = "no contradiction expected: the image is bounded only by the artificial window";
  } else {
    report["verdict"] = "hypothesis unmet: the image is not bounded";
  }
  return report;
}

// ---------------------------------------------------------------- command line

namespace {

struct Output {
  std::string path;
  std::string format;  // json | csv | "" (command default)

  bool csv(const std::string& fallback) const {
    if (!format.empty()) return format == "csv";
    if (!path.empty() && std::filesystem::path(path).extension() == ".csv") return true;
    return fallback == "csv";
  }
};

struct Emitter {
  std::ostream& out;
  std::ostream& err;

  void emit(const Output& o, const std::string& doc, const std::string& summary) const {
    if (o.path.empty()) {
      out << doc;
      err << summary << "\n";
    } else {
      write_text_file(o.path, doc);
      out << summary << "\n";
    }
  }
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Distribution distribution_from(const std::string& map, const std::string& coframe) {
  if (!map.empty() && !coframe.empty()) throw Error(ErrorCode::InvalidInput, "give either --map or --coframe");
  if (!coframe.empty()) return Distribution::from_coframe(parse_coframe(coframe));
  if (map.empty()) throw Error(ErrorCode::InvalidInput, "--map or --coframe is required");
  return Distribution::from_map(parse_map(map));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"confkit: quasiconformal maps, distributions, staircases and moduli", "confkit"};
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags");
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)")->envname("CONFKIT_THREADS");
  app.add_option("--seed", seed, "seed for random sampling");

  Output o;
  const auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", o.path, "output file (default: stdout)");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  std::function<void()> action;
  const Emitter em{out, err};

  // list-maps
  auto* list = app.add_subcommand("list-maps", "registry entries as JSON");
  add_output(list);
  list->callback([&] {
    action = [&] {
      Json arr = Json::array();
      for (const auto& e : registry_listing()) {
        arr.push_back({{"name", e.name},
                       {"params", e.params},
                       {"m", e.m},
                       {"n", e.n},
                       {"domain", e.domain},
                       {"image_bound", e.image_bound ? json_number(*e.image_bound) : Json(nullptr)},
                       {"analytic_jacobian", e.analytic_jacobian}});
      }
      em.emit(o, dump(arr), std::to_string(arr.size()) + " maps");
    };
  });

  // analyze-map
  std::string map_spec, coframe_spec;
  std::size_t samples = 1000;
  std::string box = "-1,1", shell;
  std::string quantiles = "0.5,0.9,0.99";
  auto* analyze = app.add_subcommand("analyze-map", "sampled eccentricity profile");
  analyze->add_option("--map", map_spec, "map, e.g. ortho_proj:3,2")->required();
  analyze->add_option("--samples", samples);
  analyze->add_option("--box", box, "lo,hi of the sampling cube");
  analyze->add_option("--shell", shell, "inner,outer radii of a sampling shell (overrides --box)");
  analyze->add_option("--quantiles", quantiles);
  add_output(analyze);
  analyze->callback([&] {
    action = [&] {
      const MapSpec f = parse_map(map_spec);
      SamplingPlan plan;
      if (!shell.empty()) {
        const auto r = numbers(shell, 2, "--shell");
        plan = AnnularShell{r[0], r[1], samples, seed};
      } else {
        const auto b = numbers(box, 2, "--box");
        plan = UniformBox{b[0], b[1], samples, seed};
      }
      const QcProfile p = global_qc_profile(f, plan, threads, parse_number_list(quantiles));
      const std::size_t full_rank = p.samples - p.rank_deficient_count;
      Json j;
      j["map"] = f.name();
      j["source_dim"] = f.source_dim();
      j["target_dim"] = f.target_dim();
      j["samples"] = p.samples;
      j["skipped"] = p.skipped;
      j["seed"] = seed;
      j["K_max"] = json_number(p.k_max);
      j["quantile_levels"] = to_json(p.quantile_levels);
      j["quantiles"] = to_json(p.quantiles);
      j["rank_deficient_count"] = p.rank_deficient_count;
      j["full_rank_count"] = full_rank;
      j["classification"] = p.rank_deficient_count > 0 ? "rank-deficient" : "full-rank";
      em.emit(o, dump(j), f.name() + ": K_max=" + fmt(p.k_max) + " over " + std::to_string(p.samples) +
                              " samples, rank deficient at " + std::to_string(p.rank_deficient_count));
    };
  });

  // h-condition
  std::string range = "-1,1", spacings = "0.25,1,4";
  std::size_t count = 64;
  std::vector<std::string> triples;
  double cap = 100.0;
  auto* hcond = app.add_subcommand("h-condition", "three-point ratio test for 1-D maps");
  hcond->add_option("--map", map_spec)->required();
  hcond->add_option("--range", range, "lo,hi of the triple start grid");
  hcond->add_option("--count", count);
  hcond->add_option("--spacings", spacings);
  hcond->add_option("--triple", triples, "explicit triple a,b,c (repeatable; overrides the grid)");
  hcond->add_option("--cap", cap, "ratio above which the map is flagged unbounded");
  add_output(hcond);
  hcond->callback([&] {
    action = [&] {
      const MapSpec f = parse_map(map_spec);
      TripleSampler sampler;
      if (!triples.empty()) {
        std::vector<Triple> ts;
        for (const auto& t : triples) {
          const auto v = numbers(t, 3, "--triple");
          ts.push_back({v[0], v[1], v[2]});
        }
        sampler = ts;
      } else {
        const auto r = numbers(range, 2, "--range");
        sampler = TripleGrid{r[0], r[1], count, parse_number_list(spacings)};
      }
      const HConditionReport h = h_condition_test(f, sampler, cap);
      Json j;
      j["map"] = f.name();
      j["h_estimate"] = json_number(h.h_estimate);
      j["worst_triple"] = {json_number(h.worst_triple.a), json_number(h.worst_triple.b), json_number(h.worst_triple.c)};
      j["unbounded_flag"] = h.unbounded_flag;
      j["cap"] = cap;
      em.emit(o, dump(j), f.name() + ": h=" + fmt(h.h_estimate) + (h.unbounded_flag ? " (unbounded)" : ""));
    };
  });

  // check-integrability
  auto* integ = app.add_subcommand("check-integrability", "Frobenius residual at sampled points");
  integ->add_option("--map", map_spec);
  integ->add_option("--coframe", coframe_spec, "flat or contact:eps");
  integ->add_option("--samples", samples);
  integ->add_option("--box", box);
  add_output(integ);
  integ->callback([&] {
    action = [&] {
      const Distribution d = distribution_from(map_spec, coframe_spec);
      const auto b = numbers(box, 2, "--box");
      const auto pts = draw_samples(UniformBox{b[0], b[1], samples, seed}, d.source_dim());
      std::vector<std::vector<double>> rows;
      std::vector<double> res;
      for (const Vector& x : pts) {
        if (!d.in_domain(x)) continue;
        const double r = frobenius_residual(d, x);
        res.push_back(r);
        auto row = x.values();
        row.push_back(r);
        rows.push_back(std::move(row));
      }
      if (res.empty()) throw Error(ErrorCode::EmptySample, "no sample lies in the domain");
      const double lo = *std::min_element(res.begin(), res.end());
      const double hi = *std::max_element(res.begin(), res.end());
      double mean = 0.0;
      for (double r : res) mean += r;
      mean /= static_cast<double>(res.size());
      const bool integrable = hi <= 1e-8;
      const std::string summary = d.name() + ": residual in [" + fmt(lo) + ", " + fmt(hi) + "], " +
                                  (integrable ? "integrable" : "nonintegrable");
      if (o.csv("json")) {
        std::ostringstream ss;
        std::vector<std::string> header;
        for (int i = 0; i < d.source_dim(); ++i) header.push_back("x" + std::to_string(i + 1));
        header.push_back("residual");
        write_csv(ss, header, rows);
        em.emit(o, ss.str(), summary);
      } else {
        Json j;
        j["distribution"] = d.name();
        j["samples"] = res.size();
        j["seed"] = seed;
        j["residual_min"] = json_number(lo);
        j["residual_max"] = json_number(hi);
        j["residual_mean"] = json_number(mean);
        j["integrable"] = integrable;
        em.emit(o, dump(j), summary);
      }
    };
  });

  // lift-path
  std::string path_spec, start_spec;
  LiftOptions lift;
  auto* liftc = app.add_subcommand("lift-path", "horizontal lift of a base path");
  liftc->add_option("--map", map_spec);
  liftc->add_option("--coframe", coframe_spec);
  liftc->add_option("--path", path_spec, "segment:..., rect:..., circle:... or polyline:...")->required();
  liftc->add_option("--start", start_spec, "start point in the source space")->required();
  liftc->add_option("--step", lift.step);
  liftc->add_option("--lift-tol", lift.lift_tol);
  liftc->add_option("--r-max", lift.r_max);
  add_output(liftc);
  liftc->callback([&] {
    action = [&] {
      const Distribution d = distribution_from(map_spec, coframe_spec);
      const LiftedPath p = lift_path(d, parse_path(path_spec), Vector(parse_number_list(start_spec)), lift);
      const std::string summary = d.name() + ": " + std::string(to_string(p.status)) + " at t=" + fmt(p.t_stop) +
                                  ", max error " + fmt(p.max_error);
      if (o.csv("json")) {
        std::ostringstream ss;
        std::vector<std::string> header{"t"};
        for (int i = 0; i < d.source_dim(); ++i) header.push_back("x" + std::to_string(i + 1));
        std::vector<std::vector<double>> rows;
        for (const auto& s : p.samples) {
          std::vector<double> row{s.t};
          row.insert(row.end(), s.x.begin(), s.x.end());
          rows.push_back(std::move(row));
        }
        write_csv(ss, header, rows);
        em.emit(o, ss.str(), summary);
      } else {
        Json j;
        j["distribution"] = d.name();
        j["path"] = path_spec;
        j["status"] = std::string(to_string(p.status));
        j["t_stop"] = json_number(p.t_stop);
        j["max_error"] = json_number(p.max_error);
        j["max_drift"] = json_number(p.max_drift);
        j["message"] = p.message;
        Json ss = Json::array();
        for (const auto& s : p.samples) ss.push_back({{"t", json_number(s.t)}, {"x", to_json(s.x)}});
        j["samples"] = ss;
        em.emit(o, dump(j), summary);
      }
    };
  });

  // holonomy
  std::string loop_spec;
  auto* holo = app.add_subcommand("holonomy", "endpoint defect of a lifted closed loop");
  holo->add_option("--map", map_spec);
  holo->add_option("--coframe", coframe_spec);
  holo->add_option("--loop", loop_spec, "rect:x0,y0,x1,y1, circle:cx,cy,r or polyline:...")->required();
  holo->add_option("--start", start_spec, "start point (coframes default to (x, y, 0) over the loop start)");
  holo->add_option("--step", lift.step);
  holo->add_option("--lift-tol", lift.lift_tol);
  add_output(holo);
  holo->callback([&] {
    action = [&] {
      const Distribution d = distribution_from(map_spec, coframe_spec);
      const Path loop = parse_path(loop_spec);
      Vector start;
      if (!start_spec.empty()) {
        start = Vector(parse_number_list(start_spec));
      } else if (!d.is_map()) {
        const Vector b = loop.at(0.0);
        start = Vector{b[0], b[1], 0.0};
      } else {
        throw Error(ErrorCode::InvalidInput, "--start is required for map distributions");
      }
      const Vector defect = holonomy_defect(d, loop, start, lift);
      Json j;
      j["distribution"] = d.name();
      j["loop"] = loop_spec;
      j["start"] = to_json(start);
      j["defect"] = to_json(defect);
      j["defect_norm"] = json_number(norm(defect));
      j["fiber_defect"] = json_number(defect[defect.dim() - 1]);
      em.emit(o, dump(j), d.name() + ": defect " + fmt(defect[defect.dim() - 1]) + " in the last coordinate, norm " +
                              fmt(norm(defect)));
    };
  });

  // build-staircase
  StaircaseConfig cfg;
  std::string segment_spec, up_spec = "0,1";
  auto* build = app.add_subcommand("build-staircase", "staircase surface over a base segment");
  build->add_option("--map", map_spec);
  build->add_option("--coframe", coframe_spec);
  build->add_option("--segment", segment_spec, "x0,y0,x1,y1")->required();
  build->add_option("--start", start_spec, "lift of the segment start")->required();
  build->add_option("--up", up_spec, "ray direction in the base plane");
  build->add_option("--height", cfg.max_height);
  build->add_option("--step", cfg.initial_step, "initial step height (0: height/4)");
  build->add_option("--min-step", cfg.min_step);
  build->add_option("--max-step", cfg.max_step, "0: unlimited");
  build->add_option("--n-along", cfg.n_along);
  build->add_option("--n-up", cfg.n_up);
  build->add_option("--k-factor", cfg.k_factor);
  build->add_option("--angle-tol", cfg.angle_tol);
  build->add_flag("--bidirectional", cfg.bidirectional, "also sweep against --up");
  add_output(build);
  build->callback([&] {
    action = [&] {
      const Distribution d = distribution_from(map_spec, coframe_spec);
      const auto seg = numbers(segment_spec, 4, "--segment");
      cfg.segment_start = Vector{seg[0], seg[1]};
      cfg.segment_end = Vector{seg[2], seg[3]};
      cfg.start_lift = Vector(parse_number_list(start_spec));
      cfg.up = Vector(numbers(up_spec, 2, "--up"));
      cfg.threads = threads;
      const StaircaseSurface s = build_staircase(d, cfg);
      em.emit(o, dump(surface_to_json(s)),
              d.name() + ": " + s.status + ", " + std::to_string(s.patches.size()) + " patches, h_inf=" +
                  fmt(s.h_infinity_up));
    };
  });

  // area-growth
  std::string surface_path, radii_spec, window_spec;
  MeshOptions mesh_opts;
  auto* growth = app.add_subcommand("area-growth", "L(r) and A(r) of geodesic balls on a surface");
  growth->add_option("--surface", surface_path)->required();
  growth->add_option("--radii", radii_spec)->required();
  growth->add_option("--seed-window", window_spec, "arc-length window a,b of the seed on the lifted segment");
  growth->add_option("--merge-tol", mesh_opts.merge_tol);
  add_output(growth);
  const auto apply_window = [&] {
    if (!window_spec.empty()) {
      const auto w = numbers(window_spec, 2, "--seed-window");
      mesh_opts.seed_window = std::pair{w[0], w[1]};
    }
  };
  growth->callback([&] {
    action = [&] {
      apply_window();
      const StaircaseSurface s = surface_from_json(read_json_file(surface_path));
      const GrowthProfile g = growth_profile(s, parse_number_list(radii_spec), mesh_opts);
      const std::string summary = "area exponent " + fmt(g.area_exponent) + ", length exponent " +
                                  fmt(g.length_exponent) + ", coarea mismatch " + fmt(g.coarea_mismatch);
      if (o.csv("csv")) {
        std::ostringstream ss;
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < g.radii.size(); ++i) rows.push_back({g.radii[i], g.lengths[i], g.areas[i]});
        write_csv(ss, {"r", "L", "A"}, rows);
        em.emit(o, ss.str(), summary);
      } else {
        Json j;
        j["radii"] = to_json(g.radii);
        j["lengths"] = to_json(g.lengths);
        j["areas"] = to_json(g.areas);
        j["area_exponent"] = json_number(g.area_exponent);
        j["length_exponent"] = json_number(g.length_exponent);
        j["extent"] = json_number(g.extent);
        j["complete_radius"] = json_number(g.complete_radius);
        j["coarea_mismatch"] = json_number(g.coarea_mismatch);
        em.emit(o, dump(j), summary);
      }
    };
  });

  // estimate-modulus
  std::string complex_spec = "grid", family_spec = "rect", side = "lr";
  double p_exp = 2.0;
  GridComplex grid{64, 64, 1.0, 1.0};
  int k_detours = 4;
  double r_in = 1.0, r_out = std::exp(1.0), ring_ratio = 1.02;
  int sectors = 64;
  std::optional<double> radius;
  ModulusOptions mod_opts;
  bool with_density = false;
  auto* est = app.add_subcommand("estimate-modulus", "discrete p-modulus upper bound");
  est->add_option("--complex", complex_spec, "grid, annulus or a surface JSON file");
  est->add_option("--family", family_spec, "rect, annulus or lifted");
  est->add_option("--p", p_exp);
  est->add_option("--nx", grid.nx);
  est->add_option("--ny", grid.ny);
  est->add_option("--width", grid.width);
  est->add_option("--height", grid.height);
  est->add_option("--side", side, "lr (left-right) or bt (bottom-top)")->check(CLI::IsMember({"lr", "bt"}));
  est->add_option("--k", k_detours, "staircase detours per row");
  est->add_option("--r-in", r_in);
  est->add_option("--r-out", r_out);
  est->add_option("--ring-ratio", ring_ratio);
  est->add_option("--sectors", sectors);
  est->add_option("--radius", radius, "truncate lifted rays at this geodesic radius");
  est->add_option("--seed-window", window_spec);
  est->add_option("--max-iterations", mod_opts.max_iterations);
  est->add_option("--tol", mod_opts.rel_tol);
  est->add_flag("--density", with_density, "include the density field");
  add_output(est);
  est->callback([&] {
    action = [&] {
      apply_window();
      mod_opts.threads = threads;
      CurveFamily family;
      std::vector<double> areas;
      if (complex_spec == "grid") {
        if (family_spec != "rect") throw Error(ErrorCode::InvalidFamily, "grid complexes take --family rect");
        family = family_rectangle(grid, side == "lr" ? GridSide::LeftRight : GridSide::BottomTop, k_detours);
        areas = grid.areas();
      } else if (complex_spec == "annulus") {
        if (family_spec != "annulus") throw Error(ErrorCode::InvalidFamily, "annulus complexes take --family annulus");
        const auto pc = PolarComplex::flat(PolarComplex::geometric_edges(r_in, r_out, ring_ratio), sectors);
        family = family_annulus(pc, r_in, r_out);
        areas = pc.areas();
      } else {
        if (family_spec != "lifted") throw Error(ErrorCode::InvalidFamily, "surface complexes take --family lifted");
        const StaircaseSurface s = surface_from_json(read_json_file(complex_spec));
        family = family_lifted_rays(s, segment_grid_points(s), radius, mesh_opts);
        areas = surface_complex(s).areas;
      }
      const ModulusEstimate m = modulus(family, areas, p_exp, mod_opts);
      Json j;
      j["complex"] = complex_spec;
      j["family"] = family.description;
      j["curves"] = family.curves.size();
      j["cells"] = family.cell_count;
      j["p"] = m.p;
      j["value"] = json_number(m.value);
      j["bound"] = m.bound;
      j["iterations"] = m.iterations;
      j["converged"] = m.converged;
      j["final_constraint_violation"] = json_number(m.final_constraint_violation);
      j["dual_value"] = json_number(m.dual_value);
      if (with_density) j["density"] = to_json(m.density.rho);
      em.emit(o, dump(j), family.description + ": modulus <= " + fmt(m.value) + " after " +
                              std::to_string(m.iterations) + " iterations");
    };
  });

  // parabolicity
  std::string alphas_spec, cutoffs_spec, plane = "flat";
  ParabolicityOptions par_opts;
  bool no_alpha_min = false;
  double r_max = 1e4, curvature = 1.0;
  int par_sectors = 32;
  double par_ratio = 1.05;
  auto* para = app.add_subcommand("parabolicity", "M_upper table for rho = alpha/(r ln r)");
  para->add_option("--surface", surface_path, "surface JSON (default: a polar complex)");
  para->add_option("--complex", plane, "flat or hyperbolic polar complex")->check(CLI::IsMember({"flat", "hyperbolic"}));
  para->add_option("--r-max", r_max);
  para->add_option("--ring-ratio", par_ratio);
  para->add_option("--sectors", par_sectors);
  para->add_option("--curvature-radius", curvature);
  para->add_option("--alphas", alphas_spec);
  para->add_option("--cutoffs", cutoffs_spec)->required();
  para->add_option("--r0", par_opts.r0);
  para->add_option("--seed-radius", par_opts.seed_radius);
  para->add_option("--threshold", par_opts.threshold);
  para->add_flag("--no-alpha-min", no_alpha_min, "omit the alpha_min(R) rows");
  para->add_option("--seed-window", window_spec);
  add_output(para);
  para->callback([&] {
    action = [&] {
      apply_window();
      par_opts.include_alpha_min = !no_alpha_min;
      const auto alphas = alphas_spec.empty() ? std::vector<double>{} : parse_number_list(alphas_spec);
      const auto cutoffs = parse_number_list(cutoffs_spec);
      ParabolicityTable t;
      if (!surface_path.empty()) {
        t = parabolicity_bound(surface_from_json(read_json_file(surface_path)), alphas, cutoffs, par_opts, mesh_opts);
      } else {
        auto extra = cutoffs;
        extra.push_back(par_opts.r0);
        extra.push_back(par_opts.seed_radius);
        const auto edges = PolarComplex::geometric_edges(par_opts.seed_radius, r_max, par_ratio, extra);
        const auto pc = plane == "flat" ? PolarComplex::flat(edges, par_sectors)
                                        : PolarComplex::hyperbolic(edges, par_sectors, curvature);
        t = parabolicity_bound(pc, alphas, cutoffs, par_opts);
      }
      const std::string summary = t.verdict + ", best M_upper at the last cutoff " + fmt(t.best_by_cutoff.back());
      if (o.csv("csv")) {
        std::ostringstream ss;
        std::vector<std::vector<double>> rows;
        for (const auto& r : t.rows) {
          rows.push_back({r.alpha, r.alpha_is_minimal ? 1.0 : 0.0, r.cutoff, r.admissible ? 1.0 : 0.0,
                          r.min_curve_length, r.m_upper});
        }
        write_csv(ss, {"alpha", "alpha_is_minimal", "cutoff", "admissible", "min_curve_length", "m_upper"}, rows);
        em.emit(o, ss.str(), summary);
      } else {
        Json j;
        Json rows = Json::array();
        for (const auto& r : t.rows) {
          rows.push_back({{"alpha", json_number(r.alpha)},
                          {"alpha_is_minimal", r.alpha_is_minimal},
                          {"cutoff", json_number(r.cutoff)},
                          {"admissible", r.admissible},
                          {"min_curve_length", json_number(r.min_curve_length)},
                          {"m_upper", json_number(r.m_upper)}});
        }
        j["rows"] = rows;
        j["cutoffs"] = to_json(cutoffs);
        j["best_by_cutoff"] = to_json(t.best_by_cutoff);
        j["strictly_decreasing"] = t.strictly_decreasing;
        j["threshold"] = par_opts.threshold;
        j["verdict"] = t.verdict;
        em.emit(o, dump(j), summary);
      }
    };
  });

  // demo-liouville
  DemoOptions demo;
  std::string probe_spec;
  auto* demo_cmd = app.add_subcommand("demo-liouville", "end-to-end contradiction-indicator report");
  demo_cmd->add_option("--map", demo.map);
  demo_cmd->add_option("--window", demo.window, "artificial image window half-width");
  demo_cmd->add_option("--probe", probe_spec, "source point the construction starts from");
  demo_cmd->add_option("--n-along", demo.n_along);
  demo_cmd->add_option("--n-up", demo.n_up);
  add_output(demo_cmd);
  int demo_status = 0;
  demo_cmd->callback([&] {
    action = [&] {
      demo.seed = seed;
      demo.threads = threads;
      if (!probe_spec.empty()) demo.probe = parse_number_list(probe_spec);
      const Json j = demo_liouville(demo);
      if (j.at("status") == "rejected") demo_status = 2;
      em.emit(o, dump(j), j.at("map").get<std::string>() + ": " + j.at("verdict").get<std::string>());
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  try {
    if (action) action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return demo_status;
}

}  // namespace confkit
