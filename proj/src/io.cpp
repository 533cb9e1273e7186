#include "confkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "confkit/error.hpp"

namespace confkit {

Json json_number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorCode::InvalidInput, "expected a number, got " + j.dump());
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (int i = 0; i < v.dim(); ++i) out.push_back(json_number(v[i]));
  return out;
}

Json to_json(const std::vector<Vector>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

Json to_json(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(json_number(x));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "expected an array of numbers");
  std::vector<double> xs;
  for (const auto& e : j) xs.push_back(number_from_json(e));
  return Vector(xs);
}

namespace {

std::vector<Vector> vectors_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "expected an array of points");
  std::vector<Vector> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(vector_from_json(e));
  return out;
}

}  // namespace

Json surface_to_json(const StaircaseSurface& s) {
  Json j;
  j["format"] = "confkit-staircase";
  j["version"] = kSurfaceFormatVersion;
  j["map"] = s.map_name;
  j["source_dim"] = s.source_dim;
  j["segment"] = {to_json(s.segment_start), to_json(s.segment_end)};
  j["up"] = to_json(s.up);
  j["n_along"] = s.n_along;
  j["status"] = s.status;
  j["message"] = s.message;
  j["h_infinity_up"] = json_number(s.h_infinity_up);
  j["h_infinity_down"] = json_number(s.h_infinity_down);
  j["heights"] = to_json(s.heights);
  j["base_lift"] = to_json(s.base_lift);
  j["railing"] = to_json(s.railing);
  j["singular_front"] = to_json(s.singular_front);
  Json patches = Json::array();
  for (const Patch& p : s.patches) {
    Json q;
    q["step"] = p.step;
    q["direction"] = p.direction;
    q["h0"] = json_number(p.h0);
    q["h1"] = json_number(p.h1);
    q["rows"] = p.rows;
    q["cols"] = p.cols;
    q["col_offset"] = p.col_offset;
    q["k_max"] = json_number(p.k_max);
    q["k_f_max"] = json_number(p.k_f_max);
    q["max_angle"] = json_number(p.max_angle);
    q["degenerate_quads"] = p.degenerate_quads;
    q["vertices"] = to_json(p.vertices);
    q["image"] = to_json(p.image);
    patches.push_back(std::move(q));
  }
  j["patches"] = std::move(patches);
  return j;
}

StaircaseSurface surface_from_json(const Json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "confkit-staircase") {
      throw Error(ErrorCode::InvalidSurface, "not a staircase surface document");
    }
    if (j.at("version").get<int>() != kSurfaceFormatVersion) {
      throw Error(ErrorCode::InvalidSurface, "unsupported surface format version");
    }
    StaircaseSurface s;
    s.map_name = j.at("map").get<std::string>();
    s.source_dim = j.at("source_dim").get<int>();
    s.segment_start = vector_from_json(j.at("segment").at(0));
    s.segment_end = vector_from_json(j.at("segment").at(1));
    s.up = vector_from_json(j.at("up"));
    s.n_along = j.at("n_along").get<int>();
    s.status = j.at("status").get<std::string>();
    s.message = j.value("message", "");
    s.h_infinity_up = number_from_json(j.at("h_infinity_up"));
    s.h_infinity_down = number_from_json(j.at("h_infinity_down"));
    for (const auto& h : j.at("heights")) s.heights.push_back(number_from_json(h));
    s.base_lift = vectors_from_json(j.at("base_lift"));
    s.railing = vectors_from_json(j.at("railing"));
    s.singular_front = vectors_from_json(j.at("singular_front"));
    if (static_cast<int>(s.base_lift.size()) != s.n_along || s.n_along < 2) {
      throw Error(ErrorCode::InvalidSurface, "base lift does not match n_along");
    }
    for (const auto& q : j.at("patches")) {
      Patch p;
      p.step = q.at("step").get<int>();
      p.direction = q.at("direction").get<int>();
      p.h0 = number_from_json(q.at("h0"));
      p.h1 = number_from_json(q.at("h1"));
      p.rows = q.at("rows").get<int>();
      p.cols = q.at("cols").get<int>();
      p.col_offset = q.at("col_offset").get<int>();
      p.k_max = number_from_json(q.at("k_max"));
      p.k_f_max = number_from_json(q.at("k_f_max"));
      p.max_angle = number_from_json(q.at("max_angle"));
      p.degenerate_quads = q.value("degenerate_quads", std::size_t{0});
      p.vertices = vectors_from_json(q.at("vertices"));
      p.image = vectors_from_json(q.at("image"));
      const std::size_t count = static_cast<std::size_t>(p.rows) * p.cols;
      if (p.rows < 2 || p.cols < 1 || p.vertices.size() != count || p.image.size() != count ||
          p.col_offset < 0 || p.col_offset + p.cols > s.n_along) {
        throw Error(ErrorCode::InvalidSurface, "patch grid is inconsistent");
      }
      for (const auto& v : p.vertices) {
        if (v.dim() != s.source_dim) throw Error(ErrorCode::InvalidSurface, "vertex dimension mismatch");
      }
      s.patches.push_back(std::move(p));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSurface, std::string("malformed surface document: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidInput) throw Error(ErrorCode::InvalidSurface, e.what());
    throw;
  }
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_number(row[i]);
    out << "\r\n";
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::InvalidInput, "failed writing " + path);
}

}  // namespace confkit
