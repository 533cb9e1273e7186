#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "confkit/linalg.hpp"
#include "confkit/staircase.hpp"

namespace confkit {

using Json = nlohmann::ordered_json;

// Finite values as numbers, ±inf as the strings "inf" / "-inf", NaN as null.
Json json_number(double x);
double number_from_json(const Json& j);

Json to_json(const Vector& v);
Json to_json(const std::vector<Vector>& vs);
Json to_json(const std::vector<double>& xs);
Vector vector_from_json(const Json& j);

inline constexpr int kSurfaceFormatVersion = 1;

Json surface_to_json(const StaircaseSurface& s);
// Throws InvalidSurface on a malformed document.
StaircaseSurface surface_from_json(const Json& j);

// %.17g; ±inf as "inf" / "-inf", NaN as "nan".
std::string csv_number(double x);
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace confkit
