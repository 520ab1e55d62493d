#pragma once

// Matrix (de)serialization shared library-wide: dense row-major CSV and the
// JSON object {"dim": n, "entries": [[...], ...]}.

#include <json.hpp>
#include <string>

#include "gbw/spd.hpp"

namespace gbw {

Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& a);
std::string matrix_to_csv(const Matrix& a);
Matrix matrix_from_csv(const std::string& text);

nlohmann::json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const nlohmann::json& j);

/// Shortest round-trip decimal text for a double ("%.17g").
std::string format_double(double v);

}  // namespace gbw
