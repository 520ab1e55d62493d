#include "gbw/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace gbw {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string matrix_to_csv(const Matrix& a) {
  std::string out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      out += format_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw IoError("matrix csv: bad number '" + cell + "' on line " + std::to_string(lineno));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError("matrix csv: ragged row on line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("matrix csv: no data");
  Matrix a(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j];
  return a;
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return matrix_from_csv(ss.str());
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_matrix_csv(const std::string& path, const Matrix& a) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << matrix_to_csv(a);
  if (!f) throw IoError("write failed: " + path);
}

nlohmann::json matrix_to_json(const Matrix& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) r.push_back(a(i, j));
    rows.push_back(std::move(r));
  }
  return {{"dim", a.rows()}, {"entries", rows}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
    throw IoError("matrix json: expected {dim, entries}");
  auto n = j.at("dim").get<Eigen::Index>();
  const auto& e = j.at("entries");
  if (n <= 0 || !e.is_array() || static_cast<Eigen::Index>(e.size()) != n)
    throw IoError("matrix json: entries do not match dim");
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = e.at(i);
    if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != n)
      throw IoError("matrix json: row " + std::to_string(i) + " has wrong length");
    for (Eigen::Index k = 0; k < n; ++k) a(i, k) = r.at(k).get<double>();
  }
  return a;
}

}  // namespace gbw
