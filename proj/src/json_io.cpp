#include "ddecert/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ddecert {

using nlohmann::json;

namespace {

Matrix parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    fail(ErrorCode::parse_error, what + ": expected a non-empty array of rows");
  const size_t rows = j.size();
  size_t cols = 0;
  Matrix m;
  for (size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.empty())
      fail(ErrorCode::parse_error,
           what + ": row " + std::to_string(r) + " is not a non-empty array");
    if (r == 0) {
      cols = row.size();
      m.resize(rows, cols);
    } else if (row.size() != cols) {
      fail(ErrorCode::parse_error,
           what + ": row " + std::to_string(r) + " has " +
               std::to_string(row.size()) + " entries, expected " +
               std::to_string(cols));
    }
    for (size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        fail(ErrorCode::parse_error, what + ": entry (" + std::to_string(r) +
                                         "," + std::to_string(c) +
                                         ") is not a number");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

DelayDensity parse_density(const json& j, int dim) {
  DelayDensity d;
  if (!j.is_object())
    fail(ErrorCode::parse_error, "kernel.density: expected an object");
  if (!j.contains("breakpoints") || !j["breakpoints"].is_array())
    fail(ErrorCode::parse_error, "kernel.density.breakpoints: expected array");
  for (const auto& b : j["breakpoints"]) {
    if (!b.is_number())
      fail(ErrorCode::parse_error, "kernel.density.breakpoints: non-number");
    d.breakpoints.push_back(b.get<double>());
  }
  if (!j.contains("pieces") || !j["pieces"].is_array())
    fail(ErrorCode::parse_error, "kernel.density.pieces: expected array");
  for (size_t p = 0; p < j["pieces"].size(); ++p) {
    const json& piece = j["pieces"][p];
    const std::string where = "kernel.density.pieces[" + std::to_string(p) + "]";
    if (!piece.is_object() || !piece.contains("coeffs") ||
        !piece["coeffs"].is_array() || piece["coeffs"].empty())
      fail(ErrorCode::parse_error, where + ": expected {\"coeffs\": [matrix...]}");
    std::vector<Matrix> coeffs;
    for (size_t k = 0; k < piece["coeffs"].size(); ++k)
      coeffs.push_back(parse_matrix(piece["coeffs"][k],
                                    where + ".coeffs[" + std::to_string(k) + "]"));
    d.pieces.push_back(std::move(coeffs));
  }
  d.validate(dim);
  return d;
}

LinearDelaySystem parse_system_json(const json& j) {
  if (!j.is_object())
    fail(ErrorCode::parse_error, "system: expected a JSON object");
  if (!j.contains("B"))
    fail(ErrorCode::parse_error, "system: missing drift matrix \"B\"");
  LinearDelaySystem sys;
  sys.drift = parse_matrix(j["B"], "B");
  if (sys.drift.rows() != sys.drift.cols())
    fail(ErrorCode::parse_error, "B must be square");
  sys.kernel.dimension = static_cast<int>(sys.drift.rows());
  if (j.contains("kernel")) {
    const json& k = j["kernel"];
    if (!k.is_object())
      fail(ErrorCode::parse_error, "kernel: expected a JSON object");
    if (k.contains("atoms")) {
      if (!k["atoms"].is_array())
        fail(ErrorCode::parse_error, "kernel.atoms: expected an array");
      for (size_t i = 0; i < k["atoms"].size(); ++i) {
        const json& a = k["atoms"][i];
        const std::string where = "kernel.atoms[" + std::to_string(i) + "]";
        if (!a.is_object() || !a.contains("delay") || !a.contains("matrix"))
          fail(ErrorCode::parse_error,
               where + ": expected {\"delay\": ..., \"matrix\": [[...]]}");
        if (!a["delay"].is_number())
          fail(ErrorCode::parse_error, where + ".delay: not a number");
        DelayAtom atom;
        atom.location = a["delay"].get<double>();
        atom.weight = parse_matrix(a["matrix"], where + ".matrix");
        sys.kernel.atoms.push_back(std::move(atom));
      }
    }
    if (k.contains("density") && !k["density"].is_null())
      sys.kernel.density = parse_density(k["density"], sys.kernel.dimension);
  }
  try {
    sys.validate();
  } catch (const Error& e) {
    fail(ErrorCode::parse_error, e.what());
  }
  return sys;
}

}  // namespace

LinearDelaySystem parse_system(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse_error, std::string("system JSON: ") + e.what());
  }
  return parse_system_json(j);
}

LinearDelaySystem load_system_file(const std::string& path) {
  return parse_system(read_text_file(path));
}

std::string serialize_system(const LinearDelaySystem& system) {
  json j;
  j["B"] = matrix_to_json(system.drift);
  json kernel = json::object();
  json atoms = json::array();
  for (const auto& a : system.kernel.atoms) {
    json atom;
    atom["delay"] = a.location;
    atom["matrix"] = matrix_to_json(a.weight);
    atoms.push_back(atom);
  }
  kernel["atoms"] = atoms;
  if (system.kernel.density) {
    json d;
    d["breakpoints"] = system.kernel.density->breakpoints;
    json pieces = json::array();
    for (const auto& piece : system.kernel.density->pieces) {
      json coeffs = json::array();
      for (const Matrix& c : piece) coeffs.push_back(matrix_to_json(c));
      pieces.push_back(json{{"coeffs", coeffs}});
    }
    d["pieces"] = pieces;
    kernel["density"] = d;
  }
  j["kernel"] = kernel;
  return j.dump(2);
}

std::pair<Matrix, Matrix> parse_matrix_pair(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse_error, std::string("input JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("A") || !j.contains("C"))
    fail(ErrorCode::parse_error, "expected {\"A\": [[...]], \"C\": [[...]]}");
  return {parse_matrix(j["A"], "A"), parse_matrix(j["C"], "C")};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorCode::invalid_argument, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ddecert
