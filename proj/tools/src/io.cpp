#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "weylgeom/error.hpp"
#include "weylgeom/morse.hpp"

namespace weylgeom::cli {

namespace {

[[noreturn]] void bad(const std::string& what, const std::string& why) {
  throw Error(Errc::InvalidArgument, what + ": " + why);
}

void dump_into(const Json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  const std::string inner(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        dump_into(it.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_into(j[i], out, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump_into(j[i], out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  dump_into(j, out, 0);
  out += "\n";
  return out;
}

Json load_json(const std::string& arg) {
  std::string text;
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && (arg[first] == '[' || arg[first] == '{')) {
    text = arg;
  } else {
    std::ifstream in(arg);
    if (!in) bad("input", "cannot read file '" + arg + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    bad("input", std::string("malformed JSON (") + e.what() + ")");
  }
}

Rational to_rational(const Json& j, const std::string& what) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_unsigned()) return Rational(j.get<unsigned long long>());
  if (j.is_number_float()) return parse_rational(j.dump());
  bad(what, "expected a number or a \"p/q\" string");
}

namespace {

double to_double_entry(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
  bad(what, "expected a number");
}

}  // namespace

Vector to_vector(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) bad(what, "expected a nonempty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_double_entry(j[i], what);
  return v;
}

Matrix to_matrix(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) bad(what, "expected a matrix as an array of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad(what, "rows have different lengths");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = to_double_entry(j[r][c], what);
  }
  return m;
}

std::vector<Matrix> to_matrices(const Json& j, const std::string& what) {
  if (!j.is_array()) bad(what, "expected an array of matrices");
  std::vector<Matrix> out;
  for (const auto& e : j) out.push_back(to_matrix(e, what));
  return out;
}

std::vector<Matrix> to_generators(const Json& j) {
  const Json& arr = j.is_object() && j.contains("generators") ? j.at("generators") : j;
  auto gens = to_matrices(arr, "generators");
  if (gens.empty()) bad("generators", "need at least one generator");
  return gens;
}

std::vector<SymPoint> to_path(const Json& j) {
  std::vector<SymPoint> path;
  if (j.is_object() && j.contains("flat")) {
    for (const auto& p : j.at("flat")) {
      const Vector v = to_vector(p, "flat point");
      if (v.size() != 2) bad("flat point", "expected [x, y]");
      path.push_back(sl3_flat_point(v(0), v(1)));
    }
    return path;
  }
  const Json& arr = j.is_object() && j.contains("points") ? j.at("points") : j;
  for (const auto& m : to_matrices(arr, "path")) path.push_back(SymPoint::from_matrix(m));
  return path;
}

WeightedConfig to_config(const Json& j) {
  if (!j.is_object() || !j.contains("weights")) bad("config", "expected an object with \"weights\"");
  std::vector<Rational> w;
  for (const auto& x : j.at("weights")) w.push_back(to_rational(x, "weights"));
  WeightVector a(w);
  if (j.contains("turns")) {
    std::vector<Rational> t;
    for (const auto& x : j.at("turns")) t.push_back(to_rational(x, "turns"));
    return WeightedConfig::circle_turns(t, a);
  }
  if (j.contains("angles")) {
    std::vector<double> t;
    for (const auto& x : j.at("angles")) t.push_back(to_double_entry(x, "angles"));
    return WeightedConfig::circle(t, a);
  }
  if (j.contains("points")) {
    std::vector<Vector> pts;
    for (const auto& p : j.at("points")) pts.push_back(to_vector(p, "points"));
    return WeightedConfig::sphere(pts, a);
  }
  bad("config", "expected \"angles\", \"turns\" or \"points\"");
}

Json from_matrix(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json from_vector(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json from_rational(const Rational& q) { return to_string(q); }

}  // namespace weylgeom::cli
