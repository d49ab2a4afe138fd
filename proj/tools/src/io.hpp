#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "weylgeom/gitconfig.hpp"
#include "weylgeom/linalg.hpp"
#include "weylgeom/rational.hpp"
#include "weylgeom/symspace.hpp"

namespace weylgeom::cli {

using Json = nlohmann::ordered_json;

// Pretty JSON with floats printed as %.17g; NaN and infinities become null.
std::string dump(const Json& j);

// Inline JSON text (starting with '[' or '{') or a path to a JSON file.
// Malformed input raises Error(InvalidArgument).
Json load_json(const std::string& arg);

Matrix to_matrix(const Json& j, const std::string& what);
Vector to_vector(const Json& j, const std::string& what);
std::vector<Matrix> to_matrices(const Json& j, const std::string& what);
// Generators: an array of matrices or {"generators": [...]}.
std::vector<Matrix> to_generators(const Json& j);
// Numbers or "p/q" strings; decimal numbers are read exactly as written.
Rational to_rational(const Json& j, const std::string& what);
// Path: array of point matrices, {"points": [...]} or {"flat": [[x, y], ...]}.
std::vector<SymPoint> to_path(const Json& j);
// {"angles"|"turns"|"points": [...], "weights": [...]}.
WeightedConfig to_config(const Json& j);

Json from_matrix(const Matrix& m);
Json from_vector(const Vector& v);
Json from_rational(const Rational& q);

}  // namespace weylgeom::cli
