#pragma once

#include "extlab/brascamp_lieb.hpp"
#include "extlab/experiments.hpp"
#include "extlab/geometry.hpp"
#include "extlab/operators.hpp"
#include "extlab/wavepackets.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace extlab::io {

using Json = nlohmann::ordered_json;

/// Malformed input or parameters; the message carries the field path or line/column.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Parses JSON text; syntax errors become ConfigError("<source>:<line>:<column>: ...").
Json parse_json(std::string_view text, const std::string& source);
std::string read_text_file(const std::string& path);
Json read_json_file(const std::string& path);

/// Rational from a JSON string ("p/q" or decimal) or number; `where` names the field in errors.
Rational rational_from_json(const Json& j, const std::string& where);

/// {"d": int, "cubes": [[["lo","hi"], ... d entries], ...]}
CubeCollection cube_collection_from_json(const Json& j);
Json to_json(const CubeCollection& coll);

/// {"n": int, "maps": [[["a","b",...], ...], ...], "exponents": ["1/2", ...]}
BLDatum bl_datum_from_json(const Json& j);
Json to_json(const BLDatum& datum);
Json to_json(const Subspace& v);
Json to_json(const DirectionAssignment& a);

/// Binary container: "EXTLABGF", u32 version, u32 d, u64 N, d pairs of length-prefixed endpoint
/// strings, then little-endian float64 (re, im) samples.
void write_grid_function(std::ostream& out, const GridFunction& g);
GridFunction read_grid_function(std::istream& in);
/// {"cube": [["lo","hi"], ...], "n": N, "samples": [[re, im], ...]}
Json grid_function_to_json(const GridFunction& g);
GridFunction grid_function_from_json(const Json& j);
/// Binary when the file starts with the magic, JSON otherwise.
GridFunction load_grid_function(const std::string& path);

/// Header "n0,...,m,re,im", one row per entry.
void write_field_csv(std::ostream& out, const CoefficientField& field);
/// "EXTLABCF", u32 version, u32 d, d (lo, hi) int64 pairs, the m pair, then float64 (re, im) values.
void write_field_binary(std::ostream& out, const CoefficientField& field);
CoefficientField read_field_binary(std::istream& in);

Json to_json(const NormReport& r);
Json to_json(const LevelSetHistogram& h);
Json to_json(const ScalingReport& r);
/// "delta,ratio" rows.
void write_scaling_csv(std::ostream& out, const ScalingReport& r);
/// Two whitespace-separated columns, log(delta) and log(ratio), for plotting tools.
void write_scaling_plot_data(std::ostream& out, const ScalingReport& r);
Json to_json(const ThresholdRow& row);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace extlab::io
