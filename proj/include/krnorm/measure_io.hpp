#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "krnorm/measure.hpp"

namespace krnorm {

// Measure file schema:
//   { "dim": n, "lo": [...], "hi": [...],
//     "atoms": [ {"point": [...], "weight": w}, ... ] }

nlohmann::json domain_to_json(const Domain& d);
Domain domain_from_json(const nlohmann::json& j);

nlohmann::json measure_to_json(const DiscreteSignedMeasure& m);
/// Throws ParseError naming the offending field.
DiscreteSignedMeasure measure_from_json(const nlohmann::json& j);

/// Parses text; syntax errors report line and column.
DiscreteSignedMeasure parse_measure(std::string_view text);
std::string serialize_measure(const DiscreteSignedMeasure& m);

DiscreteSignedMeasure read_measure_file(const std::filesystem::path& path);
void write_measure_file(const std::filesystem::path& path,
                        const DiscreteSignedMeasure& m);

/// Reads a whole file or throws ParseError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// %.17g formatting used for every CSV number.
std::string format_real(double x);

}  // namespace krnorm
