#pragma once

#include "spenra/series.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace spenra {

/// `# key=value` comment lines appended after the data rows of an output CSV.
using Trailers = std::vector<std::pair<std::string, std::string>>;

/// Reads a series CSV: one column (`value` header optional) or two columns
/// `time,value`. Blank lines and lines starting with '#' are skipped.
[[nodiscard]] Series read_series_csv(std::istream& in, std::string label = {});
[[nodiscard]] Series read_series_file(const std::filesystem::path& path);

/// Writes `value` or `time,value` rows at full precision, then the trailers.
void write_series_csv(std::ostream& out, const Series& s, const Trailers& trailers = {});

/// Shortest round-trip representation of a double.
[[nodiscard]] std::string format_full(double x);
/// Six significant digits, used for console output.
[[nodiscard]] std::string format_short(double x);

void write_trailers(std::ostream& out, const Trailers& trailers);

}  // namespace spenra
