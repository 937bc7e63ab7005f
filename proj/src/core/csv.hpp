#pragma once

#include <string>
#include <vector>

namespace vibrokit::csv {

/// Shortest decimal text that parses back to exactly the same double.
/// All machine-readable output goes through this, so emitted files are
/// value-lossless and byte-stable across runs.
std::string format(double v);

double parse_double(const std::string& cell, const std::string& context);
long parse_long(const std::string& cell, const std::string& context);

/// Splits a line into exactly n_cells comma-separated cells.
std::vector<std::string> split(const std::string& line, std::size_t n_cells,
                               const std::string& context);

/// Removes a trailing CR so CRLF input parses like LF input.
std::string strip_eol(const std::string& line);

} // namespace vibrokit::csv
