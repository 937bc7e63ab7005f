#include "core/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <system_error>

#include "core/errors.hpp"

namespace vibrokit::csv {

std::string format(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& cell, const std::string& context) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw io_error("bad numeric cell '" + cell + "' in " + context);
    }
    return v;
}

long parse_long(const std::string& cell, const std::string& context) {
    long v = 0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw io_error("bad integer cell '" + cell + "' in " + context);
    }
    return v;
}

std::vector<std::string> split(const std::string& raw, std::size_t n_cells,
                               const std::string& context) {
    const std::string line = strip_eol(raw);
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (cells.size() != n_cells) {
        throw io_error("expected " + std::to_string(n_cells) + " cells, got " +
                       std::to_string(cells.size()) + " in " + context);
    }
    return cells;
}

std::string strip_eol(const std::string& line) {
    if (!line.empty() && line.back() == '\r') return line.substr(0, line.size() - 1);
    return line;
}

} // namespace vibrokit::csv
