#include "core/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace vibrokit {

void validate_sample(const VibrationSample& s) {
    if (!(s.omega_hz > 0.0) || !std::isfinite(s.omega_hz)) {
        throw std::invalid_argument("sample: omega_hz must be positive");
    }
    if (!(s.zeta >= 0.0 && s.zeta < 1.0)) {
        throw std::invalid_argument("sample: zeta must lie in [0, 1)");
    }
    if (!std::isfinite(s.theta_mm)) {
        throw std::invalid_argument("sample: theta_mm must be finite");
    }
}

Dataset::Dataset(std::vector<VibrationSample> samples, std::string name, std::uint64_t seed)
    : samples_(std::move(samples)), name_(std::move(name)), seed_(seed) {
    if (samples_.empty()) throw std::invalid_argument("Dataset: empty");
    for (const VibrationSample& s : samples_) validate_sample(s);
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices, const std::string& name) const {
    std::vector<VibrationSample> picked;
    picked.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= samples_.size()) throw std::invalid_argument("Dataset::subset: index out of range");
        picked.push_back(samples_[i]);
    }
    return Dataset(std::move(picked), name, seed_);
}

void Dataset::save_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "id,omega_hz,zeta,theta_mm\n";
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const VibrationSample& s = samples_[i];
        out << (i + 1) << ',' << csv::format(s.omega_hz) << ',' << csv::format(s.zeta) << ','
            << csv::format(s.theta_mm) << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

Dataset Dataset::load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || csv::strip_eol(line) != "id,omega_hz,zeta,theta_mm") {
        throw io_error("unexpected header in " + path);
    }
    std::vector<VibrationSample> samples;
    while (std::getline(in, line)) {
        if (csv::strip_eol(line).empty()) continue;
        auto cells = csv::split(line, 4, path);
        VibrationSample s;
        s.omega_hz = csv::parse_double(cells[1], path);
        s.zeta = csv::parse_double(cells[2], path);
        s.theta_mm = csv::parse_double(cells[3], path);
        samples.push_back(s);
    }
    return Dataset(std::move(samples), std::filesystem::path(path).stem().string(), 0);
}

} // namespace vibrokit
