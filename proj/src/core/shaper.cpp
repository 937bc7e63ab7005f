#include "core/shaper.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace vibrokit {

ImpulseSequence::ImpulseSequence(std::vector<Impulse> impulses) : impulses_(std::move(impulses)) {
    if (impulses_.empty()) throw std::invalid_argument("ImpulseSequence: empty");
    if (impulses_.front().time != 0.0) {
        throw std::invalid_argument("ImpulseSequence: first impulse must be at t = 0");
    }
    double sum = 0.0;
    double prev = -1.0;
    for (const Impulse& imp : impulses_) {
        if (!std::isfinite(imp.amplitude) || !std::isfinite(imp.time)) {
            throw std::invalid_argument("ImpulseSequence: non-finite impulse");
        }
        if (imp.amplitude <= 0.0) {
            throw std::invalid_argument("ImpulseSequence: amplitudes must be positive");
        }
        if (imp.time <= prev) {
            throw std::invalid_argument("ImpulseSequence: times must be strictly increasing");
        }
        prev = imp.time;
        sum += imp.amplitude;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("ImpulseSequence: amplitudes must sum to 1");
    }
}

ImpulseSequence ImpulseSequence::identity() {
    return ImpulseSequence({{1.0, 0.0}});
}

void ImpulseSequence::save_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "A,t_s\n";
    for (const Impulse& imp : impulses_) {
        out << csv::format(imp.amplitude) << ',' << csv::format(imp.time) << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

ImpulseSequence ImpulseSequence::load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || csv::strip_eol(line) != "A,t_s") {
        throw io_error("unexpected header in " + path);
    }
    std::vector<Impulse> impulses;
    while (std::getline(in, line)) {
        if (csv::strip_eol(line).empty()) continue;
        auto cells = csv::split(line, 2, path);
        impulses.push_back({csv::parse_double(cells[0], path), csv::parse_double(cells[1], path)});
    }
    return ImpulseSequence(std::move(impulses));
}

ImpulseSequence design_zvd(const SystemParams& p) {
    constexpr double pi = kTwoPi / 2.0;
    const double z = p.zeta();
    const double k = std::exp(-z * pi / std::sqrt(1.0 - z * z));
    const double c = 1.0 + 2.0 * k + k * k;
    const double t_d = p.damped_period();
    return ImpulseSequence({
        {1.0 / c, 0.0},
        {2.0 * k / c, t_d / 2.0},
        {k * k / c, t_d},
    });
}

TimeSeries shape_command(const TimeSeries& cmd, const ImpulseSequence& seq) {
    const double dt = cmd.dt;
    std::vector<std::size_t> delays;
    delays.reserve(seq.size());
    for (const Impulse& imp : seq.impulses()) {
        delays.push_back(static_cast<std::size_t>(std::floor(imp.time / dt + 0.5)));
    }
    const std::size_t n_in = cmd.size();
    const std::size_t n_out = n_in + delays.back();
    std::vector<double> out(n_out, 0.0);
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const double a = seq.impulses()[i].amplitude;
        const std::size_t d = delays[i];
        for (std::size_t k = d; k < n_out; ++k) {
            const std::size_t j = k - d;
            out[k] += a * cmd.values[j < n_in ? j : n_in - 1];
        }
    }
    return TimeSeries(dt, std::move(out));
}

} // namespace vibrokit
