#include "core/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/shaper.hpp"

namespace vibrokit {

SystemParams::SystemParams(double omega_n, double zeta) : omega_n_(omega_n), zeta_(zeta) {
    if (!(omega_n > 0.0) || !std::isfinite(omega_n)) {
        throw std::invalid_argument("SystemParams: omega_n must be positive and finite");
    }
    if (!(zeta >= 0.0 && zeta < 1.0)) {
        throw std::invalid_argument("SystemParams: zeta must lie in [0, 1)");
    }
}

SystemParams SystemParams::from_hz(double freq_hz, double zeta) {
    return SystemParams(hz_to_rad(freq_hz), zeta);
}

double SystemParams::damped_frequency() const {
    return omega_n_ * std::sqrt(1.0 - zeta_ * zeta_);
}

double SystemParams::damped_period() const {
    return kTwoPi / damped_frequency();
}

TimeSeries::TimeSeries(double dt, std::vector<double> values)
    : dt(dt), values(std::move(values)) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("TimeSeries: dt must be positive");
    }
    if (this->values.empty()) {
        throw std::invalid_argument("TimeSeries: at least one sample required");
    }
    for (double v : this->values) {
        if (!std::isfinite(v)) throw std::invalid_argument("TimeSeries: non-finite sample");
    }
}

double TimeSeries::value_at(double t) const {
    if (t < 0.0) throw std::invalid_argument("TimeSeries::value_at: t must be >= 0");
    auto idx = static_cast<std::size_t>(t / dt);
    if (idx >= values.size()) idx = values.size() - 1;
    return values[idx];
}

void TimeSeries::save_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "t_s,displacement_mm\n";
    for (std::size_t k = 0; k < values.size(); ++k) {
        out << csv::format(dt * static_cast<double>(k)) << ',' << csv::format(values[k]) << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

TimeSeries TimeSeries::load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty file: " + path);
    if (csv::strip_eol(line) != "t_s,displacement_mm") {
        throw io_error("unexpected header in " + path);
    }
    std::vector<double> t;
    std::vector<double> v;
    while (std::getline(in, line)) {
        if (csv::strip_eol(line).empty()) continue;
        auto cells = csv::split(line, 2, path);
        t.push_back(csv::parse_double(cells[0], path));
        v.push_back(csv::parse_double(cells[1], path));
    }
    if (v.empty()) throw io_error("no samples in " + path);
    double dt = v.size() > 1 ? (t.back() - t.front()) / static_cast<double>(v.size() - 1) : 1.0;
    if (!(dt > 0.0)) throw io_error("non-increasing time column in " + path);
    return TimeSeries(dt, std::move(v));
}

double impulse_response(const SystemParams& p, double t_n, double t) {
    if (t < t_n) throw std::invalid_argument("impulse_response: t must be >= t_n");
    const double tau = t - t_n;
    const double wd = p.damped_frequency();
    const double amp = p.omega_n() / std::sqrt(1.0 - p.zeta() * p.zeta());
    return amp * std::exp(-p.zeta() * p.omega_n() * tau) * std::sin(wd * tau);
}

Envelope response_envelope(const SystemParams& p, const ImpulseSequence& seq) {
    if (seq.size() == 0) throw std::invalid_argument("response_envelope: empty impulse sequence");
    const double wd = p.damped_frequency();
    const double zw = p.zeta() * p.omega_n();
    Envelope e;
    for (const Impulse& imp : seq.impulses()) {
        const double growth = std::exp(zw * imp.time);
        e.c += imp.amplitude * growth * std::cos(wd * imp.time);
        e.s += imp.amplitude * growth * std::sin(wd * imp.time);
    }
    e.phi = (e.c == 0.0 && e.s == 0.0) ? 0.0 : std::atan2(e.c, e.s);
    return e;
}

double residual_vibration_ratio(const SystemParams& p, const ImpulseSequence& seq) {
    const Envelope e = response_envelope(p, seq);
    const double t_last = seq.last_time();
    return std::exp(-p.zeta() * p.omega_n() * t_last) * std::hypot(e.c, e.s);
}

TimeSeries simulate(const SystemParams& p, const TimeSeries& command, double dt, double horizon) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("simulate: dt must be positive");
    }
    if (horizon < command.duration()) {
        throw std::invalid_argument("simulate: horizon shorter than the command");
    }
    // Integer mapping from simulation steps to command samples; avoids
    // floating-point index jitter that would smear command breakpoints.
    const double ratio = command.dt / dt;
    const auto substeps = static_cast<std::size_t>(std::floor(ratio + 0.5));
    if (substeps == 0 || std::abs(ratio - static_cast<double>(substeps)) > 1e-9 * ratio) {
        throw std::invalid_argument("simulate: dt must evenly divide the command sample interval");
    }

    // One-step transition of x'' + 2*zeta*wn*x' + wn^2*x = wn^2*u under
    // constant u: x_{k+1} = Ad x_k + Bd u with Bd = (I - Ad) [1, 0]^T.
    const double wn = p.omega_n();
    const double z = p.zeta();
    const double wd = p.damped_frequency();
    const double decay = std::exp(-z * wn * dt);
    const double cwd = std::cos(wd * dt);
    const double swd = std::sin(wd * dt);
    const double a11 = decay * (cwd + z * wn / wd * swd);
    const double a12 = decay * (swd / wd);
    const double a21 = decay * (-wn * wn / wd * swd);
    const double a22 = decay * (cwd - z * wn / wd * swd);
    const double b1 = 1.0 - a11;
    const double b2 = -a21;

    const auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 0.5));
    std::vector<double> out;
    out.reserve(steps + 1);
    double x = 0.0;
    double v = 0.0;
    out.push_back(x);
    const std::size_t last = command.size() - 1;
    for (std::size_t k = 0; k < steps; ++k) {
        const double u = command.values[std::min(k / substeps, last)];
        const double xn = a11 * x + a12 * v + b1 * u;
        const double vn = a21 * x + a22 * v + b2 * u;
        x = xn;
        v = vn;
        out.push_back(x);
    }
    return TimeSeries(dt, std::move(out));
}

double default_dt(const SystemParams& p) {
    return p.damped_period() / 200.0;
}

} // namespace vibrokit
