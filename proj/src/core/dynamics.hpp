#pragma once

#include <string>
#include <vector>

namespace vibrokit {

class ImpulseSequence;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double hz_to_rad(double hz) { return hz * kTwoPi; }
inline double rad_to_hz(double rad) { return rad / kTwoPi; }

/// Second-order beam mode: natural frequency (rad/s) and damping ratio.
/// Only undamped or underdamped modes are representable (0 <= zeta < 1).
class SystemParams {
public:
    SystemParams(double omega_n, double zeta);

    static SystemParams from_hz(double freq_hz, double zeta);

    double omega_n() const { return omega_n_; }
    double zeta() const { return zeta_; }
    double omega_hz() const { return rad_to_hz(omega_n_); }

    /// Damped frequency omega_n * sqrt(1 - zeta^2).
    double damped_frequency() const;
    /// Damped period 2*pi / damped_frequency.
    double damped_period() const;

private:
    double omega_n_;
    double zeta_;
};

/// Uniformly sampled displacement trace, sample k at t = k*dt.
struct TimeSeries {
    double dt = 0.0;
    std::vector<double> values;

    TimeSeries() = default;
    TimeSeries(double dt, std::vector<double> values);

    std::size_t size() const { return values.size(); }
    /// Time of the last sample.
    double duration() const { return dt * static_cast<double>(values.size() - 1); }

    /// Zero-order-hold lookup: value in effect at time t. Holds the final
    /// sample beyond the end of the trace; t must be >= 0.
    double value_at(double t) const;

    void save_csv(const std::string& path) const;
    static TimeSeries load_csv(const std::string& path);
};

/// Response of the unit impulse applied at t_n, evaluated at t >= t_n.
double impulse_response(const SystemParams& p, double t_n, double t);

/// Cosine/sine impulse sums and the phase of the combined response.
struct Envelope {
    double c = 0.0;
    double s = 0.0;
    double phi = 0.0;
};

Envelope response_envelope(const SystemParams& p, const ImpulseSequence& seq);

/// Amplitude of vibration remaining after the last impulse, relative to the
/// response of a single unshaped unit impulse.
double residual_vibration_ratio(const SystemParams& p, const ImpulseSequence& seq);

/// Drives the unit-DC-gain second-order plant with a piecewise-constant
/// command. Discretization is the exact zero-order-hold solution of the
/// (position, velocity) state pair, so dt only controls output resolution,
/// not integration error, as long as command breakpoints land on the grid.
TimeSeries simulate(const SystemParams& p, const TimeSeries& command, double dt, double horizon);

/// dt giving 200 samples per damped period.
double default_dt(const SystemParams& p);

} // namespace vibrokit
