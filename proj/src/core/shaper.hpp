#pragma once

#include <string>
#include <vector>

#include "core/dynamics.hpp"

namespace vibrokit {

struct Impulse {
    double amplitude = 0.0;
    double time = 0.0; // seconds
};

/// Positive-impulse shaper train. Invariants enforced on construction:
/// first impulse at t = 0, strictly increasing times, amplitudes positive
/// and summing to one within 1e-12.
class ImpulseSequence {
public:
    explicit ImpulseSequence(std::vector<Impulse> impulses);

    /// Single unit impulse at t = 0; convolution identity.
    static ImpulseSequence identity();

    const std::vector<Impulse>& impulses() const { return impulses_; }
    std::size_t size() const { return impulses_.size(); }
    double last_time() const { return impulses_.back().time; }

    void save_csv(const std::string& path) const;
    static ImpulseSequence load_csv(const std::string& path);

private:
    std::vector<Impulse> impulses_;
};

/// Three-impulse ZVD design: nulls the residual vibration and its
/// frequency sensitivity at the design point.
ImpulseSequence design_zvd(const SystemParams& p);

/// Convolves a sampled command with the impulse train. Impulse times are
/// snapped to the nearest sample; the command is treated as holding its
/// final value, so a move ending at level L stays at L after shaping.
/// Output length is the command length plus the snapped last impulse time.
TimeSeries shape_command(const TimeSeries& cmd, const ImpulseSequence& seq);

} // namespace vibrokit
