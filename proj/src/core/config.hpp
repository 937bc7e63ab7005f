#pragma once

#include <cstdint>
#include <string>

#include "core/ekf.hpp"
#include "core/resnet.hpp"

namespace vibrokit {

enum class KappaPolicy {
    kAuto,  ///< calibrate from the first training sample
    kFixed, ///< use kappa_mm from the config as-is
};

enum class DeltaPolicy {
    kFixed,      ///< correction scales taken from the config
    kCalibrated, ///< correction scales picked by training-split search
};

/// Full pipeline configuration. File format: one `key = value` per line,
/// `#` starts a comment, unknown keys are rejected.
struct PipelineConfig {
    double nominal_omega_hz = 5.0;
    double nominal_zeta = 0.1;
    double split = 0.9;
    /// Trace sample interval; 0 selects damped period / 200 of the nominal mode.
    double dt = 0.0;
    std::uint64_t seed = 1;

    KappaPolicy kappa_policy = KappaPolicy::kAuto;
    double kappa_mm = 100.0;

    double q_omega = 1e-6;
    double q_zeta = 1e-8;
    double r_mm2 = 1.0;

    double rho = 0.05;
    int max_rounds = 100;
    double tol = 1e-4;
    int penult_width = 2;
    double alpha = 1.0;
    double delta_scale_omega_rel = 0.05;
    double delta_scale_zeta = 0.02;
    bool normalize_targets = true;
    DeltaPolicy delta_policy = DeltaPolicy::kCalibrated;

    double move_mm = 100.0;

    SystemParams nominal() const { return SystemParams::from_hz(nominal_omega_hz, nominal_zeta); }
    NoiseConfig noise() const;
    TrainConfig train_config() const;
    double trace_dt() const;

    void validate() const;

    static PipelineConfig load(const std::string& path);
    /// Applies a single `key = value` assignment (same keys as the file).
    void set(const std::string& key, const std::string& value);
};

} // namespace vibrokit
