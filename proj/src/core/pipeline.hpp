#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/dynamics.hpp"
#include "core/ekf.hpp"
#include "core/metrics.hpp"
#include "core/resnet.hpp"
#include "core/shaper.hpp"

namespace vibrokit {

/// Synthetic-trial generator options. Each trial draws observed parameters
/// around the nominal mode, deploys a ZVD shaper designed at those observed
/// values, and records the simulated residual displacement of the actual
/// plant (truth shifted by the systematic observation bias) plus sensor
/// noise. Fully deterministic per seed.
struct GenOptions {
    int n = 100;
    SystemParams truth = SystemParams::from_hz(5.0, 0.1);
    SystemParams nominal = SystemParams::from_hz(5.0, 0.1);
    double obs_bias_omega = 0.0; // rad/s, added to truth for the simulated plant
    double obs_bias_zeta = 0.0;
    double noise_sigma_mm = 0.1;
    double scatter_omega_rel = 0.03;
    double scatter_zeta = 0.01;
    double move_mm = 100.0;
    std::uint64_t seed = 1;
    std::string name = "synthetic";
};

Dataset generate_trials(const GenOptions& opt);

/// Shaped step-move outcome on a given plant.
struct ShaperEval {
    TimeSeries trace;
    double mts_mm = 0.0;
    /// Peak |displacement - target| after the shaped command settles.
    double residual_peak_mm = 0.0;
};

ShaperEval evaluate_sequence_on_plant(const ImpulseSequence& seq, const SystemParams& plant,
                                      double move_mm, double dt, double horizon);
ShaperEval evaluate_shaper_on_plant(const SystemParams& design, const SystemParams& plant,
                                    double move_mm, double dt, double horizon);

inline constexpr std::size_t kModelCount = 3;
/// Comparison-report identifiers, strongest expected to weakest.
extern const std::array<std::string, kModelCount> kModelNames; // cascade, ekf-only, nominal-zvd

struct ModelScores {
    std::string model;
    MetricReport report;
    std::vector<double> predictions_mm;
};

struct PipelineResult {
    SystemParams t0;
    SystemParams t_ekf;
    SystemParams t_r;
    Eigen::Vector2d delta = Eigen::Vector2d::Zero();
    double kappa_mm = 0.0;
    std::array<ModelScores, kModelCount> models;
    std::vector<double> measured_test_mm;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    double ekf_seconds = 0.0;
    double train_seconds = 0.0;
    double total_seconds = 0.0;
    int train_rounds = 0;
    std::vector<RoundLog> train_log;
    ResNet net;

    PipelineResult() : t0(1.0, 0.0), t_ekf(1.0, 0.0), t_r(1.0, 0.0), net(ResNet::zeros(2, 1.0)) {}
};

/// Gain calibration from the first sample: theta_1 over the residual
/// ratio of that trial's shaper at t0; falls back to 1 when the ratio or
/// the resulting gain is not usable.
double calibrate_kappa_first_sample(const SystemParams& t0, const Dataset& data);

/// One full identification pass: seeded 90/10 split, filter stage on the
/// training split, compensator stage on the same split, corrected
/// parameters, and test-split scores for the cascade and both baselines.
PipelineResult run_pipeline(const PipelineConfig& cfg, const Dataset& data);

struct ModelAggregate {
    std::string model;
    MetricReport mean;
    MetricReport stddev;
    double median_rmse = 0.0;
};

struct RepeatSummary {
    int repeats = 1;
    std::array<ModelAggregate, kModelCount> models;
    /// Stage costs of the first repeat, seconds.
    double ekf_seconds = 0.0;
    double train_seconds = 0.0;
    double total_seconds = 0.0;
    int train_rounds = 0;
    double kappa_mm = 0.0;
    SystemParams t_ekf{1.0, 0.0};
    SystemParams t_r{1.0, 0.0};
    Eigen::Vector2d delta = Eigen::Vector2d::Zero();

    std::string table_text() const;
};

/// Runs `repeats` seeded repetitions (seed, seed+1, ...) and aggregates
/// mean and standard deviation per model and metric.
RepeatSummary run_repeated(const PipelineConfig& cfg, const Dataset& data, int repeats);

/// Full CLI-facing run: repeats, aggregation, and all output files under
/// out_dir (tables, predictions, identified parameters and shapers, the
/// trained model, the training log, and plot-ready traces). Timing is
/// returned but never written to files, so output bytes depend only on
/// (config, data, seed).
RepeatSummary run_and_write(const PipelineConfig& cfg, const Dataset& data,
                            const std::string& out_dir, int repeats);

} // namespace vibrokit
