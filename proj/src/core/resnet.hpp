#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/dynamics.hpp"

namespace vibrokit {

/// Affine map between a physical interval and the unit interval.
struct Bounds {
    double lo = 0.0;
    double hi = 1.0;

    double to_unit(double x) const { return (x - lo) / (hi - lo); }
    double from_unit(double u) const { return lo + u * (hi - lo); }

    /// Tight bounds over a sample set; degenerate spans widen to 1.
    static Bounds of(std::span<const double> xs);
};

/// E = 1/2 * sum of squared prediction errors.
double half_squared_error(std::span<const double> predicted, std::span<const double> measured);

/// Sum of absolute prediction errors; the training termination objective.
double absolute_error_sum(std::span<const double> predicted, std::span<const double> measured);

/// Regression network from (frequency, damping) to a displacement estimate:
/// seven sigmoid layers of width 40 with two skip connections (layer-2
/// output added to the layer-4 pre-activation, layer-5 output to layer-7),
/// a narrow linear penultimate layer, and a scalar linear output scaled by
/// a fixed coefficient alpha. The penultimate neurons double as the
/// readout for parameter corrections.
class ResNet {
public:
    static constexpr int kStack = 7;
    static constexpr int kWidth = 40;

    /// Weights uniform in [-0.5, 0.5] drawn in layer order; biases zero.
    ResNet(int penult_width, double alpha, std::uint64_t seed);

    /// All-zero parameters; handy for tracing the activation chain.
    static ResNet zeros(int penult_width, double alpha);

    int penult_width() const { return static_cast<int>(b_penult_.size()); }
    double alpha() const { return alpha_; }

    struct Cache {
        Eigen::Vector2d x;
        std::array<Eigen::VectorXd, kStack> pre;
        std::array<Eigen::VectorXd, kStack> post;
        Eigen::VectorXd penult;
        double y_in = 0.0;
        double y_out = 0.0;
    };

    Cache forward(const Eigen::Vector2d& x) const;
    double output(const Eigen::Vector2d& x) const { return forward(x).y_out; }
    Eigen::VectorXd penultimate(const Eigen::Vector2d& x) const { return forward(x).penult; }

    struct Gradients {
        std::array<Eigen::MatrixXd, kStack> dw;
        std::array<Eigen::VectorXd, kStack> db;
        Eigen::MatrixXd dw_penult;
        Eigen::VectorXd db_penult;
        Eigen::RowVectorXd dw_out;
        double db_out = 0.0;
    };

    /// Gradient of 1/2 (y_out - target)^2 w.r.t. every weight and bias.
    Gradients backward(const Cache& cache, double target) const;

    /// Plain gradient-descent step: parameter -= rho * gradient.
    void apply(const Gradients& g, double rho);

    /// Normalization carried with the model: inputs are (omega in Hz,
    /// zeta) mapped to the unit square, targets theta in mm to the unit
    /// interval. Training operates entirely in normalized space.
    struct Normalization {
        Bounds omega_hz;
        Bounds zeta;
        Bounds theta_mm;
    };
    Normalization norm;

    /// Physical-unit prediction: normalize inputs, evaluate, de-normalize.
    double predict_mm(double omega_hz, double zeta) const;

    void save_text(const std::string& path) const;
    static ResNet load_text(const std::string& path);

    /// Flattened parameter view in a fixed order; used by gradient checks.
    std::vector<double*> parameter_view();

    bool equal_parameters(const ResNet& other) const;

    Eigen::MatrixXd& weight(int layer) { return w_.at(static_cast<std::size_t>(layer)); }
    Eigen::VectorXd& bias(int layer) { return b_.at(static_cast<std::size_t>(layer)); }
    Eigen::MatrixXd& penult_weight() { return w_penult_; }
    Eigen::VectorXd& penult_bias() { return b_penult_; }
    Eigen::RowVectorXd& output_weight() { return w_out_; }
    double& output_bias() { return b_out_; }

private:
    ResNet() = default;

    std::array<Eigen::MatrixXd, kStack> w_;
    std::array<Eigen::VectorXd, kStack> b_;
    Eigen::MatrixXd w_penult_;
    Eigen::VectorXd b_penult_;
    Eigen::RowVectorXd w_out_;
    double b_out_ = 0.0;
    double alpha_ = 1.0;
};

struct TrainConfig {
    double rho = 0.05;
    int max_rounds = 100;
    double tol = 1e-4;
    std::uint64_t seed = 1;
    int penult_width = 2;
    double alpha = 1.0;
    /// Correction scales: delta_omega = delta_scale_omega_rel * omega_est
    /// per unit of penultimate activation; delta_zeta is absolute.
    double delta_scale_omega_rel = 0.05;
    double delta_scale_zeta = 0.02;
    /// Map targets to the unit interval before the descent. Raw mm-scale
    /// targets make rho = 0.05 steps blow up, so this stays on except in
    /// tests that need the network output to be the displacement itself.
    bool normalize_targets = true;

    void validate() const;
};

struct RoundLog {
    int round = 0;
    double upsilon = 0.0;
    double loss = 0.0;
};

struct TrainResult {
    ResNet net;
    /// Parameter correction (delta omega_n [rad/s], delta zeta) read from
    /// the penultimate layer at the normalized parameter estimate.
    Eigen::Vector2d delta;
    std::vector<RoundLog> log;
    int rounds = 0;
};

/// Trains the compensator on the given samples with per-sample updates in
/// dataset order. Stops when the per-round change of the absolute-error
/// objective drops below tol, or after max_rounds.
TrainResult train_error_compensator(const Dataset& train, const SystemParams& t_estimate,
                                    const TrainConfig& cfg);

/// Correction read-out at an arbitrary estimate (penultimate activations
/// scaled per config).
Eigen::Vector2d correction_at(const ResNet& net, const SystemParams& t_estimate,
                              double scale_omega_rel, double scale_zeta);

void save_training_log(const std::vector<RoundLog>& log, const std::string& path);

} // namespace vibrokit
