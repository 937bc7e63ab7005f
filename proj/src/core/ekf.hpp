#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "core/dataset.hpp"
#include "core/dynamics.hpp"
#include "core/shaper.hpp"

namespace vibrokit {

/// Process / measurement noise of the parameter filter. q acts per step on
/// the (omega_n, zeta) estimate covariance; r is the variance of the
/// measured displacement in mm^2.
struct NoiseConfig {
    Eigen::Matrix2d q = Eigen::Matrix2d::Zero();
    double r = 1.0;

    static NoiseConfig defaults();
    void validate() const;
};

/// Filter state: estimate of (omega_n [rad/s], zeta), its covariance, and
/// the number of absorbed measurements. Immutable snapshot semantics —
/// every update returns a new value.
struct EkfState {
    Eigen::Vector2d estimate = Eigen::Vector2d::Zero();
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
    int step = 0;

    SystemParams params() const { return SystemParams(estimate[0], estimate[1]); }
};

/// Displacement predicted when the deployed shaper acts on a plant with
/// parameters t: kappa_mm times the residual vibration ratio.
double measurement_model(const SystemParams& t, const ImpulseSequence& deployed, double kappa_mm);

/// d(predicted displacement)/d(omega_n, zeta) by central differences with
/// relative step 1e-6. Requires t strictly interior so the perturbed
/// evaluations stay in-domain.
Eigen::RowVector2d measurement_jacobian(const SystemParams& t, const ImpulseSequence& deployed,
                                        double kappa_mm);

/// Scalar-measurement Kalman update on an already-predicted state.
/// Exposed separately so the gain/covariance algebra is testable with an
/// injected jacobian. Clamps the posterior estimate to the admissible
/// region (omega_n >= 1e-3, zeta in [0, 0.99]) and re-symmetrizes P.
EkfState kalman_update(const EkfState& predicted, double theta_meas, double theta_pred,
                       const Eigen::RowVector2d& jac, double r);

/// One predict + update cycle against a single measured displacement.
EkfState ekf_step(const EkfState& state, double theta_meas, const ImpulseSequence& deployed,
                  const NoiseConfig& noise, double kappa_mm);

struct EkfOptions {
    Eigen::Matrix2d p0 = initial_covariance();
    /// When set, p0 is replaced by a seeded random diagonal.
    std::optional<std::uint64_t> random_p0_seed;

    static Eigen::Matrix2d initial_covariance();
};

/// Runs the filter once over the samples in order. Each trial's shaper is
/// re-designed at that trial's recorded parameters, which is what makes a
/// sequence of scalar residual measurements pin down both components.
SystemParams identify_parameters(const SystemParams& t0, const Dataset& samples,
                                 const NoiseConfig& noise, double kappa_mm,
                                 const EkfOptions& options = {});

} // namespace vibrokit
