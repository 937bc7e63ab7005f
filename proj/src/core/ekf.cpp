#include "core/ekf.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace vibrokit {

namespace {

constexpr double kMinOmega = 1e-3;
constexpr double kMaxZeta = 0.99;

Eigen::Vector2d clamp_estimate(Eigen::Vector2d t) {
    t[0] = std::max(t[0], kMinOmega);
    t[1] = std::clamp(t[1], 0.0, kMaxZeta);
    return t;
}

} // namespace

NoiseConfig NoiseConfig::defaults() {
    NoiseConfig n;
    n.q = Eigen::Vector2d(1e-6, 1e-8).asDiagonal();
    n.r = 1.0;
    return n;
}

void NoiseConfig::validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("NoiseConfig: r must be positive");
    }
    if (!q.allFinite()) throw std::invalid_argument("NoiseConfig: q must be finite");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(q);
    if (es.eigenvalues().minCoeff() < -1e-15) {
        throw std::invalid_argument("NoiseConfig: q must be positive semidefinite");
    }
}

double measurement_model(const SystemParams& t, const ImpulseSequence& deployed, double kappa_mm) {
    return kappa_mm * residual_vibration_ratio(t, deployed);
}

Eigen::RowVector2d measurement_jacobian(const SystemParams& t, const ImpulseSequence& deployed,
                                        double kappa_mm) {
    if (!(t.zeta() > 0.0 && t.zeta() < 1.0)) {
        throw std::invalid_argument("measurement_jacobian: zeta must be strictly interior");
    }
    constexpr double rel = 1e-6;
    const double w = t.omega_n();
    const double z = t.zeta();
    if (!(z * (1.0 + rel) < 1.0)) {
        throw std::invalid_argument("measurement_jacobian: perturbed zeta leaves [0, 1)");
    }

    const double hw = rel * w;
    const double hz = rel * z;
    Eigen::RowVector2d jac;
    jac[0] = (measurement_model(SystemParams(w + hw, z), deployed, kappa_mm) -
              measurement_model(SystemParams(w - hw, z), deployed, kappa_mm)) /
             (2.0 * hw);
    jac[1] = (measurement_model(SystemParams(w, z + hz), deployed, kappa_mm) -
              measurement_model(SystemParams(w, z - hz), deployed, kappa_mm)) /
             (2.0 * hz);
    return jac;
}

EkfState kalman_update(const EkfState& predicted, double theta_meas, double theta_pred,
                       const Eigen::RowVector2d& jac, double r) {
    const Eigen::Matrix2d& p = predicted.covariance;
    const double innovation_var = (jac * p * jac.transpose())(0, 0) + r;
    if (!(innovation_var > 0.0) || !std::isfinite(innovation_var)) {
        throw numerical_error("kalman_update: non-positive innovation covariance");
    }
    const Eigen::Vector2d gain = p * jac.transpose() / innovation_var;

    EkfState next;
    next.estimate = clamp_estimate(predicted.estimate + gain * (theta_meas - theta_pred));
    Eigen::Matrix2d posterior = (Eigen::Matrix2d::Identity() - gain * jac) * p;
    next.covariance = 0.5 * (posterior + posterior.transpose());
    next.step = predicted.step + 1;
    if (!next.estimate.allFinite() || !next.covariance.allFinite()) {
        throw numerical_error("kalman_update: non-finite state");
    }
    return next;
}

EkfState ekf_step(const EkfState& state, double theta_meas, const ImpulseSequence& deployed,
                  const NoiseConfig& noise, double kappa_mm) {
    if (!std::isfinite(theta_meas)) throw std::invalid_argument("ekf_step: non-finite measurement");

    EkfState predicted = state;
    predicted.covariance = state.covariance + noise.q;

    const SystemParams t_pred = predicted.params();
    const double theta_pred = measurement_model(t_pred, deployed, kappa_mm);
    const Eigen::RowVector2d jac = measurement_jacobian(t_pred, deployed, kappa_mm);
    return kalman_update(predicted, theta_meas, theta_pred, jac, noise.r);
}

Eigen::Matrix2d EkfOptions::initial_covariance() {
    return Eigen::Vector2d(1.0, 0.01).asDiagonal();
}

SystemParams identify_parameters(const SystemParams& t0, const Dataset& samples,
                                 const NoiseConfig& noise, double kappa_mm,
                                 const EkfOptions& options) {
    noise.validate();

    EkfState state;
    state.estimate = Eigen::Vector2d(t0.omega_n(), t0.zeta());
    state.covariance = options.p0;
    if (options.random_p0_seed) {
        Rng rng(*options.random_p0_seed);
        state.covariance =
            Eigen::Vector2d(rng.uniform(0.5, 1.5), rng.uniform(0.005, 0.015)).asDiagonal();
    }

    for (const VibrationSample& s : samples.samples()) {
        const ImpulseSequence deployed = design_zvd(SystemParams::from_hz(s.omega_hz, s.zeta));
        state = ekf_step(state, s.theta_mm, deployed, noise, kappa_mm);
    }
    return state.params();
}

} // namespace vibrokit
