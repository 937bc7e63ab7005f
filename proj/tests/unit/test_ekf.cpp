#include <doctest.h>

#include <chrono>
#include <cmath>
#include <vector>

#include "core/dataset.hpp"
#include "core/dynamics.hpp"
#include "core/ekf.hpp"
#include "core/errors.hpp"
#include "core/pipeline.hpp"
#include "core/rng.hpp"
#include "core/shaper.hpp"

using namespace vibrokit;

namespace {

// Brute-force residual ratio, independent of the dynamics module.
double brute_ratio(const SystemParams& p, const ImpulseSequence& seq) {
    const double wd = p.damped_frequency();
    double c = 0.0;
    double s = 0.0;
    for (const Impulse& imp : seq.impulses()) {
        c += imp.amplitude * std::exp(p.zeta() * p.omega_n() * imp.time) * std::cos(wd * imp.time);
        s += imp.amplitude * std::exp(p.zeta() * p.omega_n() * imp.time) * std::sin(wd * imp.time);
    }
    return std::exp(-p.zeta() * p.omega_n() * seq.last_time()) * std::sqrt(c * c + s * s);
}

// Synthetic identification set: trials scatter around the nominal mode,
// each trial's shaper is designed at the scattered observation, and the
// recorded displacement is the gain times the true plant's residual ratio
// plus sensor noise.
Dataset make_trials(const SystemParams& truth, const SystemParams& nominal, int n,
                    double kappa_mm, double noise_sigma_mm, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<VibrationSample> samples;
    for (int i = 0; i < n; ++i) {
        double omega = 0.0;
        double zeta = 0.0;
        do {
            omega = rng.normal(nominal.omega_n(), 0.03 * nominal.omega_n());
            zeta = rng.normal(nominal.zeta(), 0.01);
        } while (!(omega > 0.0 && zeta >= 0.0 && zeta < 1.0));
        const SystemParams observed(omega, zeta);
        const double theta =
            kappa_mm * brute_ratio(truth, design_zvd(observed)) + rng.normal(0.0, noise_sigma_mm);
        samples.push_back({rad_to_hz(omega), zeta, theta});
    }
    return Dataset(std::move(samples), "trials", seed);
}

} // namespace

TEST_CASE("measurement_model") {
    const SystemParams design(kTwoPi * 5.0, 0.1);
    const ImpulseSequence deployed = design_zvd(design);

    CHECK(measurement_model(design, deployed, 100.0) < 1e-10);
    CHECK(measurement_model(SystemParams(kTwoPi * 5.4, 0.15), deployed, 0.0) == 0.0);

    const SystemParams detuned(design.omega_n() * 1.05, design.zeta());
    CHECK(measurement_model(detuned, deployed, 100.0) ==
          doctest::Approx(100.0 * brute_ratio(detuned, deployed)).epsilon(1e-12));
}

TEST_CASE("measurement_jacobian") {
    const SystemParams design(kTwoPi * 5.0, 0.1);
    const ImpulseSequence deployed = design_zvd(design);
    const double kappa = 100.0;

    const Eigen::RowVector2d zero_gain =
        measurement_jacobian(SystemParams(kTwoPi * 5.3, 0.12), deployed, 0.0);
    CHECK(zero_gain[0] == 0.0);
    CHECK(zero_gain[1] == 0.0);

    // against an independent central difference with a different step
    const SystemParams at(kTwoPi * 5.3, 0.12);
    const Eigen::RowVector2d jac = measurement_jacobian(at, deployed, kappa);
    const double hw = 1e-7 * at.omega_n();
    const double hz = 1e-7 * at.zeta();
    const double jw = (measurement_model(SystemParams(at.omega_n() + hw, at.zeta()), deployed, kappa) -
                       measurement_model(SystemParams(at.omega_n() - hw, at.zeta()), deployed, kappa)) /
                      (2.0 * hw);
    const double jz = (measurement_model(SystemParams(at.omega_n(), at.zeta() + hz), deployed, kappa) -
                       measurement_model(SystemParams(at.omega_n(), at.zeta() - hz), deployed, kappa)) /
                      (2.0 * hz);
    CHECK(jac[0] == doctest::Approx(jw).epsilon(1e-4));
    CHECK(jac[1] == doctest::Approx(jz).epsilon(1e-4));

    // flat at the deployed design point (residual minimum)
    const Eigen::RowVector2d flat = measurement_jacobian(design, deployed, kappa);
    CHECK(std::abs(flat[0]) < 1e-6 * kappa);
    CHECK(std::abs(flat[1]) < 1e-6 * kappa);

    CHECK_THROWS_AS(measurement_jacobian(SystemParams(kTwoPi * 5.0, 0.0), deployed, kappa),
                    std::invalid_argument);
}

TEST_CASE("kalman_update: scalar algebra by hand") {
    EkfState predicted;
    predicted.estimate = Eigen::Vector2d(10.0, 0.5);
    predicted.covariance = Eigen::Matrix2d::Identity();

    const Eigen::RowVector2d jac(1.0, 0.0);
    // innovation of +1 with R = 1: gain (0.5, 0), posterior P11 = 0.5
    const EkfState post = kalman_update(predicted, 2.0, 1.0, jac, 1.0);
    CHECK(post.estimate[0] == doctest::Approx(10.5).epsilon(1e-15));
    CHECK(post.estimate[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(post.covariance(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(post.covariance(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(post.covariance(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(post.step == 1);

    CHECK_THROWS_AS(kalman_update(predicted, 2.0, 1.0, jac, -2.0), numerical_error);
}

TEST_CASE("ekf_step: zero jacobian and zero innovation") {
    const SystemParams design(kTwoPi * 5.0, 0.1);
    const ImpulseSequence deployed = design_zvd(design);
    NoiseConfig noise = NoiseConfig::defaults();
    noise.r = 0.01;

    EkfState state;
    state.estimate = Eigen::Vector2d(kTwoPi * 5.2, 0.12);
    state.covariance = EkfOptions::initial_covariance();

    // kappa 0 kills the jacobian: estimate frozen, covariance grows by q
    const EkfState frozen = ekf_step(state, 1.23, deployed, noise, 0.0);
    CHECK(frozen.estimate == state.estimate);
    CHECK((frozen.covariance - (state.covariance + noise.q)).norm() < 1e-15);

    // measurement equal to the prediction: zero innovation, estimate kept
    const double kappa = 100.0;
    const double predicted = measurement_model(state.params(), deployed, kappa);
    const EkfState same = ekf_step(state, predicted, deployed, noise, kappa);
    CHECK(same.estimate[0] == doctest::Approx(state.estimate[0]).epsilon(1e-12));
    CHECK(same.estimate[1] == doctest::Approx(state.estimate[1]).epsilon(1e-12));
}

TEST_CASE("ekf_step: covariance stays symmetric positive definite") {
    const SystemParams nominal(kTwoPi * 5.0, 0.1);
    NoiseConfig noise = NoiseConfig::defaults();
    noise.r = 0.01;
    const Dataset trials =
        make_trials(SystemParams(kTwoPi * 4.6, 0.08), nominal, 60, 100.0, 0.1, 99);

    EkfState state;
    state.estimate = Eigen::Vector2d(nominal.omega_n(), nominal.zeta());
    state.covariance = EkfOptions::initial_covariance();
    for (const VibrationSample& s : trials.samples()) {
        const ImpulseSequence deployed = design_zvd(SystemParams::from_hz(s.omega_hz, s.zeta));
        state = ekf_step(state, s.theta_mm, deployed, noise, 100.0);
        CHECK((state.covariance - state.covariance.transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(state.covariance);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("ekf_step: with q = 0 the covariance trace never grows") {
    const SystemParams nominal(kTwoPi * 5.0, 0.1);
    NoiseConfig noise;
    noise.q.setZero();
    noise.r = 0.01;
    const Dataset trials =
        make_trials(SystemParams(kTwoPi * 4.8, 0.11), nominal, 40, 100.0, 0.1, 7);

    EkfState state;
    state.estimate = Eigen::Vector2d(nominal.omega_n(), nominal.zeta());
    state.covariance = EkfOptions::initial_covariance();
    double prev_trace = state.covariance.trace();
    for (const VibrationSample& s : trials.samples()) {
        const ImpulseSequence deployed = design_zvd(SystemParams::from_hz(s.omega_hz, s.zeta));
        state = ekf_step(state, s.theta_mm, deployed, noise, 100.0);
        CHECK(state.covariance.trace() <= prev_trace * (1.0 + 1e-12));
        prev_trace = state.covariance.trace();
    }
}

TEST_CASE("ekf_step: huge measurement noise freezes the estimate") {
    const SystemParams nominal(kTwoPi * 5.0, 0.1);
    const Dataset trials =
        make_trials(SystemParams(kTwoPi * 4.7, 0.09), nominal, 20, 100.0, 0.0, 13);

    double previous_move = 1e9;
    for (double r : {1.0, 1e4, 1e8}) {
        NoiseConfig noise;
        noise.q.setZero();
        noise.r = r;
        EkfState state;
        state.estimate = Eigen::Vector2d(nominal.omega_n(), nominal.zeta());
        state.covariance = EkfOptions::initial_covariance();
        double total_move = 0.0;
        for (const VibrationSample& s : trials.samples()) {
            const ImpulseSequence deployed = design_zvd(SystemParams::from_hz(s.omega_hz, s.zeta));
            const EkfState next = ekf_step(state, s.theta_mm, deployed, noise, 100.0);
            total_move += (next.estimate - state.estimate).norm();
            state = next;
        }
        CHECK(total_move < previous_move);
        previous_move = total_move;
    }
    CHECK(previous_move < 1e-3); // r = 1e8: essentially no update
}

TEST_CASE("identify_parameters: single uninformative sample returns t0") {
    const SystemParams t0(kTwoPi * 5.0, 0.1);
    const Dataset one({{5.0, 0.1, 3.0}}, "one", 1);
    NoiseConfig noise = NoiseConfig::defaults();
    const SystemParams est = identify_parameters(t0, one, noise, 0.0);
    CHECK(est.omega_n() == t0.omega_n());
    CHECK(est.zeta() == t0.zeta());
}

TEST_CASE("identify_parameters: recovers the true mode from noisy trials") {
    const SystemParams truth(kTwoPi * 5.0, 0.10);
    const SystemParams nominal(kTwoPi * 5.5, 0.12);
    const double kappa = 100.0;

    NoiseConfig noise = NoiseConfig::defaults();
    noise.r = 0.09; // generous vs the 0.1 mm sensor noise; smooths early gains

    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Dataset trials = make_trials(truth, nominal, 100, kappa, 0.1, seed);
        const SystemParams est = identify_parameters(nominal, trials, noise, kappa);
        const bool omega_ok =
            std::abs(est.omega_n() - truth.omega_n()) / truth.omega_n() < 0.02;
        const bool zeta_ok = std::abs(est.zeta() - truth.zeta()) < 0.02;
        if (omega_ok && zeta_ok) ++hits;
    }
    CHECK(hits >= 9);
}

TEST_CASE("identify_parameters: bit-identical across runs") {
    const SystemParams truth(kTwoPi * 5.1, 0.09);
    const SystemParams nominal(kTwoPi * 5.4, 0.11);
    const Dataset trials = make_trials(truth, nominal, 50, 80.0, 0.1, 21);
    NoiseConfig noise = NoiseConfig::defaults();
    noise.r = 0.05;

    const SystemParams a = identify_parameters(nominal, trials, noise, 80.0);
    const SystemParams b = identify_parameters(nominal, trials, noise, 80.0);
    CHECK(a.omega_n() == b.omega_n());
    CHECK(a.zeta() == b.zeta());
}

TEST_CASE("identify_parameters: seeded random initial covariance option") {
    const SystemParams truth(kTwoPi * 5.1, 0.09);
    const SystemParams nominal(kTwoPi * 5.4, 0.11);
    const Dataset trials = make_trials(truth, nominal, 30, 80.0, 0.1, 34);
    NoiseConfig noise = NoiseConfig::defaults();
    noise.r = 0.05;

    EkfOptions opt;
    opt.random_p0_seed = 77;
    const SystemParams a = identify_parameters(nominal, trials, noise, 80.0, opt);
    const SystemParams b = identify_parameters(nominal, trials, noise, 80.0, opt);
    CHECK(a.omega_n() == b.omega_n()); // same seed, same answer
    const SystemParams c = identify_parameters(nominal, trials, noise, 80.0);
    CHECK(c.omega_n() != a.omega_n()); // different p0, different trajectory
}

TEST_CASE("identify_parameters: cost is linear in the sample count") {
    const SystemParams truth(kTwoPi * 5.0, 0.1);
    const SystemParams nominal(kTwoPi * 5.3, 0.11);
    NoiseConfig noise = NoiseConfig::defaults();
    noise.r = 0.05;

    const Dataset small = make_trials(truth, nominal, 1500, 80.0, 0.1, 3);
    const Dataset big = make_trials(truth, nominal, 3000, 80.0, 0.1, 3);

    auto time_once = [&noise, &nominal](const Dataset& d) {
        const auto begin = std::chrono::steady_clock::now();
        identify_parameters(nominal, d, noise, 80.0);
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    };

    // median of five to tame scheduler noise
    auto median_time = [&time_once](const Dataset& d) {
        std::vector<double> times;
        for (int i = 0; i < 5; ++i) times.push_back(time_once(d));
        std::sort(times.begin(), times.end());
        return times[2];
    };

    const double t_small = median_time(small);
    const double t_big = median_time(big);
    CHECK(t_big / t_small > 1.5);
    CHECK(t_big / t_small < 2.5);
}
