#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "core/dynamics.hpp"
#include "core/shaper.hpp"

using namespace vibrokit;

namespace {

constexpr double kPi = kTwoPi / 2.0;

// Independent evaluation of the three-impulse design in extended precision.
struct ZvdOracle {
    long double a[3];
    long double t[3];
};

ZvdOracle oracle_zvd(long double wn, long double z) {
    const long double k = std::exp(-z * static_cast<long double>(kPi) / std::sqrt(1.0L - z * z));
    const long double c = 1.0L + 2.0L * k + k * k;
    const long double wd = wn * std::sqrt(1.0L - z * z);
    const long double td = 2.0L * static_cast<long double>(kPi) / wd;
    return {{1.0L / c, 2.0L * k / c, k * k / c}, {0.0L, td / 2.0L, td}};
}

double central_dv_domega(const SystemParams& design, double omega, double zeta, double rel_step) {
    const ImpulseSequence seq = design_zvd(design);
    const double h = rel_step * omega;
    const double up = residual_vibration_ratio(SystemParams(omega + h, zeta), seq);
    const double dn = residual_vibration_ratio(SystemParams(omega - h, zeta), seq);
    return (up - dn) / (2.0 * h);
}

} // namespace

TEST_CASE("ImpulseSequence invariants") {
    CHECK_THROWS_AS(ImpulseSequence({}), std::invalid_argument);
    CHECK_THROWS_AS(ImpulseSequence({{1.0, 0.5}}), std::invalid_argument); // t1 != 0
    CHECK_THROWS_AS(ImpulseSequence({{0.5, 0.0}, {0.5, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(ImpulseSequence({{0.7, 0.0}, {0.5, 0.1}}), std::invalid_argument); // sum != 1
    CHECK_THROWS_AS(ImpulseSequence({{1.5, 0.0}, {-0.5, 0.1}}), std::invalid_argument);

    const ImpulseSequence id = ImpulseSequence::identity();
    CHECK(id.size() == 1);
    CHECK(id.last_time() == 0.0);
}

TEST_CASE("design_zvd: undamped closed form") {
    const SystemParams p(kTwoPi, 0.0);
    const ImpulseSequence seq = design_zvd(p);
    REQUIRE(seq.size() == 3);
    CHECK(seq.impulses()[0].amplitude == 0.25);
    CHECK(seq.impulses()[1].amplitude == 0.5);
    CHECK(seq.impulses()[2].amplitude == 0.25);
    CHECK(seq.impulses()[0].time == 0.0);
    CHECK(seq.impulses()[1].time == doctest::Approx(kPi / p.omega_n()).epsilon(1e-15));
    CHECK(seq.impulses()[2].time == doctest::Approx(kTwoPi / p.omega_n()).epsilon(1e-15));
}

TEST_CASE("design_zvd: damped case against the independent evaluation") {
    const SystemParams p(kTwoPi * 5.0, 0.1);
    const ZvdOracle o = oracle_zvd(kTwoPi * 5.0L, 0.1L);
    const ImpulseSequence seq = design_zvd(p);
    for (int i = 0; i < 3; ++i) {
        CHECK(seq.impulses()[static_cast<std::size_t>(i)].amplitude ==
              doctest::Approx(static_cast<double>(o.a[i])).epsilon(1e-14));
        CHECK(seq.impulses()[static_cast<std::size_t>(i)].time ==
              doctest::Approx(static_cast<double>(o.t[i])).epsilon(1e-14));
    }
    // spot values, five significant digits
    CHECK(seq.impulses()[0].amplitude == doctest::Approx(0.33442).epsilon(1e-4));
    CHECK(seq.impulses()[1].amplitude == doctest::Approx(0.48775).epsilon(1e-4));
    CHECK(seq.impulses()[2].amplitude == doctest::Approx(0.17783).epsilon(1e-4));
    CHECK(seq.impulses()[1].time == doctest::Approx(0.10050).epsilon(1e-4));
    CHECK(seq.impulses()[2].time == doctest::Approx(0.20101).epsilon(1e-4));
}

TEST_CASE("design_zvd: amplitudes sum to one across the parameter range") {
    for (double zeta = 0.0; zeta <= 0.901; zeta += 0.1) {
        const ImpulseSequence seq = design_zvd(SystemParams(kTwoPi * 7.3, zeta));
        double sum = 0.0;
        for (const Impulse& imp : seq.impulses()) sum += imp.amplitude;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("design_zvd: nulling and frequency-flatness over the grid") {
    for (int f = 1; f <= 20; ++f) {
        for (int zi = 0; zi <= 10; ++zi) {
            const double zeta = 0.05 * zi;
            const SystemParams p(kTwoPi * f, zeta);
            CHECK(residual_vibration_ratio(p, design_zvd(p)) < 1e-12);
            CHECK(std::abs(central_dv_domega(p, p.omega_n(), zeta, 1e-5)) < 1e-8);
        }
    }
}

TEST_CASE("design_zvd: detuning sensitivity grows away from the design point") {
    const SystemParams design(kTwoPi * 5.0, 0.1);
    const ImpulseSequence seq = design_zvd(design);
    double prev = residual_vibration_ratio(design, seq);
    for (double detune = 0.025; detune <= 0.101; detune += 0.025) {
        const double v = residual_vibration_ratio(
            SystemParams(design.omega_n() * (1.0 + detune), design.zeta()), seq);
        CHECK(v > prev);
        prev = v;
    }
    prev = residual_vibration_ratio(design, seq);
    for (double detune = 0.025; detune <= 0.101; detune += 0.025) {
        const double v = residual_vibration_ratio(
            SystemParams(design.omega_n() * (1.0 - detune), design.zeta()), seq);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("shape_command: identity and staircase") {
    const SystemParams p(kTwoPi * 5.0, 0.0);
    const double dt = default_dt(p);

    std::vector<double> ramp(40);
    for (std::size_t k = 0; k < ramp.size(); ++k) ramp[k] = 0.1 * static_cast<double>(k);
    const TimeSeries cmd(dt, ramp);
    const TimeSeries same = shape_command(cmd, ImpulseSequence::identity());
    REQUIRE(same.size() == cmd.size());
    for (std::size_t k = 0; k < cmd.size(); ++k) CHECK(same.values[k] == cmd.values[k]);

    // unit step through the undamped design: quarters at 0, half period, period
    const TimeSeries step(dt, {1.0});
    const TimeSeries shaped = shape_command(step, design_zvd(p));
    REQUIRE(shaped.size() == 201);
    CHECK(shaped.values[0] == 0.25);
    CHECK(shaped.values[99] == 0.25);
    CHECK(shaped.values[100] == 0.75);
    CHECK(shaped.values[199] == 0.75);
    CHECK(shaped.values[200] == 1.0);
}

TEST_CASE("shape_command: DC level is preserved") {
    const SystemParams p(kTwoPi * 3.0, 0.2);
    const double dt = default_dt(p);
    std::vector<double> cmd(140);
    for (std::size_t k = 0; k < cmd.size(); ++k) {
        cmd[k] = k < 60 ? 7.5 * static_cast<double>(k) / 60.0 : 7.5;
    }
    const TimeSeries shaped = shape_command(TimeSeries(dt, cmd), design_zvd(p));
    CHECK(shaped.values.back() == doctest::Approx(7.5).epsilon(1e-12));
}

TEST_CASE("shape_command: simulated residual collapses at the design point") {
    const SystemParams p(kTwoPi * 5.0, 0.1);
    const double dt = default_dt(p);
    const TimeSeries step(dt, {1.0});

    const ImpulseSequence seq = design_zvd(p);
    const TimeSeries shaped = shape_command(step, seq);
    const double horizon = shaped.duration() + 6.0 * p.damped_period();

    auto residual_peak = [&](const TimeSeries& command) {
        const TimeSeries y = simulate(p, command, dt, horizon);
        const std::size_t settle = command.size() - 1;
        double peak = 0.0;
        for (std::size_t k = settle; k < y.size(); ++k) {
            peak = std::max(peak, std::abs(y.values[k] - 1.0));
        }
        return peak;
    };

    const double shaped_peak = residual_peak(shaped);
    const double raw_peak = residual_peak(step);
    CHECK(raw_peak > 0.1);
    CHECK(shaped_peak < 1e-4 * raw_peak);
}

TEST_CASE("ImpulseSequence CSV round trip") {
    const auto path = std::filesystem::temp_directory_path() / "vibrokit_shaper_roundtrip.csv";
    const ImpulseSequence seq = design_zvd(SystemParams(kTwoPi * 4.4, 0.23));
    seq.save_csv(path.string());
    const ImpulseSequence back = ImpulseSequence::load_csv(path.string());
    REQUIRE(back.size() == seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(back.impulses()[i].amplitude == seq.impulses()[i].amplitude);
        CHECK(back.impulses()[i].time == seq.impulses()[i].time);
    }
    std::filesystem::remove(path);
}
