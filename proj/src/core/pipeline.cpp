#include "core/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace vibrokit {

const std::array<std::string, kModelCount> kModelNames = {"cascade", "ekf-only", "nominal-zvd"};

Dataset generate_trials(const GenOptions& opt) {
    if (opt.n < 1) throw std::invalid_argument("generate_trials: n must be >= 1");
    const SystemParams plant(opt.truth.omega_n() + opt.obs_bias_omega,
                             opt.truth.zeta() + opt.obs_bias_zeta);
    const double dt = default_dt(plant);
    const double t_d = plant.damped_period();

    Rng rng(opt.seed);
    std::vector<VibrationSample> samples;
    samples.reserve(static_cast<std::size_t>(opt.n));
    for (int i = 0; i < opt.n; ++i) {
        double omega = 0.0;
        double zeta = 0.0;
        bool ok = false;
        for (int attempt = 0; attempt < 100; ++attempt) {
            omega = rng.normal(opt.nominal.omega_n(), opt.scatter_omega_rel * opt.nominal.omega_n());
            zeta = rng.normal(opt.nominal.zeta(), opt.scatter_zeta);
            if (omega > 0.0 && zeta >= 0.0 && zeta < 1.0) {
                ok = true;
                break;
            }
        }
        if (!ok) throw numerical_error("generate_trials: could not draw valid parameters");

        const SystemParams observed(omega, zeta);
        const ImpulseSequence deployed = design_zvd(observed);
        const ShaperEval eval = evaluate_sequence_on_plant(deployed, plant, opt.move_mm, dt,
                                                           deployed.last_time() + 6.0 * t_d);
        const double theta = eval.residual_peak_mm + rng.normal(0.0, opt.noise_sigma_mm);
        samples.push_back({rad_to_hz(omega), zeta, theta});
    }
    return Dataset(std::move(samples), opt.name, opt.seed);
}

ShaperEval evaluate_sequence_on_plant(const ImpulseSequence& seq, const SystemParams& plant,
                                      double move_mm, double dt, double horizon) {
    if (!(move_mm >= 0.0) || !std::isfinite(move_mm)) {
        throw std::invalid_argument("evaluate_sequence_on_plant: bad move amplitude");
    }
    const TimeSeries command(dt, {move_mm});
    const TimeSeries shaped = shape_command(command, seq);
    if (horizon < shaped.duration()) {
        throw std::invalid_argument("evaluate_sequence_on_plant: horizon shorter than shaped move");
    }

    ShaperEval out{simulate(plant, shaped, dt, horizon), 0.0, 0.0};
    out.mts_mm = max_transient_swing(out.trace.values);
    // Residual window starts once the shaped command reaches its final level.
    const std::size_t settle = shaped.size() - 1;
    for (std::size_t k = settle; k < out.trace.size(); ++k) {
        out.residual_peak_mm = std::max(out.residual_peak_mm, std::abs(out.trace.values[k] - move_mm));
    }
    return out;
}

ShaperEval evaluate_shaper_on_plant(const SystemParams& design, const SystemParams& plant,
                                    double move_mm, double dt, double horizon) {
    return evaluate_sequence_on_plant(design_zvd(design), plant, move_mm, dt, horizon);
}

namespace {

double seconds_between(std::chrono::steady_clock::time_point a,
                       std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

double physics_prediction(const SystemParams& t, const VibrationSample& s, double kappa_mm) {
    const ImpulseSequence deployed = design_zvd(SystemParams::from_hz(s.omega_hz, s.zeta));
    return measurement_model(t, deployed, kappa_mm);
}

double train_rmse_at(const SystemParams& t, const Dataset& train, double kappa_mm) {
    double sum_sq = 0.0;
    for (const VibrationSample& s : train.samples()) {
        const double e = s.theta_mm - physics_prediction(t, s, kappa_mm);
        sum_sq += e * e;
    }
    return std::sqrt(sum_sq / static_cast<double>(train.size()));
}

bool valid_params(const Eigen::Vector2d& t) {
    return t[0] > 0.0 && t[1] >= 0.0 && t[1] < 1.0 && t.allFinite();
}

/// Searches signed per-component multipliers of the configured correction
/// scales for the pair that best explains the training measurements.
Eigen::Vector2d calibrate_delta(const ResNet& net, const SystemParams& t_ekf, const Dataset& train,
                                double kappa_mm, const TrainConfig& tc) {
    static constexpr std::array<double, 11> kMultipliers = {0.0,  0.05, -0.05, 0.1, -0.1, 0.25,
                                                            -0.25, 0.5,  -0.5,  1.0, -1.0};
    const Eigen::Vector2d base(t_ekf.omega_n(), t_ekf.zeta());

    Eigen::Vector2d best = Eigen::Vector2d::Zero();
    double best_rmse = train_rmse_at(t_ekf, train, kappa_mm);
    for (double mw : kMultipliers) {
        for (double mz : kMultipliers) {
            const Eigen::Vector2d delta = correction_at(
                net, t_ekf, mw * tc.delta_scale_omega_rel, mz * tc.delta_scale_zeta);
            if (mw == 0.0 && mz == 0.0) continue; // baseline already scored
            const Eigen::Vector2d cand = base + delta;
            if (!valid_params(cand)) continue;
            const double rmse = train_rmse_at(SystemParams(cand[0], cand[1]), train, kappa_mm);
            if (rmse < best_rmse) {
                best_rmse = rmse;
                best = delta;
            }
        }
    }
    return best;
}

} // namespace

double calibrate_kappa_first_sample(const SystemParams& t0, const Dataset& data) {
    const VibrationSample& first = data[0];
    const ImpulseSequence deployed = design_zvd(SystemParams::from_hz(first.omega_hz, first.zeta));
    const double v = residual_vibration_ratio(t0, deployed);
    if (v > 0.0) {
        const double kappa = first.theta_mm / v;
        if (std::isfinite(kappa) && kappa > 0.0) return kappa;
    }
    return 1.0;
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const Dataset& data) {
    cfg.validate();
    const std::size_t n = data.size();
    if (n < 2) throw std::invalid_argument("run_pipeline: need at least two samples");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed);
    shuffle(order, rng);

    auto n_train = static_cast<std::size_t>(std::lround(cfg.split * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    PipelineResult res;
    res.t0 = cfg.nominal();
    res.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    res.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

    const Dataset train = data.subset(res.train_indices, data.name() + "-train");
    const Dataset test = data.subset(res.test_indices, data.name() + "-test");

    res.kappa_mm = cfg.kappa_policy == KappaPolicy::kFixed
                       ? cfg.kappa_mm
                       : calibrate_kappa_first_sample(res.t0, train);

    // Identification stage.
    const auto ekf_begin = std::chrono::steady_clock::now();
    res.t_ekf = identify_parameters(res.t0, train, cfg.noise(), res.kappa_mm);
    const auto ekf_end = std::chrono::steady_clock::now();

    // Compensation stage.
    TrainConfig tc = cfg.train_config();
    TrainResult trained = train_error_compensator(train, res.t_ekf, tc);
    const auto train_end = std::chrono::steady_clock::now();

    res.delta = cfg.delta_policy == DeltaPolicy::kCalibrated
                    ? calibrate_delta(trained.net, res.t_ekf, train, res.kappa_mm, tc)
                    : trained.delta;
    const Eigen::Vector2d corrected =
        Eigen::Vector2d(res.t_ekf.omega_n(), res.t_ekf.zeta()) + res.delta;
    if (!valid_params(corrected)) {
        throw numerical_error("run_pipeline: corrected parameters left the admissible region");
    }
    res.t_r = SystemParams(corrected[0], corrected[1]);

    res.ekf_seconds = seconds_between(ekf_begin, ekf_end);
    res.train_seconds = seconds_between(ekf_end, train_end);
    res.total_seconds = res.ekf_seconds + res.train_seconds;
    res.train_rounds = trained.rounds;
    res.train_log = trained.log;

    // Test-split scoring: the cascade predicts through the trained net,
    // the baselines through the residual-ratio model at their parameters.
    res.measured_test_mm.reserve(test.size());
    for (const VibrationSample& s : test.samples()) res.measured_test_mm.push_back(s.theta_mm);

    for (std::size_t m = 0; m < kModelCount; ++m) {
        res.models[m].model = kModelNames[m];
        res.models[m].predictions_mm.reserve(test.size());
    }
    for (const VibrationSample& s : test.samples()) {
        res.models[0].predictions_mm.push_back(trained.net.predict_mm(s.omega_hz, s.zeta));
        res.models[1].predictions_mm.push_back(physics_prediction(res.t_ekf, s, res.kappa_mm));
        res.models[2].predictions_mm.push_back(physics_prediction(res.t0, s, res.kappa_mm));
    }
    for (std::size_t m = 0; m < kModelCount; ++m) {
        res.models[m].report = evaluate(res.measured_test_mm, res.models[m].predictions_mm);
    }

    res.net = std::move(trained.net);
    return res;
}

namespace {

std::vector<PipelineResult> run_all(const PipelineConfig& cfg, const Dataset& data, int repeats) {
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    std::vector<PipelineResult> runs;
    runs.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        PipelineConfig c = cfg;
        c.seed = cfg.seed + static_cast<std::uint64_t>(r);
        runs.push_back(run_pipeline(c, data));
    }
    return runs;
}

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd ms;
    const auto n = static_cast<double>(xs.size());
    for (double x : xs) ms.mean += x;
    ms.mean /= n;
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double x : xs) sq += (x - ms.mean) * (x - ms.mean);
        ms.stddev = std::sqrt(sq / (n - 1.0));
    }
    return ms;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

RepeatSummary aggregate(const std::vector<PipelineResult>& runs) {
    RepeatSummary sum;
    sum.repeats = static_cast<int>(runs.size());
    const PipelineResult& first = runs.front();
    sum.ekf_seconds = first.ekf_seconds;
    sum.train_seconds = first.train_seconds;
    sum.total_seconds = first.total_seconds;
    sum.train_rounds = first.train_rounds;
    sum.kappa_mm = first.kappa_mm;
    sum.t_ekf = first.t_ekf;
    sum.t_r = first.t_r;
    sum.delta = first.delta;

    for (std::size_t m = 0; m < kModelCount; ++m) {
        std::vector<double> mts, max_err, rmse, mean_err;
        for (const PipelineResult& run : runs) {
            mts.push_back(run.models[m].report.mts);
            max_err.push_back(run.models[m].report.max_err);
            rmse.push_back(run.models[m].report.rmse);
            mean_err.push_back(run.models[m].report.mean_err);
        }
        ModelAggregate& agg = sum.models[m];
        agg.model = kModelNames[m];
        const MeanStd a = mean_std(mts), b = mean_std(max_err), c = mean_std(rmse),
                      d = mean_std(mean_err);
        agg.mean = {a.mean, b.mean, c.mean, d.mean, first.models[m].report.n};
        agg.stddev = {a.stddev, b.stddev, c.stddev, d.stddev, first.models[m].report.n};
        agg.median_rmse = median(rmse);
    }
    return sum;
}

std::string pm_cell(double mean, double stddev) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f±%.4f", mean, stddev);
    return buf;
}

} // namespace

std::string RepeatSummary::table_text() const {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %17s %17s %17s\n", "model", "MAX/mm", "RMSE/mm",
                  "MEAN/mm");
    out << line;
    for (const ModelAggregate& agg : models) {
        std::snprintf(line, sizeof(line), "%-12s %17s %17s %17s\n", agg.model.c_str(),
                      pm_cell(agg.mean.max_err, agg.stddev.max_err).c_str(),
                      pm_cell(agg.mean.rmse, agg.stddev.rmse).c_str(),
                      pm_cell(agg.mean.mean_err, agg.stddev.mean_err).c_str());
        out << line;
    }
    return out.str();
}

RepeatSummary run_repeated(const PipelineConfig& cfg, const Dataset& data, int repeats) {
    return aggregate(run_all(cfg, data, repeats));
}

namespace {

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw io_error("write failed: " + path);
}

void write_predictions(const std::string& path, const std::vector<std::size_t>& ids,
                       const std::vector<double>& measured, const std::vector<double>& predicted) {
    std::ostringstream out;
    out << "id,measured_mm,predicted_mm\n";
    for (std::size_t i = 0; i < measured.size(); ++i) {
        out << (ids[i] + 1) << ',' << csv::format(measured[i]) << ',' << csv::format(predicted[i])
            << '\n';
    }
    write_text_file(path, out.str());
}

} // namespace

RepeatSummary run_and_write(const PipelineConfig& cfg, const Dataset& data,
                            const std::string& out_dir, int repeats) {
    const std::vector<PipelineResult> runs = run_all(cfg, data, repeats);
    const RepeatSummary sum = aggregate(runs);
    const PipelineResult& first = runs.front();

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto at = [&out_dir](const std::string& name) { return (fs::path(out_dir) / name).string(); };

    // Comparison table, human-readable and CSV.
    std::ostringstream txt;
    txt << "test-split comparison over " << sum.repeats << " repetition(s), "
        << first.measured_test_mm.size() << " test samples\n";
    txt << "measured MTS (first repetition): " << csv::format(sum.models[0].mean.mts) << " mm\n\n";
    txt << sum.table_text();
    write_text_file(at("comparison.txt"), txt.str());

    std::ostringstream cmp;
    cmp << "model,mts_mean,mts_std,max_mean,max_std,rmse_mean,rmse_std,mean_mean,mean_std,"
           "rmse_median\n";
    for (const ModelAggregate& agg : sum.models) {
        cmp << agg.model << ',' << csv::format(agg.mean.mts) << ',' << csv::format(agg.stddev.mts)
            << ',' << csv::format(agg.mean.max_err) << ',' << csv::format(agg.stddev.max_err) << ','
            << csv::format(agg.mean.rmse) << ',' << csv::format(agg.stddev.rmse) << ','
            << csv::format(agg.mean.mean_err) << ',' << csv::format(agg.stddev.mean_err) << ','
            << csv::format(agg.median_rmse) << '\n';
    }
    write_text_file(at("comparison.csv"), cmp.str());

    // Identified parameters and their shaper designs.
    std::ostringstream params;
    params << "model,omega_hz,zeta\n";
    params << "nominal-zvd," << csv::format(first.t0.omega_hz) << ',' << csv::format(first.t0.zeta())
           << '\n';
    params << "ekf-only," << csv::format(first.t_ekf.omega_hz()) << ','
           << csv::format(first.t_ekf.zeta()) << '\n';
    params << "cascade," << csv::format(first.t_r.omega_hz()) << ',' << csv::format(first.t_r.zeta())
           << '\n';
    write_text_file(at("params_identified.csv"), params.str());

    design_zvd(first.t0).save_csv(at("shaper_nominal-zvd.csv"));
    design_zvd(first.t_ekf).save_csv(at("shaper_ekf-only.csv"));
    design_zvd(first.t_r).save_csv(at("shaper_cascade.csv"));

    for (std::size_t m = 0; m < kModelCount; ++m) {
        write_predictions(at("predictions_" + kModelNames[m] + ".csv"), first.test_indices,
                          first.measured_test_mm, first.models[m].predictions_mm);
    }

    first.net.save_text(at("model.txt"));
    save_training_log(first.train_log, at("training_log.csv"));

    // Plot-ready traces: every design driving the best available plant
    // estimate (the corrected parameters), plus the unshaped move.
    const SystemParams plant = first.t_r;
    const double dt = default_dt(plant);
    auto emit_trace = [&](const ImpulseSequence& seq, const std::string& name) {
        const double horizon = seq.last_time() + 8.0 * plant.damped_period();
        evaluate_sequence_on_plant(seq, plant, cfg.move_mm, dt, horizon).trace.save_csv(at(name));
    };
    emit_trace(design_zvd(first.t_r), "trace_cascade.csv");
    emit_trace(design_zvd(first.t_ekf), "trace_ekf-only.csv");
    emit_trace(design_zvd(first.t0), "trace_nominal-zvd.csv");
    emit_trace(ImpulseSequence::identity(), "trace_unshaped.csv");

    // Run facts (no timing: files must be byte-stable per seed).
    std::ostringstream info;
    info << "key,value\n";
    info << "dataset," << data.name() << '\n';
    info << "samples," << data.size() << '\n';
    info << "repeats," << sum.repeats << '\n';
    info << "seed," << cfg.seed << '\n';
    info << "kappa_mm," << csv::format(sum.kappa_mm) << '\n';
    info << "train_rounds," << sum.train_rounds << '\n';
    info << "delta_omega_rad_s," << csv::format(sum.delta[0]) << '\n';
    info << "delta_zeta," << csv::format(sum.delta[1]) << '\n';
    write_text_file(at("run_info.csv"), info.str());

    return sum;
}

} // namespace vibrokit
