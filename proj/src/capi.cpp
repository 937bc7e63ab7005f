#include "vibrokit/vibrokit.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/csv.hpp"
#include "core/dataset.hpp"
#include "core/dynamics.hpp"
#include "core/ekf.hpp"
#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/pipeline.hpp"
#include "core/resnet.hpp"
#include "core/shaper.hpp"

struct vbk_dataset {
    vibrokit::Dataset data;
};

struct vbk_config {
    vibrokit::PipelineConfig cfg;
};

struct vbk_model {
    vibrokit::ResNet net;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) { g_last_error = msg; }

template <typename Fn>
vbk_status guarded(Fn&& fn) {
    try {
        fn();
        return VBK_OK;
    } catch (const vibrokit::numerical_error& e) {
        set_error(e.what());
        return VBK_ERR_NUMERICAL;
    } catch (const vibrokit::io_error& e) {
        set_error(e.what());
        return VBK_ERR_IO;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return VBK_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return VBK_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return VBK_ERR_INTERNAL;
    }
}

vbk_status require(bool cond, const char* msg) {
    if (cond) return VBK_OK;
    set_error(msg);
    return VBK_ERR_INVALID_ARGUMENT;
}

vibrokit::SystemParams to_params(vbk_params p) {
    return vibrokit::SystemParams(p.omega_rad_s, p.zeta);
}

vbk_params from_params(const vibrokit::SystemParams& p) {
    return {p.omega_n(), p.zeta()};
}

} // namespace

extern "C" {

const char* vbk_version(void) { return "0.1.0"; }

const char* vbk_last_error(void) { return g_last_error.c_str(); }

vbk_params vbk_params_from_hz(double omega_hz, double zeta) {
    return {vibrokit::hz_to_rad(omega_hz), zeta};
}

double vbk_params_omega_hz(vbk_params p) { return vibrokit::rad_to_hz(p.omega_rad_s); }

vbk_status vbk_zvd_design(vbk_params p, vbk_zvd* out) {
    if (vbk_status s = require(out != nullptr, "vbk_zvd_design: out is NULL")) return s;
    return guarded([&] {
        const vibrokit::ImpulseSequence seq = vibrokit::design_zvd(to_params(p));
        for (int i = 0; i < 3; ++i) {
            out->amplitude[i] = seq.impulses()[static_cast<std::size_t>(i)].amplitude;
            out->time_s[i] = seq.impulses()[static_cast<std::size_t>(i)].time;
        }
    });
}

vbk_status vbk_zvd_save_csv(vbk_params p, const char* path) {
    if (vbk_status s = require(path != nullptr, "vbk_zvd_save_csv: path is NULL")) return s;
    return guarded([&] { vibrokit::design_zvd(to_params(p)).save_csv(path); });
}

vbk_status vbk_residual_ratio(vbk_params plant, vbk_params design, double* out) {
    if (vbk_status s = require(out != nullptr, "vbk_residual_ratio: out is NULL")) return s;
    return guarded([&] {
        *out = vibrokit::residual_vibration_ratio(to_params(plant),
                                                  vibrokit::design_zvd(to_params(design)));
    });
}

vbk_status vbk_eval_shaper(vbk_params design, vbk_params plant, double move_mm, double dt_s,
                           double horizon_s, const char* trace_csv, vbk_shaper_eval* out) {
    if (vbk_status s = require(out != nullptr, "vbk_eval_shaper: out is NULL")) return s;
    return guarded([&] {
        const vibrokit::SystemParams plant_p = to_params(plant);
        const vibrokit::ImpulseSequence seq = vibrokit::design_zvd(to_params(design));
        const double dt = dt_s > 0.0 ? dt_s : vibrokit::default_dt(plant_p);
        const double horizon =
            horizon_s > 0.0 ? horizon_s : seq.last_time() + 8.0 * plant_p.damped_period();
        const vibrokit::ShaperEval eval =
            vibrokit::evaluate_sequence_on_plant(seq, plant_p, move_mm, dt, horizon);
        out->mts_mm = eval.mts_mm;
        out->residual_peak_mm = eval.residual_peak_mm;
        if (trace_csv != nullptr) eval.trace.save_csv(trace_csv);
    });
}

vbk_status vbk_eval_unshaped(vbk_params plant, double move_mm, double dt_s, double horizon_s,
                             const char* trace_csv, vbk_shaper_eval* out) {
    if (vbk_status s = require(out != nullptr, "vbk_eval_unshaped: out is NULL")) return s;
    return guarded([&] {
        const vibrokit::SystemParams plant_p = to_params(plant);
        const double dt = dt_s > 0.0 ? dt_s : vibrokit::default_dt(plant_p);
        const double horizon = horizon_s > 0.0 ? horizon_s : 8.0 * plant_p.damped_period();
        const vibrokit::ShaperEval eval = vibrokit::evaluate_sequence_on_plant(
            vibrokit::ImpulseSequence::identity(), plant_p, move_mm, dt, horizon);
        out->mts_mm = eval.mts_mm;
        out->residual_peak_mm = eval.residual_peak_mm;
        if (trace_csv != nullptr) eval.trace.save_csv(trace_csv);
    });
}

void vbk_gen_options_init(vbk_gen_options* opt) {
    if (opt == nullptr) return;
    opt->n = 100;
    opt->truth = vbk_params_from_hz(5.0, 0.1);
    opt->nominal = vbk_params_from_hz(5.0, 0.1);
    opt->obs_bias_omega_rad_s = 0.0;
    opt->obs_bias_zeta = 0.0;
    opt->noise_sigma_mm = 0.1;
    opt->scatter_omega_rel = 0.03;
    opt->scatter_zeta = 0.01;
    opt->move_mm = 100.0;
    opt->seed = 1;
}

vbk_status vbk_dataset_generate(const vbk_gen_options* opt, const char* name, vbk_dataset** out) {
    if (vbk_status s = require(opt != nullptr && out != nullptr,
                               "vbk_dataset_generate: NULL argument")) {
        return s;
    }
    return guarded([&] {
        vibrokit::GenOptions g;
        g.n = opt->n;
        g.truth = to_params(opt->truth);
        g.nominal = to_params(opt->nominal);
        g.obs_bias_omega = opt->obs_bias_omega_rad_s;
        g.obs_bias_zeta = opt->obs_bias_zeta;
        g.noise_sigma_mm = opt->noise_sigma_mm;
        g.scatter_omega_rel = opt->scatter_omega_rel;
        g.scatter_zeta = opt->scatter_zeta;
        g.move_mm = opt->move_mm;
        g.seed = opt->seed;
        g.name = name != nullptr ? name : "synthetic";
        *out = new vbk_dataset{vibrokit::generate_trials(g)};
    });
}

vbk_status vbk_dataset_load_csv(const char* path, vbk_dataset** out) {
    if (vbk_status s = require(path != nullptr && out != nullptr,
                               "vbk_dataset_load_csv: NULL argument")) {
        return s;
    }
    return guarded([&] { *out = new vbk_dataset{vibrokit::Dataset::load_csv(path)}; });
}

vbk_status vbk_dataset_save_csv(const vbk_dataset* data, const char* path) {
    if (vbk_status s = require(data != nullptr && path != nullptr,
                               "vbk_dataset_save_csv: NULL argument")) {
        return s;
    }
    return guarded([&] { data->data.save_csv(path); });
}

size_t vbk_dataset_size(const vbk_dataset* data) {
    return data == nullptr ? 0 : data->data.size();
}

vbk_status vbk_dataset_sample(const vbk_dataset* data, size_t index, double* omega_hz,
                              double* zeta, double* theta_mm) {
    if (vbk_status s = require(data != nullptr, "vbk_dataset_sample: data is NULL")) return s;
    if (vbk_status s = require(index < data->data.size(), "vbk_dataset_sample: index out of range")) {
        return s;
    }
    const vibrokit::VibrationSample& smp = data->data[index];
    if (omega_hz != nullptr) *omega_hz = smp.omega_hz;
    if (zeta != nullptr) *zeta = smp.zeta;
    if (theta_mm != nullptr) *theta_mm = smp.theta_mm;
    return VBK_OK;
}

void vbk_dataset_free(vbk_dataset* data) { delete data; }

vbk_status vbk_config_create(vbk_config** out) {
    if (vbk_status s = require(out != nullptr, "vbk_config_create: out is NULL")) return s;
    return guarded([&] { *out = new vbk_config{vibrokit::PipelineConfig{}}; });
}

vbk_status vbk_config_load(const char* path, vbk_config** out) {
    if (vbk_status s = require(path != nullptr && out != nullptr,
                               "vbk_config_load: NULL argument")) {
        return s;
    }
    return guarded([&] { *out = new vbk_config{vibrokit::PipelineConfig::load(path)}; });
}

vbk_status vbk_config_set(vbk_config* cfg, const char* key, const char* value) {
    if (vbk_status s = require(cfg != nullptr && key != nullptr && value != nullptr,
                               "vbk_config_set: NULL argument")) {
        return s;
    }
    return guarded([&] { cfg->cfg.set(key, value); });
}

void vbk_config_free(vbk_config* cfg) { delete cfg; }

vbk_status vbk_config_nominal(const vbk_config* cfg, vbk_params* out) {
    if (vbk_status s = require(cfg != nullptr && out != nullptr,
                               "vbk_config_nominal: NULL argument")) {
        return s;
    }
    return guarded([&] { *out = from_params(cfg->cfg.nominal()); });
}

vbk_status vbk_config_noise(const vbk_config* cfg, vbk_noise* out) {
    if (vbk_status s = require(cfg != nullptr && out != nullptr,
                               "vbk_config_noise: NULL argument")) {
        return s;
    }
    out->q_omega = cfg->cfg.q_omega;
    out->q_zeta = cfg->cfg.q_zeta;
    out->r_mm2 = cfg->cfg.r_mm2;
    return VBK_OK;
}

vbk_status vbk_config_seed(const vbk_config* cfg, uint64_t* out) {
    if (vbk_status s = require(cfg != nullptr && out != nullptr, "vbk_config_seed: NULL argument")) {
        return s;
    }
    *out = cfg->cfg.seed;
    return VBK_OK;
}

vbk_status vbk_config_move_mm(const vbk_config* cfg, double* out) {
    if (vbk_status s = require(cfg != nullptr && out != nullptr,
                               "vbk_config_move_mm: NULL argument")) {
        return s;
    }
    *out = cfg->cfg.move_mm;
    return VBK_OK;
}

vbk_status vbk_identify(vbk_params initial, const vbk_dataset* data, vbk_noise noise,
                        double kappa_mm, vbk_params* out) {
    if (vbk_status s = require(data != nullptr && out != nullptr,
                               "vbk_identify: NULL argument")) {
        return s;
    }
    return guarded([&] {
        vibrokit::NoiseConfig nc;
        nc.q = Eigen::Vector2d(noise.q_omega, noise.q_zeta).asDiagonal();
        nc.r = noise.r_mm2;
        *out = from_params(
            vibrokit::identify_parameters(to_params(initial), data->data, nc, kappa_mm));
    });
}

vbk_status vbk_identify_with_config(const vbk_config* cfg, const vbk_dataset* data,
                                    vbk_params* out, double* kappa_used) {
    if (vbk_status s = require(cfg != nullptr && data != nullptr && out != nullptr,
                               "vbk_identify_with_config: NULL argument")) {
        return s;
    }
    return guarded([&] {
        cfg->cfg.validate();
        const vibrokit::SystemParams t0 = cfg->cfg.nominal();
        const double kappa = cfg->cfg.kappa_policy == vibrokit::KappaPolicy::kFixed
                                 ? cfg->cfg.kappa_mm
                                 : vibrokit::calibrate_kappa_first_sample(t0, data->data);
        *out = from_params(
            vibrokit::identify_parameters(t0, data->data, cfg->cfg.noise(), kappa));
        if (kappa_used != nullptr) *kappa_used = kappa;
    });
}

void vbk_train_options_init(vbk_train_options* opt) {
    if (opt == nullptr) return;
    const vibrokit::TrainConfig d;
    opt->rho = d.rho;
    opt->max_rounds = d.max_rounds;
    opt->tol = d.tol;
    opt->seed = d.seed;
    opt->penult_width = d.penult_width;
    opt->alpha = d.alpha;
    opt->delta_scale_omega_rel = d.delta_scale_omega_rel;
    opt->delta_scale_zeta = d.delta_scale_zeta;
    opt->normalize_targets = d.normalize_targets ? 1 : 0;
}

vbk_status vbk_config_train_options(const vbk_config* cfg, vbk_train_options* out) {
    if (vbk_status s = require(cfg != nullptr && out != nullptr,
                               "vbk_config_train_options: NULL argument")) {
        return s;
    }
    const vibrokit::TrainConfig tc = cfg->cfg.train_config();
    out->rho = tc.rho;
    out->max_rounds = tc.max_rounds;
    out->tol = tc.tol;
    out->seed = tc.seed;
    out->penult_width = tc.penult_width;
    out->alpha = tc.alpha;
    out->delta_scale_omega_rel = tc.delta_scale_omega_rel;
    out->delta_scale_zeta = tc.delta_scale_zeta;
    out->normalize_targets = tc.normalize_targets ? 1 : 0;
    return VBK_OK;
}

vbk_status vbk_train(const vbk_dataset* data, vbk_params estimate,
                     const vbk_train_options* opt, const char* log_csv, vbk_model** out_model,
                     double delta_out[2]) {
    if (vbk_status s = require(data != nullptr && opt != nullptr && out_model != nullptr,
                               "vbk_train: NULL argument")) {
        return s;
    }
    return guarded([&] {
        vibrokit::TrainConfig tc;
        tc.rho = opt->rho;
        tc.max_rounds = opt->max_rounds;
        tc.tol = opt->tol;
        tc.seed = opt->seed;
        tc.penult_width = opt->penult_width;
        tc.alpha = opt->alpha;
        tc.delta_scale_omega_rel = opt->delta_scale_omega_rel;
        tc.delta_scale_zeta = opt->delta_scale_zeta;
        tc.normalize_targets = opt->normalize_targets != 0;
        vibrokit::TrainResult result =
            vibrokit::train_error_compensator(data->data, to_params(estimate), tc);
        if (log_csv != nullptr) vibrokit::save_training_log(result.log, log_csv);
        if (delta_out != nullptr) {
            delta_out[0] = result.delta[0];
            delta_out[1] = result.delta[1];
        }
        *out_model = new vbk_model{std::move(result.net)};
    });
}

vbk_status vbk_model_save(const vbk_model* model, const char* path) {
    if (vbk_status s = require(model != nullptr && path != nullptr,
                               "vbk_model_save: NULL argument")) {
        return s;
    }
    return guarded([&] { model->net.save_text(path); });
}

vbk_status vbk_model_load(const char* path, vbk_model** out) {
    if (vbk_status s = require(path != nullptr && out != nullptr,
                               "vbk_model_load: NULL argument")) {
        return s;
    }
    return guarded([&] { *out = new vbk_model{vibrokit::ResNet::load_text(path)}; });
}

vbk_status vbk_model_predict(const vbk_model* model, double omega_hz, double zeta,
                             double* theta_mm) {
    if (vbk_status s = require(model != nullptr && theta_mm != nullptr,
                               "vbk_model_predict: NULL argument")) {
        return s;
    }
    return guarded([&] { *theta_mm = model->net.predict_mm(omega_hz, zeta); });
}

void vbk_model_free(vbk_model* model) { delete model; }

vbk_status vbk_run(const vbk_config* cfg, const vbk_dataset* data, const char* out_dir,
                   int repeats, vbk_run_summary* out) {
    if (vbk_status s = require(cfg != nullptr && data != nullptr && out != nullptr,
                               "vbk_run: NULL argument")) {
        return s;
    }
    return guarded([&] {
        const vibrokit::RepeatSummary sum =
            out_dir != nullptr ? vibrokit::run_and_write(cfg->cfg, data->data, out_dir, repeats)
                               : vibrokit::run_repeated(cfg->cfg, data->data, repeats);
        out->repeats = sum.repeats;
        for (std::size_t m = 0; m < vibrokit::kModelCount; ++m) {
            vbk_model_scores& scores = out->models[m];
            std::snprintf(scores.model, sizeof(scores.model), "%s",
                          sum.models[m].model.c_str());
            scores.mts_mean = sum.models[m].mean.mts;
            scores.mts_std = sum.models[m].stddev.mts;
            scores.max_mean = sum.models[m].mean.max_err;
            scores.max_std = sum.models[m].stddev.max_err;
            scores.rmse_mean = sum.models[m].mean.rmse;
            scores.rmse_std = sum.models[m].stddev.rmse;
            scores.mean_mean = sum.models[m].mean.mean_err;
            scores.mean_std = sum.models[m].stddev.mean_err;
            scores.rmse_median = sum.models[m].median_rmse;
        }
        out->ekf_seconds = sum.ekf_seconds;
        out->train_seconds = sum.train_seconds;
        out->total_seconds = sum.total_seconds;
        out->train_rounds = sum.train_rounds;
        out->kappa_mm = sum.kappa_mm;
        out->t_ekf = from_params(sum.t_ekf);
        out->t_r = from_params(sum.t_r);
        out->delta_omega_rad_s = sum.delta[0];
        out->delta_zeta = sum.delta[1];
    });
}

vbk_status vbk_metrics_compute(const double* measured, const double* predicted, size_t n,
                               vbk_metrics* out) {
    if (vbk_status s = require(measured != nullptr && predicted != nullptr && out != nullptr,
                               "vbk_metrics_compute: NULL argument")) {
        return s;
    }
    return guarded([&] {
        const vibrokit::MetricReport r = vibrokit::evaluate({measured, n}, {predicted, n});
        *out = {r.mts, r.max_err, r.rmse, r.mean_err, r.n};
    });
}

vbk_status vbk_metrics_from_csv(const char* predictions_csv, vbk_metrics* out) {
    if (vbk_status s = require(predictions_csv != nullptr && out != nullptr,
                               "vbk_metrics_from_csv: NULL argument")) {
        return s;
    }
    return guarded([&] {
        std::ifstream in(predictions_csv, std::ios::binary);
        if (!in) throw vibrokit::io_error(std::string("cannot open: ") + predictions_csv);
        std::string line;
        if (!std::getline(in, line) ||
            vibrokit::csv::strip_eol(line) != "id,measured_mm,predicted_mm") {
            throw vibrokit::io_error(std::string("unexpected header in ") + predictions_csv);
        }
        std::vector<double> measured;
        std::vector<double> predicted;
        while (std::getline(in, line)) {
            if (vibrokit::csv::strip_eol(line).empty()) continue;
            auto cells = vibrokit::csv::split(line, 3, predictions_csv);
            measured.push_back(vibrokit::csv::parse_double(cells[1], predictions_csv));
            predicted.push_back(vibrokit::csv::parse_double(cells[2], predictions_csv));
        }
        const vibrokit::MetricReport r = vibrokit::evaluate(measured, predicted);
        *out = {r.mts, r.max_err, r.rmse, r.mean_err, r.n};
    });
}

} // extern "C"
