// vibrokit command-line front end. Talks to the shared library strictly
// through the C interface in vibrokit/vibrokit.h.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "vibrokit/vibrokit.h"

namespace {

// 0 usage, 2 data/validation, 3 numerical.
int exit_code_for(vbk_status status) {
    switch (status) {
    case VBK_OK:
        return 0;
    case VBK_ERR_INVALID_ARGUMENT:
    case VBK_ERR_IO:
        return 2;
    case VBK_ERR_NUMERICAL:
    case VBK_ERR_INTERNAL:
    default:
        return 3;
    }
}

int fail(vbk_status status) {
    std::fprintf(stderr, "error: %s\n", vbk_last_error());
    return exit_code_for(status);
}

#define CHECK_VBK(call)                                                                          \
    do {                                                                                         \
        vbk_status status_ = (call);                                                             \
        if (status_ != VBK_OK) return fail(status_);                                             \
    } while (0)

struct ConfigGuard {
    vbk_config* cfg = nullptr;
    ~ConfigGuard() { vbk_config_free(cfg); }
};

struct DatasetGuard {
    vbk_dataset* data = nullptr;
    ~DatasetGuard() { vbk_dataset_free(data); }
};

struct ModelGuard {
    vbk_model* model = nullptr;
    ~ModelGuard() { vbk_model_free(model); }
};

// Loads --config when given, defaults otherwise; --seed wins over the file.
int load_config(const std::string& path, bool has_seed, std::uint64_t seed, ConfigGuard& guard) {
    vbk_status status =
        path.empty() ? vbk_config_create(&guard.cfg) : vbk_config_load(path.c_str(), &guard.cfg);
    if (status != VBK_OK) return fail(status);
    if (has_seed) {
        CHECK_VBK(vbk_config_set(guard.cfg, "seed", std::to_string(seed).c_str()));
    }
    return -1; // keep going
}

void print_params(const char* label, vbk_params p) {
    std::printf("%s: omega = %.6f Hz (%.6f rad/s), zeta = %.6f\n", label, vbk_params_omega_hz(p),
                p.omega_rad_s, p.zeta);
}

std::string join(const std::string& dir, const char* name) {
    if (dir.empty()) return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vibrokit - input-shaping vibration control toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string data_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int repeats = 1;

    app.add_option("--config", config_path, "pipeline config file (key = value lines)");
    app.add_option("--data", data_path, "dataset / input CSV path");
    app.add_option("--seed", seed, "seed override")->each([&has_seed](const std::string&) {
        has_seed = true;
    });
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--repeats", repeats, "seeded repetitions for `run`")->check(CLI::PositiveNumber);

    // gen ------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a synthetic trial dataset");
    int gen_n = 100;
    double truth_hz = 5.0, truth_zeta = 0.1;
    double nominal_hz = 5.0, nominal_zeta = 0.1;
    double bias_hz = 0.0, bias_zeta = 0.0;
    double noise_mm = 0.1, scatter_rel = 0.03, scatter_zeta = 0.01, gen_move = 100.0;
    std::string gen_name = "synthetic";
    gen->add_option("--n", gen_n, "number of trials");
    gen->add_option("--truth-hz", truth_hz, "actual natural frequency, Hz");
    gen->add_option("--truth-zeta", truth_zeta, "actual damping ratio");
    gen->add_option("--nominal-hz", nominal_hz, "believed natural frequency, Hz");
    gen->add_option("--nominal-zeta", nominal_zeta, "believed damping ratio");
    gen->add_option("--bias-hz", bias_hz, "systematic observation bias, Hz");
    gen->add_option("--bias-zeta", bias_zeta, "systematic observation bias on zeta");
    gen->add_option("--noise-mm", noise_mm, "measurement noise sigma, mm");
    gen->add_option("--scatter-omega-rel", scatter_rel, "relative per-trial frequency scatter");
    gen->add_option("--scatter-zeta", scatter_zeta, "per-trial damping scatter");
    gen->add_option("--move-mm", gen_move, "step move amplitude, mm");
    gen->add_option("--name", gen_name, "dataset name");

    // design ----------------------------------------------------------
    auto* design = app.add_subcommand("design", "print the ZVD shaper for given parameters");
    double d_hz = 5.0, d_zeta = 0.1;
    design->add_option("--omega-hz", d_hz, "natural frequency, Hz")->required();
    design->add_option("--zeta", d_zeta, "damping ratio")->required();

    // simulate ---------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "simulate a shaped (or raw) step move");
    double s_hz = 5.0, s_zeta = 0.1;
    double s_design_hz = 0.0, s_design_zeta = -1.0;
    double s_move = 100.0, s_dt = 0.0, s_horizon = 0.0;
    bool s_unshaped = false;
    simulate->add_option("--omega-hz", s_hz, "plant natural frequency, Hz")->required();
    simulate->add_option("--zeta", s_zeta, "plant damping ratio")->required();
    simulate->add_option("--design-hz", s_design_hz, "shaper design frequency, Hz (default: plant)");
    simulate->add_option("--design-zeta", s_design_zeta, "shaper design damping (default: plant)");
    simulate->add_option("--move-mm", s_move, "step amplitude, mm");
    simulate->add_option("--dt", s_dt, "sample interval, s (0 = damped period / 200)");
    simulate->add_option("--horizon", s_horizon, "trace length, s (0 = auto)");
    simulate->add_flag("--unshaped", s_unshaped, "skip the shaper");

    // identify / train / run / eval -------------------------------------
    auto* identify = app.add_subcommand("identify", "filter-stage parameter identification");
    auto* train = app.add_subcommand("train", "network-stage compensator training");
    double t_est_hz = 0.0, t_est_zeta = -1.0;
    train->add_option("--omega-hz", t_est_hz, "parameter estimate, Hz (default: config nominal)");
    train->add_option("--zeta", t_est_zeta, "parameter estimate zeta (default: config nominal)");
    auto* run = app.add_subcommand("run", "full pipeline with baseline comparison");
    auto* eval = app.add_subcommand("eval", "metrics over a saved predictions CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (gen->parsed()) {
        if (data_path.empty()) {
            std::fprintf(stderr, "error: gen requires --data (output CSV path)\n");
            return 1;
        }
        vbk_gen_options opt;
        vbk_gen_options_init(&opt);
        opt.n = gen_n;
        opt.truth = vbk_params_from_hz(truth_hz, truth_zeta);
        opt.nominal = vbk_params_from_hz(nominal_hz, nominal_zeta);
        opt.obs_bias_omega_rad_s = vbk_params_from_hz(bias_hz, 0.0).omega_rad_s;
        opt.obs_bias_zeta = bias_zeta;
        opt.noise_sigma_mm = noise_mm;
        opt.scatter_omega_rel = scatter_rel;
        opt.scatter_zeta = scatter_zeta;
        opt.move_mm = gen_move;
        opt.seed = has_seed ? seed : 1;
        DatasetGuard ds;
        CHECK_VBK(vbk_dataset_generate(&opt, gen_name.c_str(), &ds.data));
        CHECK_VBK(vbk_dataset_save_csv(ds.data, data_path.c_str()));
        std::printf("wrote %zu samples to %s\n", vbk_dataset_size(ds.data), data_path.c_str());
        return 0;
    }

    if (design->parsed()) {
        const vbk_params p = vbk_params_from_hz(d_hz, d_zeta);
        vbk_zvd z;
        CHECK_VBK(vbk_zvd_design(p, &z));
        std::printf("ZVD for omega = %.6f Hz, zeta = %.6f\n", d_hz, d_zeta);
        std::printf("%-4s %-12s %-12s\n", "i", "A", "t_s");
        for (int i = 0; i < 3; ++i) {
            std::printf("%-4d %-12.8f %-12.8f\n", i + 1, z.amplitude[i], z.time_s[i]);
        }
        if (!out_dir.empty()) {
            const std::string path = join(out_dir, "shaper.csv");
            CHECK_VBK(vbk_zvd_save_csv(p, path.c_str()));
            std::printf("wrote %s\n", path.c_str());
        }
        return 0;
    }

    if (simulate->parsed()) {
        const vbk_params plant = vbk_params_from_hz(s_hz, s_zeta);
        const vbk_params design_p = s_design_zeta >= 0.0
                                        ? vbk_params_from_hz(s_design_hz, s_design_zeta)
                                        : plant;
        const std::string trace =
            out_dir.empty() ? std::string() : join(out_dir, s_unshaped ? "trace_unshaped.csv"
                                                                       : "trace_shaped.csv");
        vbk_shaper_eval ev;
        if (s_unshaped) {
            CHECK_VBK(vbk_eval_unshaped(plant, s_move, s_dt, s_horizon,
                                        trace.empty() ? nullptr : trace.c_str(), &ev));
        } else {
            CHECK_VBK(vbk_eval_shaper(design_p, plant, s_move, s_dt, s_horizon,
                                      trace.empty() ? nullptr : trace.c_str(), &ev));
        }
        std::printf("mts: %.6f mm\nresidual peak: %.9f mm\n", ev.mts_mm, ev.residual_peak_mm);
        if (!trace.empty()) std::printf("wrote %s\n", trace.c_str());
        return 0;
    }

    // Remaining subcommands need a dataset and a config.
    if (data_path.empty()) {
        std::fprintf(stderr, "error: --data is required\n");
        return 1;
    }

    ConfigGuard cfg;
    if (int rc = load_config(config_path, has_seed, seed, cfg); rc >= 0) return rc;

    if (eval->parsed()) {
        vbk_metrics m;
        CHECK_VBK(vbk_metrics_from_csv(data_path.c_str(), &m));
        std::printf("%-10s %-12s %-12s %-12s %-8s\n", "MTS/mm", "MAX/mm", "RMSE/mm", "MEAN/mm",
                    "n");
        std::printf("%-10.6f %-12.6f %-12.6f %-12.6f %-8zu\n", m.mts_mm, m.max_mm, m.rmse_mm,
                    m.mean_mm, m.n);
        return 0;
    }

    DatasetGuard ds;
    CHECK_VBK(vbk_dataset_load_csv(data_path.c_str(), &ds.data));

    if (identify->parsed()) {
        vbk_params est;
        double kappa = 0.0;
        CHECK_VBK(vbk_identify_with_config(cfg.cfg, ds.data, &est, &kappa));
        print_params("identified", est);
        std::printf("kappa: %.6f mm\n", kappa);
        if (!out_dir.empty()) {
            const std::string path = join(out_dir, "shaper_identified.csv");
            CHECK_VBK(vbk_zvd_save_csv(est, path.c_str()));
            std::printf("wrote %s\n", path.c_str());
        }
        return 0;
    }

    if (train->parsed()) {
        vbk_params nominal;
        CHECK_VBK(vbk_config_nominal(cfg.cfg, &nominal));
        const vbk_params estimate =
            t_est_zeta >= 0.0 ? vbk_params_from_hz(t_est_hz, t_est_zeta) : nominal;
        vbk_train_options opt;
        CHECK_VBK(vbk_config_train_options(cfg.cfg, &opt));
        const std::string log_path = out_dir.empty() ? std::string() : join(out_dir, "training_log.csv");
        double delta[2] = {0.0, 0.0};
        ModelGuard model;
        CHECK_VBK(vbk_train(ds.data, estimate, &opt, log_path.empty() ? nullptr : log_path.c_str(),
                            &model.model, delta));
        std::printf("delta: %.6f rad/s, %.6f\n", delta[0], delta[1]);
        if (!out_dir.empty()) {
            const std::string model_path = join(out_dir, "model.txt");
            CHECK_VBK(vbk_model_save(model.model, model_path.c_str()));
            std::printf("wrote %s and %s\n", model_path.c_str(), log_path.c_str());
        }
        return 0;
    }

    if (run->parsed()) {
        vbk_run_summary sum;
        CHECK_VBK(vbk_run(cfg.cfg, ds.data, out_dir.empty() ? nullptr : out_dir.c_str(), repeats,
                          &sum));
        std::printf("test-split comparison over %d repetition(s)\n\n", sum.repeats);
        std::printf("%-12s %17s %17s %17s %12s\n", "model", "MAX/mm", "RMSE/mm", "MEAN/mm",
                    "RMSE median");
        for (int m = 0; m < VBK_RUN_MODELS; ++m) {
            const vbk_model_scores& s = sum.models[m];
            char max_cell[40], rmse_cell[40], mean_cell[40];
            std::snprintf(max_cell, sizeof(max_cell), "%.4f±%.4f", s.max_mean, s.max_std);
            std::snprintf(rmse_cell, sizeof(rmse_cell), "%.4f±%.4f", s.rmse_mean, s.rmse_std);
            std::snprintf(mean_cell, sizeof(mean_cell), "%.4f±%.4f", s.mean_mean, s.mean_std);
            std::printf("%-12s %17s %17s %17s %12.4f\n", s.model, max_cell, rmse_cell, mean_cell,
                        s.rmse_median);
        }
        std::printf("\n");
        print_params("ekf estimate", sum.t_ekf);
        print_params("corrected", sum.t_r);
        std::printf("delta: %.6f rad/s, %.6f\n", sum.delta_omega_rad_s, sum.delta_zeta);
        std::printf("kappa: %.6f mm, compensator rounds: %d\n", sum.kappa_mm, sum.train_rounds);
        std::printf("stage seconds: identify %.4f + train %.4f = %.4f\n", sum.ekf_seconds,
                    sum.train_seconds, sum.total_seconds);
        if (!out_dir.empty()) std::printf("outputs in %s\n", out_dir.c_str());
        return 0;
    }

    std::fprintf(stderr, "error: no subcommand\n");
    return 1;
}
