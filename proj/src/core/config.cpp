#include "core/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace vibrokit {

NoiseConfig PipelineConfig::noise() const {
    NoiseConfig n;
    n.q = Eigen::Vector2d(q_omega, q_zeta).asDiagonal();
    n.r = r_mm2;
    return n;
}

TrainConfig PipelineConfig::train_config() const {
    TrainConfig t;
    t.rho = rho;
    t.max_rounds = max_rounds;
    t.tol = tol;
    t.seed = seed;
    t.penult_width = penult_width;
    t.alpha = alpha;
    t.delta_scale_omega_rel = delta_scale_omega_rel;
    t.delta_scale_zeta = delta_scale_zeta;
    t.normalize_targets = normalize_targets;
    return t;
}

double PipelineConfig::trace_dt() const {
    return dt > 0.0 ? dt : default_dt(nominal());
}

void PipelineConfig::validate() const {
    nominal(); // throws on invalid parameters
    if (!(split > 0.0 && split < 1.0)) {
        throw std::invalid_argument("config: split must lie in (0, 1)");
    }
    if (dt < 0.0 || !std::isfinite(dt)) throw std::invalid_argument("config: dt must be >= 0");
    if (kappa_policy == KappaPolicy::kFixed && !(kappa_mm > 0.0)) {
        throw std::invalid_argument("config: fixed kappa_mm must be positive");
    }
    if (!(move_mm >= 0.0)) throw std::invalid_argument("config: move_mm must be >= 0");
    noise().validate();
    train_config().validate();
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
    auto num = [&value, &key]() { return csv::parse_double(value, "config key " + key); };
    auto integer = [&value, &key]() { return csv::parse_long(value, "config key " + key); };

    if (key == "nominal_omega_hz") nominal_omega_hz = num();
    else if (key == "nominal_zeta") nominal_zeta = num();
    else if (key == "split") split = num();
    else if (key == "dt") dt = num();
    else if (key == "seed") seed = static_cast<std::uint64_t>(integer());
    else if (key == "kappa_policy") {
        if (value == "auto") kappa_policy = KappaPolicy::kAuto;
        else if (value == "fixed") kappa_policy = KappaPolicy::kFixed;
        else throw std::invalid_argument("config: kappa_policy must be auto or fixed");
    } else if (key == "kappa_mm") kappa_mm = num();
    else if (key == "q_omega") q_omega = num();
    else if (key == "q_zeta") q_zeta = num();
    else if (key == "r_mm2") r_mm2 = num();
    else if (key == "rho") rho = num();
    else if (key == "max_rounds") max_rounds = static_cast<int>(integer());
    else if (key == "tol") tol = num();
    else if (key == "penult_width") penult_width = static_cast<int>(integer());
    else if (key == "alpha") alpha = num();
    else if (key == "delta_scale_omega_rel") delta_scale_omega_rel = num();
    else if (key == "delta_scale_zeta") delta_scale_zeta = num();
    else if (key == "normalize_targets") normalize_targets = integer() != 0;
    else if (key == "delta_policy") {
        if (value == "fixed") delta_policy = DeltaPolicy::kFixed;
        else if (value == "calibrated") delta_policy = DeltaPolicy::kCalibrated;
        else throw std::invalid_argument("config: delta_policy must be fixed or calibrated");
    } else if (key == "move_mm") move_mm = num();
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config: " + path);
    PipelineConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw io_error(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            cfg.set(key, value);
        } catch (const std::invalid_argument& e) {
            throw io_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

} // namespace vibrokit
