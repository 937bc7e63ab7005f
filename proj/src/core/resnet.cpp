#include "core/resnet.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace vibrokit {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
    return x.unaryExpr([](double v) { return sigmoid(v); });
}

void check_pair(std::span<const double> a, std::span<const double> b, const char* who) {
    if (a.size() != b.size()) throw std::invalid_argument(std::string(who) + ": length mismatch");
    if (a.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
}

} // namespace

Bounds Bounds::of(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("Bounds::of: empty input");
    double lo = xs[0];
    double hi = xs[0];
    for (double x : xs) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (hi - lo <= 0.0) {
        lo -= 0.5;
        hi += 0.5;
    }
    return {lo, hi};
}

double half_squared_error(std::span<const double> predicted, std::span<const double> measured) {
    check_pair(predicted, measured, "half_squared_error");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double e = measured[i] - predicted[i];
        sum += e * e;
    }
    return 0.5 * sum;
}

double absolute_error_sum(std::span<const double> predicted, std::span<const double> measured) {
    check_pair(predicted, measured, "absolute_error_sum");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        sum += std::abs(measured[i] - predicted[i]);
    }
    return sum;
}

ResNet::ResNet(int penult_width, double alpha, std::uint64_t seed) {
    if (penult_width < 2) throw std::invalid_argument("ResNet: penultimate width must be >= 2");
    if (!std::isfinite(alpha)) throw std::invalid_argument("ResNet: alpha must be finite");
    alpha_ = alpha;

    Rng rng(seed);
    auto fill = [&rng](Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-0.5, 0.5);
        }
    };

    for (int i = 0; i < kStack; ++i) {
        const int in = i == 0 ? 2 : kWidth;
        w_[i].resize(kWidth, in);
        fill(w_[i]);
        b_[i] = Eigen::VectorXd::Zero(kWidth);
    }
    w_penult_.resize(penult_width, kWidth);
    fill(w_penult_);
    b_penult_ = Eigen::VectorXd::Zero(penult_width);
    w_out_.resize(penult_width);
    for (Eigen::Index c = 0; c < w_out_.size(); ++c) w_out_[c] = rng.uniform(-0.5, 0.5);
    b_out_ = 0.0;
}

ResNet ResNet::zeros(int penult_width, double alpha) {
    ResNet net(penult_width, alpha, 0);
    for (int i = 0; i < kStack; ++i) net.w_[i].setZero();
    net.w_penult_.setZero();
    net.w_out_.setZero();
    return net;
}

ResNet::Cache ResNet::forward(const Eigen::Vector2d& x) const {
    Cache c;
    c.x = x;
    Eigen::VectorXd h = x;
    for (int i = 0; i < kStack; ++i) {
        c.pre[i] = w_[i] * h + b_[i];
        if (i == 3) c.pre[i] += c.post[1]; // skip: layer-2 output into layer 4
        if (i == 6) c.pre[i] += c.post[4]; // skip: layer-5 output into layer 7
        c.post[i] = sigmoid(c.pre[i]);
        h = c.post[i];
    }
    c.penult = w_penult_ * c.post[kStack - 1] + b_penult_;
    c.y_in = w_out_.dot(c.penult) + b_out_;
    c.y_out = alpha_ * c.y_in;
    return c;
}

ResNet::Gradients ResNet::backward(const Cache& cache, double target) const {
    Gradients g;

    const double d_y_out = cache.y_out - target;
    const double d_y_in = alpha_ * d_y_out;
    g.dw_out = d_y_in * cache.penult.transpose();
    g.db_out = d_y_in;

    const Eigen::VectorXd d_penult = w_out_.transpose() * d_y_in;
    g.dw_penult = d_penult * cache.post[kStack - 1].transpose();
    g.db_penult = d_penult;

    std::array<Eigen::VectorXd, kStack> d_post;
    for (int i = 0; i < kStack; ++i) d_post[i] = Eigen::VectorXd::Zero(kWidth);
    d_post[kStack - 1] = w_penult_.transpose() * d_penult;

    for (int i = kStack - 1; i >= 0; --i) {
        const Eigen::VectorXd local = cache.post[i].cwiseProduct(
            (Eigen::VectorXd::Ones(kWidth) - cache.post[i]).eval()); // sigmoid' = h (1 - h)
        const Eigen::VectorXd d_pre = d_post[i].cwiseProduct(local);
        if (i == 0) {
            g.dw[i] = d_pre * cache.x.transpose();
        } else {
            g.dw[i] = d_pre * cache.post[i - 1].transpose();
            d_post[i - 1] += w_[i].transpose() * d_pre;
        }
        g.db[i] = d_pre;
        if (i == 3) d_post[1] += d_pre; // second route through the first skip
        if (i == 6) d_post[4] += d_pre; // second route through the second skip
    }
    return g;
}

void ResNet::apply(const Gradients& g, double rho) {
    for (int i = 0; i < kStack; ++i) {
        w_[i] -= rho * g.dw[i];
        b_[i] -= rho * g.db[i];
    }
    w_penult_ -= rho * g.dw_penult;
    b_penult_ -= rho * g.db_penult;
    w_out_ -= rho * g.dw_out;
    b_out_ -= rho * g.db_out;
}

double ResNet::predict_mm(double omega_hz, double zeta) const {
    const Eigen::Vector2d x(norm.omega_hz.to_unit(omega_hz), norm.zeta.to_unit(zeta));
    return norm.theta_mm.from_unit(output(x));
}

std::vector<double*> ResNet::parameter_view() {
    std::vector<double*> view;
    auto add_matrix = [&view](Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) view.push_back(&m(r, c));
        }
    };
    for (int i = 0; i < kStack; ++i) {
        add_matrix(w_[i]);
        for (Eigen::Index r = 0; r < b_[i].size(); ++r) view.push_back(&b_[i][r]);
    }
    add_matrix(w_penult_);
    for (Eigen::Index r = 0; r < b_penult_.size(); ++r) view.push_back(&b_penult_[r]);
    for (Eigen::Index c = 0; c < w_out_.size(); ++c) view.push_back(&w_out_[c]);
    view.push_back(&b_out_);
    return view;
}

bool ResNet::equal_parameters(const ResNet& other) const {
    for (int i = 0; i < kStack; ++i) {
        if (w_[i] != other.w_[i] || b_[i] != other.b_[i]) return false;
    }
    return w_penult_ == other.w_penult_ && b_penult_ == other.b_penult_ &&
           w_out_ == other.w_out_ && b_out_ == other.b_out_ && alpha_ == other.alpha_;
}

namespace {

void write_matrix(std::ostream& out, const char* tag, const Eigen::MatrixXd& m) {
    out << tag << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << csv::format(m(r, c));
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix(std::istream& in, const char* tag, const std::string& path) {
    std::string got;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    if (!(in >> got >> rows >> cols) || got != tag || rows <= 0 || cols <= 0) {
        throw io_error("bad '" + std::string(tag) + "' block in " + path);
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!(in >> m(r, c))) throw io_error("truncated matrix in " + path);
        }
    }
    return m;
}

} // namespace

void ResNet::save_text(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "vibrokit-resnet 1\n";
    out << "dims 2";
    for (int i = 0; i < kStack; ++i) out << ' ' << kWidth;
    out << ' ' << penult_width() << " 1\n";
    out << "alpha " << csv::format(alpha_) << '\n';
    out << "norm_omega_hz " << csv::format(norm.omega_hz.lo) << ' ' << csv::format(norm.omega_hz.hi) << '\n';
    out << "norm_zeta " << csv::format(norm.zeta.lo) << ' ' << csv::format(norm.zeta.hi) << '\n';
    out << "norm_theta_mm " << csv::format(norm.theta_mm.lo) << ' ' << csv::format(norm.theta_mm.hi) << '\n';
    for (int i = 0; i < kStack; ++i) {
        write_matrix(out, "w", w_[i]);
        write_matrix(out, "b", b_[i]);
    }
    write_matrix(out, "w", w_penult_);
    write_matrix(out, "b", b_penult_);
    write_matrix(out, "w", w_out_);
    out << "b_out " << csv::format(b_out_) << '\n';
    if (!out) throw io_error("write failed: " + path);
}

ResNet ResNet::load_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "vibrokit-resnet" || version != 1) {
        throw io_error("not a vibrokit-resnet file: " + path);
    }
    std::string tag;
    if (!(in >> tag) || tag != "dims") throw io_error("missing dims in " + path);
    std::vector<int> dims;
    for (int i = 0; i < kStack + 3; ++i) {
        int d = 0;
        if (!(in >> d)) throw io_error("truncated dims in " + path);
        dims.push_back(d);
    }
    if (dims.front() != 2 || dims.back() != 1) throw io_error("unsupported dims in " + path);
    for (int i = 1; i <= kStack; ++i) {
        if (dims[i] != kWidth) throw io_error("unsupported dims in " + path);
    }
    const int penult = dims[kStack + 1];
    if (penult < 2) throw io_error("unsupported penultimate width in " + path);

    ResNet net = ResNet::zeros(penult, 1.0);
    auto read_scalar_line = [&in, &path](const char* want) {
        std::string got;
        double v = 0.0;
        if (!(in >> got >> v) || got != want) throw io_error("bad '" + std::string(want) + "' in " + path);
        return v;
    };
    net.alpha_ = read_scalar_line("alpha");
    auto read_bounds = [&in, &path](const char* want) {
        std::string got;
        Bounds b;
        if (!(in >> got >> b.lo >> b.hi) || got != want) {
            throw io_error("bad '" + std::string(want) + "' in " + path);
        }
        return b;
    };
    net.norm.omega_hz = read_bounds("norm_omega_hz");
    net.norm.zeta = read_bounds("norm_zeta");
    net.norm.theta_mm = read_bounds("norm_theta_mm");
    for (int i = 0; i < kStack; ++i) {
        net.w_[i] = read_matrix(in, "w", path);
        net.b_[i] = read_matrix(in, "b", path);
        if (net.w_[i].rows() != kWidth || net.b_[i].rows() != kWidth) {
            throw io_error("layer shape mismatch in " + path);
        }
    }
    net.w_penult_ = read_matrix(in, "w", path);
    net.b_penult_ = read_matrix(in, "b", path);
    Eigen::MatrixXd out_row = read_matrix(in, "w", path);
    if (out_row.rows() != 1 || out_row.cols() != penult || net.w_penult_.rows() != penult) {
        throw io_error("output shape mismatch in " + path);
    }
    net.w_out_ = out_row.row(0);
    net.b_out_ = read_scalar_line("b_out");
    return net;
}

void TrainConfig::validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("TrainConfig: rho must be positive");
    if (max_rounds < 1) throw std::invalid_argument("TrainConfig: max_rounds must be >= 1");
    if (!(tol >= 0.0)) throw std::invalid_argument("TrainConfig: tol must be >= 0");
    if (penult_width < 2) throw std::invalid_argument("TrainConfig: penult_width must be >= 2");
    if (!std::isfinite(delta_scale_omega_rel) || !std::isfinite(delta_scale_zeta)) {
        throw std::invalid_argument("TrainConfig: delta scales must be finite");
    }
}

Eigen::Vector2d correction_at(const ResNet& net, const SystemParams& t_estimate,
                              double scale_omega_rel, double scale_zeta) {
    const Eigen::Vector2d x(net.norm.omega_hz.to_unit(t_estimate.omega_hz()),
                            net.norm.zeta.to_unit(t_estimate.zeta()));
    const Eigen::VectorXd penult = net.penultimate(x);
    return {scale_omega_rel * t_estimate.omega_n() * penult[0], scale_zeta * penult[1]};
}

TrainResult train_error_compensator(const Dataset& train, const SystemParams& t_estimate,
                                    const TrainConfig& cfg) {
    cfg.validate();

    const std::size_t n = train.size();
    std::vector<double> omegas(n);
    std::vector<double> zetas(n);
    std::vector<double> thetas(n);
    for (std::size_t i = 0; i < n; ++i) {
        omegas[i] = train[i].omega_hz;
        zetas[i] = train[i].zeta;
        thetas[i] = train[i].theta_mm;
    }

    ResNet net(cfg.penult_width, cfg.alpha, cfg.seed);
    net.norm.omega_hz = Bounds::of(omegas);
    net.norm.zeta = Bounds::of(zetas);
    net.norm.theta_mm = cfg.normalize_targets ? Bounds::of(thetas) : Bounds{0.0, 1.0};

    std::vector<Eigen::Vector2d> xs(n);
    std::vector<double> targets(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = Eigen::Vector2d(net.norm.omega_hz.to_unit(omegas[i]), net.norm.zeta.to_unit(zetas[i]));
        targets[i] = net.norm.theta_mm.to_unit(thetas[i]);
    }

    auto objective = [&](const ResNet& m, RoundLog& row) {
        std::vector<double> preds(n);
        for (std::size_t i = 0; i < n; ++i) preds[i] = m.output(xs[i]);
        row.upsilon = absolute_error_sum(preds, targets);
        row.loss = half_squared_error(preds, targets);
        if (!std::isfinite(row.upsilon) || !std::isfinite(row.loss)) {
            throw numerical_error("training diverged: non-finite objective");
        }
    };

    TrainResult result{std::move(net), Eigen::Vector2d::Zero(), {}, 0};
    RoundLog row{0, 0.0, 0.0};
    objective(result.net, row);
    result.log.push_back(row);

    for (int round = 1; round <= cfg.max_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const ResNet::Cache cache = result.net.forward(xs[i]);
            result.net.apply(result.net.backward(cache, targets[i]), cfg.rho);
        }
        RoundLog cur{round, 0.0, 0.0};
        objective(result.net, cur);
        result.log.push_back(cur);
        result.rounds = round;
        const double decrease = result.log[result.log.size() - 2].upsilon - cur.upsilon;
        if (std::abs(decrease) < cfg.tol) break;
    }

    result.delta =
        correction_at(result.net, t_estimate, cfg.delta_scale_omega_rel, cfg.delta_scale_zeta);
    return result;
}

void save_training_log(const std::vector<RoundLog>& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "round,upsilon,E\n";
    for (const RoundLog& row : log) {
        out << row.round << ',' << csv::format(row.upsilon) << ',' << csv::format(row.loss) << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

} // namespace vibrokit
