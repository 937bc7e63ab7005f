#include "core/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "core/csv.hpp"

namespace vibrokit {

double max_transient_swing(std::span<const double> z) {
    if (z.empty()) throw std::invalid_argument("max_transient_swing: empty input");
    double peak = 0.0;
    for (double v : z) {
        const double a = std::abs(v);
        if (a > peak) peak = a;
    }
    return peak;
}

ErrorMetrics error_metrics(std::span<const double> z, std::span<const double> z_hat) {
    if (z.empty()) throw std::invalid_argument("error_metrics: empty input");
    if (z.size() != z_hat.size()) {
        throw std::invalid_argument("error_metrics: length mismatch");
    }
    ErrorMetrics m;
    double sum_sq = 0.0;
    double sum_abs = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double e = z[i] - z_hat[i];
        const double a = std::abs(e);
        if (a > m.max_err) m.max_err = a;
        sum_sq += e * e;
        sum_abs += a;
    }
    const auto n = static_cast<double>(z.size());
    m.rmse = std::sqrt(sum_sq / n);
    m.mean_err = sum_abs / n;
    return m;
}

MetricReport evaluate(std::span<const double> z, std::span<const double> z_hat) {
    MetricReport r;
    const ErrorMetrics m = error_metrics(z, z_hat);
    r.mts = max_transient_swing(z);
    r.max_err = m.max_err;
    r.rmse = m.rmse;
    r.mean_err = m.mean_err;
    r.n = z.size();
    return r;
}

std::string MetricReport::csv_header() {
    return "model,mts_mm,max_mm,rmse_mm,mean_mm,n";
}

std::string MetricReport::csv_row(const std::string& label) const {
    return label + ',' + csv::format(mts) + ',' + csv::format(max_err) + ',' +
           csv::format(rmse) + ',' + csv::format(mean_err) + ',' + std::to_string(n);
}

} // namespace vibrokit
