#pragma once

#include <span>
#include <string>

namespace vibrokit {

/// Maximum transient swing: peak absolute displacement.
double max_transient_swing(std::span<const double> z);

struct ErrorMetrics {
    double max_err = 0.0;
    double rmse = 0.0;
    double mean_err = 0.0;
};

/// Pairwise error statistics between measured and predicted series.
/// Plain sequential accumulation; mean_err <= rmse <= max_err always holds.
ErrorMetrics error_metrics(std::span<const double> z, std::span<const double> z_hat);

struct MetricReport {
    double mts = 0.0;
    double max_err = 0.0;
    double rmse = 0.0;
    double mean_err = 0.0;
    std::size_t n = 0;

    /// Column order follows the comparison tables: MAX, RMSE, MEAN.
    static std::string csv_header();
    std::string csv_row(const std::string& label) const;
};

MetricReport evaluate(std::span<const double> z, std::span<const double> z_hat);

} // namespace vibrokit
