#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "core/csv.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"

using namespace vibrokit;

TEST_CASE("max_transient_swing") {
    CHECK(max_transient_swing(std::vector<double>{2.0, -3.5, 1.0}) == 3.5);
    CHECK(max_transient_swing(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(max_transient_swing(std::vector<double>{}), std::invalid_argument);

    Rng rng(7);
    std::vector<double> z(257);
    for (double& v : z) v = rng.uniform(-50.0, 50.0);
    double brute = 0.0;
    for (double v : z) brute = std::max(brute, std::abs(v));
    CHECK(max_transient_swing(z) == brute);
}

TEST_CASE("error_metrics: hand-computed case") {
    const std::vector<double> z{1.0, 2.0, 3.0};
    const std::vector<double> zh{1.3, 2.0, 2.6};
    const ErrorMetrics m = error_metrics(z, zh);
    CHECK(m.max_err == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(m.rmse == doctest::Approx(std::sqrt(0.25 / 3.0)).epsilon(1e-15));
    CHECK(m.mean_err == doctest::Approx(0.7 / 3.0).epsilon(1e-15));

    const ErrorMetrics zero = error_metrics(z, z);
    CHECK(zero.max_err == 0.0);
    CHECK(zero.rmse == 0.0);
    CHECK(zero.mean_err == 0.0);

    CHECK_THROWS_AS(error_metrics(z, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(error_metrics(std::vector<double>{}, std::vector<double>{}),
                    std::invalid_argument);
}

TEST_CASE("error_metrics: bitwise match with a same-order brute force") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.index(64);
        std::vector<double> z(n), zh(n);
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = rng.uniform(-10.0, 10.0);
            zh[i] = rng.uniform(-10.0, 10.0);
        }
        double max_err = 0.0, sum_sq = 0.0, sum_abs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = z[i] - zh[i];
            const double a = std::abs(e);
            if (a > max_err) max_err = a;
            sum_sq += e * e;
            sum_abs += a;
        }
        const ErrorMetrics m = error_metrics(z, zh);
        CHECK(m.max_err == max_err);
        CHECK(m.rmse == std::sqrt(sum_sq / static_cast<double>(n)));
        CHECK(m.mean_err == sum_abs / static_cast<double>(n));
        // power-mean chain
        CHECK(m.mean_err <= m.rmse + 1e-300);
        CHECK(m.rmse <= m.max_err * (1.0 + 1e-15));
    }
}

TEST_CASE("metrics: scaling, translation, permutation behaviour") {
    Rng rng(23);
    std::vector<double> z(40), zh(40);
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = rng.uniform(-5.0, 5.0);
        zh[i] = rng.uniform(-5.0, 5.0);
    }
    const ErrorMetrics base = error_metrics(z, zh);

    const double lambda = -2.5;
    std::vector<double> zs = z, zhs = zh;
    for (std::size_t i = 0; i < z.size(); ++i) {
        zs[i] *= lambda;
        zhs[i] *= lambda;
    }
    const ErrorMetrics scaled = error_metrics(zs, zhs);
    CHECK(scaled.max_err == doctest::Approx(std::abs(lambda) * base.max_err).epsilon(1e-12));
    CHECK(scaled.rmse == doctest::Approx(std::abs(lambda) * base.rmse).epsilon(1e-12));
    CHECK(scaled.mean_err == doctest::Approx(std::abs(lambda) * base.mean_err).epsilon(1e-12));

    const double shift = 17.0;
    std::vector<double> zt = z, zht = zh;
    for (std::size_t i = 0; i < z.size(); ++i) {
        zt[i] += shift;
        zht[i] += shift;
    }
    const ErrorMetrics shifted = error_metrics(zt, zht);
    CHECK(shifted.max_err == doctest::Approx(base.max_err).epsilon(1e-12));
    CHECK(shifted.rmse == doctest::Approx(base.rmse).epsilon(1e-9));
    CHECK(shifted.mean_err == doctest::Approx(base.mean_err).epsilon(1e-12));
    // the transient swing is not translation invariant
    CHECK(max_transient_swing(zt) != max_transient_swing(z));

    // permuting paired samples leaves everything unchanged
    std::vector<std::size_t> order(z.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffler(5);
    shuffle(order, shuffler);
    std::vector<double> zp(z.size()), zhp(z.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        zp[i] = z[order[i]];
        zhp[i] = zh[order[i]];
    }
    const ErrorMetrics perm = error_metrics(zp, zhp);
    CHECK(perm.max_err == base.max_err);
    CHECK(perm.rmse == doctest::Approx(base.rmse).epsilon(1e-13));
    CHECK(perm.mean_err == doctest::Approx(base.mean_err).epsilon(1e-13));
}

TEST_CASE("MetricReport rendering") {
    const std::vector<double> z{1.0, -2.0};
    const std::vector<double> zh{1.5, -2.25};
    const MetricReport r = evaluate(z, zh);
    CHECK(r.mts == 2.0);
    CHECK(r.n == 2);
    CHECK(MetricReport::csv_header() == "model,mts_mm,max_mm,rmse_mm,mean_mm,n");
    const std::string expected = "demo,2,0.5," + csv::format(std::sqrt(0.15625)) + ",0.375,2";
    CHECK(r.csv_row("demo") == expected);
}
