#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "gevdim/dimension.hpp"
#include "gevdim/maps.hpp"

using namespace gevdim;

namespace {

// A parameter series following an exact power law param = pref * n^expo at
// the given series length.
ParamSeries power_series(ObservableKind kind, double alpha, double expo_mu,
                         double expo_sigma, std::size_t k,
                         const std::vector<std::size_t>& ns) {
    ParamSeries s;
    s.kind = kind;
    s.alpha = alpha;
    s.k = k;
    for (std::size_t n : ns) {
        ParamRow row;
        row.n = n;
        row.fit.params.mu = 2.0 * std::pow(static_cast<double>(n), expo_mu);
        row.fit.params.sigma = 0.7 * std::pow(static_cast<double>(n), expo_sigma);
        row.fit.params.xi = 0.1;
        s.rows.push_back(row);
    }
    return s;
}

}  // namespace

TEST_CASE("linear fit recovers an exact line with zero standard errors") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    const ScalingFit fit = linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(fit.stderr_slope == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(fit.stderr_intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("linear fit matches a hand-checked noisy example") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y = {1.1, 1.9, 3.2, 3.9};
    const ScalingFit fit = linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(0.97).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(0.10000000000000009).epsilon(1e-12));
    CHECK(fit.stderr_slope == doctest::Approx(0.07937253933193773).epsilon(1e-12));
    CHECK(fit.stderr_intercept ==
          doctest::Approx(0.21737065119284163).epsilon(1e-12));
}

TEST_CASE("linear fit input validation") {
    CHECK_THROWS(linear_fit({1.0, 2.0}, {1.0, 2.0}));
    CHECK_THROWS(linear_fit({1.0, 2.0, 3.0}, {1.0, 2.0}));
    CHECK_THROWS(linear_fit({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}));
}

TEST_CASE("scale route inverts the known ternary-set value") {
    const double sigma = 1.5849625007211563;  // 1/delta for the w=1/2 set
    const DimensionEstimate est = delta_from_sigma_g1(sigma);
    CHECK(est.delta == doctest::Approx(0.6309297535714574).epsilon(1e-14));
    CHECK(est.method == DimMethod::SigmaG1);
    CHECK(est.uncertainty == 0.0);
}

TEST_CASE("scale route propagates the ensemble spread") {
    const double mean = 2.0;
    const double stddev = 0.1;
    const DimensionEstimate est = delta_from_sigma_g1(mean, stddev);
    CHECK(est.delta == doctest::Approx(0.5).epsilon(1e-14));
    // d(1/s)/ds = -1/s^2 -> uncertainty = stddev/mean^2
    CHECK(est.uncertainty == doctest::Approx(0.1 / 4.0).epsilon(1e-12));
    CHECK_THROWS_AS(delta_from_sigma_g1(0.0), std::domain_error);
    CHECK_THROWS_AS(delta_from_sigma_g1(-1.0), std::domain_error);
}

TEST_CASE("shape route is sign-blind and alpha-aware") {
    const double xi = 0.3962406251802891;  // 1/(4 * 0.63092975...)
    const DimensionEstimate pos = delta_from_xi(xi, 4.0);
    CHECK(pos.delta == doctest::Approx(0.6309297535714574).epsilon(1e-13));
    CHECK(pos.method == DimMethod::XiG2);
    const DimensionEstimate neg = delta_from_xi(-xi, 4.0, 0.0, ObservableKind::G3);
    CHECK(neg.delta == doctest::Approx(0.6309297535714574).epsilon(1e-13));
    CHECK(neg.method == DimMethod::XiG3);
    CHECK_THROWS_AS(delta_from_xi(0.0, 4.0), std::domain_error);
    CHECK_THROWS_AS(delta_from_xi(0.3, 0.0), std::domain_error);
    // uncertainty: delta = 1/(a|x|) -> ddelta = std/(a x^2)
    const DimensionEstimate u = delta_from_xi(0.5, 4.0, 0.05);
    CHECK(u.uncertainty == doctest::Approx(0.05 / (4.0 * 0.25)).epsilon(1e-12));
}

TEST_CASE("location slope route recovers delta from a logarithmic law") {
    // mu = (1/delta) ln(k/n) = -(1/delta) ln n + const
    const double delta = 0.7;
    ParamSeries s;
    s.kind = ObservableKind::G1;
    s.k = 10000000;
    for (std::size_t n : {1000UL, 2000UL, 5000UL, 10000UL}) {
        ParamRow row;
        row.n = n;
        row.fit.params.mu =
            (1.0 / delta) * std::log(static_cast<double>(s.k) / static_cast<double>(n));
        row.fit.params.sigma = 1.0 / delta;
        s.rows.push_back(row);
    }
    const DimensionEstimate est = delta_from_slope(s, SlopeRoute::MuG1);
    CHECK(est.delta == doctest::Approx(delta).epsilon(1e-10));
    CHECK(est.method == DimMethod::MuG1Slope);
    CHECK(est.rows_used == 4);
    CHECK(est.rows_excluded == 0);
}

TEST_CASE("power slope routes recover delta for both tail signs") {
    const double delta = 1.6;
    const double alpha = 4.0;
    const std::vector<std::size_t> ns = {1000, 2000, 5000, 10000};
    const double e = 1.0 / (alpha * delta);

    const ParamSeries g2 = power_series(ObservableKind::G2, alpha, -e, -e, 10000000, ns);
    CHECK(delta_from_slope(g2, SlopeRoute::MuG2).delta ==
          doctest::Approx(delta).epsilon(1e-10));
    CHECK(delta_from_slope(g2, SlopeRoute::SigmaG2).delta ==
          doctest::Approx(delta).epsilon(1e-10));
    CHECK(delta_from_slope(g2, SlopeRoute::MuG2).method == DimMethod::MuG2Slope);
    CHECK(delta_from_slope(g2, SlopeRoute::SigmaG2).method ==
          DimMethod::SigmaG2Slope);

    const ParamSeries g3 = power_series(ObservableKind::G3, alpha, 0.0, +e, 10000000, ns);
    const DimensionEstimate est = delta_from_slope(g3, SlopeRoute::SigmaG3);
    CHECK(est.delta == doctest::Approx(delta).epsilon(1e-10));
    CHECK(est.method == DimMethod::SigmaG3Slope);
}

TEST_CASE("slope routes gate out grid points without convergence headroom") {
    const double delta = 0.7;
    const double alpha = 4.0;
    const double e = 1.0 / (alpha * delta);
    // k = 1e6: n=100 fails the n gate, n=2000/5000/10000 fail the m=k/n gate;
    // only n=1000 survives -> not enough points.
    const ParamSeries starved = power_series(
        ObservableKind::G2, alpha, -e, -e, 1000000, {100, 1000, 2000, 5000, 10000});
    CHECK_THROWS(delta_from_slope(starved, SlopeRoute::SigmaG2));

    // k = 1e7: n=100 still fails the n gate, the rest survive and the
    // estimate is unchanged by the excluded point.
    const ParamSeries partial = power_series(
        ObservableKind::G2, alpha, -e, -e, 10000000, {100, 1000, 2000, 5000, 10000});
    const DimensionEstimate est = delta_from_slope(partial, SlopeRoute::SigmaG2);
    CHECK(est.delta == doctest::Approx(delta).epsilon(1e-10));
    CHECK(est.rows_used == 4);
    CHECK(est.rows_excluded == 1);
}

TEST_CASE("slope routes demand the matching observable") {
    const ParamSeries g2 =
        power_series(ObservableKind::G2, 4.0, -0.1, -0.1, 10000000,
                     {1000, 2000, 5000, 10000});
    CHECK_THROWS(delta_from_slope(g2, SlopeRoute::MuG1));
    CHECK_THROWS(delta_from_slope(g2, SlopeRoute::SigmaG3));
}

TEST_CASE("method tags round-trip") {
    for (DimMethod m :
         {DimMethod::SigmaG1, DimMethod::XiG2, DimMethod::XiG3,
          DimMethod::MuG1Slope, DimMethod::MuG2Slope, DimMethod::SigmaG2Slope,
          DimMethod::SigmaG3Slope}) {
        CHECK(dim_method_from_string(to_string(m)) == m);
    }
    CHECK(std::string(to_string(DimMethod::SigmaG1)) == "sigma_g1");
    CHECK(std::string(to_string(DimMethod::MuG1Slope)) == "mu_g1_slope");
    CHECK_THROWS(dim_method_from_string("nope"));
}

TEST_CASE("ensemble aggregation") {
    const EnsembleStats stats = aggregate_ensemble({1.0, 2.0, 3.0});
    CHECK(stats.mean == doctest::Approx(2.0));
    CHECK(stats.stddev == doctest::Approx(1.0));
    CHECK(stats.stderr_ == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(stats.count == 3);
    CHECK(!stats.singleton);

    const EnsembleStats one = aggregate_ensemble({5.0});
    CHECK(one.mean == doctest::Approx(5.0));
    CHECK(one.singleton);
    CHECK(one.count == 1);

    CHECK_THROWS(aggregate_ensemble({}));
}
