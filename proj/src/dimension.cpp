#include "gevdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gevdim {

ScalingFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("linear fit needs equally sized vectors");
    }
    const std::size_t N = x.size();
    if (N < 3) throw std::invalid_argument("linear fit needs at least 3 points");
    const double Nd = static_cast<double>(N);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= Nd;
    my /= Nd;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) {
        throw std::invalid_argument("linear fit needs a non-degenerate abscissa");
    }
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ssr += r * r;
    }
    const double s2 = ssr / (Nd - 2.0);
    fit.stderr_slope = std::sqrt(s2 / sxx);
    fit.stderr_intercept = std::sqrt(s2 * (1.0 / Nd + mx * mx / sxx));
    return fit;
}

const char* to_string(DimMethod method) {
    switch (method) {
        case DimMethod::SigmaG1: return "sigma_g1";
        case DimMethod::XiG2: return "xi_g2";
        case DimMethod::XiG3: return "xi_g3";
        case DimMethod::MuG1Slope: return "mu_g1_slope";
        case DimMethod::MuG2Slope: return "mu_g2_slope";
        case DimMethod::SigmaG2Slope: return "sigma_g2_slope";
        case DimMethod::SigmaG3Slope: return "sigma_g3_slope";
    }
    return "?";
}

DimMethod dim_method_from_string(const std::string& text) {
    if (text == "sigma_g1") return DimMethod::SigmaG1;
    if (text == "xi_g2") return DimMethod::XiG2;
    if (text == "xi_g3") return DimMethod::XiG3;
    if (text == "mu_g1_slope") return DimMethod::MuG1Slope;
    if (text == "mu_g2_slope") return DimMethod::MuG2Slope;
    if (text == "sigma_g2_slope") return DimMethod::SigmaG2Slope;
    if (text == "sigma_g3_slope") return DimMethod::SigmaG3Slope;
    throw std::invalid_argument("unknown dimension method '" + text + "'");
}

DimensionEstimate delta_from_sigma_g1(double mean_sigma, double std_sigma) {
    if (!(mean_sigma > 0.0)) {
        throw std::domain_error("mean sigma must be positive");
    }
    DimensionEstimate est;
    est.method = DimMethod::SigmaG1;
    est.delta = 1.0 / mean_sigma;
    est.uncertainty = std_sigma / (mean_sigma * mean_sigma);
    return est;
}

DimensionEstimate delta_from_xi(double mean_xi, double alpha, double std_xi,
                                ObservableKind kind) {
    if (!(alpha > 0.0)) throw std::domain_error("alpha must be positive");
    if (mean_xi == 0.0) {
        throw std::domain_error(
            "dimension from shape undefined at xi = 0 (no alpha scaling)");
    }
    DimensionEstimate est;
    est.method = (kind == ObservableKind::G3) ? DimMethod::XiG3 : DimMethod::XiG2;
    const double axi = std::fabs(mean_xi);
    est.delta = 1.0 / (alpha * axi);
    est.uncertainty = std_xi / (alpha * axi * axi);
    return est;
}

DimensionEstimate delta_from_slope(const ParamSeries& series, SlopeRoute route) {
    const ObservableKind wanted = route == SlopeRoute::MuG1  ? ObservableKind::G1
                                  : route == SlopeRoute::SigmaG3
                                      ? ObservableKind::G3
                                      : ObservableKind::G2;
    if (series.kind != wanted) {
        throw std::invalid_argument(
            "slope route does not match the series' observable");
    }
    for (std::size_t i = 1; i < series.rows.size(); ++i) {
        if (series.rows[i].n <= series.rows[i - 1].n) {
            throw std::invalid_argument("parameter series must have strictly increasing n");
        }
    }
    std::vector<double> xs, ys;
    std::size_t excluded = 0;
    for (const auto& row : series.rows) {
        const std::size_t m = series.k / row.n;
        if (row.n < 1000 || m < 1000) {  // convergence gate on both block counts
            ++excluded;
            continue;
        }
        const double param = (route == SlopeRoute::MuG1 || route == SlopeRoute::MuG2)
                                 ? row.fit.params.mu
                                 : row.fit.params.sigma;
        if (route == SlopeRoute::MuG1) {
            xs.push_back(std::log(static_cast<double>(row.n)));
            ys.push_back(param);
        } else {
            if (!(param > 0.0)) {
                ++excluded;
                continue;
            }
            xs.push_back(std::log10(static_cast<double>(row.n)));
            ys.push_back(std::log10(param));
        }
    }
    if (xs.size() < 3) {
        throw std::invalid_argument(
            "slope route needs at least 3 grid points with n and m both >= 1000");
    }
    const ScalingFit fit = linear_fit(xs, ys);
    const double slope = std::fabs(fit.slope);
    if (!(slope > 0.0)) {
        throw std::domain_error("slope route found a flat parameter curve");
    }
    DimensionEstimate est;
    est.rows_used = xs.size();
    est.rows_excluded = excluded;
    switch (route) {
        case SlopeRoute::MuG1:
            est.method = DimMethod::MuG1Slope;
            est.delta = 1.0 / slope;
            est.uncertainty = fit.stderr_slope / (slope * slope);
            break;
        case SlopeRoute::MuG2:
        case SlopeRoute::SigmaG2:
        case SlopeRoute::SigmaG3: {
            est.method = route == SlopeRoute::MuG2 ? DimMethod::MuG2Slope
                         : route == SlopeRoute::SigmaG2 ? DimMethod::SigmaG2Slope
                                                        : DimMethod::SigmaG3Slope;
            est.delta = 1.0 / (series.alpha * slope);
            est.uncertainty = fit.stderr_slope / (series.alpha * slope * slope);
            break;
        }
    }
    return est;
}

EnsembleStats aggregate_ensemble(const std::vector<double>& values) {
    if (values.empty()) {
        throw std::invalid_argument("ensemble aggregation needs at least 1 member");
    }
    EnsembleStats stats;
    stats.count = values.size();
    const double Nd = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    stats.mean = sum / Nd;
    if (values.size() == 1) {
        stats.singleton = true;
        return stats;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(ss / (Nd - 1.0));
    stats.stderr_ = stats.stddev / std::sqrt(Nd);
    return stats;
}

}  // namespace gevdim
