#include "gevdim/gev.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gevdim {

double gev_cdf(const GevParams& params, double x) {
    const double z = (x - params.mu) / params.sigma;
    if (std::fabs(params.xi) < kGumbelSwitch) {
        return std::exp(-std::exp(-z));
    }
    const double t = 1.0 + params.xi * z;
    if (t <= 0.0) {
        return params.xi > 0.0 ? 0.0 : 1.0;
    }
    return std::exp(-std::pow(t, -1.0 / params.xi));
}

double gev_quantile(const GevParams& params, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("quantile probability must lie in (0,1)");
    }
    const double w = -std::log(p);  // exp(-w) = p
    if (std::fabs(params.xi) < kGumbelSwitch) {
        return params.mu - params.sigma * std::log(w);
    }
    return params.mu + params.sigma * (std::pow(w, -params.xi) - 1.0) / params.xi;
}

TheoreticalPrediction theoretical_prediction(ObservableKind kind, double delta,
                                             double alpha, double C) {
    if (!(delta > 0.0)) throw std::domain_error("delta must be positive");
    TheoreticalPrediction pred;
    switch (kind) {
        case ObservableKind::G1:
            pred.xi_pred = 0.0;
            pred.sigma_law = {ScalingLaw::Constant, 1.0 / delta};
            pred.mu_law = {ScalingLaw::LogSlope, -1.0 / delta};
            break;
        case ObservableKind::G2:
            if (!(alpha > 0.0)) throw std::domain_error("alpha must be positive");
            pred.xi_pred = 1.0 / (alpha * delta);
            pred.sigma_law = {ScalingLaw::PowerExponent, -1.0 / (alpha * delta)};
            pred.mu_law = {ScalingLaw::PowerExponent, -1.0 / (alpha * delta)};
            break;
        case ObservableKind::G3:
            if (!(alpha > 0.0)) throw std::domain_error("alpha must be positive");
            pred.xi_pred = -1.0 / (alpha * delta);
            pred.sigma_law = {ScalingLaw::PowerExponent, +1.0 / (alpha * delta)};
            pred.mu_law = {ScalingLaw::Constant, C};
            break;
    }
    return pred;
}

GevParams theoretical_params(ObservableKind kind, double delta, double alpha,
                             double C, double k, double n) {
    const TheoreticalPrediction pred = theoretical_prediction(kind, delta, alpha, C);
    GevParams out;
    out.xi = pred.xi_pred;
    switch (kind) {
        case ObservableKind::G1:
            out.sigma = 1.0 / delta;
            out.mu = (1.0 / delta) * std::log(k / n);
            break;
        case ObservableKind::G2:
            // Proportionality constants are undetermined; fixed to 1.
            out.sigma = std::pow(n, pred.sigma_law.value);
            out.mu = std::pow(n, pred.mu_law.value);
            break;
        case ObservableKind::G3:
            out.sigma = std::pow(n, pred.sigma_law.value);
            out.mu = C;
            break;
    }
    return out;
}

double quantile_r7(std::vector<double> sample, double p) {
    if (sample.empty()) throw std::invalid_argument("quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("quantile probability must lie in [0,1]");
    }
    std::sort(sample.begin(), sample.end());
    const std::size_t N = sample.size();
    if (N == 1) return sample[0];
    const double h = static_cast<double>(N - 1) * p;  // 0-based position
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= N) return sample[N - 1];
    const double frac = h - static_cast<double>(lo);
    return sample[lo] + frac * (sample[lo + 1] - sample[lo]);
}

double gamma_m_diagnostic(const std::vector<double>& sample, double m) {
    if (m < 2.0) throw std::domain_error("gamma_m needs m >= 2");
    if (sample.empty()) throw std::invalid_argument("gamma_m of empty sample");
    return quantile_r7(sample, 1.0 - 1.0 / m);
}

}  // namespace gevdim
