#include "gevdim/lmoments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gevdim {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;
const double kLn2 = std::log(2.0);
const double kLn2OverLn3 = std::log(2.0) / std::log(3.0);

LMomentSet lmoments_of_sorted(const double* x, std::size_t N) {
    // Unbiased probability-weighted moments b_r, ranks 1-based:
    // b_r = (1/N) sum_i [ (i-1)(i-2)...(i-r) / ((N-1)(N-2)...(N-r)) ] x_(i).
    double b0 = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0;
    const double Nd = static_cast<double>(N);
    const double d1 = Nd - 1.0, d2 = Nd - 2.0, d3 = Nd - 3.0;
    for (std::size_t idx = 0; idx < N; ++idx) {
        const double i = static_cast<double>(idx + 1);
        const double v = x[idx];
        b0 += v;
        const double w1 = (i - 1.0) / d1;
        b1 += w1 * v;
        const double w2 = w1 * (i - 2.0) / d2;
        b2 += w2 * v;
        b3 += w2 * (i - 3.0) / d3 * v;
    }
    b0 /= Nd;
    b1 /= Nd;
    b2 /= Nd;
    b3 /= Nd;

    LMomentSet lm;
    lm.l1 = b0;
    lm.l2 = 2.0 * b1 - b0;
    const double l3 = 6.0 * b2 - 6.0 * b1 + b0;
    const double l4 = 20.0 * b3 - 30.0 * b2 + 12.0 * b1 - b0;
    if (lm.l2 <= 0.0 || x[0] == x[N - 1]) {
        lm.l2 = std::max(lm.l2, 0.0);
        lm.degenerate = true;
        lm.t3 = 0.0;
        lm.t4 = 0.0;
    } else {
        lm.t3 = l3 / lm.l2;
        lm.t4 = l4 / lm.l2;
    }
    return lm;
}

}  // namespace

LMomentSet sample_lmoments(std::vector<double> data) {
    if (data.size() < 4) {
        throw std::invalid_argument("L-moments need at least 4 values");
    }
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("L-moments need finite values");
        }
    }
    std::sort(data.begin(), data.end());
    return lmoments_of_sorted(data.data(), data.size());
}

LMomentSet sample_lmoments_sorted(const std::vector<double>& sorted) {
    if (sorted.size() < 4) {
        throw std::invalid_argument("L-moments need at least 4 values");
    }
    return lmoments_of_sorted(sorted.data(), sorted.size());
}

GevFit fit_gev_lmoments(const LMomentSet& lm) {
    if (lm.degenerate || !(lm.l2 > 0.0)) {
        throw DegenerateSampleError("GEV fit undefined for a degenerate (constant) sample");
    }
    // Rational approximation of the shape from L-skewness.
    const double c = 2.0 / (3.0 + lm.t3) - kLn2OverLn3;
    const double kh = 7.8590 * c + 2.9554 * c * c;

    GevFit fit;
    if (std::fabs(kh) < kGumbelSwitch) {
        fit.params.sigma = lm.l2 / kLn2;
        fit.params.mu = lm.l1 - fit.params.sigma * kEulerGamma;
        fit.params.xi = 0.0;
    } else {
        const double g = std::tgamma(1.0 + kh);
        // 1 - 2^{-kh} computed stably as -expm1(-kh ln2).
        const double one_minus_2k = -std::expm1(-kh * kLn2);
        fit.params.sigma = lm.l2 * kh / (one_minus_2k * g);
        fit.params.mu = lm.l1 - fit.params.sigma * (1.0 - g) / kh;
        fit.params.xi = -kh;
    }
    fit.out_of_validity = std::fabs(fit.params.xi) > 0.5;
    return fit;
}

LMomentSet gev_lmoments(const GevParams& params) {
    LMomentSet lm;
    const double xi = params.xi;
    if (std::fabs(xi) < kGumbelSwitch) {
        lm.l1 = params.mu + params.sigma * kEulerGamma;
        lm.l2 = params.sigma * kLn2;
        lm.t3 = std::log(9.0 / 8.0) / kLn2;
        return lm;
    }
    const double kh = -xi;
    if (kh <= -1.0) {
        throw std::domain_error("GEV L-moments undefined for xi >= 1 (infinite mean)");
    }
    const double g = std::tgamma(1.0 + kh);
    lm.l1 = params.mu + params.sigma * (1.0 - g) / kh;
    lm.l2 = params.sigma * (-std::expm1(-kh * kLn2)) * g / kh;
    const double r32 = std::expm1(-kh * std::log(3.0)) / std::expm1(-kh * kLn2);
    lm.t3 = 2.0 * r32 - 3.0;
    return lm;
}

FitResult bootstrap_ci(const std::vector<double>& data, int B, double level,
                       RngStream& rng) {
    if (B < 100) throw std::invalid_argument("bootstrap needs B >= 100");
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("bootstrap level must lie in (0,1)");
    }
    std::vector<double> sorted(data);
    if (sorted.size() < 4) {
        throw std::invalid_argument("bootstrap needs at least 4 values");
    }
    std::sort(sorted.begin(), sorted.end());

    FitResult out;
    const LMomentSet lm = lmoments_of_sorted(sorted.data(), sorted.size());
    const double qnan = std::numeric_limits<double>::quiet_NaN();
    if (lm.degenerate) {
        out.params = {lm.l1, 0.0, 0.0};
        out.mu_ci = out.sigma_ci = out.xi_ci = {qnan, qnan};
        out.degenerate = true;
        return out;
    }
    const GevFit point = fit_gev_lmoments(lm);
    out.params = point.params;
    out.out_of_validity = point.out_of_validity;

    const std::size_t N = sorted.size();
    std::vector<std::uint32_t> counts(N);
    std::vector<double> resample(N);
    std::vector<double> mus, sigmas, xis;
    mus.reserve(B);
    sigmas.reserve(B);
    xis.reserve(B);
    for (int b = 0; b < B; ++b) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < N; ++i) {
            auto idx = static_cast<std::size_t>(rng.unit() * static_cast<double>(N));
            if (idx >= N) idx = N - 1;
            ++counts[idx];
        }
        // Expanding multiplicities of the sorted sample gives the resample
        // already sorted: no per-resample sort.
        std::size_t pos = 0;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::uint32_t cnt = 0; cnt < counts[i]; ++cnt) {
                resample[pos++] = sorted[i];
            }
        }
        const LMomentSet blm = lmoments_of_sorted(resample.data(), N);
        if (blm.degenerate) {
            ++out.n_failed;
            continue;
        }
        const GevFit bfit = fit_gev_lmoments(blm);
        mus.push_back(bfit.params.mu);
        sigmas.push_back(bfit.params.sigma);
        xis.push_back(bfit.params.xi);
    }
    out.n_boot = static_cast<int>(mus.size());

    const double lo_p = (1.0 - level) / 2.0;
    const double hi_p = 1.0 - lo_p;
    auto percentile_interval = [&](std::vector<double>& v) -> Interval {
        if (v.empty()) return {qnan, qnan};
        return {quantile_r7(v, lo_p), quantile_r7(v, hi_p)};
    };
    out.mu_ci = percentile_interval(mus);
    out.sigma_ci = percentile_interval(sigmas);
    out.xi_ci = percentile_interval(xis);
    return out;
}

}  // namespace gevdim
