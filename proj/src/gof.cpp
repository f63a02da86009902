#include "gevdim/gof.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gevdim {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

}  // namespace

const char* to_string(Family family) {
    switch (family) {
        case Family::Gev: return "gev";
        case Family::Gumbel: return "gumbel";
        case Family::Normal: return "normal";
        case Family::Exponential: return "exponential";
    }
    return "?";
}

CandidateModel fit_candidate(Family family, const std::vector<double>& sample) {
    const LMomentSet lm = sample_lmoments(sample);
    if (lm.degenerate) {
        throw DegenerateSampleError("candidate fit undefined for a constant sample");
    }
    CandidateModel model;
    model.name = to_string(family);
    switch (family) {
        case Family::Gev: {
            const GevParams p = fit_gev_lmoments(lm).params;
            model.cdf = [p](double x) { return gev_cdf(p, x); };
            break;
        }
        case Family::Gumbel: {
            const double sigma = lm.l2 / std::log(2.0);
            const double mu = lm.l1 - sigma * kEulerGamma;
            const GevParams p{mu, sigma, 0.0};
            model.cdf = [p](double x) { return gev_cdf(p, x); };
            break;
        }
        case Family::Normal: {
            const double mu = lm.l1;
            const double sigma = lm.l2 * std::sqrt(std::numbers::pi);
            model.cdf = [mu, sigma](double x) { return normal_cdf(x, mu, sigma); };
            break;
        }
        case Family::Exponential: {
            // Plain exponential on [0, inf) with the rate matched to the
            // L-location; data with negative support cannot be modeled.
            const double mn = *std::min_element(sample.begin(), sample.end());
            if (mn < 0.0) {
                throw std::domain_error(
                    "exponential candidate requires nonnegative support");
            }
            if (!(lm.l1 > 0.0)) {
                throw std::domain_error("exponential candidate requires positive mean");
            }
            const double rate = 1.0 / lm.l1;
            model.cdf = [rate](double x) {
                return x <= 0.0 ? 0.0 : -std::expm1(-rate * x);
            };
            break;
        }
    }
    return model;
}

KsReport ks_statistic(const std::vector<double>& sample,
                      const CandidateModel& model) {
    if (sample.empty()) throw std::invalid_argument("KS statistic of empty sample");
    std::vector<double> sorted(sample);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t N = sorted.size();
    const double Nd = static_cast<double>(N);
    double D = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double F = model.cdf(sorted[i]);
        const double upper = static_cast<double>(i + 1) / Nd - F;
        const double lower = F - static_cast<double>(i) / Nd;
        D = std::max(D, std::max(upper, lower));
    }
    return {D, N, model.name};
}

std::vector<KsReport> model_selection(const std::vector<double>& sample,
                                      const std::vector<Family>& families) {
    std::vector<KsReport> reports;
    for (Family family : families) {
        try {
            reports.push_back(ks_statistic(sample, fit_candidate(family, sample)));
        } catch (const DegenerateSampleError&) {
        } catch (const std::domain_error&) {
        }
    }
    if (reports.empty()) {
        throw std::runtime_error("no candidate family admits a fit for this sample");
    }
    std::stable_sort(reports.begin(), reports.end(),
                     [](const KsReport& a, const KsReport& b) {
                         return a.statistic < b.statistic;
                     });
    return reports;
}

}  // namespace gevdim
