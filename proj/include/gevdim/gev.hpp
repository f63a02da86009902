#pragma once

#include <cstddef>
#include <vector>

#include "gevdim/observables.hpp"

namespace gevdim {

// Location mu, scale sigma > 0, shape xi. xi > 0 has a finite lower support
// endpoint mu - sigma/xi; xi < 0 a finite upper endpoint; xi = 0 is the
// double-exponential (Gumbel) law.
struct GevParams {
    double mu = 0.0;
    double sigma = 1.0;
    double xi = 0.0;
};

// Shape values below this magnitude are evaluated on the exact Gumbel branch
// to avoid catastrophic cancellation in (1 + xi z)^(-1/xi).
inline constexpr double kGumbelSwitch = 1e-8;

double gev_cdf(const GevParams& params, double x);

// Exact inverse of gev_cdf on (0,1); p outside (0,1) is a domain error.
double gev_quantile(const GevParams& params, double p);

// How a parameter varies with the block count n at fixed series length k.
struct ScalingLaw {
    enum Kind {
        Constant,       // value independent of n
        PowerExponent,  // parameter proportional to n^value
        LogSlope,       // parameter affine in ln n with slope value
    };
    Kind kind = Constant;
    double value = 0.0;
};

struct TheoreticalPrediction {
    double xi_pred = 0.0;
    ScalingLaw sigma_law;
    ScalingLaw mu_law;
};

// Predicted scaling of the fitted GEV parameters for a measure of information
// dimension delta: G1 has sigma = 1/delta, mu affine in ln n with slope
// -1/delta, xi = 0; G2 has xi = +1/(alpha delta) and sigma, mu ~
// n^(-1/(alpha delta)); G3 has xi = -1/(alpha delta), sigma ~
// n^(+1/(alpha delta)) and mu = C.
TheoreticalPrediction theoretical_prediction(ObservableKind kind, double delta,
                                             double alpha, double C);

// Point prediction at one (k, n). Power laws carry an undetermined
// proportionality constant; it is fixed to 1 here, so only exponents and the
// G1/G3 exact values are meaningful for comparison.
GevParams theoretical_params(ObservableKind kind, double delta, double alpha,
                             double C, double k, double n);

// Linear-interpolation empirical quantile (the h = (N-1)p + 1 convention).
double quantile_r7(std::vector<double> sample, double p);

// Empirical (1 - 1/m)-quantile of an observable sample: the finite-sample
// scale sequence gamma_m = F^{-1}(1 - 1/m). For a g1 sample on a measure of
// information dimension delta, log(m) / gamma_m converges to delta as m
// grows. Requires m >= 2.
double gamma_m_diagnostic(const std::vector<double>& sample, double m);

}  // namespace gevdim
