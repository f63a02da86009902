#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gevdim/gev.hpp"
#include "gevdim/rng.hpp"

namespace gevdim {

class DegenerateSampleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// First sample L-moments: L-location l1, L-scale l2, L-skewness t3 = l3/l2,
// L-kurtosis t4 = l4/l2. A constant sample has l2 = 0 and is flagged
// degenerate (the ratios are then reported as 0).
struct LMomentSet {
    double l1 = 0.0;
    double l2 = 0.0;
    double t3 = 0.0;
    double t4 = 0.0;
    bool degenerate = false;
};

// Unbiased probability-weighted-moment estimators b_r on the ordered sample,
// combined as l1 = b0, l2 = 2 b1 - b0, l3 = 6 b2 - 6 b1 + b0,
// l4 = 20 b3 - 30 b2 + 12 b1 - b0. Requires at least 4 finite values.
LMomentSet sample_lmoments(std::vector<double> data);

// Same, for data already sorted ascending (no copy, no sort).
LMomentSet sample_lmoments_sorted(const std::vector<double>& sorted);

struct GevFit {
    GevParams params;
    // Set when |xi| > 0.5, where the rational shape approximation underlying
    // the estimator degrades; the fit is still returned.
    bool out_of_validity = false;
};

// GEV parameters from L-moments via the rational shape approximation
// k = 7.8590 c + 2.9554 c^2, c = 2/(3 + t3) - ln2/ln3, with the exact Gumbel
// branch below the kGumbelSwitch shape threshold. Reported xi = -k.
// Throws DegenerateSampleError when l2 <= 0.
GevFit fit_gev_lmoments(const LMomentSet& lm);

// Forward map: exact L-moments (l1, l2, t3) of a GEV law. Used to verify that
// the estimator inverts it.
LMomentSet gev_lmoments(const GevParams& params);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct FitResult {
    GevParams params;
    Interval mu_ci, sigma_ci, xi_ci;  // percentile bootstrap at `level`
    int n_boot = 0;                   // resamples that produced a fit
    int n_failed = 0;                 // degenerate resamples dropped
    bool degenerate = false;          // input sample itself constant
    bool out_of_validity = false;
};

// Point fit plus percentile bootstrap confidence intervals from B resamples
// with replacement. Reproducible for a given rng stream; resample draws are
// consumed in a fixed order. B >= 100. A constant input yields a degenerate
// result with no intervals (NaN bounds) instead of an error.
FitResult bootstrap_ci(const std::vector<double>& data, int B, double level,
                       RngStream& rng);

}  // namespace gevdim
