#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gevdim/gof.hpp"

namespace gevdim {

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double stderr_intercept = 0.0;
};

// Ordinary least squares with standard errors. Requires >= 3 points and a
// non-degenerate abscissa.
ScalingFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

enum class DimMethod {
    SigmaG1,      // delta = 1 / <sigma(g1)>
    XiG2,         // delta = 1 / (alpha |<xi(g2)>|)
    XiG3,         // delta = 1 / (alpha |<xi(g3)>|)
    MuG1Slope,    // mu(g1) vs ln n, delta = 1/|slope|
    MuG2Slope,    // log10 mu(g2) vs log10 n, delta = 1/(alpha |slope|)
    SigmaG2Slope, // log10 sigma(g2) vs log10 n, same conversion
    SigmaG3Slope, // log10 sigma(g3) vs log10 n, same conversion
};

const char* to_string(DimMethod method);
DimMethod dim_method_from_string(const std::string& text);

struct DimensionEstimate {
    double delta = 0.0;
    double uncertainty = 0.0;  // one standard deviation
    DimMethod method = DimMethod::SigmaG1;
    std::size_t rows_used = 0;
    std::size_t rows_excluded = 0;  // grid points failing the n,m >= 1000 gate
};

// delta = 1/mean_sigma with uncertainty std_sigma/mean_sigma^2.
DimensionEstimate delta_from_sigma_g1(double mean_sigma, double std_sigma = 0.0);

// delta = 1/(alpha |mean_xi|); sign of mean_xi is irrelevant. mean_xi == 0 is
// an error (a vanishing shape carries no alpha-scaling information).
DimensionEstimate delta_from_xi(double mean_xi, double alpha,
                                double std_xi = 0.0,
                                ObservableKind kind = ObservableKind::G2);

// Fitted (usually ensemble-aggregated) parameters at each block count n for a
// fixed series length k.
struct ParamRow {
    std::size_t n = 0;
    FitResult fit;
};

struct ParamSeries {
    std::vector<ParamRow> rows;  // strictly increasing n
    ObservableKind kind = ObservableKind::G1;
    double alpha = 4.0;
    double C = 10.0;
    std::size_t k = 0;
    std::string system;
};

enum class SlopeRoute { MuG1, MuG2, SigmaG2, SigmaG3 };

// Scaling-law slope routes. Grid points with n < 1000 or m = k/n < 1000 are
// excluded (convergence gate) and counted in rows_excluded; at least 3
// distinct n must survive. MuG1 fits mu against ln n; the others fit
// log10(parameter) against log10(n).
DimensionEstimate delta_from_slope(const ParamSeries& series, SlopeRoute route);

struct EnsembleStats {
    double mean = 0.0;
    double stddev = 0.0;   // sample standard deviation (N-1)
    double stderr_ = 0.0;
    std::size_t count = 0;
    bool singleton = false;  // stddev undefined for one member
};

EnsembleStats aggregate_ensemble(const std::vector<double>& values);

}  // namespace gevdim
