#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gevdim/lmoments.hpp"

namespace gevdim {

// Candidate families for the deviation comparison. All are fit by their
// L-moment estimators so the comparison uses one inference framework:
//   GEV          full three-parameter fit
//   Gumbel       sigma = l2/ln2, mu = l1 - sigma*gamma_E
//   Normal       mu = l1, sigma = l2*sqrt(pi)
//   Exponential  rate 1/l1 on [0, inf); rejects samples with negative values
enum class Family { Gev, Gumbel, Normal, Exponential };

const char* to_string(Family family);

struct CandidateModel {
    std::string name;
    std::function<double(double)> cdf;
};

CandidateModel fit_candidate(Family family, const std::vector<double>& sample);

struct KsReport {
    double statistic = 0.0;  // sup-norm deviation D in [0,1]
    std::size_t sample_size = 0;
    std::string model_name;
};

// D = max_i max(i/N - F(x_(i)), F(x_(i)) - (i-1)/N) over the ordered sample.
KsReport ks_statistic(const std::vector<double>& sample,
                      const CandidateModel& model);

// Fits every requested family, drops the ones whose fit preconditions fail,
// and ranks the rest by ascending deviation (ties broken by family order for
// determinism). Throws if no family admits a fit.
std::vector<KsReport> model_selection(
    const std::vector<double>& sample,
    const std::vector<Family>& families = {Family::Gev, Family::Gumbel,
                                           Family::Normal, Family::Exponential});

}  // namespace gevdim
