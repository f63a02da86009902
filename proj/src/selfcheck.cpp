#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gevdim/harness.hpp"

namespace gevdim {

namespace {

struct SuiteOutcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& what) {
        if (ok) detail = what;  // keep the first failure
        ok = false;
    }
};

// 1. cdf is nondecreasing for every shape, and the small-shape evaluation
// joins the exact Gumbel branch continuously.
SuiteOutcome suite_cdf_shape() {
    SuiteOutcome out;
    const double xis[] = {-1.0, -0.4, -0.1, -1e-9, 0.0, 1e-9, 0.1, 0.4, 1.0};
    const double sigmas[] = {0.5, 1.0, 3.0};
    for (double xi : xis) {
        for (double sigma : sigmas) {
            const GevParams params{0.5, sigma, xi};
            double prev = -1.0;
            for (int i = 0; i <= 400; ++i) {
                const double x = -10.0 + 20.0 * i / 400.0;
                const double F = gev_cdf(params, x);
                if (!(F >= 0.0 && F <= 1.0)) {
                    out.fail("cdf outside [0,1] at xi=" + std::to_string(xi));
                }
                if (F < prev) {
                    out.fail("cdf decreased at xi=" + std::to_string(xi));
                }
                prev = F;
            }
        }
    }
    const GevParams gumbel{0.0, 1.0, 0.0};
    for (double xi : {1e-9, -1e-9, 5e-10}) {
        const GevParams near{0.0, 1.0, xi};
        for (int i = 0; i <= 200; ++i) {
            const double x = -8.0 + 16.0 * i / 200.0;
            if (std::fabs(gev_cdf(near, x) - gev_cdf(gumbel, x)) > 1e-6) {
                out.fail("shape switchover discontinuity at x=" + std::to_string(x));
            }
        }
    }
    return out;
}

// 2. quantile inverts the cdf to 1e-10 across shapes and probability levels.
SuiteOutcome suite_round_trip() {
    SuiteOutcome out;
    const double xis[] = {-1.0, -0.4, -0.1, 0.0, 1e-9, 0.1, 0.4, 1.0};
    const double ps[] = {1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999, 1 - 1e-6};
    for (double xi : xis) {
        const GevParams params{1.3, 0.7, xi};
        for (double p : ps) {
            const double x = gev_quantile(params, p);
            const double back = gev_cdf(params, x);
            if (std::fabs(back - p) > 1e-10) {
                out.fail("round trip off by " + std::to_string(std::fabs(back - p)) +
                         " at xi=" + std::to_string(xi));
            }
        }
    }
    return out;
}

// 3. L-scale equals the mean pairwise gap / 2, exhaustively over sample sizes
// up to 12 (the pairwise sum is an independent O(N^2) oracle).
SuiteOutcome suite_pairwise_oracle() {
    SuiteOutcome out;
    RngStream rng(20240517);
    for (std::size_t N = 4; N <= 12; ++N) {
        for (int rep = 0; rep < 25; ++rep) {
            std::vector<double> x(N);
            for (double& v : x) v = 20.0 * rng.unit() - 10.0;
            const LMomentSet lm = sample_lmoments(x);
            double acc = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                for (std::size_t j = i + 1; j < N; ++j) {
                    acc += std::fabs(x[i] - x[j]);
                }
            }
            const double pairs = 0.5 * static_cast<double>(N) * static_cast<double>(N - 1);
            const double oracle = acc / (2.0 * pairs);
            if (std::fabs(lm.l2 - oracle) > 1e-12 * std::max(1.0, std::fabs(oracle))) {
                out.fail("l2 mismatch at N=" + std::to_string(N));
            }
        }
    }
    return out;
}

// 4. Large-sample L-skewness of the double-exponential law.
SuiteOutcome suite_gumbel_t3() {
    SuiteOutcome out;
    const double target = std::log(9.0 / 8.0) / std::log(2.0);
    RngStream rng(97531);
    std::vector<double> draws(100000);
    const GevParams gumbel{0.0, 1.0, 0.0};
    for (double& v : draws) v = gev_quantile(gumbel, rng.unit());
    const LMomentSet lm = sample_lmoments(std::move(draws));
    if (std::fabs(lm.t3 - target) > 0.005) {
        out.fail("t3 = " + std::to_string(lm.t3) + ", expected ~" + std::to_string(target));
    }
    return out;
}

// 5. The fit commutes with affine maps of the data: x -> a + b x must give
// mu -> a + b mu, sigma -> b sigma, xi unchanged.
SuiteOutcome suite_affine_equivariance() {
    SuiteOutcome out;
    RngStream rng(3141592);
    std::vector<double> x(200);
    const GevParams truth{2.0, 1.5, 0.2};
    for (double& v : x) v = gev_quantile(truth, rng.unit());
    const GevFit base = fit_gev_lmoments(sample_lmoments(x));
    const double shifts[][2] = {{3.7, 2.5}, {-2.0, 0.5}, {0.0, 10.0}};
    for (const auto& ab : shifts) {
        const double a = ab[0], b = ab[1];
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = a + b * x[i];
        const GevFit mapped = fit_gev_lmoments(sample_lmoments(y));
        const double mu_want = a + b * base.params.mu;
        const double sc = std::max({1.0, std::fabs(mu_want), std::fabs(b * base.params.sigma)});
        if (std::fabs(mapped.params.mu - mu_want) > 1e-12 * sc ||
            std::fabs(mapped.params.sigma - b * base.params.sigma) > 1e-12 * sc ||
            std::fabs(mapped.params.xi - base.params.xi) > 1e-12) {
            out.fail("fit not equivariant under x -> " + std::to_string(a) + " + " +
                     std::to_string(b) + " x");
        }
    }
    return out;
}

// 6. Every estimator route recovers a synthetic dimension exactly when fed
// the ideal parameter scaling.
SuiteOutcome suite_synthetic_truth() {
    SuiteOutcome out;
    const double alpha = 4.0, C = 10.0, k = 1e7;
    for (double delta : {0.7, 1.6}) {
        ParamSeries g1, g2, g3;
        g1.kind = ObservableKind::G1;
        g2.kind = ObservableKind::G2;
        g3.kind = ObservableKind::G3;
        for (ParamSeries* s : {&g1, &g2, &g3}) {
            s->alpha = alpha;
            s->C = C;
            s->k = static_cast<std::size_t>(k);
        }
        for (std::size_t n : {1000, 2000, 5000, 10000}) {
            for (ParamSeries* s : {&g1, &g2, &g3}) {
                ParamRow row;
                row.n = n;
                row.fit.params = theoretical_params(s->kind, delta, alpha, C, k,
                                                    static_cast<double>(n));
                s->rows.push_back(row);
            }
        }
        struct Case {
            const ParamSeries* series;
            SlopeRoute route;
        };
        const Case cases[] = {{&g1, SlopeRoute::MuG1},
                              {&g2, SlopeRoute::MuG2},
                              {&g2, SlopeRoute::SigmaG2},
                              {&g3, SlopeRoute::SigmaG3}};
        for (const Case& c : cases) {
            const DimensionEstimate est = delta_from_slope(*c.series, c.route);
            if (std::fabs(est.delta - delta) > 1e-10) {
                out.fail("slope route " + std::to_string(static_cast<int>(c.route)) +
                         " got " + std::to_string(est.delta));
            }
        }
        if (std::fabs(delta_from_sigma_g1(1.0 / delta).delta - delta) > 1e-10) {
            out.fail("sigma_g1 route failed");
        }
        if (std::fabs(delta_from_xi(1.0 / (alpha * delta), alpha).delta - delta) > 1e-10 ||
            std::fabs(delta_from_xi(-1.0 / (alpha * delta), alpha, 0.0,
                                    ObservableKind::G3)
                          .delta -
                      delta) > 1e-10) {
            out.fail("shape route failed");
        }
    }
    return out;
}

// 7. The full pipeline is byte-deterministic in the worker thread count.
SuiteOutcome suite_determinism() {
    SuiteOutcome out;
    ExperimentConfig config;
    config.system.variant = CantorIfs{0.5};
    config.observables = {{ObservableKind::G1}, {ObservableKind::G2}, {ObservableKind::G3}};
    config.k = 20000;
    config.n_grid = {10, 20};
    config.ensemble = 2;
    config.centers = 2;
    config.seed = 77;
    config.bootstrap_B = 100;

    std::string csv[2];
    const int thread_counts[2] = {1, 3};
    for (int i = 0; i < 2; ++i) {
        config.threads = thread_counts[i];
        const ExperimentResult result = run_experiment(config);
        std::ostringstream ss;
        write_records_csv(ss, result.records);
        csv[i] = ss.str();
    }
    if (csv[0] != csv[1]) {
        out.fail("records differ between 1 and 3 worker threads");
    }
    if (csv[0].find("nan") != std::string::npos) {
        out.fail("determinism run produced failed cells");
    }
    return out;
}

}  // namespace

int selftest_run(std::ostream& out) {
    struct Entry {
        const char* name;
        SuiteOutcome (*fn)();
    };
    const Entry suites[] = {
        {"cdf monotone, shape switchover continuous", suite_cdf_shape},
        {"quantile/cdf round trip", suite_round_trip},
        {"L-scale pairwise oracle (N <= 12)", suite_pairwise_oracle},
        {"double-exponential L-skewness", suite_gumbel_t3},
        {"fit affine equivariance", suite_affine_equivariance},
        {"synthetic dimension recovery, all routes", suite_synthetic_truth},
        {"byte determinism across thread counts", suite_determinism},
    };
    int failures = 0;
    for (const Entry& suite : suites) {
        const SuiteOutcome outcome = suite.fn();
        if (outcome.ok) {
            out << "[ok]   " << suite.name << '\n';
        } else {
            ++failures;
            out << "[FAIL] " << suite.name << ": " << outcome.detail << '\n';
        }
    }
    out << (failures == 0 ? "selftest: all suites passed\n"
                          : "selftest: " + std::to_string(failures) + " suite(s) failed\n");
    return failures;
}

}  // namespace gevdim
