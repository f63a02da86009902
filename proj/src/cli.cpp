#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gevdim/harness.hpp"

namespace gevdim {

namespace {

std::string resolved_out_dir(const std::string& cli_out, const std::string& fallback) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv("GEVDIM_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    return fallback;
}

void print_estimate(const std::string& system, const DimensionEstimate& est) {
    std::printf("%s  delta = %.6g +- %.3g  (method=%s, rows_used=%zu, rows_excluded=%zu)\n",
                system.c_str(), est.delta, est.uncertainty, to_string(est.method),
                est.rows_used, est.rows_excluded);
}

// The combined uncertainty mixes two ensemble axes; report them separately
// as well: spread of the per-center means (across centers) and the pooled
// residual spread around them (across realizations), both mapped to delta
// units by the same local derivative as the combined value.
void print_spread_components(const std::vector<double>& values,
                             const std::vector<int>& centers,
                             const EnsembleStats& stats, DimMethod method,
                             double alpha) {
    if (values.size() < 2) return;
    std::map<int, std::vector<double>> by_center;
    for (std::size_t i = 0; i < values.size(); ++i) {
        by_center[centers[i]].push_back(values[i]);
    }
    std::vector<double> center_means;
    double ss_within = 0.0;
    std::size_t dof_within = 0;
    for (const auto& [center, vals] : by_center) {
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        center_means.push_back(mean);
        for (double v : vals) ss_within += (v - mean) * (v - mean);
        dof_within += vals.size() - 1;
    }
    const double between =
        center_means.size() >= 2 ? aggregate_ensemble(center_means).stddev : 0.0;
    const double within =
        dof_within >= 1 ? std::sqrt(ss_within / static_cast<double>(dof_within)) : 0.0;
    const double am = std::fabs(stats.mean);
    const double scale = method == DimMethod::SigmaG1 ? 1.0 / (am * am)
                                                      : 1.0 / (alpha * am * am);
    std::printf("    spread (delta units): across centers %.3g, across "
                "realizations %.3g, combined %.3g\n",
                between * scale, within * scale, stats.stddev * scale);
}

int run_dimension(const std::vector<ExperimentRecord>& records, DimMethod method) {
    int printed = 0;
    for (const std::string& system : systems_in(records)) {
        try {
            DimensionEstimate est;
            switch (method) {
                case DimMethod::SigmaG1:
                case DimMethod::XiG2:
                case DimMethod::XiG3: {
                    const ObservableKind kind = method == DimMethod::SigmaG1
                                                    ? ObservableKind::G1
                                                : method == DimMethod::XiG2
                                                    ? ObservableKind::G2
                                                    : ObservableKind::G3;
                    std::vector<double> values;
                    std::vector<int> centers;
                    double alpha = 0.0;
                    std::size_t excluded = 0;
                    for (const auto& r : records) {
                        if (r.system != system || r.observable != kind) continue;
                        if (r.failed || r.clamp_count > 0) {
                            ++excluded;
                            continue;
                        }
                        values.push_back(method == DimMethod::SigmaG1 ? r.params.sigma
                                                                      : r.params.xi);
                        centers.push_back(r.center_idx);
                        alpha = r.alpha;
                    }
                    const EnsembleStats stats = aggregate_ensemble(values);
                    est = method == DimMethod::SigmaG1
                              ? delta_from_sigma_g1(stats.mean, stats.stddev)
                              : delta_from_xi(stats.mean, alpha, stats.stddev, kind);
                    est.rows_used = stats.count;
                    est.rows_excluded = excluded;
                    print_estimate(system, est);
                    print_spread_components(values, centers, stats, method, alpha);
                    ++printed;
                    continue;
                }
                case DimMethod::MuG1Slope:
                case DimMethod::MuG2Slope:
                case DimMethod::SigmaG2Slope:
                case DimMethod::SigmaG3Slope: {
                    const ObservableKind kind = method == DimMethod::MuG1Slope
                                                    ? ObservableKind::G1
                                                : method == DimMethod::SigmaG3Slope
                                                    ? ObservableKind::G3
                                                    : ObservableKind::G2;
                    const SlopeRoute route = method == DimMethod::MuG1Slope ? SlopeRoute::MuG1
                                             : method == DimMethod::MuG2Slope
                                                 ? SlopeRoute::MuG2
                                             : method == DimMethod::SigmaG2Slope
                                                 ? SlopeRoute::SigmaG2
                                                 : SlopeRoute::SigmaG3;
                    est = delta_from_slope(param_series_from_records(records, system, kind),
                                           route);
                    break;
                }
            }
            print_estimate(system, est);
            ++printed;
        } catch (const std::exception& e) {
            std::printf("%s  no estimate (%s)\n", system.c_str(), e.what());
        }
    }
    if (printed == 0) {
        std::fprintf(stderr, "error: no system in the records admits this estimate\n");
        return 2;
    }
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"block-maxima scaling toolkit for fractal invariant measures"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "run the experiment grid from a config file");
    std::string run_config;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    int run_threads = 0;
    std::string run_out;
    run_cmd->add_option("config", run_config, "key = value config file")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", run_seed, "override the root seed")
        ->each([&](const std::string&) { run_seed_set = true; });
    run_cmd->add_option("--threads", run_threads, "override the worker thread count")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", run_out, "override the output directory");

    // table
    auto* table_cmd = app.add_subcommand("table", "dimension summary table from records");
    std::string table_records;
    std::string table_kind = "1";
    table_cmd->add_option("records", table_records, "records CSV file")
        ->required()
        ->check(CLI::ExistingFile);
    table_cmd->add_option("--table", table_kind, "system grouping: 1 = IFS, 2 = maps")
        ->check(CLI::IsMember({"1", "2"}));

    // curves
    auto* curves_cmd = app.add_subcommand("curves", "per-parameter scaling curves from records");
    std::string curves_records;
    std::string curves_out;
    curves_cmd->add_option("records", curves_records, "records CSV file")
        ->required()
        ->check(CLI::ExistingFile);
    curves_cmd->add_option("--out", curves_out, "output directory for the curve files");

    // dimension
    auto* dim_cmd = app.add_subcommand("dimension", "dimension estimate from records");
    std::string dim_records;
    std::string dim_method;
    dim_cmd->add_option("records", dim_records, "records CSV file")
        ->required()
        ->check(CLI::ExistingFile);
    dim_cmd->add_option("--method", dim_method,
                        "sigma_g1 | xi_g2 | xi_g3 | mu_g1_slope | mu_g2_slope | "
                        "sigma_g2_slope | sigma_g3_slope")
        ->required();

    // selftest
    app.add_subcommand("selftest", "run the built-in property suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed()) {
            ExperimentConfig config = load_config(run_config);
            if (run_seed_set) config.seed = run_seed;
            if (run_threads > 0) config.threads = run_threads;
            config.output_dir = resolved_out_dir(run_out, config.output_dir);

            std::printf("system      %s\n", system_to_string(config.system).c_str());
            std::printf("k           %zu\n", config.k);
            std::printf("grid        ");
            for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
                std::printf("%s%zu", i ? "," : "", config.n_grid[i]);
            }
            std::printf("\nensemble    %d x %d (centers x realizations)\n",
                        config.centers, config.ensemble);
            std::printf("seed        %llu\n",
                        static_cast<unsigned long long>(config.seed));
            std::printf("threads     %d\n", config.threads);

            const ExperimentResult result = run_experiment(config);
            std::size_t failed = 0;
            for (const auto& r : result.records) failed += r.failed ? 1 : 0;

            namespace fs = std::filesystem;
            fs::create_directories(config.output_dir);
            const std::string records_path =
                (fs::path(config.output_dir) / "records.csv").string();
            write_records_csv_file(records_path, result.records);
            write_meta_json((fs::path(config.output_dir) / "records.meta.json").string(),
                            config);
            std::printf("records     %zu rows (%zu failed) -> %s\n",
                        result.records.size(), failed, records_path.c_str());
            return 0;
        }
        if (table_cmd->parsed()) {
            const auto records = read_records_csv_file(table_records);
            std::fputs(emit_table(records, table_kind[0]).c_str(), stdout);
            return 0;
        }
        if (curves_cmd->parsed()) {
            const auto records = read_records_csv_file(curves_records);
            const std::string out_dir = resolved_out_dir(curves_out, ".");
            for (const std::string& path : emit_curves(records, out_dir)) {
                std::printf("%s\n", path.c_str());
            }
            return 0;
        }
        if (dim_cmd->parsed()) {
            DimMethod method;
            try {
                method = dim_method_from_string(dim_method);
            } catch (const std::invalid_argument& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return 1;
            }
            const auto records = read_records_csv_file(dim_records);
            return run_dimension(records, method);
        }
        // selftest
        return selftest_run(std::cout) == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace gevdim
