#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gevdim/dimension.hpp"

namespace gevdim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Observable template: the center is chosen per ensemble member at runtime.
struct ObservableTemplate {
    ObservableKind kind = ObservableKind::G1;
};

struct ExperimentConfig {
    SystemSpec system;
    std::vector<ObservableTemplate> observables = {{ObservableKind::G1}};
    double alpha = 4.0;
    double C = 10.0;
    std::size_t k = 1000000;
    std::vector<std::size_t> n_grid = {1000};
    int ensemble = 30;      // realizations per center
    int centers = 30;       // independently selected centers
    std::uint64_t seed = 1;
    std::size_t burn_in = 0;  // 0 = per-system default
    int bootstrap_B = 1000;
    std::string output_dir = "out";
    int threads = 1;
    // Optional override of the deterministic-map jitter box center.
    bool start_set = false;
    Point start;
};

// Parses `key = value` lines (UTF-8, '#' comments, comma-separated lists).
// Unknown keys, duplicate keys, and invariant violations raise ConfigError
// naming the key and line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// One row per (center, realization, observable, n).
struct ExperimentRecord {
    std::string system;
    ObservableKind observable = ObservableKind::G1;
    double alpha = 4.0;
    double C = 10.0;
    int center_idx = 0;
    int realization_idx = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    GevParams params;
    Interval mu_ci, sigma_ci, xi_ci;
    std::string ks_winner;
    double ks_D = 0.0;
    long long clamp_count = 0;
    std::uint64_t cell_seed = 0;
    bool failed = false;  // divergence or degenerate fit; numeric fields NaN
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ExperimentRecord> records;
};

// Runs the full grid: center selection, orbit streaming, block maxima per
// observable, L-moment fit with bootstrap intervals, deviation ranking.
// Deterministic for a given config + seed regardless of thread count.
// Per-cell failures are recorded in the row, never abort the batch.
ExperimentResult run_experiment(const ExperimentConfig& config);

extern const char* const kRecordsCsvHeader;

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void write_records_csv_file(const std::string& path, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& in);
std::vector<ExperimentRecord> read_records_csv_file(const std::string& path);

// Config echo + seed-lineage sidecar next to the records file.
void write_meta_json(const std::string& path, const ExperimentConfig& config);

// Ensemble mean/std of one fitted parameter per (system, observable, n).
struct CurvePoint {
    std::size_t n = 0;
    EnsembleStats mu, sigma, xi;
    std::size_t members = 0;
};

// Aggregation helpers shared by the table/curves/dimension emitters. Rows
// with a failed fit or a nonzero clamp_count are excluded: a clamp means the
// orbit coincided with the center at machine precision, so the fitted
// parameters reflect the clamp constant rather than the dynamics.
std::vector<CurvePoint> aggregate_records(const std::vector<ExperimentRecord>& records,
                                          const std::string& system,
                                          ObservableKind kind);
std::vector<std::string> systems_in(const std::vector<ExperimentRecord>& records);

// Builds the per-n aggregated parameter series for the slope routes; the
// effective series length k is recovered from the stored n*m products.
// Parameters that scale as a power of n are pooled geometrically (mean of
// log10 over members), which cancels per-member proportionality constants in
// the subsequent log-log slope; other parameters are pooled arithmetically.
ParamSeries param_series_from_records(const std::vector<ExperimentRecord>& records,
                                      const std::string& system,
                                      ObservableKind kind);

// Formatted dimension-summary table: rows mu(g2), sigma(g2), sigma(g3) and
// the theoretical value, one column per system present. `table` selects the
// conventional system grouping: '1' = IFS measures, '2' = baker/henon/lozi.
// Missing cells render as blanks with a reason code.
std::string emit_table(const std::vector<ExperimentRecord>& records, char table);

// One CSV per (system, observable, parameter) with columns
// log10_n, mean, std, fit_value, theory_value. Returns the written paths.
std::vector<std::string> emit_curves(const std::vector<ExperimentRecord>& records,
                                     const std::string& out_dir);

// Property suite used by the `selftest` subcommand; prints one line per
// suite, returns 0 iff all pass.
int selftest_run(std::ostream& out);

// CLI entry: subcommands run / table / curves / dimension / selftest.
// Exit codes: 0 success, 1 usage error, 2 runtime failure.
int cli_main(int argc, char** argv);

}  // namespace gevdim
