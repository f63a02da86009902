#include "gevdim/harness.hpp"

#include <array>
#include <atomic>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace gevdim {

namespace {

// Role tags for counter-based seed derivation (see meta sidecar).
constexpr std::uint64_t kRoleCenter = 1;
constexpr std::uint64_t kRoleCell = 2;
constexpr std::uint64_t kRoleBootstrap = 3;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(part);
    return parts;
}

double to_double(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                          "' needs a number, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const unsigned long long u = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                          "' needs a nonnegative integer, got '" + v + "'");
    }
}

std::string format_g9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string sanitize_token(const std::string& s) {
    std::string out;
    for (char ch : s) {
        const bool keep = std::isalnum(static_cast<unsigned char>(ch)) ||
                          ch == '.' || ch == '_' || ch == '-';
        out.push_back(keep ? ch : '-');
    }
    return out;
}

}  // namespace

// --- Config ----------------------------------------------------------------

ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        if (kv.count(key) != 0) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": duplicate key '" + key + "' (first on line " +
                              std::to_string(kv[key].second) + ")");
        }
        kv[key] = {value, line_no};
    }

    static const std::set<std::string> known = {
        "system",   "w",         "ifs_branches", "baker_alpha", "baker_ga",
        "baker_gb", "map_a",     "map_b",        "start",       "observables",
        "alpha",    "C",         "k",            "n_grid",      "ensemble",
        "centers",  "seed",      "burn_in",      "bootstrap_B", "output_dir",
        "threads"};
    for (const auto& [key, vl] : kv) {
        if (known.count(key) == 0) {
            throw ConfigError("config line " + std::to_string(vl.second) +
                              ": unknown key '" + key + "'");
        }
    }

    auto have = [&](const std::string& key) { return kv.count(key) != 0; };
    auto value_of = [&](const std::string& key) { return kv.at(key).first; };
    auto line_of = [&](const std::string& key) { return kv.at(key).second; };

    if (!have("system")) {
        throw ConfigError("config: missing required key 'system'");
    }

    ExperimentConfig config;
    const std::string sysname = value_of("system");
    if (sysname.find(':') != std::string::npos) {
        // Full inline descriptor (as emitted by system_to_string); the
        // per-system parameter keys would be ambiguous next to it.
        for (const char* pk : {"w", "ifs_branches", "baker_alpha", "baker_ga",
                               "baker_gb", "map_a", "map_b"}) {
            if (have(pk)) {
                throw ConfigError("config line " + std::to_string(line_of(pk)) +
                                  ": '" + std::string(pk) +
                                  "' conflicts with the inline system descriptor");
            }
        }
        try {
            config.system = system_from_string(sysname);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("config line " + std::to_string(line_of("system")) +
                              ": " + e.what());
        }
    } else if (sysname == "cantor") {
        CantorIfs s;
        if (have("w")) s.w = to_double(value_of("w"), "w", line_of("w"));
        config.system.variant = s;
    } else if (sysname == "sierpinski") {
        config.system.variant = SierpinskiIfs{};
    } else if (sysname == "weighted") {
        WeightedIfs s;
        if (!have("ifs_branches")) {
            throw ConfigError("config: system 'weighted' needs 'ifs_branches' "
                              "(comma list of a:lambda:w triples)");
        }
        for (const std::string& part : split(value_of("ifs_branches"), ',')) {
            const auto fields = split(trim(part), ':');
            if (fields.size() != 3) {
                throw ConfigError("config line " + std::to_string(line_of("ifs_branches")) +
                                  ": branch '" + part + "' is not a:lambda:w");
            }
            IfsBranch b;
            b.a = to_double(trim(fields[0]), "ifs_branches", line_of("ifs_branches"));
            b.lambda = to_double(trim(fields[1]), "ifs_branches", line_of("ifs_branches"));
            b.w = to_double(trim(fields[2]), "ifs_branches", line_of("ifs_branches"));
            s.branches.push_back(b);
        }
        config.system.variant = s;
    } else if (sysname == "baker") {
        BakerMap s;
        if (have("baker_alpha")) s.alpha = to_double(value_of("baker_alpha"), "baker_alpha", line_of("baker_alpha"));
        if (have("baker_ga")) s.ga = to_double(value_of("baker_ga"), "baker_ga", line_of("baker_ga"));
        if (have("baker_gb")) s.gb = to_double(value_of("baker_gb"), "baker_gb", line_of("baker_gb"));
        config.system.variant = s;
    } else if (sysname == "henon" || sysname == "lozi") {
        double a = sysname == "henon" ? 1.4 : 1.7;
        double b = sysname == "henon" ? 0.3 : 0.5;
        if (have("map_a")) a = to_double(value_of("map_a"), "map_a", line_of("map_a"));
        if (have("map_b")) b = to_double(value_of("map_b"), "map_b", line_of("map_b"));
        if (sysname == "henon") {
            config.system.variant = HenonMap{a, b};
        } else {
            config.system.variant = LoziMap{a, b};
        }
    } else {
        throw ConfigError("config line " + std::to_string(line_of("system")) +
                          ": unknown system '" + sysname + "'");
    }
    try {
        gevdim::validate(config.system);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: invalid system parameters: ") + e.what());
    }

    if (have("observables")) {
        config.observables.clear();
        for (const std::string& part : split(value_of("observables"), ',')) {
            try {
                config.observables.push_back({observable_from_string(trim(part))});
            } catch (const std::invalid_argument& e) {
                throw ConfigError("config line " + std::to_string(line_of("observables")) +
                                  ": " + e.what());
            }
        }
        if (config.observables.empty()) {
            throw ConfigError("config: 'observables' must not be empty");
        }
    } else {
        config.observables = {{ObservableKind::G1}, {ObservableKind::G2}, {ObservableKind::G3}};
    }

    if (have("alpha")) config.alpha = to_double(value_of("alpha"), "alpha", line_of("alpha"));
    if (!(config.alpha > 0.0)) throw ConfigError("config: 'alpha' must be positive");
    if (have("C")) config.C = to_double(value_of("C"), "C", line_of("C"));
    if (have("k")) config.k = to_u64(value_of("k"), "k", line_of("k"));
    if (config.k < 2) throw ConfigError("config: 'k' must be at least 2");

    if (have("n_grid")) {
        config.n_grid.clear();
        for (const std::string& part : split(value_of("n_grid"), ',')) {
            config.n_grid.push_back(to_u64(trim(part), "n_grid", line_of("n_grid")));
        }
    }
    if (config.n_grid.empty()) throw ConfigError("config: 'n_grid' must not be empty");
    {
        std::set<std::size_t> seen;
        for (std::size_t n : config.n_grid) {
            if (n < 1) throw ConfigError("config: n_grid entries must be >= 1");
            if (config.k / n < 2) {
                throw ConfigError("config: n_grid entry " + std::to_string(n) +
                                  " leaves blocks of size < 2 (k = " +
                                  std::to_string(config.k) + ")");
            }
            if (!seen.insert(n).second) {
                throw ConfigError("config: duplicate n_grid entry " + std::to_string(n));
            }
        }
    }

    if (have("ensemble")) config.ensemble = static_cast<int>(to_u64(value_of("ensemble"), "ensemble", line_of("ensemble")));
    if (have("centers")) config.centers = static_cast<int>(to_u64(value_of("centers"), "centers", line_of("centers")));
    if (config.ensemble < 1 || config.centers < 1) {
        throw ConfigError("config: 'ensemble' and 'centers' must be >= 1");
    }
    if (have("seed")) config.seed = to_u64(value_of("seed"), "seed", line_of("seed"));
    if (have("burn_in")) config.burn_in = to_u64(value_of("burn_in"), "burn_in", line_of("burn_in"));
    if (have("bootstrap_B")) config.bootstrap_B = static_cast<int>(to_u64(value_of("bootstrap_B"), "bootstrap_B", line_of("bootstrap_B")));
    if (config.bootstrap_B < 100) throw ConfigError("config: 'bootstrap_B' must be >= 100");
    if (have("output_dir")) config.output_dir = value_of("output_dir");
    if (have("threads")) config.threads = static_cast<int>(to_u64(value_of("threads"), "threads", line_of("threads")));
    if (config.threads < 1) throw ConfigError("config: 'threads' must be >= 1");

    if (have("start")) {
        const auto parts = split(value_of("start"), ',');
        if (parts.empty() || parts.size() > 2) {
            throw ConfigError("config line " + std::to_string(line_of("start")) +
                              ": 'start' needs 1 or 2 comma-separated coordinates");
        }
        config.start_set = true;
        config.start.x = to_double(trim(parts[0]), "start", line_of("start"));
        if (parts.size() == 2) {
            config.start.y = to_double(trim(parts[1]), "start", line_of("start"));
            config.start.dim = 2;
        } else {
            config.start.dim = 1;
        }
        if (config.start.dim != ambient_dim(config.system)) {
            throw ConfigError("config: 'start' dimension does not match the system");
        }
    }

    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// --- Runner ----------------------------------------------------------------

namespace {

Point draw_series_start(const SystemSpec& system, RngStream& rng,
                        const ExperimentConfig& config) {
    if (!config.start_set) return jittered_start(system, rng);
    // Explicit basin override: jitter deterministic maps around it, use it
    // exactly for the IFS variants.
    if (ambient_dim(system) == 1) return config.start;
    const bool deterministic = std::holds_alternative<BakerMap>(system.variant) ||
                               std::holds_alternative<HenonMap>(system.variant) ||
                               std::holds_alternative<LoziMap>(system.variant);
    if (!deterministic) return config.start;
    return point2(config.start.x + 0.1 * (rng.unit() - 0.5),
                  config.start.y + 0.1 * (rng.unit() - 0.5));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    gevdim::validate(config.system);
    const std::size_t burn =
        config.burn_in > 0 ? config.burn_in : default_burn_in(config.system);
    const std::string system_str = system_to_string(config.system);

    // Centers first: one derived stream per center index.
    std::vector<Point> centers(static_cast<std::size_t>(config.centers));
    for (int c = 0; c < config.centers; ++c) {
        RngStream center_rng =
            derive_stream(config.seed, kRoleCenter, static_cast<std::uint64_t>(c));
        if (config.start_set) {
            Point base = draw_series_start(config.system, center_rng, config);
            Point p = base;
            for (std::size_t i = 0; i < burn; ++i) {
                p = step(config.system, p, center_rng);
            }
            centers[static_cast<std::size_t>(c)] = p;
        } else {
            centers[static_cast<std::size_t>(c)] =
                select_center(config.system, center_rng, burn);
        }
    }

    struct Cell {
        int center = 0;
        int realization = 0;
        std::size_t n = 0;
    };
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(config.centers) *
                  static_cast<std::size_t>(config.ensemble) * config.n_grid.size());
    for (int c = 0; c < config.centers; ++c) {
        for (int r = 0; r < config.ensemble; ++r) {
            for (std::size_t n : config.n_grid) {
                cells.push_back({c, r, n});
            }
        }
    }

    const std::size_t obs_count = config.observables.size();
    std::vector<std::vector<ExperimentRecord>> slots(cells.size());

    auto run_cell = [&](std::size_t cell_idx) {
        const Cell& cell = cells[cell_idx];
        const std::uint64_t cell_key_cr =
            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cell.center)) << 32) |
            static_cast<std::uint64_t>(static_cast<std::uint32_t>(cell.realization));
        const std::uint64_t cell_seed =
            derive_seed(config.seed, kRoleCell, cell_key_cr, cell.n);
        const Point& zeta = centers[static_cast<std::size_t>(cell.center)];

        std::vector<ExperimentRecord>& rows = slots[cell_idx];
        rows.resize(obs_count);
        const double qnan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t oi = 0; oi < obs_count; ++oi) {
            ExperimentRecord& rec = rows[oi];
            rec.system = system_str;
            rec.observable = config.observables[oi].kind;
            rec.alpha = config.alpha;
            rec.C = config.C;
            rec.center_idx = cell.center;
            rec.realization_idx = cell.realization;
            rec.n = cell.n;
            rec.m = config.k / cell.n;
            rec.cell_seed = cell_seed;
            rec.params = {qnan, qnan, qnan};
            rec.mu_ci = rec.sigma_ci = rec.xi_ci = {qnan, qnan};
            rec.ks_D = qnan;
        }

        DistanceBlockMins mins;
        try {
            RngStream rng(cell_seed);
            Point start = draw_series_start(config.system, rng, config);
            for (std::size_t i = 0; i < burn; ++i) {
                start = std::visit(
                    [&](const auto& sys) { return step_one(sys, start, rng); },
                    config.system.variant);
                if (!std::isfinite(start.x) || !std::isfinite(start.y)) {
                    throw OrbitDivergenceError("burn-in orbit diverged", i);
                }
            }
            mins = stream_block_min_distance(config.system, zeta, start, config.k,
                                             cell.n, rng);
        } catch (const OrbitDivergenceError&) {
            for (auto& rec : rows) {
                rec.failed = true;
                rec.ks_winner = "failed";
            }
            return;
        }

        for (std::size_t oi = 0; oi < obs_count; ++oi) {
            ExperimentRecord& rec = rows[oi];
            ObservableSpec obs;
            obs.kind = config.observables[oi].kind;
            obs.alpha = config.alpha;
            obs.C = config.C;
            obs.center = zeta;
            const MaximaSample maxima = maxima_from_block_mins(obs, mins);
            rec.clamp_count = mins.clamp_count;
            try {
                RngStream boot_rng = derive_stream(cell_seed, kRoleBootstrap, oi);
                const FitResult fit =
                    bootstrap_ci(maxima.maxima, config.bootstrap_B, 0.95, boot_rng);
                if (fit.degenerate) {
                    rec.failed = true;
                    rec.ks_winner = "failed";
                    continue;
                }
                rec.params = fit.params;
                rec.mu_ci = fit.mu_ci;
                rec.sigma_ci = fit.sigma_ci;
                rec.xi_ci = fit.xi_ci;
                const auto ranking = model_selection(maxima.maxima);
                rec.ks_winner = ranking.front().model_name;
                rec.ks_D = ranking.front().statistic;
            } catch (const std::exception&) {
                rec.failed = true;
                rec.ks_winner = "failed";
            }
        }
    };

    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) break;
                    run_cell(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    ExperimentResult result;
    result.config = config;
    result.records.reserve(cells.size() * obs_count);
    for (const auto& rows : slots) {
        for (const auto& rec : rows) result.records.push_back(rec);
    }
    return result;
}

// --- Persistence -----------------------------------------------------------

const char* const kRecordsCsvHeader =
    "system,observable,alpha,C,center_idx,realization_idx,n,m,mu,sigma,xi,"
    "mu_lo,mu_hi,sigma_lo,sigma_hi,xi_lo,xi_hi,ks_winner,ks_D,clamp_count,cell_seed";

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
    out << kRecordsCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.system << ',' << to_string(r.observable) << ','
            << format_g9(r.alpha) << ',' << format_g9(r.C) << ',' << r.center_idx
            << ',' << r.realization_idx << ',' << r.n << ',' << r.m << ','
            << format_g9(r.params.mu) << ',' << format_g9(r.params.sigma) << ','
            << format_g9(r.params.xi) << ',' << format_g9(r.mu_ci.lo) << ','
            << format_g9(r.mu_ci.hi) << ',' << format_g9(r.sigma_ci.lo) << ','
            << format_g9(r.sigma_ci.hi) << ',' << format_g9(r.xi_ci.lo) << ','
            << format_g9(r.xi_ci.hi) << ',' << r.ks_winner << ','
            << format_g9(r.ks_D) << ',' << r.clamp_count << ',' << r.cell_seed
            << '\n';
    }
}

void write_records_csv_file(const std::string& path,
                            const std::vector<ExperimentRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_records_csv(out, records);
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("records file is empty");
    }
    if (trim(line) != kRecordsCsvHeader) {
        throw std::runtime_error("records file has an unexpected header");
    }
    std::vector<ExperimentRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 21) {
            throw std::runtime_error("records line " + std::to_string(line_no) +
                                     ": expected 21 fields, got " +
                                     std::to_string(f.size()));
        }
        ExperimentRecord r;
        r.system = f[0];
        r.observable = observable_from_string(f[1]);
        r.alpha = std::strtod(f[2].c_str(), nullptr);
        r.C = std::strtod(f[3].c_str(), nullptr);
        r.center_idx = std::atoi(f[4].c_str());
        r.realization_idx = std::atoi(f[5].c_str());
        r.n = std::strtoull(f[6].c_str(), nullptr, 10);
        r.m = std::strtoull(f[7].c_str(), nullptr, 10);
        r.params.mu = std::strtod(f[8].c_str(), nullptr);
        r.params.sigma = std::strtod(f[9].c_str(), nullptr);
        r.params.xi = std::strtod(f[10].c_str(), nullptr);
        r.mu_ci = {std::strtod(f[11].c_str(), nullptr), std::strtod(f[12].c_str(), nullptr)};
        r.sigma_ci = {std::strtod(f[13].c_str(), nullptr), std::strtod(f[14].c_str(), nullptr)};
        r.xi_ci = {std::strtod(f[15].c_str(), nullptr), std::strtod(f[16].c_str(), nullptr)};
        r.ks_winner = f[17];
        r.ks_D = std::strtod(f[18].c_str(), nullptr);
        r.clamp_count = std::atoll(f[19].c_str());
        r.cell_seed = std::strtoull(f[20].c_str(), nullptr, 10);
        r.failed = (r.ks_winner == "failed");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<ExperimentRecord> read_records_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open records file '" + path + "'");
    return read_records_csv(in);
}

void write_meta_json(const std::string& path, const ExperimentConfig& config) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["tool"] = "gevdim";
    nlohmann::json c;
    c["system"] = system_to_string(config.system);
    std::vector<std::string> obs;
    for (const auto& o : config.observables) obs.emplace_back(to_string(o.kind));
    c["observables"] = obs;
    c["alpha"] = config.alpha;
    c["C"] = config.C;
    c["k"] = config.k;
    c["n_grid"] = config.n_grid;
    c["ensemble"] = config.ensemble;
    c["centers"] = config.centers;
    c["seed"] = config.seed;
    c["burn_in_effective"] =
        config.burn_in > 0 ? config.burn_in : default_burn_in(config.system);
    c["bootstrap_B"] = config.bootstrap_B;
    c["output_dir"] = config.output_dir;
    c["threads"] = config.threads;
    if (config.start_set) {
        c["start"] = config.start.dim == 1
                         ? nlohmann::json::array({config.start.x})
                         : nlohmann::json::array({config.start.x, config.start.y});
    }
    j["config"] = c;
    j["seed_lineage"] = {
        {"root_seed", config.seed},
        {"scheme",
         "child = splitmix64 chain absorbing (role, key1, key2); roles: "
         "1=center stream (key1=center_idx), 2=cell stream "
         "(key1=center_idx<<32|realization_idx, key2=n), 3=bootstrap stream "
         "derived from the cell seed (key1=observable_idx)"}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

// --- Aggregation -----------------------------------------------------------

std::vector<std::string> systems_in(const std::vector<ExperimentRecord>& records) {
    std::vector<std::string> out;
    for (const auto& r : records) {
        if (std::find(out.begin(), out.end(), r.system) == out.end()) {
            out.push_back(r.system);
        }
    }
    return out;
}

namespace {

// Rows excluded from ensemble aggregation: failed fits, and rows whose orbit
// hit the distance clamp. A clamp event means an orbit point coincided with
// the center at double precision; the transformed value is then an artifact
// of the clamp constant (for the power observables it is off by dozens of
// orders of magnitude) rather than a property of the dynamics. The rows stay
// in the records file with their clamp_count so the events remain visible.
bool usable_for_aggregation(const ExperimentRecord& r) {
    return !r.failed && r.clamp_count == 0;
}

std::map<std::size_t, std::array<std::vector<double>, 3>> group_by_n(
    const std::vector<ExperimentRecord>& records, const std::string& system,
    ObservableKind kind) {
    std::map<std::size_t, std::array<std::vector<double>, 3>> by_n;
    for (const auto& r : records) {
        if (r.system != system || r.observable != kind) continue;
        if (!usable_for_aggregation(r)) continue;
        auto& v = by_n[r.n];
        v[0].push_back(r.params.mu);
        v[1].push_back(r.params.sigma);
        v[2].push_back(r.params.xi);
    }
    return by_n;
}

// Ensemble location of one fitted parameter. Parameters whose predicted law
// is a power of n are averaged geometrically (mean of log10): this cancels
// the per-center proportionality constant exactly in the later log-log slope,
// whereas an arithmetic mean lets the heavy-tailed prefactor distribution
// leak into the slope. Everything else is averaged arithmetically.
double aggregate_location(const std::vector<double>& values, bool geometric) {
    if (!geometric) return aggregate_ensemble(values).mean;
    double acc = 0.0;
    std::size_t used = 0;
    for (double v : values) {
        if (v > 0.0) {
            acc += std::log10(v);
            ++used;
        }
    }
    if (used == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::pow(10.0, acc / static_cast<double>(used));
}

}  // namespace

std::vector<CurvePoint> aggregate_records(const std::vector<ExperimentRecord>& records,
                                          const std::string& system,
                                          ObservableKind kind) {
    std::vector<CurvePoint> points;
    for (const auto& [n, v] : group_by_n(records, system, kind)) {
        CurvePoint p;
        p.n = n;
        p.mu = aggregate_ensemble(v[0]);
        p.sigma = aggregate_ensemble(v[1]);
        p.xi = aggregate_ensemble(v[2]);
        p.members = v[0].size();
        points.push_back(p);
    }
    return points;
}

ParamSeries param_series_from_records(const std::vector<ExperimentRecord>& records,
                                      const std::string& system,
                                      ObservableKind kind) {
    ParamSeries series;
    series.kind = kind;
    series.system = system;
    std::size_t k = 0;
    bool have_meta = false;
    for (const auto& r : records) {
        if (r.system != system || r.observable != kind) continue;
        k = std::max(k, r.n * r.m);
        if (!have_meta) {
            series.alpha = r.alpha;
            series.C = r.C;
            have_meta = true;
        }
    }
    series.k = k;
    const bool mu_geometric = kind == ObservableKind::G2;
    const bool sigma_geometric = kind != ObservableKind::G1;
    for (const auto& [n, v] : group_by_n(records, system, kind)) {
        ParamRow row;
        row.n = n;
        row.fit.params.mu = aggregate_location(v[0], mu_geometric);
        row.fit.params.sigma = aggregate_location(v[1], sigma_geometric);
        row.fit.params.xi = aggregate_ensemble(v[2]).mean;
        row.fit.n_boot = static_cast<int>(v[0].size());
        series.rows.push_back(row);
    }
    return series;
}

// --- Emitters --------------------------------------------------------------

namespace {

struct TableCell {
    bool present = false;
    double delta = 0.0;
    double unc = 0.0;
    std::string reason = "missing";
};

TableCell table_cell(const std::vector<ExperimentRecord>& records,
                     const std::string& system, ObservableKind kind,
                     SlopeRoute route) {
    TableCell cell;
    const ParamSeries series = param_series_from_records(records, system, kind);
    if (series.rows.empty()) {
        cell.reason = "missing";
        return cell;
    }
    try {
        const DimensionEstimate est = delta_from_slope(series, route);
        cell.present = true;
        cell.delta = est.delta;
        cell.unc = est.uncertainty;
    } catch (const std::exception&) {
        cell.reason = "gate";  // not enough grid points with n, m >= 1000
    }
    return cell;
}

}  // namespace

std::string emit_table(const std::vector<ExperimentRecord>& records, char table) {
    static const std::vector<std::string> group1 = {"cantor", "sierpinski", "weighted"};
    static const std::vector<std::string> group2 = {"baker", "henon", "lozi"};
    const auto& group = table == '2' ? group2 : group1;

    std::vector<std::string> systems;
    for (const std::string& full : systems_in(records)) {
        const std::string name = full.substr(0, full.find(':'));
        if (std::find(group.begin(), group.end(), name) != group.end()) {
            systems.push_back(full);
        }
    }

    std::ostringstream out;
    out << "dimension estimates from parameter scaling (alpha-scaled slope routes)\n";
    if (systems.empty()) {
        out << "(no matching records)\n";
        return out.str();
    }
    const struct {
        const char* label;
        ObservableKind kind;
        SlopeRoute route;
    } rows[] = {
        {"mu(g2)", ObservableKind::G2, SlopeRoute::MuG2},
        {"sigma(g2)", ObservableKind::G2, SlopeRoute::SigmaG2},
        {"sigma(g3)", ObservableKind::G3, SlopeRoute::SigmaG3},
    };

    out << std::left;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-12s", "route");
    out << buf;
    for (const auto& s : systems) {
        std::snprintf(buf, sizeof buf, " %-22s", s.substr(0, 22).c_str());
        out << buf;
    }
    out << '\n';
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%-12s", row.label);
        out << buf;
        for (const auto& s : systems) {
            const TableCell cell = table_cell(records, s, row.kind, row.route);
            if (cell.present) {
                std::snprintf(buf, sizeof buf, " %-22s",
                              (format_g9(cell.delta) + " +- " + format_g9(cell.unc)).c_str());
            } else {
                std::snprintf(buf, sizeof buf, " -(%-19s", (cell.reason + ")").c_str());
            }
            out << buf;
        }
        out << '\n';
    }
    std::snprintf(buf, sizeof buf, "%-12s", "theoretical");
    out << buf;
    for (const auto& s : systems) {
        double th = std::numeric_limits<double>::quiet_NaN();
        try {
            th = theoretical_dimension(system_from_string(s));
        } catch (const std::exception&) {
        }
        std::snprintf(buf, sizeof buf, " %-22s", format_g9(th).c_str());
        out << buf;
    }
    out << '\n';
    return out.str();
}

namespace {

enum class CurveParam { Mu, Sigma, Xi };

const char* to_string(CurveParam p) {
    switch (p) {
        case CurveParam::Mu: return "mu";
        case CurveParam::Sigma: return "sigma";
        case CurveParam::Xi: return "xi";
    }
    return "?";
}

}  // namespace

std::vector<std::string> emit_curves(const std::vector<ExperimentRecord>& records,
                                     const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> written;

    for (const std::string& system : systems_in(records)) {
        double theory_delta = std::numeric_limits<double>::quiet_NaN();
        try {
            theory_delta = theoretical_dimension(system_from_string(system));
        } catch (const std::exception&) {
        }
        for (ObservableKind kind :
             {ObservableKind::G1, ObservableKind::G2, ObservableKind::G3}) {
            const auto points = aggregate_records(records, system, kind);
            if (points.empty()) continue;
            const ParamSeries series = param_series_from_records(records, system, kind);
            const double alpha = series.alpha;
            const double C = series.C;
            const double k_eff = static_cast<double>(series.k);

            for (CurveParam param : {CurveParam::Mu, CurveParam::Sigma, CurveParam::Xi}) {
                std::vector<double> ns, means, stds, locs;
                for (std::size_t i = 0; i < points.size(); ++i) {
                    const auto& p = points[i];
                    ns.push_back(static_cast<double>(p.n));
                    const EnsembleStats& st = param == CurveParam::Mu ? p.mu
                                              : param == CurveParam::Sigma ? p.sigma
                                                                           : p.xi;
                    means.push_back(st.mean);
                    stds.push_back(st.stddev);
                    // Ensemble location used for the fit overlay: same
                    // aggregation as the dimension estimates (geometric for
                    // power-law parameters), so the drawn fit matches the
                    // reported slopes. The rows are grouped identically, so
                    // indices align with `points`.
                    const GevParams& loc = series.rows[i].fit.params;
                    locs.push_back(param == CurveParam::Mu ? loc.mu
                                   : param == CurveParam::Sigma ? loc.sigma
                                                                : loc.xi);
                }

                // Linear-fit overlay in the curve's natural coordinates:
                // log-log for the power-law parameters, parameter vs log n
                // otherwise.
                const bool loglog =
                    (kind == ObservableKind::G2 && param != CurveParam::Xi) ||
                    (kind == ObservableKind::G3 && param == CurveParam::Sigma);
                std::vector<double> fit_values;
                if (ns.size() >= 3) {
                    std::vector<double> xs, ys;
                    bool ok = true;
                    for (std::size_t i = 0; i < ns.size(); ++i) {
                        if (kind == ObservableKind::G1 && param == CurveParam::Mu) {
                            xs.push_back(std::log(ns[i]));
                            ys.push_back(locs[i]);
                        } else if (loglog) {
                            if (!(locs[i] > 0.0)) {
                                ok = false;
                                break;
                            }
                            xs.push_back(std::log10(ns[i]));
                            ys.push_back(std::log10(locs[i]));
                        } else {
                            xs.push_back(std::log10(ns[i]));
                            ys.push_back(locs[i]);
                        }
                    }
                    if (ok) {
                        try {
                            const ScalingFit fit = linear_fit(xs, ys);
                            for (std::size_t i = 0; i < ns.size(); ++i) {
                                const double y = fit.intercept + fit.slope * xs[i];
                                fit_values.push_back(loglog ? std::pow(10.0, y) : y);
                            }
                        } catch (const std::exception&) {
                        }
                    }
                }

                // Theoretical overlay; power laws have a free prefactor and
                // are anchored at the first grid point.
                std::vector<double> theory_values;
                if (std::isfinite(theory_delta)) {
                    const TheoreticalPrediction pred =
                        theoretical_prediction(kind, theory_delta, alpha, C);
                    const ScalingLaw& law =
                        param == CurveParam::Sigma ? pred.sigma_law : pred.mu_law;
                    for (std::size_t i = 0; i < ns.size(); ++i) {
                        double v = std::numeric_limits<double>::quiet_NaN();
                        if (param == CurveParam::Xi) {
                            v = pred.xi_pred;
                        } else if (kind == ObservableKind::G1) {
                            v = param == CurveParam::Mu
                                    ? (1.0 / theory_delta) * std::log(k_eff / ns[i])
                                    : 1.0 / theory_delta;
                        } else if (law.kind == ScalingLaw::Constant) {
                            v = law.value;
                        } else if (law.kind == ScalingLaw::PowerExponent) {
                            v = locs[0] * std::pow(ns[i] / ns[0], law.value);
                        }
                        theory_values.push_back(v);
                    }
                }

                const std::string path =
                    (fs::path(out_dir) /
                     ("curves_" + sanitize_token(system) + "_" +
                      std::string(gevdim::to_string(kind)) + "_" +
                      std::string(to_string(param)) + ".csv"))
                        .string();
                std::ofstream out(path);
                if (!out) throw std::runtime_error("cannot write '" + path + "'");
                out << "log10_n,mean,std,fit_value,theory_value\n";
                for (std::size_t i = 0; i < ns.size(); ++i) {
                    out << format_g9(std::log10(ns[i])) << ',' << format_g9(means[i])
                        << ',' << format_g9(stds[i]) << ',';
                    if (!fit_values.empty()) out << format_g9(fit_values[i]);
                    out << ',';
                    if (!theory_values.empty()) out << format_g9(theory_values[i]);
                    out << '\n';
                }
                written.push_back(path);
            }
        }
    }
    return written;
}

}  // namespace gevdim
