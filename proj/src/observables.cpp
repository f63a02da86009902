#include "gevdim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace gevdim {

const char* to_string(ObservableKind kind) {
    switch (kind) {
        case ObservableKind::G1: return "g1";
        case ObservableKind::G2: return "g2";
        case ObservableKind::G3: return "g3";
    }
    return "?";
}

ObservableKind observable_from_string(const std::string& text) {
    if (text == "g1") return ObservableKind::G1;
    if (text == "g2") return ObservableKind::G2;
    if (text == "g3") return ObservableKind::G3;
    throw std::invalid_argument("unknown observable '" + text + "' (expected g1, g2 or g3)");
}

double transform_distance(const ObservableSpec& obs, double dist,
                          long long* clamp_count) {
    if (dist < kDistanceClamp) {
        dist = kDistanceClamp;
        if (clamp_count != nullptr) ++*clamp_count;
    }
    switch (obs.kind) {
        case ObservableKind::G1: return -std::log(dist);
        case ObservableKind::G2: return std::pow(dist, -1.0 / obs.alpha);
        case ObservableKind::G3: return obs.C - std::pow(dist, 1.0 / obs.alpha);
    }
    return 0.0;
}

double evaluate(const ObservableSpec& obs, const Point& p) {
    return transform_distance(obs, distance(p, obs.center));
}

namespace {

// Monomorphized streaming kernel: one orbit pass, per-block distance minima.
template <class Sys>
void stream_mins(const Sys& sys, const Point& center, Point p, std::size_t m,
                 std::size_t n, RngStream& rng, std::vector<double>& mins,
                 long long& clamps) {
    const bool one_d = (center.dim == 1);
    for (std::size_t block = 0; block < n; ++block) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            double d;
            if (one_d) {
                d = std::fabs(p.x - center.x);
            } else {
                const double dx = p.x - center.x, dy = p.y - center.y;
                d = std::sqrt(dx * dx + dy * dy);
            }
            if (d < kDistanceClamp) ++clamps;
            if (d < best) best = d;
            p = step_one(sys, p, rng);
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                throw OrbitDivergenceError("orbit diverged (non-finite state)",
                                           block * m + i + 1);
            }
        }
        mins[block] = best;
    }
}

}  // namespace

ObservableSeries series(const SystemSpec& system, const ObservableSpec& obs,
                        const Point& start, std::size_t k, RngStream& rng) {
    if (k < 1) throw std::invalid_argument("series length must be >= 1");
    ObservableSeries out;
    out.values.reserve(k);
    Point p = start;
    out.values.push_back(
        transform_distance(obs, distance(p, obs.center), &out.clamp_count));
    for (std::size_t i = 1; i < k; ++i) {
        p = std::visit([&](const auto& sys) { return step_one(sys, p, rng); },
                       system.variant);
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw OrbitDivergenceError("orbit diverged (non-finite state)", i);
        }
        out.values.push_back(
            transform_distance(obs, distance(p, obs.center), &out.clamp_count));
    }
    return out;
}

MaximaSample block_maxima(const std::vector<double>& values, std::size_t n) {
    if (n < 1 || n > values.size()) {
        throw std::invalid_argument("invalid block partition: need 1 <= n <= series length");
    }
    const std::size_t m = values.size() / n;
    MaximaSample out;
    out.block_size = m;
    out.n = n;
    out.maxima.resize(n);
    for (std::size_t block = 0; block < n; ++block) {
        double best = values[block * m];
        for (std::size_t i = 1; i < m; ++i) {
            best = std::max(best, values[block * m + i]);
        }
        out.maxima[block] = best;
    }
    return out;
}

DistanceBlockMins stream_block_min_distance(const SystemSpec& system,
                                            const Point& center,
                                            const Point& start, std::size_t k,
                                            std::size_t n, RngStream& rng) {
    if (n < 1 || n > k) {
        throw std::invalid_argument("invalid block partition: need 1 <= n <= k");
    }
    DistanceBlockMins out;
    out.block_size = k / n;
    out.mins.resize(n);
    std::visit(
        [&](const auto& sys) {
            stream_mins(sys, center, start, out.block_size, n, rng, out.mins,
                        out.clamp_count);
        },
        system.variant);
    return out;
}

std::vector<DistanceBlockMins> stream_block_min_distance_nested(
    const SystemSpec& system, const Point& center, const Point& start,
    std::size_t k, const std::vector<std::size_t>& n_grid, RngStream& rng) {
    if (n_grid.empty()) throw std::invalid_argument("empty block-count grid");
    for (std::size_t i = 0; i + 1 < n_grid.size(); ++i) {
        if (n_grid[i] >= n_grid[i + 1]) {
            throw std::invalid_argument("block-count grid must be strictly increasing");
        }
    }
    const std::size_t n_max = n_grid.back();
    if (n_max < 1 || n_max > k || k % n_max != 0) {
        throw std::invalid_argument("series length must be a multiple of the largest block count");
    }
    for (std::size_t n : n_grid) {
        if (n_max % n != 0) {
            throw std::invalid_argument("block counts must nest: every entry must divide the largest");
        }
    }

    const DistanceBlockMins fine =
        stream_block_min_distance(system, center, start, k, n_max, rng);

    std::vector<DistanceBlockMins> out;
    out.reserve(n_grid.size());
    for (std::size_t n : n_grid) {
        if (n == n_max) {
            out.push_back(fine);
            continue;
        }
        const std::size_t group = n_max / n;
        DistanceBlockMins coarse;
        coarse.block_size = k / n;
        coarse.clamp_count = fine.clamp_count;
        coarse.mins.resize(n);
        for (std::size_t b = 0; b < n; ++b) {
            double best = fine.mins[b * group];
            for (std::size_t j = 1; j < group; ++j) {
                best = std::min(best, fine.mins[b * group + j]);
            }
            coarse.mins[b] = best;
        }
        out.push_back(std::move(coarse));
    }
    return out;
}

MaximaSample maxima_from_block_mins(const ObservableSpec& obs,
                                    const DistanceBlockMins& mins) {
    MaximaSample out;
    out.block_size = mins.block_size;
    out.n = mins.mins.size();
    out.maxima.resize(out.n);
    for (std::size_t i = 0; i < out.n; ++i) {
        // The observable is decreasing in distance, so the block maximum is
        // the transform of the block's minimum distance. Clamps were already
        // counted during streaming.
        out.maxima[i] = transform_distance(obs, mins.mins[i]);
    }
    return out;
}

MaximaSample stream_block_maxima(const SystemSpec& system,
                                 const ObservableSpec& obs, const Point& start,
                                 std::size_t k, std::size_t n, RngStream& rng,
                                 long long* clamp_count) {
    DistanceBlockMins mins =
        stream_block_min_distance(system, obs.center, start, k, n, rng);
    if (clamp_count != nullptr) *clamp_count += mins.clamp_count;
    return maxima_from_block_mins(obs, mins);
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return 0.0;
    return F[static_cast<std::size_t>(it - xs.begin()) - 1];
}

EmpiricalCdf empirical_cdf(std::vector<double> sample) {
    if (sample.empty()) throw std::invalid_argument("empirical cdf of empty sample");
    std::sort(sample.begin(), sample.end());
    EmpiricalCdf cdf;
    const double N = static_cast<double>(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (i + 1 < sample.size() && sample[i + 1] == sample[i]) continue;
        cdf.xs.push_back(sample[i]);
        cdf.F.push_back(static_cast<double>(i + 1) / N);
    }
    return cdf;
}

void write_cdf_csv(std::ostream& out, const EmpiricalCdf& cdf) {
    out << "x,F\n";
    char buf[64];
    for (std::size_t i = 0; i < cdf.xs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", cdf.xs[i], cdf.F[i]);
        out << buf;
    }
}

}  // namespace gevdim
