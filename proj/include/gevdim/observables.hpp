#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gevdim/maps.hpp"

namespace gevdim {

enum class ObservableKind { G1, G2, G3 };

const char* to_string(ObservableKind kind);
ObservableKind observable_from_string(const std::string& text);

// g1 = -log d, g2 = d^(-1/alpha), g3 = C - d^(1/alpha), with d the distance
// of the orbit point to the center. All three are decreasing in d.
struct ObservableSpec {
    ObservableKind kind = ObservableKind::G1;
    double alpha = 4.0;  // used by G2/G3
    double C = 10.0;     // used by G3
    Point center;
};

struct ObservableSeries {
    std::vector<double> values;
    long long clamp_count = 0;
};

struct MaximaSample {
    std::vector<double> maxima;
    std::size_t block_size = 0;
    std::size_t n = 0;
};

// Distances below this are clamped (and counted) before the transform, so a
// direct hit on the center cannot produce an infinity.
inline constexpr double kDistanceClamp = 1e-300;

// Observable transform of a raw distance. Increments *clamp_count when the
// distance needed clamping.
double transform_distance(const ObservableSpec& obs, double dist,
                          long long* clamp_count = nullptr);

double evaluate(const ObservableSpec& obs, const Point& p);

// Materialized series of k observable values along one orbit starting at
// `start` (the start itself is the first sample point).
ObservableSeries series(const SystemSpec& system, const ObservableSpec& obs,
                        const Point& start, std::size_t k, RngStream& rng);

// Non-overlapping block maxima of `values`, n blocks of size len/n; trailing
// remainder dropped. n < 1 or n > len is an invalid partition.
MaximaSample block_maxima(const std::vector<double>& values, std::size_t n);

// Per-block minimum distance to `center` along one orbit, computed in a
// single streaming pass (the k observable values are never stored). Because
// every observable is decreasing in distance, each block's observable maximum
// is the transform of that block's distance minimum.
struct DistanceBlockMins {
    std::vector<double> mins;
    std::size_t block_size = 0;
    long long clamp_count = 0;  // orbit points with distance below the clamp
};

DistanceBlockMins stream_block_min_distance(const SystemSpec& system,
                                            const Point& center,
                                            const Point& start, std::size_t k,
                                            std::size_t n, RngStream& rng);

MaximaSample maxima_from_block_mins(const ObservableSpec& obs,
                                    const DistanceBlockMins& mins);

// Block-min distances for a whole grid of block counts from ONE orbit: the
// series is streamed once at the finest partition and coarser partitions are
// obtained by grouping consecutive block minima. Requires n_grid strictly
// increasing with every entry dividing the largest and k divisible by the
// largest, so the partitions nest exactly. Returns one entry per n, in grid
// order.
std::vector<DistanceBlockMins> stream_block_min_distance_nested(
    const SystemSpec& system, const Point& center, const Point& start,
    std::size_t k, const std::vector<std::size_t>& n_grid, RngStream& rng);

// Streaming equivalent of series + block_maxima on the same orbit.
MaximaSample stream_block_maxima(const SystemSpec& system,
                                 const ObservableSpec& obs, const Point& start,
                                 std::size_t k, std::size_t n, RngStream& rng,
                                 long long* clamp_count = nullptr);

// Right-continuous empirical cdf: F(x) = fraction of sample <= x.
struct EmpiricalCdf {
    std::vector<double> xs;  // sorted unique support points
    std::vector<double> F;   // cumulative fraction at each support point
    double operator()(double x) const;
};

EmpiricalCdf empirical_cdf(std::vector<double> sample);

// Two-column CSV (x, F) for external plotting.
void write_cdf_csv(std::ostream& out, const EmpiricalCdf& cdf);

}  // namespace gevdim
