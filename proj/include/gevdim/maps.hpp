#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gevdim/rng.hpp"

namespace gevdim {

// Ambient-space point, 1D or 2D. y is ignored when dim == 1.
struct Point {
    double x = 0.0;
    double y = 0.0;
    int dim = 1;
};

inline Point point1(double x) { return Point{x, 0.0, 1}; }
inline Point point2(double x, double y) { return Point{x, y, 2}; }

// Absolute difference in 1D, Euclidean distance in 2D.
double distance(const Point& a, const Point& b);

// --- The six systems -------------------------------------------------------

// Random iteration of x -> x/3 (probability w) and x -> (x+2)/3, whose
// invariant set is the middle-third Cantor set with branch weights (w, 1-w).
struct CantorIfs {
    double w = 0.5;
};

// Equal-weight random iteration of p -> (p + v)/2 with vertex offsets
// v in {(1,0), (-1,0), (0,1)}; invariant set is a Sierpinski triangle.
struct SierpinskiIfs {};

// General affine contraction x -> lambda*x + a chosen with probability w.
struct IfsBranch {
    double a = 0.0;
    double lambda = 1.0 / 3.0;
    double w = 0.5;
};
struct WeightedIfs {
    std::vector<IfsBranch> branches;
};

// Two-branch baker transformation of the unit square: y is expanded by the
// branch partition at alpha, x is contracted by ga/gb (second branch offset
// by 1/2). mod 1 is applied to every coordinate exactly as defined.
struct BakerMap {
    double alpha = 1.0 / 3.0;
    double ga = 1.0 / 5.0;
    double gb = 1.0 / 4.0;
};

// x' = y + 1 - a x^2, y' = b x.
struct HenonMap {
    double a = 1.4;
    double b = 0.3;
};

// x' = y + 1 - a |x|, y' = b x.
struct LoziMap {
    double a = 1.7;
    double b = 0.5;
};

using SystemVariant =
    std::variant<CantorIfs, SierpinskiIfs, WeightedIfs, BakerMap, HenonMap, LoziMap>;

struct SystemSpec {
    SystemVariant variant;
};

// Thrown when an orbit leaves the basin and blows up; carries the step at
// which the non-finite state was produced.
class OrbitDivergenceError : public std::runtime_error {
public:
    OrbitDivergenceError(const std::string& what, std::size_t step_index)
        : std::runtime_error(what), step_index(step_index) {}
    std::size_t step_index;
};

// --- Inline single-step kernels (no dispatch; used by hot loops) -----------

inline Point step_one(const CantorIfs& s, const Point& p, RngStream& rng) {
    const double b = (rng.unit() < s.w) ? 0.0 : 2.0;
    return point1((p.x + b) / 3.0);
}

inline Point step_one(const SierpinskiIfs&, const Point& p, RngStream& rng) {
    const double u = rng.unit();
    double vx = 0.0, vy = 1.0;
    if (u < 1.0 / 3.0) {
        vx = 1.0;
        vy = 0.0;
    } else if (u < 2.0 / 3.0) {
        vx = -1.0;
        vy = 0.0;
    }
    return point2((p.x + vx) / 2.0, (p.y + vy) / 2.0);
}

inline Point step_one(const WeightedIfs& s, const Point& p, RngStream& rng) {
    const double u = rng.unit();
    double cum = 0.0;
    const std::size_t last = s.branches.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
        cum += s.branches[i].w;
        if (u < cum || i == last) {
            return point1(s.branches[i].lambda * p.x + s.branches[i].a);
        }
    }
    return p;  // unreachable
}

inline Point step_one(const BakerMap& s, const Point& p, RngStream&) {
    double xn, yn;
    if (p.y < s.alpha) {
        xn = s.ga * p.x;
        yn = p.y / s.alpha;
    } else {
        xn = 0.5 + s.gb * p.x;
        yn = (p.y - s.alpha) / (1.0 - s.alpha);
    }
    return point2(std::fmod(xn, 1.0), std::fmod(yn, 1.0));
}

inline Point step_one(const HenonMap& s, const Point& p, RngStream&) {
    return point2(p.y + 1.0 - s.a * p.x * p.x, s.b * p.x);
}

inline Point step_one(const LoziMap& s, const Point& p, RngStream&) {
    return point2(p.y + 1.0 - s.a * std::fabs(p.x), s.b * p.x);
}

// --- Generic operations ----------------------------------------------------

int ambient_dim(const SystemSpec& system);
std::string system_name(const SystemSpec& system);

// Compact round-trippable descriptor, e.g. "cantor:w=0.5".
std::string system_to_string(const SystemSpec& system);
SystemSpec system_from_string(const std::string& text);

// Throws std::invalid_argument when structural invariants are violated
// (weights positive and normalized, contractions in (0,1), baker branch
// parameters keeping images disjoint).
void validate(const SystemSpec& system);

// One application of the system map. IFS variants consume exactly one uniform
// draw; baker/henon/lozi consume none. Non-finite output raises
// OrbitDivergenceError (step index 0 for a bare step).
Point step(const SystemSpec& system, const Point& p, RngStream& rng);

// Forward orbit, first element equal to start, `length` points total.
std::vector<Point> orbit(const SystemSpec& system, const Point& start,
                         std::size_t length, RngStream& rng);

// Draws a point on (exponentially close to) the invariant set, distributed
// per the natural measure. IFS variants iterate the random maps from an
// exact attractor point; deterministic maps iterate forward from an
// rng-jittered point in the default basin box, so distinct streams yield
// distinct, independently placed centers.
Point select_center(const SystemSpec& system, RngStream& rng, std::size_t burn_in);

// Deterministic-map default orbit start (the jitter box center).
Point default_start(const SystemSpec& system);

// Basin start for one series: deterministic maps draw a point from a small
// box around the default start (baker: the whole invariant square); IFS
// variants return the exact default start, their randomness being in the
// branch draws.
Point jittered_start(const SystemSpec& system, RngStream& rng);

// Recommended burn-in when a config does not set one.
std::size_t default_burn_in(const SystemSpec& system);

// Information dimension of the invariant measure: entropy/Lyapunov ratio for
// the IFS variants, the Lyapunov (Kaplan-Yorke) formula for the baker map,
// and literature constants for henon/lozi.
double theoretical_dimension(const SystemSpec& system);

}  // namespace gevdim
