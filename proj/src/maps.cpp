#include "gevdim/maps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace gevdim {

namespace {

constexpr double kHenonDimension = 1.25826;
constexpr double kLoziDimension = 1.40419;

// Entropy / Lyapunov ratio of a weighted affine IFS:
// (sum w ln w) / (sum w ln lambda).
double ifs_dimension(const std::vector<IfsBranch>& branches) {
    double entropy = 0.0, lyapunov = 0.0;
    for (const auto& b : branches) {
        entropy += b.w * std::log(b.w);
        lyapunov += b.w * std::log(b.lambda);
    }
    return entropy / lyapunov;
}

std::vector<IfsBranch> cantor_branches(const CantorIfs& s) {
    return {{0.0, 1.0 / 3.0, s.w}, {2.0 / 3.0, 1.0 / 3.0, 1.0 - s.w}};
}

double parse_value(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + "=");
    if (pos == std::string::npos) {
        throw std::invalid_argument("system descriptor missing '" + key + "'");
    }
    return std::stod(text.substr(pos + key.size() + 1));
}

// Shortest decimal representation that parses back to the same double.
std::string format_value(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace

double distance(const Point& a, const Point& b) {
    if (a.dim == 1) return std::fabs(a.x - b.x);
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

int ambient_dim(const SystemSpec& system) {
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CantorIfs> || std::is_same_v<T, WeightedIfs>) {
                return 1;
            } else {
                return 2;
            }
        },
        system.variant);
}

std::string system_name(const SystemSpec& system) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CantorIfs>) return "cantor";
            else if constexpr (std::is_same_v<T, SierpinskiIfs>) return "sierpinski";
            else if constexpr (std::is_same_v<T, WeightedIfs>) return "weighted";
            else if constexpr (std::is_same_v<T, BakerMap>) return "baker";
            else if constexpr (std::is_same_v<T, HenonMap>) return "henon";
            else return "lozi";
        },
        system.variant);
}

std::string system_to_string(const SystemSpec& system) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CantorIfs>) {
                return "cantor:w=" + format_value(s.w);
            } else if constexpr (std::is_same_v<T, SierpinskiIfs>) {
                return "sierpinski";
            } else if constexpr (std::is_same_v<T, WeightedIfs>) {
                std::string out = "weighted";
                char sep = ':';
                for (const auto& b : s.branches) {
                    out += sep;
                    sep = ';';
                    out += "a=" + format_value(b.a) + "|l=" + format_value(b.lambda) +
                           "|w=" + format_value(b.w);
                }
                return out;
            } else if constexpr (std::is_same_v<T, BakerMap>) {
                return "baker:alpha=" + format_value(s.alpha) +
                       ";ga=" + format_value(s.ga) + ";gb=" + format_value(s.gb);
            } else if constexpr (std::is_same_v<T, HenonMap>) {
                return "henon:a=" + format_value(s.a) + ";b=" + format_value(s.b);
            } else {
                return "lozi:a=" + format_value(s.a) + ";b=" + format_value(s.b);
            }
        },
        system.variant);
}

SystemSpec system_from_string(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    SystemSpec spec;
    if (name == "cantor") {
        CantorIfs s;
        if (!rest.empty()) s.w = parse_value(rest, "w");
        spec.variant = s;
    } else if (name == "sierpinski") {
        spec.variant = SierpinskiIfs{};
    } else if (name == "weighted") {
        WeightedIfs s;
        std::stringstream ss(rest);
        std::string part;
        while (std::getline(ss, part, ';')) {
            if (part.empty()) continue;
            IfsBranch b;
            b.a = parse_value(part, "a");
            b.lambda = parse_value(part, "l");
            b.w = parse_value(part, "w");
            s.branches.push_back(b);
        }
        spec.variant = s;
    } else if (name == "baker") {
        BakerMap s;
        if (!rest.empty()) {
            s.alpha = parse_value(rest, "alpha");
            s.ga = parse_value(rest, "ga");
            s.gb = parse_value(rest, "gb");
        }
        spec.variant = s;
    } else if (name == "henon") {
        HenonMap s;
        if (!rest.empty()) {
            s.a = parse_value(rest, "a");
            s.b = parse_value(rest, "b");
        }
        spec.variant = s;
    } else if (name == "lozi") {
        LoziMap s;
        if (!rest.empty()) {
            s.a = parse_value(rest, "a");
            s.b = parse_value(rest, "b");
        }
        spec.variant = s;
    } else {
        throw std::invalid_argument("unknown system '" + name + "'");
    }
    validate(spec);
    return spec;
}

namespace {

void validate_branches(const std::vector<IfsBranch>& branches) {
    if (branches.empty()) {
        throw std::invalid_argument("IFS needs at least one branch");
    }
    double sum = 0.0;
    for (const auto& b : branches) {
        if (!(b.w > 0.0)) {
            throw std::invalid_argument("IFS branch weights must be strictly positive");
        }
        if (!(b.lambda > 0.0 && b.lambda < 1.0)) {
            throw std::invalid_argument("IFS contraction ratios must lie in (0,1)");
        }
        sum += b.w;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("IFS branch weights must sum to 1");
    }
}

}  // namespace

void validate(const SystemSpec& system) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CantorIfs>) {
                if (!(s.w > 0.0 && s.w < 1.0)) {
                    throw std::invalid_argument("cantor weight must lie in (0,1)");
                }
                validate_branches(cantor_branches(s));
            } else if constexpr (std::is_same_v<T, WeightedIfs>) {
                validate_branches(s.branches);
            } else if constexpr (std::is_same_v<T, BakerMap>) {
                if (!(s.alpha > 0.0 && s.alpha < 1.0)) {
                    throw std::invalid_argument("baker alpha must lie in (0,1)");
                }
                if (!(s.ga > 0.0 && s.ga <= 0.5) || !(s.gb > 0.0 && s.gb <= 0.5)) {
                    throw std::invalid_argument(
                        "baker contraction factors must lie in (0, 1/2] so the "
                        "branch images stay disjoint");
                }
            } else {
                (void)s;  // sierpinski/henon/lozi carry no structural constraints
            }
        },
        system.variant);
}

Point step(const SystemSpec& system, const Point& p, RngStream& rng) {
    Point out = std::visit([&](const auto& s) { return step_one(s, p, rng); },
                           system.variant);
    if (!std::isfinite(out.x) || !std::isfinite(out.y)) {
        throw OrbitDivergenceError("orbit diverged (non-finite state)", 0);
    }
    return out;
}

std::vector<Point> orbit(const SystemSpec& system, const Point& start,
                         std::size_t length, RngStream& rng) {
    if (length < 1) throw std::invalid_argument("orbit length must be >= 1");
    std::vector<Point> points;
    points.reserve(length);
    points.push_back(start);
    Point p = start;
    for (std::size_t i = 1; i < length; ++i) {
        p = std::visit([&](const auto& s) { return step_one(s, p, rng); },
                       system.variant);
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw OrbitDivergenceError("orbit diverged (non-finite state)", i);
        }
        points.push_back(p);
    }
    return points;
}

Point default_start(const SystemSpec& system) {
    return std::visit(
        [](const auto& s) -> Point {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CantorIfs>) {
                return point1(0.0);  // fixed point of the first branch
            } else if constexpr (std::is_same_v<T, WeightedIfs>) {
                const auto& b = s.branches.front();
                return point1(b.a / (1.0 - b.lambda));
            } else if constexpr (std::is_same_v<T, SierpinskiIfs>) {
                return point2(1.0, 0.0);  // a vertex: exact attractor point
            } else if constexpr (std::is_same_v<T, BakerMap>) {
                return point2(0.5, 0.5);
            } else if constexpr (std::is_same_v<T, HenonMap>) {
                return point2(0.0, 0.0);
            } else {
                return point2(0.1, 0.1);
            }
        },
        system.variant);
}

std::size_t default_burn_in(const SystemSpec& system) {
    return std::visit(
        [](const auto& s) -> std::size_t {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CantorIfs> ||
                          std::is_same_v<T, SierpinskiIfs> ||
                          std::is_same_v<T, WeightedIfs>) {
                (void)s;
                return 1000;
            } else {
                return 10000;
            }
        },
        system.variant);
}

// Jittered basin start for deterministic maps: a small box around the default
// start (baker: the whole invariant square), so independent streams yield
// independently placed orbits even though the map itself consumes no draws.
Point jittered_start(const SystemSpec& system, RngStream& rng) {
    return std::visit(
        [&](const auto& s) -> Point {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BakerMap>) {
                (void)s;
                return point2(rng.unit(), rng.unit());
            } else if constexpr (std::is_same_v<T, HenonMap> ||
                                 std::is_same_v<T, LoziMap>) {
                SystemSpec spec{s};
                const Point base = default_start(spec);
                return point2(base.x + 0.1 * (rng.unit() - 0.5),
                              base.y + 0.1 * (rng.unit() - 0.5));
            } else {
                SystemSpec spec{s};
                return default_start(spec);  // IFS randomness lives in the branches
            }
        },
        system.variant);
}

Point select_center(const SystemSpec& system, RngStream& rng, std::size_t burn_in) {
    if (burn_in < 1) throw std::invalid_argument("burn_in must be >= 1");
    Point p = jittered_start(system, rng);
    for (std::size_t i = 0; i < burn_in; ++i) {
        p = std::visit([&](const auto& s) { return step_one(s, p, rng); },
                       system.variant);
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw OrbitDivergenceError("center selection orbit diverged", i);
        }
    }
    return p;
}

double theoretical_dimension(const SystemSpec& system) {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CantorIfs>) {
                return ifs_dimension(cantor_branches(s));
            } else if constexpr (std::is_same_v<T, SierpinskiIfs>) {
                (void)s;
                const double third = 1.0 / 3.0;
                return ifs_dimension({{1.0, 0.5, third}, {-1.0, 0.5, third}, {0.0, 0.5, third}});
            } else if constexpr (std::is_same_v<T, WeightedIfs>) {
                return ifs_dimension(s.branches);
            } else if constexpr (std::is_same_v<T, BakerMap>) {
                // Lyapunov dimension 1 + h/|lambda_x| with metric entropy
                // h = -(alpha ln alpha + (1-alpha) ln(1-alpha)) and
                // contracting exponent lambda_x = alpha ln ga + (1-alpha) ln gb.
                const double h =
                    -(s.alpha * std::log(s.alpha) + (1.0 - s.alpha) * std::log(1.0 - s.alpha));
                const double lambda_x =
                    s.alpha * std::log(s.ga) + (1.0 - s.alpha) * std::log(s.gb);
                return 1.0 + h / std::fabs(lambda_x);
            } else if constexpr (std::is_same_v<T, HenonMap>) {
                (void)s;
                return kHenonDimension;
            } else {
                (void)s;
                return kLoziDimension;
            }
        },
        system.variant);
}

}  // namespace gevdim
