#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "gevdim/maps.hpp"

using namespace gevdim;

namespace {
const double kCantorDim = 0.6309297535714574;   // ln2/ln3
const double kSierpDim = 1.5849625007211563;    // ln3/ln2
}  // namespace

TEST_CASE("cantor step lands on x/3 or (x+2)/3 exactly") {
    CantorIfs sys{0.5};
    RngStream rng(1);
    Point p = point1(0.0);
    std::set<double> firsts;
    for (int i = 0; i < 50; ++i) {
        Point q = step_one(sys, point1(0.0), rng);
        firsts.insert(q.x);
    }
    CHECK(firsts.size() == 2);
    CHECK(firsts.count(0.0) == 1);
    CHECK(firsts.count(2.0 / 3.0) == 1);
    // and iterates stay inside [0,1]
    for (int i = 0; i < 10000; ++i) {
        p = step_one(sys, p, rng);
        REQUIRE(p.x >= 0.0);
        REQUIRE(p.x <= 1.0);
    }
}

TEST_CASE("cantor centers avoid the removed middle thirds") {
    // A point of the middle-third set never sits deeper than fp noise inside
    // (1/3, 2/3) under repeated ternary shifts. The 1e-6 margin absorbs the
    // 3x error amplification over the 15 shifts.
    SystemSpec sys{CantorIfs{0.5}};
    RngStream rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        double x = select_center(sys, rng, 1000).x;
        REQUIRE(x >= 0.0);
        REQUIRE(x <= 1.0);
        for (int digit = 0; digit < 15; ++digit) {
            if (x < 1.0 / 3.0 + 1e-6) {
                x *= 3.0;
            } else if (x > 2.0 / 3.0 - 1e-6) {
                x = 3.0 * x - 2.0;
            } else {
                FAIL("center has a middle-third digit: x = " << x);
            }
            x = std::min(std::max(x, 0.0), 1.0);
        }
    }
}

TEST_CASE("sierpinski orbit stays in the triangle hull") {
    SystemSpec sys{SierpinskiIfs{}};
    RngStream rng(3);
    Point p = point2(1.0, 0.0);
    for (int i = 0; i < 10000; ++i) {
        p = step(sys, p, rng);
        REQUIRE(p.y >= -1e-12);
        REQUIRE(std::fabs(p.x) + p.y <= 1.0 + 1e-12);
    }
}

TEST_CASE("baker branch arithmetic on a hand-worked point") {
    BakerMap sys;
    RngStream rng(1);
    const Point q = step_one(sys, point2(0.5, 0.5), rng);
    CHECK(q.x == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(q.y == doctest::Approx(0.25).epsilon(1e-14));
    // lower branch
    const Point r = step_one(sys, point2(0.9, 0.1), rng);
    CHECK(r.x == doctest::Approx(0.18).epsilon(1e-14));
    CHECK(r.y == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("baker orbit stays in the unit square") {
    SystemSpec sys{BakerMap{}};
    RngStream rng(5);
    Point p = point2(rng.unit(), rng.unit());
    for (int i = 0; i < 10000; ++i) {
        p = step(sys, p, rng);
        REQUIRE(p.x >= 0.0);
        REQUIRE(p.x < 1.0);
        REQUIRE(p.y >= 0.0);
        REQUIRE(p.y < 1.0);
    }
}

TEST_CASE("henon map on hand-worked points") {
    HenonMap sys;
    RngStream rng(1);
    const Point q = step_one(sys, point2(0.0, 0.0), rng);
    CHECK(q.x == 1.0);
    CHECK(q.y == 0.0);
    const Point r = step_one(sys, point2(1.0, 0.0), rng);
    CHECK(r.x == doctest::Approx(1.0 - 1.4).epsilon(1e-14));
    CHECK(r.y == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("henon and lozi attractor orbits stay bounded") {
    for (SystemSpec sys : {SystemSpec{HenonMap{}}, SystemSpec{LoziMap{}}}) {
        RngStream rng(11);
        Point p = jittered_start(sys, rng);
        for (std::size_t i = 0; i < default_burn_in(sys); ++i) p = step(sys, p, rng);
        for (int i = 0; i < 100000; ++i) {
            p = step(sys, p, rng);
            REQUIRE(std::fabs(p.x) <= 2.0);
            REQUIRE(std::fabs(p.y) <= 1.0);
        }
    }
}

TEST_CASE("divergence is reported with the offending step index") {
    SystemSpec sys{HenonMap{}};
    RngStream rng(1);
    CHECK_THROWS_AS(orbit(sys, point2(10.0, 10.0), 100, rng), OrbitDivergenceError);
    try {
        RngStream rng2(1);
        orbit(sys, point2(10.0, 10.0), 100, rng2);
    } catch (const OrbitDivergenceError& e) {
        CHECK(e.step_index >= 1);
        CHECK(e.step_index < 20);
    }
}

TEST_CASE("orbit starts at the start point and has the requested length") {
    SystemSpec sys{CantorIfs{0.5}};
    RngStream rng(2);
    const auto pts = orbit(sys, point1(0.25), 17, rng);
    CHECK(pts.size() == 17);
    CHECK(pts[0].x == 0.25);
}

TEST_CASE("theoretical dimensions match entropy-over-contraction values") {
    CHECK(theoretical_dimension({CantorIfs{0.5}}) == doctest::Approx(kCantorDim).epsilon(1e-14));
    CHECK(theoretical_dimension({SierpinskiIfs{}}) == doctest::Approx(kSierpDim).epsilon(1e-14));
    WeightedIfs weighted;
    weighted.branches = {{0.0, 1.0 / 3.0, 0.4}, {2.0 / 3.0, 1.0 / 3.0, 0.6}};
    CHECK(theoretical_dimension({weighted}) ==
          doctest::Approx(0.6126016192893442).epsilon(1e-14));
    CHECK(theoretical_dimension({BakerMap{}}) ==
          doctest::Approx(1.4357669781773361).epsilon(1e-12));
    CHECK(theoretical_dimension({HenonMap{}}) == doctest::Approx(1.25826).epsilon(1e-12));
    CHECK(theoretical_dimension({LoziMap{}}) == doctest::Approx(1.40419).epsilon(1e-12));
}

TEST_CASE("equal-weight general IFS equals the dedicated cantor variant") {
    WeightedIfs as_cantor;
    as_cantor.branches = {{0.0, 1.0 / 3.0, 0.5}, {2.0 / 3.0, 1.0 / 3.0, 0.5}};
    CHECK(theoretical_dimension({as_cantor}) ==
          doctest::Approx(theoretical_dimension({CantorIfs{0.5}})).epsilon(1e-14));
    // branch order must not matter
    WeightedIfs flipped;
    flipped.branches = {{2.0 / 3.0, 1.0 / 3.0, 0.6}, {0.0, 1.0 / 3.0, 0.4}};
    WeightedIfs straight;
    straight.branches = {{0.0, 1.0 / 3.0, 0.4}, {2.0 / 3.0, 1.0 / 3.0, 0.6}};
    CHECK(theoretical_dimension({flipped}) ==
          doctest::Approx(theoretical_dimension({straight})).epsilon(1e-14));
}

TEST_CASE("validate rejects broken parameters") {
    WeightedIfs bad_sum;
    bad_sum.branches = {{0.0, 1.0 / 3.0, 0.4}, {2.0 / 3.0, 1.0 / 3.0, 0.4}};
    CHECK_THROWS_AS(validate({bad_sum}), std::invalid_argument);
    WeightedIfs bad_lambda;
    bad_lambda.branches = {{0.0, 1.2, 0.5}, {2.0 / 3.0, 1.0 / 3.0, 0.5}};
    CHECK_THROWS_AS(validate({bad_lambda}), std::invalid_argument);
    CHECK_THROWS_AS(validate({CantorIfs{0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate({CantorIfs{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate({BakerMap{0.0, 0.2, 0.25}}), std::invalid_argument);
    CHECK_THROWS_AS(validate({BakerMap{1.0 / 3.0, 0.6, 0.25}}), std::invalid_argument);
    CHECK_NOTHROW(validate({BakerMap{}}));
    CHECK_NOTHROW(validate({CantorIfs{0.3}}));
}

TEST_CASE("descriptors round-trip for every system") {
    WeightedIfs weighted;
    weighted.branches = {{0.0, 1.0 / 3.0, 0.4}, {2.0 / 3.0, 1.0 / 3.0, 0.6}};
    const SystemSpec specs[] = {
        {CantorIfs{0.35}}, {SierpinskiIfs{}}, {weighted},
        {BakerMap{0.25, 0.2, 0.3}}, {HenonMap{1.4, 0.3}}, {LoziMap{1.7, 0.5}},
    };
    for (const auto& spec : specs) {
        const std::string text = system_to_string(spec);
        const SystemSpec back = system_from_string(text);
        CHECK(system_to_string(back) == text);
        CHECK(ambient_dim(back) == ambient_dim(spec));
    }
    CHECK(system_to_string({CantorIfs{0.5}}) == "cantor:w=0.5");
    CHECK_THROWS_AS(system_from_string("nonsense:w=2"), std::invalid_argument);
}

TEST_CASE("ambient dimensions") {
    CHECK(ambient_dim({CantorIfs{}}) == 1);
    CHECK(ambient_dim({WeightedIfs{{{0.0, 0.5, 1.0}}}}) == 1);
    CHECK(ambient_dim({SierpinskiIfs{}}) == 2);
    CHECK(ambient_dim({BakerMap{}}) == 2);
    CHECK(ambient_dim({HenonMap{}}) == 2);
    CHECK(ambient_dim({LoziMap{}}) == 2);
}

TEST_CASE("distance is |dx| in 1D, Euclidean in 2D") {
    CHECK(distance(point1(0.25), point1(1.0)) == 0.75);
    CHECK(distance(point2(0.0, 0.0), point2(3.0, 4.0)) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("center selection needs a positive burn-in") {
    SystemSpec sys{CantorIfs{0.5}};
    RngStream rng(1);
    CHECK_THROWS_AS(select_center(sys, rng, 0), std::invalid_argument);
}

TEST_CASE("distinct streams place centers at distinct points") {
    SystemSpec sys{SierpinskiIfs{}};
    RngStream a = derive_stream(10, 1, 0);
    RngStream b = derive_stream(10, 1, 1);
    const Point za = select_center(sys, a, 500);
    const Point zb = select_center(sys, b, 500);
    CHECK(distance(za, zb) > 1e-6);
}

TEST_CASE("IFS series starts are exact, map starts are jittered") {
    SystemSpec cantor{CantorIfs{0.5}};
    RngStream rng(4);
    CHECK(jittered_start(cantor, rng).x == default_start(cantor).x);
    SystemSpec henon{HenonMap{}};
    const Point base = default_start(henon);
    const Point j1 = jittered_start(henon, rng);
    const Point j2 = jittered_start(henon, rng);
    CHECK(std::fabs(j1.x - base.x) <= 0.05 + 1e-12);
    CHECK(std::fabs(j1.y - base.y) <= 0.05 + 1e-12);
    CHECK(distance(j1, j2) > 0.0);
}
