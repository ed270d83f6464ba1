#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "multiwell/landscape.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <random>

using namespace mw;

TEST_CASE("potential consistency: analytic derivatives match finite differences") {
    for (const Potential& V :
         {oracle::sym_double_well(), oracle::tilted_double_well(), oracle::single_well(),
          oracle::tilted_2d(), oracle::four_well()}) {
        ConsistencyReport rep = check_consistency(V, 64, 12345);
        CAPTURE(V.name());
        CHECK(rep.pass);
    }
}

TEST_CASE("symmetric double well: critical points, values, Hessians") {
    Potential V = oracle::sym_double_well(-2, 2);
    auto cps = find_critical_points(V, 16, 1e-8);
    REQUIRE(cps.size() == 3);
    // V'' = 12x^2 - 4 gives {8, -4, 8} at {-1, 0, 1}
    CHECK(cps[0].location[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(cps[1].location[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(cps[2].location[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cps[0].value == doctest::Approx(0.0));
    CHECK(cps[1].value == doctest::Approx(1.0));
    CHECK(cps[2].value == doctest::Approx(0.0));
    CHECK(cps[0].hess_eigs[0] == doctest::Approx(8.0));
    CHECK(cps[1].hess_eigs[0] == doctest::Approx(-4.0));
    CHECK(cps[2].hess_eigs[0] == doctest::Approx(8.0));
    CHECK(cps[0].kind == CriticalPoint::Kind::minimum);
    CHECK(cps[1].kind == CriticalPoint::Kind::saddle_index_1);
    CHECK(cps[1].morse_index == 1);
}

TEST_CASE("quadratic well: single critical point") {
    Potential V = oracle::single_well();
    auto cps = find_critical_points(V, 8, 1e-8);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].location[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(cps[0].hess_eigs[0] == doctest::Approx(1.0));
    CHECK(cps[0].kind == CriticalPoint::Kind::minimum);
}

TEST_CASE("tilted double well: root-finding oracle locations") {
    oracle::TiltedWell tw;
    Potential V = oracle::tilted_double_well();
    auto cps = find_critical_points(V, 24, 1e-8);
    REQUIRE(cps.size() == 3);
    CHECK(cps[0].location[0] == doctest::Approx(tw.x_global).epsilon(1e-9));
    CHECK(cps[1].location[0] == doctest::Approx(tw.x_saddle).epsilon(1e-9));
    CHECK(cps[2].location[0] == doctest::Approx(tw.x_local).epsilon(1e-9));
}

TEST_CASE("gradient tolerance holds at every returned point") {
    for (const Potential& V : {oracle::tilted_double_well(), oracle::tilted_2d()}) {
        auto cps = find_critical_points(V, 16, 1e-8);
        for (const auto& cp : cps) CHECK(V.gradient(cp.location).norm() <= 1e-8);
    }
}

TEST_CASE("degenerate Hessian is flagged (V = x^4)") {
    // grad_tol 1e-8 stops Newton where V'' ~ 2e-5; the degeneracy threshold
    // has to sit above that scale for the flat bottom to register
    Potential V("quartic", Polynomial1D({0, 0, 0, 0, 1.0}), Box::interval(-2, 2));
    LandscapeOptions opts;
    opts.tol.degeneracy_tol = 1e-4;
    auto cps = find_critical_points(V, 12, 1e-8, opts);
    REQUIRE(cps.size() >= 1);
    bool found = false;
    for (const auto& cp : cps)
        if (std::abs(cp.location[0]) < 1e-2) {
            found = true;
            CHECK(cp.degenerate);
            CHECK(cp.kind == CriticalPoint::Kind::degenerate);
        }
    CHECK(found);
}

TEST_CASE("barriers: symmetric well has W=1 on both sides via the x=0 saddle") {
    Potential V = oracle::sym_double_well(-2, 2);
    LandscapeReport rep = analyze_landscape(V);
    REQUIRE(rep.minima_ordered.size() == 2);
    REQUIRE(rep.barriers.size() == 2);  // equal-depth wells both get W
    for (const auto& b : rep.barriers) {
        CHECK(b.W == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(b.refined);
        CHECK(b.saddle.location[0] == doctest::Approx(0.0).epsilon(1e-8));
        CHECK(b.saddle.morse_index == 1);
    }
    CHECK_FALSE(rep.assumptions.a5.pass);  // W(-1) = W(1)
    CHECK(rep.assumptions.a1.pass);
}

TEST_CASE("barriers: tilted double well matches the segment-max oracle") {
    oracle::TiltedWell tw;
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    REQUIRE(rep.n_wells() == 1);
    const BarrierRecord* b = rep.barrier(1);
    REQUIRE(b != nullptr);
    CHECK(b->W == doctest::Approx(tw.w1).epsilon(1e-10));
    CHECK(b->saddle.location[0] == doctest::Approx(tw.x_saddle).epsilon(1e-9));

    double seg = oracle::segment_max(V, tw.x_local, tw.x_global) - V.value(make_vec(tw.x_local));
    CHECK(b->W == doctest::Approx(seg).epsilon(1e-8));

    CHECK(rep.assumptions.a1.pass);
    CHECK(rep.assumptions.a4.pass);
    CHECK(rep.assumptions.a5.pass);
    // x_0 is the unique global minimum
    CHECK(rep.minimum(0).value == doctest::Approx(V.value(make_vec(tw.x_global))));
}

TEST_CASE("2-d separable potential: same W_1 as the 1-d tilt, saddle on the x-axis") {
    oracle::TiltedWell tw;
    Potential V = oracle::tilted_2d();
    LandscapeReport rep = analyze_landscape(V);
    REQUIRE(rep.n_wells() == 1);
    const BarrierRecord* b = rep.barrier(1);
    REQUIRE(b != nullptr);
    CHECK(b->W == doctest::Approx(tw.w1).epsilon(1e-9));
    CHECK(b->saddle.location[0] == doctest::Approx(tw.x_saddle).epsilon(1e-7));
    CHECK(b->saddle.location[1] == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(b->saddle.morse_index == 1);
    // saddle signature: exactly one negative eigenvalue
    CHECK(b->saddle.hess_eigs[0] < 0);
    CHECK(b->saddle.hess_eigs[1] > 0);
}

TEST_CASE("1-d oracle equivalence on random tilted quartics") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> tilt(-0.6, 0.6);
    for (int trial = 0; trial < 6; ++trial) {
        double t = tilt(rng);
        Potential V("rand_tilt", Polynomial1D({1, t, -2, 0, 1}), Box::interval(-3, 3));
        auto cps = find_critical_points(V, 24, 1e-10);
        std::vector<const CriticalPoint*> minima;
        for (const auto& cp : cps)
            if (cp.is_minimum()) minima.push_back(&cp);
        if (minima.size() < 2) continue;
        LandscapeReport rep = analyze_landscape(V);
        const BarrierRecord* b = rep.barrier(1);
        REQUIRE(b != nullptr);
        double x1 = rep.minimum(1).location[0];
        double x0 = rep.minimum(0).location[0];
        double seg = oracle::segment_max(V, x1, x0) - rep.minimum(1).value;
        CHECK(b->W == doctest::Approx(seg).epsilon(1e-7));
    }
}

TEST_CASE("monotone refinement: raw sweep levels converge (Cauchy)") {
    for (const Potential& V :
         {oracle::sym_double_well(-2, 2), oracle::tilted_double_well(), oracle::single_well()}) {
        auto cps = find_critical_points(V, 24, 1e-8);
        LandscapeOptions opts;
        std::vector<double> levels;
        for (int res : {1024, 2048, 4096}) {
            auto bars = compute_barriers(V, cps, res, opts);
            if (bars.empty()) break;  // single well: nothing to refine
            levels.push_back(bars.front().grid_level);
        }
        if (levels.size() == 3) {
            double d1 = std::abs(levels[1] - levels[0]);
            double d2 = std::abs(levels[2] - levels[1]);
            CHECK(d2 <= d1 + 1e-12);
        }
    }
}

TEST_CASE("four-well potential: A.4 and A.5 both fail") {
    Potential V = oracle::four_well();
    LandscapeOptions opts;
    opts.grid_resolution = 384;
    LandscapeReport rep = analyze_landscape(V, opts);
    REQUIRE(rep.minima_ordered.size() == 4);
    CHECK_FALSE(rep.assumptions.a5.pass);
    CHECK_FALSE(rep.assumptions.a4.pass);  // two passes at the same level per well
}

TEST_CASE("single well: assumptions pass vacuously") {
    Potential V = oracle::single_well();
    LandscapeReport rep = analyze_landscape(V);
    CHECK(rep.n_wells() == 0);
    CHECK(rep.barriers.empty());
    CHECK(rep.assumptions.a1.pass);
    CHECK(rep.assumptions.a4.pass);
    CHECK(rep.assumptions.a5.pass);
}

TEST_CASE("global minimum uniqueness when A.5 passes") {
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    REQUIRE(rep.assumptions.a5.pass);
    double vmin = rep.minimum(0).value;
    int attaining = 0;
    for (const auto& cp : rep.critical_points)
        if (cp.is_minimum() && cp.value <= vmin + 1e-12) ++attaining;
    CHECK(attaining == 1);
}

TEST_CASE("resolution too coarse throws when minima collide in one cell") {
    Potential V = oracle::sym_double_well(-100, 100);  // wells at +-1
    auto cps = find_critical_points(V, 64, 1e-8);
    // 7 cells: the middle one spans [-100/7, 100/7] and swallows both minima
    CHECK_THROWS_AS(compute_barriers(V, cps, 7, LandscapeOptions{}), ResolutionTooCoarse);
}

TEST_CASE("seeds_per_axis below 8 is rejected") {
    Potential V = oracle::single_well();
    CHECK_THROWS(find_critical_points(V, 4, 1e-8));
}

TEST_CASE("unrefined saddle flag when refinement cannot reach an index-1 point") {
    // with a huge degeneracy tolerance the refined saddle classifies as
    // degenerate, so the record must fall back to the raw sweep level
    Potential V = oracle::sym_double_well(-2, 2);
    LandscapeOptions opts;
    opts.tol.degeneracy_tol = 5.0;  // |V''(0)| = 4 < 5
    auto cps = find_critical_points(V, 16, 1e-8, opts);
    auto bars = compute_barriers(V, cps, 2048, opts);
    REQUIRE(!bars.empty());
    for (const auto& b : bars) {
        CHECK_FALSE(b.refined);
        CHECK(b.merge_level == b.grid_level);
        CHECK(b.W > 0);
    }
}
