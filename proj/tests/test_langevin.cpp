#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "multiwell/langevin.hpp"
#include "multiwell/quasimodes.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace mw;

namespace {

double tv_to_gibbs(const GridMeasure& occ, const Potential& V) {
    std::vector<double> vcell(occ.grid.size());
    for (std::size_t i = 0; i < occ.grid.size(); ++i) vcell[i] = V.value(occ.grid.node(i));
    GridMeasure gibbs = GridMeasure::gibbs(occ.grid, occ.beta, vcell);
    return 0.5 * (occ.density - gibbs.density).cwiseAbs().sum() * occ.grid.cell_volume();
}

}  // namespace

TEST_CASE("RNG streams are deterministic and decorrelated") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    double corr = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double x = a.normal();
        CHECK(x == b.normal());  // bitwise identical draws
        corr += x * c.normal();
    }
    CHECK(std::abs(corr / 1000.0) <= 0.1);
}

TEST_CASE("OU occupation matches Gibbs within TV 0.05 (beta=10, T=1e3)") {
    Potential V = oracle::single_well();
    LandscapeReport rep = analyze_landscape(V);
    Grid bgrid = Grid::over(V.box(), 1024);
    BasinSet basins{bgrid, std::vector<int>(bgrid.size(), -1), {}};

    SimParams p;
    p.beta = 10.0;
    p.dt = 0.01;
    p.horizon = 1000.0;
    p.seed = 1;
    p.x0 = make_vec(0.0);
    p.occupation_bins = 64;
    GridMeasure occ;
    TrajectoryStats st = simulate(V, p, basins, &occ);
    CHECK(st.outside_fraction == doctest::Approx(1.0));  // no basins declared
    CHECK(tv_to_gibbs(occ, V) <= 0.05);
}

TEST_CASE("occupation TV distance decreases with horizon") {
    Potential V = oracle::single_well();
    Grid bgrid = Grid::over(V.box(), 256);
    BasinSet basins{bgrid, std::vector<int>(bgrid.size(), -1), {}};
    double prev = 1e300;
    int improvements = 0;
    for (double horizon : {100.0, 1000.0, 10000.0}) {
        SimParams p;
        p.beta = 10.0;
        p.dt = 0.01;
        p.horizon = horizon;
        p.seed = 5;
        p.x0 = make_vec(0.0);
        p.occupation_bins = 64;
        GridMeasure occ;
        simulate(V, p, basins, &occ);
        double tv = tv_to_gibbs(occ, V);
        if (tv < prev) ++improvements;
        prev = tv;
    }
    CHECK(improvements >= 2);  // monotone within sampling noise
}

TEST_CASE("zero-noise surrogate descends to the nearest minimum") {
    Potential V = oracle::sym_double_well(-2, 2);
    LandscapeReport rep = analyze_landscape(V);
    Grid bgrid = Grid::over(V.box(), 1024);
    BasinSet basins = make_basins(rep, V, bgrid, default_delta(rep));

    SimParams p;
    p.beta = 1e12;  // noise amplitude sqrt(2 dt / beta) is numerically nil
    p.dt = 0.01;
    p.horizon = 50.0;
    p.seed = 3;
    p.x0 = make_vec(0.5);
    TrajectoryStats st = simulate(V, p, basins, nullptr);
    CHECK(st.end_point[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fixed seed reproduces TrajectoryStats bitwise") {
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    Grid bgrid = Grid::over(V.box(), 2048);
    BasinSet basins = make_basins(rep, V, bgrid, default_delta(rep));
    SimParams p;
    p.beta = 6.0;
    p.dt = 0.01;
    p.horizon = 500.0;
    p.seed = 11;
    p.x0 = rep.minimum(0).location;
    TrajectoryStats a = simulate(V, p, basins, nullptr);
    TrajectoryStats b = simulate(V, p, basins, nullptr);
    CHECK(a.end_point[0] == b.end_point[0]);
    REQUIRE(a.transition_times.size() == b.transition_times.size());
    for (std::size_t i = 0; i < a.transition_times.size(); ++i)
        CHECK(a.transition_times[i] == b.transition_times[i]);
    for (std::size_t i = 0; i < a.occupation_fraction.size(); ++i)
        CHECK(a.occupation_fraction[i] == b.occupation_fraction[i]);
    // transition times are strictly increasing; occupation sums below one
    for (std::size_t i = 1; i < a.transition_times.size(); ++i)
        CHECK(a.transition_times[i] > a.transition_times[i - 1]);
    double occ = 0;
    for (double f : a.occupation_fraction) occ += f;
    CHECK(occ <= 1.0 + 1e-12);
    CHECK(occ + a.outside_fraction == doctest::Approx(1.0));
}

TEST_CASE("UnstableStep fires for an oversized dt") {
    Potential V = oracle::sym_double_well(-2, 2);
    Grid bgrid = Grid::over(V.box(), 128);
    BasinSet basins{bgrid, std::vector<int>(bgrid.size(), -1), {}};
    SimParams p;
    p.beta = 10.0;
    p.dt = 5.0;  // drift alone overshoots half the box
    p.horizon = 10.0;
    p.seed = 1;
    p.x0 = make_vec(1.9);
    CHECK_THROWS_AS(simulate(V, p, basins, nullptr), UnstableStep);
}

TEST_CASE("exit times: mean within 30% of 1/ell_1 at beta=8, shape exponential") {
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    ExitSummary s = exit_time_experiment(V, rep, 8.0, 1, 200, 2024, {});
    CHECK(s.censored == 0);
    CHECK(s.ratio_spectral == doctest::Approx(1.0).epsilon(0.30));
    // exponential shape: coefficient of variation near 1 and the
    // fitted-exponential KS statistic below the 5% Stephens point
    CHECK(s.cv >= 0.8);
    CHECK(s.cv <= 1.2);
    CHECK(s.ks_pass_5pct);
    // Eyring-Kramers reference time in the same ballpark
    CHECK(s.ratio_kramers == doctest::Approx(1.0).epsilon(0.35));
}

TEST_CASE("two-point beta sweep: exit-time ratio tracks e^{2 W_1} scaling") {
    // spec pins the ratio of mean exit times at beta=10 vs beta=8 to the
    // barrier scaling within 35%
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    ExitSummary s8 = exit_time_experiment(V, rep, 8.0, 1, 200, 77, {});
    ExitSummary s10 = exit_time_experiment(V, rep, 10.0, 1, 200, 78, {});
    double w1 = rep.barrier(1)->W;
    double expect = std::exp(2.0 * w1);
    CHECK(s10.mean / s8.mean == doctest::Approx(expect).epsilon(0.35));
}

TEST_CASE("seed independence: disjoint batches agree within 3 combined errors") {
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    ExitSummary a = exit_time_experiment(V, rep, 8.0, 1, 150, 1000, {});
    ExitSummary b = exit_time_experiment(V, rep, 8.0, 1, 150, 2000, {});
    double comb = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    CHECK(std::abs(a.mean - b.mean) <= 3.0 * comb);
}

TEST_CASE("KS statistic accepts exact exponential draws") {
    RngStream rng(515, 0);
    std::vector<double> times;
    for (int i = 0; i < 200; ++i) times.push_back(-3.0 * std::log(rng.uniform()));
    CHECK(ks_exponential_modified(times) <= 1.094);
}

TEST_CASE("barrier-free well with a fictitious split: exponential exits") {
    // V = x^2/2 with a fictitious basin split at x=0; hysteresis cores a few
    // standard deviations out so crossings are rare against the relaxation
    // time and therefore memoryless
    const double beta = 10.0, dt = 0.002, margin = 1.0;
    std::vector<double> times;
    for (int t = 0; t < 200; ++t) {
        RngStream rng(909, t);
        double x = margin;
        double time = 0.0;
        while (time < 50000.0) {
            x += -x * dt + std::sqrt(2.0 * dt / beta) * rng.normal();
            time += dt;
            if (x < -margin) break;
        }
        times.push_back(time);
    }
    double ks = ks_exponential_modified(times);
    CHECK(ks <= 1.094);
    // coefficient of variation close to one is the same shape statement
    double mean = 0, var = 0;
    for (double t : times) mean += t;
    mean /= times.size();
    for (double t : times) var += (t - mean) * (t - mean);
    var /= times.size() - 1;
    CHECK(std::sqrt(var) / mean == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("exit experiment rejects bad arguments") {
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    CHECK_THROWS(exit_time_experiment(V, rep, 8.0, 2, 200, 1, {}));   // only k=1
    CHECK_THROWS(exit_time_experiment(V, rep, 8.0, 1, 50, 1, {}));    // n_traj >= 100
    Potential W = oracle::single_well();
    LandscapeReport repw = analyze_landscape(W);
    CHECK_THROWS(exit_time_experiment(W, repw, 8.0, 1, 200, 1, {}));  // two wells needed
}

TEST_CASE("threaded exit experiment reproduces the single-thread reduction") {
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    ExitOptions serial;
    ExitOptions quad;
    quad.threads = 4;
    ExitSummary a = exit_time_experiment(V, rep, 7.0, 1, 120, 31, serial);
    ExitSummary b = exit_time_experiment(V, rep, 7.0, 1, 120, 31, quad);
    REQUIRE(a.exit_times.size() == b.exit_times.size());
    for (std::size_t i = 0; i < a.exit_times.size(); ++i)
        CHECK(a.exit_times[i] == b.exit_times[i]);
}

TEST_CASE("exit experiment requires a two-well landscape") {
    Potential V("triple_well", Polynomial1D({0, 0.05, 1.1, 0, -2, 0, 1}),
                Box::interval(-1.8, 1.8));
    LandscapeReport rep = analyze_landscape(V);
    REQUIRE(rep.n_wells() == 2);
    CHECK_THROWS(exit_time_experiment(V, rep, 8.0, 1, 200, 1, {}));
}
