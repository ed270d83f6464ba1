#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "multiwell/quasimodes.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace mw;

namespace {

double rayleigh(const DiscreteGenerator& gen, const GridFunction& f) {
    return gen.dirichlet(f.values) / gen.beta;
}

double residual_norm(const DiscreteGenerator& gen, const GridFunction& f, double lambda) {
    Eigen::VectorXd y;
    gen.apply_sym(f.values, y);
    return (y - lambda * f.values).norm();
}

}  // namespace

TEST_CASE("OU ground quasimode: Rayleigh quotient below 1e-6 at beta=50") {
    Potential V = oracle::single_well();
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 8000);
    DiscreteGenerator gen = build_generator(V, g, 50.0);
    GridFunction f = hermite_quasimode(rep, V, 0, {0, 0}, 50.0, g);
    f.validate();
    CHECK(rayleigh(gen, f) <= 1e-6);
}

TEST_CASE("saddle quasimode: Rayleigh near 4, improving from beta=50 to beta=100") {
    Potential V = oracle::sym_double_well(-2, 2);
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 10000);
    int saddle = -1;
    for (std::size_t i = 0; i < rep.critical_points.size(); ++i)
        if (rep.critical_points[i].is_saddle()) saddle = static_cast<int>(i);
    REQUIRE(saddle >= 0);
    double err50, err100;
    {
        DiscreteGenerator gen = build_generator(V, g, 50.0, {});
        GridFunction f = hermite_quasimode(rep, V, saddle, {0, 0}, 50.0, g);
        err50 = std::abs(rayleigh(gen, f) - 4.0);
    }
    {
        DiscreteGenerator gen = build_generator(V, g, 100.0, {});
        GridFunction f = hermite_quasimode(rep, V, saddle, {0, 0}, 100.0, g);
        err100 = std::abs(rayleigh(gen, f) - 4.0);
        CHECK(rayleigh(gen, f) == doctest::Approx(4.0).epsilon(0.10));
    }
    CHECK(err100 < err50);
}

TEST_CASE("quasimodes at the two minima have exactly disjoint supports") {
    Potential V = oracle::sym_double_well(-2, 2);
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 10000);
    int lo = -1, hi = -1;
    for (std::size_t i = 0; i < rep.critical_points.size(); ++i)
        if (rep.critical_points[i].is_minimum())
            (rep.critical_points[i].location[0] < 0 ? lo : hi) = static_cast<int>(i);
    GridFunction fl = hermite_quasimode(rep, V, lo, {0, 0}, 80.0, g);
    GridFunction fh = hermite_quasimode(rep, V, hi, {0, 0}, 80.0, g);
    CHECK(fl.values.dot(fh.values) == 0.0);  // supports never meet
}

TEST_CASE("residual norms decrease along a ratio-4 beta sweep (all levels)") {
    Potential V = oracle::sym_double_well(-2, 2);
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 20000);
    for (std::size_t z = 0; z < rep.critical_points.size(); ++z) {
        for (int n : {0, 1}) {
            double lambda = zeta(rep.critical_points[z], 1) / 2.0 +
                            n * std::abs(rep.critical_points[z].hess_eigs[0]);
            double last = std::numeric_limits<double>::infinity();
            for (double beta : {12.5, 50.0, 200.0}) {
                DiscreteGenerator gen = build_generator(V, g, beta, {});
                GridFunction f =
                    hermite_quasimode(rep, V, static_cast<int>(z), {n, 0}, beta, g);
                double r = residual_norm(gen, f, lambda);
                CAPTURE(z);
                CAPTURE(n);
                CAPTURE(beta);
                CHECK(r < last);
                last = r;
            }
        }
    }
}

TEST_CASE("Gram matrix of the quasimode family is near identity at beta=50") {
    Potential V = oracle::sym_double_well(-2, 2);
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 10000);
    const double beta = 50.0;
    std::vector<GridFunction> fam;
    for (std::size_t z = 0; z < rep.critical_points.size(); ++z)
        for (int n : {0, 1})
            fam.push_back(hermite_quasimode(rep, V, static_cast<int>(z), {n, 0}, beta, g));
    for (std::size_t a = 0; a < fam.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            double dot = fam[a].values.dot(fam[b].values);
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 0.05);
        }
}

TEST_CASE("2-d Hermite quasimode: saddle level on the separable tilted well") {
    Potential V = oracle::tilted_2d();
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 1100, 1100);
    const double beta = 60.0;
    int saddle = -1;
    for (std::size_t i = 0; i < rep.critical_points.size(); ++i)
        if (rep.critical_points[i].is_saddle()) saddle = static_cast<int>(i);
    REQUIRE(saddle >= 0);
    DiscreteGenerator gen = build_generator(V, g, beta, {});
    GridFunction f = hermite_quasimode(rep, V, saddle, {0, 0}, beta, g);
    double target = zeta(rep.critical_points[saddle], 2) / 2.0;
    CHECK(rayleigh(gen, f) == doctest::Approx(target).epsilon(0.10));
}

TEST_CASE("cutoff overlap is rejected for oversized radii") {
    Potential V = oracle::sym_double_well(-2, 2);
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 4000);
    CHECK_THROWS_AS(hermite_quasimode(rep, V, 0, {0, 0}, 50.0, g, 0.4), CutoffOverlap);
}

TEST_CASE("well quasimode: Markov bound, eigenvector overlap, support mass") {
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 6001);
    const double beta = 20.0;
    const double delta = default_delta(rep);
    DiscreteGenerator gen = build_generator(V, g, beta, {});
    GridFunction f = well_quasimode(rep, V, 1, beta, delta, g);
    f.validate();

    const BarrierRecord* b = rep.barrier(1);
    const CriticalPoint& x1 = rep.minimum(1);
    std::vector<double> vcell(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) vcell[i] = V.value(g.node(i));

    // recover the cutoff profile chi from the flat amplitude
    Eigen::VectorXd chi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        chi[i] = f.values[i] * std::exp(0.5 * beta * (vcell[i] - x1.value));
    chi /= chi.maxCoeff();

    // exact chain for e:markov1 scaling: D <= C_disc e^{-beta min Vmid} / Z
    // with the min over edges where chi varies, and
    // min Vmid >= V(x_1) + W_1 - delta - h smax / 2
    double c_disc = 0.0, z_disc = 0.0, min_vmid = 1e300, smax = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        z_disc += chi[i] * chi[i] * std::exp(-beta * (vcell[i] - x1.value)) * g.cell_volume();
    g.for_each_edge([&](std::size_t i, std::size_t j, int axis) {
        // the round trip through exp leaves 1-ulp fuzz on the flat core
        if (std::abs(chi[i] - chi[j]) <= 1e-12) return;
        double d = (chi[i] - chi[j]) / g.h(axis);
        c_disc += d * d * g.cell_volume();
        min_vmid = std::min(min_vmid, 0.5 * (vcell[i] + vcell[j]));
        smax = std::max(smax, std::abs(vcell[i] - vcell[j]) / g.h(axis));
    });
    double dirich = gen.dirichlet(f.values);  // <f, -L_beta f>_{m_beta}
    double exact_bound = c_disc * std::exp(-beta * (min_vmid - x1.value)) / z_disc;
    CHECK(dirich <= exact_bound * (1 + 1e-9));
    CHECK(min_vmid >= x1.value + b->W - delta - 0.5 * g.max_h() * smax);
    double scaling_bound = c_disc * std::exp(-beta * (b->W - delta)) / z_disc *
                           std::exp(0.5 * beta * g.max_h() * smax);
    CHECK(dirich <= scaling_bound * (1 + 1e-9));

    // overlap with the true metastable eigenfunction
    SpectralResult res = lowest_eigenpairs(gen, 2);
    double ov = f.values.dot(res.vectors[1]);
    CHECK(ov * ov >= 0.99);

    // at least 99% of the measure mass stays inside B_1
    GridMeasure mu = f.measure();
    auto comp = sublevel_component(g, vcell, g.locate(x1.location),
                                   b->merge_level - 1e-6);
    double inside = 0.0;
    for (auto c : comp) inside += mu.density[c] * g.cell_volume();
    CHECK(inside >= 0.99);
}

TEST_CASE("well quasimode rejects delta above the barrier-gap bound") {
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 2001);
    double w1 = rep.barrier(1)->W;
    CHECK_THROWS_AS(well_quasimode(rep, V, 1, 10.0, 1.5 * w1, g), DeltaTooLarge);
}

TEST_CASE("recovery measure: critical points flatten the Fisher information") {
    Potential V = oracle::sym_double_well(-2, 2);
    Grid g = Grid::over(V.box(), 6001);
    double last = std::numeric_limits<double>::infinity();
    for (double beta : {20.0, 40.0, 80.0}) {
        GridMeasure mu = recovery_measure_I(make_vec(1.0), beta, g, V);
        double fi = fisher_information(mu, V, beta);
        CHECK(fi < last);  // leading term vanishes at a critical point
        last = fi;
    }
}

TEST_CASE("recovery measure trends to |grad V|^2 / 2 at a non-critical point") {
    Potential V = oracle::sym_double_well(-2, 2);
    Grid g = Grid::over(V.box(), 8001);
    const Vec probe = make_vec(0.5);
    // recovery measures approach half the squared slope (see README on the
    // factor-two convention)
    double target = 0.5 * V.gradient(probe).squaredNorm();
    double dev_prev = std::numeric_limits<double>::infinity();
    for (double beta : {25.0, 50.0, 100.0}) {
        GridMeasure mu = recovery_measure_I(probe, beta, g, V);
        double fi = fisher_information(mu, V, beta);
        double dev = std::abs(fi - target);
        CHECK(dev < dev_prev);
        dev_prev = dev;
    }
    CHECK(dev_prev <= 0.05 * target);
}

TEST_CASE("gamma witness suite: three levels on the tilted double well") {
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 4001);
    WitnessReport rpt = gamma_witness_suite(rep, V, {15.0}, g, {});

    bool saw_l1 = false, saw_l2_saddle = false, saw_l3 = false;
    for (const auto& row : rpt.rows) {
        if (row.skipped) continue;
        if (row.level == 1) saw_l1 = true;
        if (row.level == 2 && row.target.is_finite() && row.target.value() > 1.0) {
            saw_l2_saddle = true;
            // beta I_beta near zeta at moderate beta
            CHECK(row.computed == doctest::Approx(row.target.value()).epsilon(0.25));
        }
        if (row.level == 3 && row.target.is_finite() && row.target.value() > 0.5) {
            saw_l3 = true;
            // exact identity: 2 e^{beta W} ell_1 against eta_1
            CHECK(row.ratio == doctest::Approx(1.0).epsilon(0.05));
        }
    }
    CHECK(saw_l1);
    CHECK(saw_l2_saddle);
    CHECK(saw_l3);
}

TEST_CASE("witness convexity transfer: mixture under component average") {
    Potential V = oracle::sym_double_well(-2, 2);
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 8000);
    const double beta = 60.0;
    DiscreteGenerator gen = build_generator(V, g, beta, {});
    std::vector<GridMeasure> parts;
    std::vector<double> weights{0.3, 0.3, 0.4};
    for (std::size_t z = 0; z < rep.critical_points.size(); ++z)
        parts.push_back(
            hermite_quasimode(rep, V, static_cast<int>(z), {0, 0}, beta, g).measure());
    GridMeasure mix = GridMeasure::mixture(parts, weights);
    double lhs = fisher_information(mix, gen);
    double rhs = 0.0;
    for (std::size_t p = 0; p < parts.size(); ++p)
        rhs += weights[p] * fisher_information(parts[p], gen);
    CHECK(lhs <= rhs + 1e-12 * (1 + rhs));
}

TEST_CASE("L3 exactness: witness value reproduces the spectral combination") {
    Potential V = oracle::tilted_double_well();
    LandscapeReport rep = analyze_landscape(V);
    Grid g = Grid::over(V.box(), 4001);
    const double beta = 12.0;
    WitnessReport rpt = gamma_witness_suite(rep, V, {beta}, g, {});
    DiscreteGenerator gen = build_generator(V, g, beta, {});
    SpectralResult res = lowest_eigenpairs(gen, std::min(rep.n_wells() + 2, 8));
    double w1 = rep.barrier(1)->W;
    for (const auto& row : rpt.rows) {
        if (row.level != 3 || row.skipped) continue;
        if (row.label.find("delta at x_k") != std::string::npos)
            CHECK(row.computed ==
                  doctest::Approx(2.0 * std::exp(beta * w1) * res.eigenvalues[1]).epsilon(1e-12));
        if (row.label.find("half") != std::string::npos)
            CHECK(row.computed ==
                  doctest::Approx(std::exp(beta * w1) *
                                  (res.eigenvalues[0] + res.eigenvalues[1]))
                      .epsilon(1e-10));
    }
}
