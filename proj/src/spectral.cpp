#include "multiwell/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mw {

double DiscreteGenerator::log_gibbs(std::size_t i) const {
    return -beta * vnode[i] + std::log(grid.cell_volume());
}

double DiscreteGenerator::weight(std::size_t i, std::size_t j, int axis) const {
    // w_ij = h^{-2} e^{-beta (V_mid - V_i)} with V_mid = (V_i + V_j)/2
    double h = grid.h(axis);
    return std::exp(-0.5 * beta * (vnode[j] - vnode[i])) / (h * h);
}

void DiscreteGenerator::apply_sym(const Eigen::VectorXd& psi, Eigen::VectorXd& y) const {
    y.setZero(psi.size());
    std::size_t e = 0;
    grid.for_each_edge([&](std::size_t i, std::size_t j, int axis) {
        double invh2 = 1.0 / (grid.h(axis) * grid.h(axis));
        double g = edge_g[e++];
        y[i] += invh2 * (g * psi[i] - psi[j]);
        y[j] += invh2 * (psi[j] / g - psi[i]);
    });
    y /= beta;
}

double DiscreteGenerator::dirichlet(const Eigen::VectorXd& psi) const {
    return dirichlet_form(grid, vnode, beta, psi);
}

Eigen::VectorXd DiscreteGenerator::gibbs_flat() const {
    Eigen::VectorXd p(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) p[i] = std::exp(-0.5 * beta * (vnode[i] - vmin));
    p /= p.norm();
    return p;
}

DiscreteGenerator build_generator(const Potential& V, const Grid& grid, double beta,
                                  const SpectralOptions& opts) {
    if (beta <= 0) throw Error("build_generator: beta must be positive");
    double gmax = gibbs_effective_grad_max(V, grid, beta, opts.guard_tail_mass);
    double guard = beta * grid.max_h() * gmax;
    if (guard > 1.0) {
        std::ostringstream os;
        os.precision(6);
        os << "beta h max|grad V| = " << guard << " > 1 over the Gibbs-carrying region; need h <= "
           << 1.0 / (beta * gmax);
        throw ResolutionGuardFailed(os.str());
    }
    DiscreteGenerator gen;
    gen.grid = grid;
    gen.beta = beta;
    gen.vnode.resize(grid.size());
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        gen.vnode[i] = V.value(grid.node(i));
        vmin = std::min(vmin, gen.vnode[i]);
    }
    gen.vmin = vmin;
    gen.edge_g.reserve(2 * grid.size());
    grid.for_each_edge([&](std::size_t i, std::size_t j, int) {
        gen.edge_g.push_back(std::exp(0.5 * beta * (gen.vnode[i] - gen.vnode[j])));
    });
    return gen;
}

GridMeasure SpectralResult::eigen_measure(int k) const {
    if (k < 0 || k >= static_cast<int>(vectors.size()))
        throw Error("SpectralResult: eigenpair index out of range");
    return GridMeasure::from_flat_amplitude(grid, beta, vectors[k]);
}

namespace {

/// Tridiagonal representation of the symmetrized -(1/beta) L̂ in 1-d.
void tridiag_1d(const DiscreteGenerator& gen, std::vector<double>& diag,
                std::vector<double>& off) {
    const std::size_t n = gen.size();
    const double ih2 = 1.0 / (gen.grid.h(0) * gen.grid.h(0));
    diag.assign(n, 0.0);
    off.assign(n - 1, -ih2 / gen.beta);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double g = std::exp(0.5 * gen.beta * (gen.vnode[i] - gen.vnode[i + 1]));
        diag[i] += ih2 * g / gen.beta;
        diag[i + 1] += ih2 / g / gen.beta;
    }
}

SpectralResult finalize_result(const DiscreteGenerator& gen, std::vector<double>&& w,
                               std::vector<Eigen::VectorXd>&& z, double coverage) {
    SpectralResult res;
    res.beta = gen.beta;
    res.grid = gen.grid;
    res.coverage = coverage;
    // sort ascending, then report the Dirichlet-form Rayleigh quotient of each
    // vector so eigenvalues and fisher_information share one accumulation
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
    Eigen::VectorXd y;
    for (std::size_t r : order) {
        Eigen::VectorXd psi = std::move(z[r]);
        psi /= psi.norm();
        double ell = gen.dirichlet(psi) / gen.beta;
        gen.apply_sym(psi, y);
        res.residuals.push_back((y - ell * psi).norm());
        res.eigenvalues.push_back(ell);
        res.vectors.push_back(std::move(psi));
    }
    return res;
}

SpectralResult solve_1d(const DiscreteGenerator& gen, char range, int count, double bound) {
    const lapack_int n = static_cast<lapack_int>(gen.size());
    std::vector<double> diag, off;
    tridiag_1d(gen, diag, off);

    lapack_int m = 0;
    lapack_int il = 1, iu = std::min<lapack_int>(count + 1, n);
    double vl = -1.0, vu = bound;
    lapack_int zcols = range == 'I' ? (iu - il + 1) : n;
    std::vector<double> w(n), z(static_cast<std::size_t>(n) * zcols);
    std::vector<lapack_int> isuppz(2 * std::max<lapack_int>(1, zcols));
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', range, n, diag.data(), off.data(), vl,
                                     vu, il, iu, 0.0, &m, w.data(), z.data(), n, isuppz.data());
    if (info != 0)
        throw SolverStagnation("LAPACK dstevr failed with info=" + std::to_string(info));

    std::vector<double> evals(w.begin(), w.begin() + m);
    std::vector<Eigen::VectorXd> vecs;
    vecs.reserve(m);
    for (lapack_int c = 0; c < m; ++c)
        vecs.emplace_back(Eigen::Map<Eigen::VectorXd>(z.data() + static_cast<std::size_t>(c) * n, n));
    double coverage = range == 'I' ? (m > 0 ? evals.back() : 0.0) : bound;
    return finalize_result(gen, std::move(evals), std::move(vecs), coverage);
}

std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Shift-invert subspace iteration with Rayleigh-Ritz: block structure handles
// the near-degenerate clusters the harmonic prediction expects, and the known
// Gibbs kernel vector is planted in the initial block.
SpectralResult solve_2d(const DiscreteGenerator& gen, int count, double solver_tol,
                        const SpectralOptions& opts) {
    const Eigen::Index n = static_cast<Eigen::Index>(gen.size());
    const int want = count + 1;
    const int p = std::min<Eigen::Index>(want + 4, n);

    Eigen::SparseMatrix<double> A(n, n);
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(5 * static_cast<std::size_t>(n));
        std::vector<double> diag(n, 0.0);
        std::size_t e = 0;
        gen.grid.for_each_edge([&](std::size_t i, std::size_t j, int axis) {
            double ih2 = 1.0 / (gen.grid.h(axis) * gen.grid.h(axis));
            double g = gen.edge_g[e++];
            diag[i] += ih2 * g;
            diag[j] += ih2 / g;
            trip.emplace_back(static_cast<int>(i), static_cast<int>(j), -ih2 / gen.beta);
            trip.emplace_back(static_cast<int>(j), static_cast<int>(i), -ih2 / gen.beta);
        });
        double maxdiag = *std::max_element(diag.begin(), diag.end()) / gen.beta;
        double tau = std::max(1e-12, 1e-10 * maxdiag);
        for (Eigen::Index i = 0; i < n; ++i)
            trip.emplace_back(i, i, diag[i] / gen.beta + tau);
        A.setFromTriplets(trip.begin(), trip.end());
    }

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw SolverStagnation("LDLT factorization of the shifted generator failed");

    // deterministic start block: Gibbs vector plus hashed noise
    Eigen::MatrixXd Q(n, p);
    Q.col(0) = gen.gibbs_flat();
    std::uint64_t s = 0x5eedULL + static_cast<std::uint64_t>(n);
    for (int c = 1; c < p; ++c)
        for (Eigen::Index i = 0; i < n; ++i)
            Q(i, c) = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53 - 0.5;
    {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
        Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    }

    const double scale = A.coeffs().abs().maxCoeff();
    Eigen::VectorXd theta(p), resid(p);
    Eigen::VectorXd y;
    for (int iter = 0; iter < opts.max_lanczos; ++iter) {
        Eigen::MatrixXd Z = ldlt.solve(Q);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
        Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);

        // Rayleigh-Ritz on the original operator
        Eigen::MatrixXd AQ(n, p);
        for (int c = 0; c < p; ++c) {
            Eigen::VectorXd qc = Q.col(c);
            gen.apply_sym(qc, y);
            AQ.col(c) = y;
        }
        Eigen::MatrixXd H = Q.transpose() * AQ;
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        Q = (Q * es.eigenvectors()).eval();
        AQ = (AQ * es.eigenvectors()).eval();
        theta = es.eigenvalues();

        bool done = true;
        for (int c = 0; c < want; ++c) {
            resid[c] = (AQ.col(c) - theta[c] * Q.col(c)).norm();
            if (resid[c] > std::max(solver_tol * std::abs(theta[c]), 1e-13 * scale)) done = false;
        }
        if (done) {
            std::vector<double> w(theta.data(), theta.data() + want);
            std::vector<Eigen::VectorXd> vecs;
            for (int c = 0; c < want; ++c) vecs.emplace_back(Q.col(c));
            return finalize_result(gen, std::move(w), std::move(vecs),
                                   want < p ? theta[want] : theta[want - 1]);
        }
    }
    std::ostringstream os;
    os << "subspace iteration did not converge in " << opts.max_lanczos
       << " sweeps; residuals:";
    for (int c = 0; c < want; ++c) os << " " << resid[c];
    throw SolverStagnation(os.str());
}

}  // namespace

SpectralResult lowest_eigenpairs(const DiscreteGenerator& gen, int count, double solver_tol,
                                 const SpectralOptions& opts) {
    if (count < 0 || count > 40) throw Error("lowest_eigenpairs: count must be in 0..40");
    if (gen.grid.dim() == 1) return solve_1d(gen, 'I', count, 0.0);
    return solve_2d(gen, count, solver_tol, opts);
}

SpectralResult eigenpairs_below(const DiscreteGenerator& gen, double bound, double solver_tol,
                                const SpectralOptions& opts) {
    if (gen.grid.dim() == 1) return solve_1d(gen, 'V', 0, bound);
    // 2-d: grow the block until the window is covered
    for (int count = 8; count <= 40; count += 8) {
        SpectralResult res = solve_2d(gen, count, solver_tol, opts);
        if (res.eigenvalues.back() > bound || count + 1 >= static_cast<int>(gen.size()))
            return res;
    }
    return solve_2d(gen, 40, solver_tol, opts);
}

double kramers_prediction(const LandscapeReport& report, double beta, int k) {
    double eta = eta_k(report, k);  // validates k and the A.4/A.5 flags
    const BarrierRecord* b = report.barrier(k);
    return 0.5 * eta * std::exp(-beta * b->W);
}

HarmonicPrediction harmonic_spectrum(const LandscapeReport& report, const Potential& V,
                                     double lambda_max, double tie_tol) {
    HarmonicPrediction pred;
    pred.lambda_max = lambda_max;
    const int d = V.dim();
    // eigenvalues carry Newton-level noise, so the window edge gets the same
    // tolerance that groups the clusters
    const double bound = lambda_max + tie_tol;
    for (std::size_t z = 0; z < report.critical_points.size(); ++z) {
        const CriticalPoint& cp = report.critical_points[z];
        double base = zeta(cp, d) / 2.0;
        if (base > bound) continue;
        std::array<double, 2> axi{std::abs(cp.hess_eigs[0]),
                                  d == 2 ? std::abs(cp.hess_eigs[1]) : 0.0};
        int n0max = static_cast<int>((bound - base) / axi[0]);
        for (int n0 = 0; n0 <= n0max; ++n0) {
            if (d == 1) {
                double lam = base + n0 * axi[0];
                if (lam <= bound)
                    pred.levels.push_back({lam, static_cast<int>(z), {n0, 0}});
            } else {
                double rem = bound - base - n0 * axi[0];
                if (rem < 0) break;
                int n1max = static_cast<int>(rem / axi[1]);
                for (int n1 = 0; n1 <= n1max; ++n1)
                    pred.levels.push_back(
                        {base + n0 * axi[0] + n1 * axi[1], static_cast<int>(z), {n0, n1}});
            }
        }
    }
    std::sort(pred.levels.begin(), pred.levels.end(),
              [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    for (const auto& lev : pred.levels) {
        if (!pred.clusters.empty() && lev.lambda - pred.clusters.back().lambda <= tie_tol)
            ++pred.clusters.back().multiplicity;
        else
            pred.clusters.push_back({lev.lambda, 1});
    }
    return pred;
}

double default_lambda_max(const LandscapeReport& report, const Potential& V) {
    double m = 0.0;
    for (const auto& cp : report.critical_points) m = std::max(m, zeta(cp, V.dim()) / 2.0);
    return 1.25 * m;
}

ComparisonReport compare_spectra(const SpectralResult& result, const HarmonicPrediction& pred,
                                 const LandscapeReport& report, double epsilon) {
    ComparisonReport rep;
    rep.beta = result.beta;

    if (epsilon <= 0) {
        // half the minimal gap between distinct predicted levels
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < pred.clusters.size(); ++i)
            gap = std::min(gap, pred.clusters[i].lambda - pred.clusters[i - 1].lambda);
        epsilon = std::isfinite(gap) ? 0.5 * gap : 1.0;
    }
    rep.epsilon = epsilon;

    for (const auto& cl : pred.clusters) {
        ComparisonReport::ClusterRow row;
        row.lambda = cl.lambda;
        row.predicted = cl.multiplicity;
        row.covered = cl.lambda + epsilon <= result.coverage;
        for (double ell : result.eigenvalues)
            if (ell > cl.lambda - epsilon && ell < cl.lambda + epsilon) ++row.computed;
        rep.clusters.push_back(row);
    }

    for (int k = 1; k <= report.n_wells(); ++k) {
        ComparisonReport::KramersRow row;
        row.k = k;
        if (k >= static_cast<int>(result.eigenvalues.size())) {
            row.skipped = true;
            row.reason = "eigenvalue k not computed";
            rep.kramers.push_back(row);
            continue;
        }
        row.ell = result.eigenvalues[k];
        try {
            row.prediction = kramers_prediction(report, result.beta, k);
            row.ratio = row.ell / row.prediction;
        } catch (const AssumptionViolated& e) {
            row.skipped = true;
            row.reason = e.what();
        } catch (const SaddleRefinementFailed& e) {
            row.skipped = true;
            row.reason = e.what();
        }
        rep.kramers.push_back(row);
    }
    return rep;
}

}  // namespace mw
