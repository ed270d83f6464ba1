#include "multiwell/gamma.hpp"

#include "multiwell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mw {

double zeta(std::span<const double> hess_eigs, double degeneracy_tol) {
    if (hess_eigs.empty()) throw Error("zeta: empty eigenvalue list");
    double s = 0.0;
    for (double xi : hess_eigs) {
        if (std::abs(xi) < degeneracy_tol)
            throw DegenerateInput("zeta: |xi| = " + std::to_string(std::abs(xi)) +
                                  " below degeneracy tolerance");
        if (xi < 0) s += -xi;
    }
    return 2.0 * s;
}

double zeta(const CriticalPoint& cp, int dim, double degeneracy_tol) {
    return zeta(std::span<const double>(cp.hess_eigs.data(), static_cast<std::size_t>(dim)),
                degeneracy_tol);
}

double eta_k(const LandscapeReport& report, int k) {
    if (k < 1 || k > report.n_wells())
        throw Error("eta_k: k must be in 1..n (W_0 = +infinity)");
    if (report.assumptions.a4_fails_for(k))
        throw AssumptionViolated("eta_k: A.4 failed for k=" + std::to_string(k));
    if (report.assumptions.a5_ties(k))
        throw AssumptionViolated("eta_k: A.5 tie involves k=" + std::to_string(k));
    const BarrierRecord* b = report.barrier(k);
    if (!b) throw Error("eta_k: no barrier record for k=" + std::to_string(k));
    if (!b->refined)
        throw SaddleRefinementFailed("eta_k: saddle for k=" + std::to_string(k) + " not refined");

    const CriticalPoint& xk = report.minimum(k);
    const CriticalPoint& sad = b->saddle;
    const int dim = report.dim;
    double xi1 = sad.hess_eigs[0];
    if (xi1 >= 0) throw Error("eta_k: stored saddle is not index-1");
    double det_min = xk.det_hess(dim);
    double det_sad = sad.det_hess(dim);
    return std::abs(xi1) / std::numbers::pi * std::sqrt(det_min / std::abs(det_sad));
}

double eval_I(const AtomicMeasure& mu, const Potential& V) {
    mu.validate();
    double s = 0.0;
    for (const auto& a : mu.atoms) s += a.weight * V.gradient(a.point).squaredNorm();
    return s;
}

double eval_I(const GridMeasure& mu, const Potential& V) {
    const double vol = mu.grid.cell_volume();
    double s = 0.0;
    for (std::size_t i = 0; i < mu.grid.size(); ++i)
        s += mu.density[i] * V.gradient(mu.grid.node(i)).squaredNorm();
    return s * vol;
}

namespace {

/// Nearest critical point within atom_tol, or -1.
int classify_atom(const Vec& p, const LandscapeReport& report, double atom_tol) {
    int best = -1;
    double bd = atom_tol;
    for (std::size_t i = 0; i < report.critical_points.size(); ++i) {
        double d = (report.critical_points[i].location - p).norm();
        if (d <= bd) {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace

ExtReal eval_J(const AtomicMeasure& mu, const LandscapeReport& report, const SupportOptions& sup,
               double degeneracy_tol) {
    mu.validate();
    const int dim = report.dim;
    double s = 0.0;
    for (const auto& a : mu.atoms) {
        int cp = classify_atom(a.point, report, sup.atom_tol);
        if (cp < 0) return ExtReal::infinity();
        s += a.weight * zeta(report.critical_points[cp], dim, degeneracy_tol);
    }
    return s;
}

ExtReal eval_Jk(const AtomicMeasure& mu, const LandscapeReport& report, int k,
                const SupportOptions& sup) {
    mu.validate();
    if (k < 1 || k > report.n_wells()) throw Error("eval_Jk: k must be in 1..n");
    double alpha_k = 0.0;
    for (const auto& a : mu.atoms) {
        int cp = classify_atom(a.point, report, sup.atom_tol);
        bool allowed = false;
        for (int j = 0; j <= k; ++j)
            if (cp == report.minima_ordered[j]) {
                allowed = true;
                if (j == k) alpha_k += a.weight;
            }
        if (!allowed) return ExtReal::infinity();
    }
    if (alpha_k == 0.0) return 0.0;
    return alpha_k * eta_k(report, k);
}

double dirichlet_form(const Grid& grid, const std::vector<double>& vnode, double beta,
                      const Eigen::VectorXd& psi) {
    double total = 0.0;
    grid.for_each_edge([&](std::size_t i, std::size_t j, int axis) {
        double e = std::exp(beta * (vnode[i] - vnode[j]) * 0.25);
        double t = e * psi[i] - psi[j] / e;
        total += t * t / (grid.h(axis) * grid.h(axis));
    });
    return total;
}

namespace {

Eigen::VectorXd flat_amplitude(const GridMeasure& mu, const FisherOptions& opts) {
    if (mu.amplitude) return *mu.amplitude;
    const double vol = mu.grid.cell_volume();
    Eigen::VectorXd psi(mu.density.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i)
        psi[i] = std::sqrt(std::max(mu.density[i], opts.floor_tol) * vol);
    return psi;
}

}  // namespace

double fisher_information(const GridMeasure& mu, const Potential& V, double beta,
                          const FisherOptions& opts) {
    std::vector<double> vnode(mu.grid.size());
    for (std::size_t i = 0; i < mu.grid.size(); ++i) vnode[i] = V.value(mu.grid.node(i));
    Eigen::VectorXd psi = flat_amplitude(mu, opts);
    return 2.0 / (beta * beta) * dirichlet_form(mu.grid, vnode, beta, psi);
}

double fisher_information(const GridMeasure& mu, const DiscreteGenerator& gen,
                          const FisherOptions& opts) {
    if (mu.grid != gen.grid)
        throw GridMismatch("fisher_information: measure grid differs from operator grid");
    Eigen::VectorXd psi = flat_amplitude(mu, opts);
    return 2.0 / (gen.beta * gen.beta) * gen.dirichlet(psi);
}

CoercivityProfile coercivity_profile(const Potential& V, const Grid& grid, double beta) {
    const std::size_t n = grid.size();
    std::vector<double> vnode(n);
    for (std::size_t i = 0; i < n; ++i) vnode[i] = V.value(grid.node(i));

    // Exact edge inequality (u_i - u_j)^2 >= t (u_i^2 - u_j^2) - t^2 (u_i + u_j)^2 / 4
    // with t_e = -(beta/2)(V_j - V_i); using (u_i+u_j)^2 <= 2(u_i^2+u_j^2) and
    // collecting per node gives fisher(mu) >= sum_i mu_i c_i exactly.
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    grid.for_each_edge([&](std::size_t i, std::size_t j, int axis) {
        double dv = vnode[j] - vnode[i];
        double t = -0.5 * beta * dv;
        double w_over_mi = std::exp(-0.5 * beta * dv) / (grid.h(axis) * grid.h(axis));
        double w_over_mj = std::exp(0.5 * beta * dv) / (grid.h(axis) * grid.h(axis));
        c[i] += w_over_mi * (t - 0.5 * t * t);
        c[j] += w_over_mj * (-t - 0.5 * t * t);
    });
    CoercivityProfile prof;
    prof.discrete = (2.0 / (beta * beta)) * c;
    prof.continuum.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec p = grid.node(i);
        prof.continuum[i] =
            0.5 * (V.gradient(p).squaredNorm() - 2.0 / beta * V.laplacian(p));
    }
    prof.eps_grid = (prof.continuum - prof.discrete).cwiseMax(0.0).maxCoeff();
    return prof;
}

double integrate(const GridMeasure& mu, const Eigen::VectorXd& node_values) {
    if (node_values.size() != mu.density.size())
        throw GridMismatch("integrate: profile size does not match measure grid");
    return mu.density.dot(node_values) * mu.grid.cell_volume();
}

}  // namespace mw
