#pragma once

#include "multiwell/landscape.hpp"
#include "multiwell/measures.hpp"

#include <span>

namespace mw {

struct DiscreteGenerator;  // spectral.hpp

/// zeta(z) = 2 sum_{xi_i < 0} |xi_i| from the sorted Hessian eigenvalues.
/// Throws DegenerateInput when an eigenvalue is within degeneracy_tol of 0;
/// the +infinity branch (non-critical query points) is handled by callers.
double zeta(std::span<const double> hess_eigs, double degeneracy_tol = 1e-6);
double zeta(const CriticalPoint& cp, int dim, double degeneracy_tol = 1e-6);

/// Eyring-Kramers prefactor
///   eta_k = |xi_1(x̂_k)| / pi * sqrt(det hess V(x_k) / |det hess V(x̂_k)|).
/// Rejects k outside 1..n and throws AssumptionViolated when A.4/A.5 failed
/// for this k.
double eta_k(const LandscapeReport& report, int k);

/// I(mu) = integral |grad V|^2 dmu  (no 1/2 in front; see README on the
/// factor-two convention).
double eval_I(const AtomicMeasure& mu, const Potential& V);
double eval_I(const GridMeasure& mu, const Potential& V);

struct SupportOptions {
    double atom_tol;  // classification radius for atoms sitting on critical points
    explicit SupportOptions(double tol) : atom_tol(tol) {}
    static SupportOptions for_grid(const Grid& g) { return SupportOptions(2.0 * g.max_h()); }
};

/// J(mu) = sum alpha_y zeta(y) when every atom sits on a critical point,
/// +infinity marker otherwise.
ExtReal eval_J(const AtomicMeasure& mu, const LandscapeReport& report, const SupportOptions& sup,
               double degeneracy_tol = 1e-6);

/// J_k(mu) = alpha_k eta_k(x_k) when the support lies in {x_0..x_k},
/// +infinity marker otherwise.
ExtReal eval_Jk(const AtomicMeasure& mu, const LandscapeReport& report, int k,
                const SupportOptions& sup);

struct FisherOptions {
    double floor_tol = 1e-300;
};

// Rescaled Fisher information of a grid measure against m_beta: the discrete
// Dirichlet form (2/beta^2) sum_edges h_a^{-2} (E psi_i - psi_j/E)^2 with
// E = exp(beta(V_i - V_j)/4) and psi the flat square-root amplitude. The same
// edge accumulation defines the generator's quadratic form, so spectral
// identities hold to machine precision rather than asymptotically.
double fisher_information(const GridMeasure& mu, const Potential& V, double beta,
                          const FisherOptions& opts = {});
/// Same, but against an assembled generator; throws GridMismatch when the
/// measure lives on a different grid.
double fisher_information(const GridMeasure& mu, const DiscreteGenerator& gen,
                          const FisherOptions& opts = {});

/// Edge-sum Dirichlet form D(psi) = beta <Phi, -(1/beta)L Phi>_{m_beta} of a
/// flat amplitude; fisher_information is (2/beta^2) D and eigenvalues are
/// reported as D(psi)/beta.
double dirichlet_form(const Grid& grid, const std::vector<double>& vnode, double beta,
                      const Eigen::VectorXd& psi);

// Exact discrete coercivity profile: node coefficients c_i with
// fisher_information(mu) >= sum_i mu_i c_i for every grid measure, obtained
// from the edge inequality with the discrete witness t_e = -(beta/2)(V_j-V_i).
// `continuum` receives r_i = 1/2 (|grad V|^2 - (2/beta) Lap V)(x_i); eps_grid
// = max_i (r_i - c_i)_+ is the documented quadrature slack for the e:coerc1
// style bound.
struct CoercivityProfile {
    Eigen::VectorXd discrete;   // c_i
    Eigen::VectorXd continuum;  // r_i
    double eps_grid = 0.0;
};
CoercivityProfile coercivity_profile(const Potential& V, const Grid& grid, double beta);

/// Quadrature of an arbitrary node profile against the measure.
double integrate(const GridMeasure& mu, const Eigen::VectorXd& node_values);

}  // namespace mw
