#pragma once

#include "multiwell/gamma.hpp"
#include "multiwell/landscape.hpp"
#include "multiwell/measures.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mw {

// Detailed-balance discretization of L_beta f = Lap f - beta grad V . grad f
// on a cell-centered grid: edge weights w_ij = h_a^{-2} e^{-beta(V_mid - V_i)}
// with V_mid the edge midpoint value, Gibbs vector m_i = e^{-beta V_i} |cell|.
// Row sums vanish identically and m_i w_ij = m_j w_ji holds exactly; the
// conjugation by diag(sqrt m_i) therefore yields a symmetric matrix with
// off-diagonal -h_a^{-2} and diagonal h_a^{-2} sum_j e^{beta(V_i - V_j)/2},
// which is what the solvers see (weights in log space, no Gibbs underflow).
struct DiscreteGenerator {
    Grid grid;
    double beta = 1.0;
    std::vector<double> vnode;  // V at cell centers
    // e^{beta (V_i - V_j)/2} per edge in for_each_edge traversal order
    std::vector<double> edge_g;

    double vmin = 0.0;  // min over nodes, for log-space Gibbs weights

    /// log m_i (unnormalized): -beta V_i + log cell volume.
    double log_gibbs(std::size_t i) const;
    /// Edge weight w_ij of the (Lu)_i = sum w_ij (u_j - u_i) form.
    double weight(std::size_t i, std::size_t j, int axis) const;

    /// y = -(1/beta) L̂_sym psi in the flat representation.
    void apply_sym(const Eigen::VectorXd& psi, Eigen::VectorXd& y) const;
    /// Dirichlet form of the flat amplitude; equals beta * Rayleigh numerator.
    double dirichlet(const Eigen::VectorXd& psi) const;
    /// Normalized flat Gibbs amplitude sqrt(m)/||sqrt(m)|| (the exact kernel).
    Eigen::VectorXd gibbs_flat() const;

    std::size_t size() const { return grid.size(); }
};

struct SpectralOptions {
    double solver_tol = 1e-10;
    int max_lanczos = 500;        // iteration cap for the 2-d shift-invert solver
    int dense_node_cap = 8192;    // 1-d grids up to this size use the tridiagonal path
    double guard_tail_mass = 1e-12;
};

/// Assembles the generator after the resolution guard
/// beta * h * max|grad V| <= 1, with the max taken over cells carrying all but
/// a 1e-12 tail of the Gibbs mass.
DiscreteGenerator build_generator(const Potential& V, const Grid& grid, double beta,
                                  const SpectralOptions& opts = {});

struct SpectralResult {
    double beta = 1.0;
    Grid grid;
    std::vector<double> eigenvalues;        // ell_{beta,k}, ascending
    std::vector<Eigen::VectorXd> vectors;   // flat representation, l2-orthonormal
    std::vector<double> residuals;          // ||A psi - ell psi||_2
    double coverage = 0.0;  // eigenvalues below this are complete (with multiplicity)

    GridMeasure eigen_measure(int k) const;  // (Phi_k)^2 m_beta, carries the amplitude
};

/// The count+1 smallest eigenpairs of -(1/beta) L̂: tridiagonal LAPACK solve in
/// 1-d, shift-invert Lanczos with full reorthogonalization in 2-d. Reported
/// eigenvalues are the Dirichlet-form Rayleigh quotients of the computed
/// vectors, so they are exactly consistent with fisher_information.
SpectralResult lowest_eigenpairs(const DiscreteGenerator& gen, int count,
                                 double solver_tol = 1e-10, const SpectralOptions& opts = {});

/// All eigenpairs with eigenvalue <= bound (plus one beyond when available).
SpectralResult eigenpairs_below(const DiscreteGenerator& gen, double bound,
                                double solver_tol = 1e-10, const SpectralOptions& opts = {});

// Harmonic-oscillator prediction lambda_{z,n} = zeta(z)/2 + sum n_a |xi_a(z)|
// for the bounded spectrum, with multiplicity clusters S_lambda.
struct HarmonicPrediction {
    struct Level {
        double lambda = 0.0;
        int cp_index = -1;            // into report.critical_points
        std::array<int, 2> nbar{0, 0};
    };
    struct Cluster {
        double lambda = 0.0;
        int multiplicity = 0;
    };
    double lambda_max = 0.0;
    std::vector<Level> levels;      // sorted by lambda
    std::vector<Cluster> clusters;  // ties grouped within tie_tol
};

HarmonicPrediction harmonic_spectrum(const LandscapeReport& report, const Potential& V,
                                     double lambda_max, double tie_tol = 1e-6);

/// Default spectral window 1.25 * max_z lambda_{z,0}.
double default_lambda_max(const LandscapeReport& report, const Potential& V);

/// Eyring-Kramers eigenvalue prediction (1/2) eta_k e^{-beta W_k}.
double kramers_prediction(const LandscapeReport& report, double beta, int k);

struct ComparisonReport {
    struct ClusterRow {
        double lambda = 0.0;
        int predicted = 0;
        int computed = 0;
        bool covered = true;  // false when the window exceeds solver coverage
    };
    struct KramersRow {
        int k = 0;
        double ell = 0.0;
        double prediction = 0.0;
        double ratio = 0.0;     // e^{beta W_k} ell / (eta_k / 2)
        bool skipped = false;
        std::string reason;
    };
    double beta = 0.0;
    double epsilon = 0.0;
    std::vector<ClusterRow> clusters;
    std::vector<KramersRow> kramers;
};

/// Cluster-count and Kramers-ratio comparison at one beta. epsilon <= 0 picks
/// the default: half the minimal gap between distinct predicted levels.
ComparisonReport compare_spectra(const SpectralResult& result, const HarmonicPrediction& pred,
                                 const LandscapeReport& report, double epsilon = 0.0);

}  // namespace mw
