#pragma once

#include "multiwell/grid.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace mw {

/// Finite convex combination of Dirac masses.
struct AtomicMeasure {
    struct Atom {
        Vec point = Vec::Zero();
        double weight = 0.0;
    };
    std::vector<Atom> atoms;

    static AtomicMeasure dirac(const Vec& p) { return AtomicMeasure{{{p, 1.0}}}; }
    void validate() const;  // weights >= 0, sum to 1 within 1e-12
};

// Probability measure as a nonnegative density against Lebesgue measure on a
// grid (midpoint quadrature: sum density * cell_volume = 1). The optional
// `amplitude` is a signed square-root representative in the flat (sqrt m_beta
// weighted) representation with amplitude_i^2 = density_i * cell_volume;
// measures built from eigenfunctions carry it so the Dirichlet form can be
// evaluated on the signed function.
struct GridMeasure {
    Grid grid;
    double beta = 1.0;
    Eigen::VectorXd density;                    // values >= 0 w.r.t. dx
    std::optional<Eigen::VectorXd> amplitude;   // flat representation, l2-normalized

    void validate(double quad_tol = 1e-8) const;

    static GridMeasure from_density(const Grid& g, double beta, Eigen::VectorXd unnormalized);
    /// Gibbs measure e^{-beta V}/Z on the grid (weights handled in log space).
    static GridMeasure gibbs(const Grid& g, double beta, const std::vector<double>& vnode);
    /// Measure |psi|^2 with psi an l2-normalized flat amplitude (e.g. an
    /// eigenvector of the symmetrized generator or a quasimode).
    static GridMeasure from_flat_amplitude(const Grid& g, double beta, Eigen::VectorXd psi);
    /// Convex mixture; amplitudes do not mix (dropped unless a single term).
    static GridMeasure mixture(const std::vector<GridMeasure>& parts,
                               const std::vector<double>& weights);
};

/// Nodal function on a grid. Values are stored in the flat representation
/// (psi = Phi sqrt(m_beta pointwise)), so the declared m_beta norm is the
/// plain l2 norm; dx-normalized functions store plain nodal values.
struct GridFunction {
    enum class Norm { m_beta, dx };
    Grid grid;
    double beta = 1.0;
    Norm norm = Norm::m_beta;
    Eigen::VectorXd values;

    void validate(double tol = 1e-10) const;
    GridMeasure measure() const;  // |f|^2 as probability measure (m_beta-normalized only)
};

}  // namespace mw
