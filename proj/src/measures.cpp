#include "multiwell/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mw {

void AtomicMeasure::validate() const {
    if (atoms.empty()) throw Error("AtomicMeasure: no atoms");
    double s = 0.0;
    for (const auto& a : atoms) {
        if (a.weight < 0) throw Error("AtomicMeasure: negative weight");
        s += a.weight;
    }
    if (std::abs(s - 1.0) > 1e-12) throw Error("AtomicMeasure: weights sum to " + std::to_string(s));
}

void GridMeasure::validate(double quad_tol) const {
    if (density.size() != static_cast<Eigen::Index>(grid.size()))
        throw Error("GridMeasure: density size does not match grid");
    if (beta <= 0) throw Error("GridMeasure: beta must be positive");
    double mass = density.sum() * grid.cell_volume();
    if ((density.array() < 0).any()) throw Error("GridMeasure: negative density");
    if (std::abs(mass - 1.0) > quad_tol)
        throw Error("GridMeasure: quadrature mass " + std::to_string(mass));
}

GridMeasure GridMeasure::from_density(const Grid& g, double beta, Eigen::VectorXd unnormalized) {
    if (unnormalized.size() != static_cast<Eigen::Index>(g.size()))
        throw Error("GridMeasure: density size does not match grid");
    double mass = unnormalized.sum() * g.cell_volume();
    if (!(mass > 0) || !std::isfinite(mass))
        throw Error("GridMeasure: cannot normalize density with mass " + std::to_string(mass));
    GridMeasure mu;
    mu.grid = g;
    mu.beta = beta;
    mu.density = unnormalized / mass;
    return mu;
}

GridMeasure GridMeasure::gibbs(const Grid& g, double beta, const std::vector<double>& vnode) {
    // shift by min V so the weights stay representable at large beta
    double vmin = *std::min_element(vnode.begin(), vnode.end());
    Eigen::VectorXd d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = std::exp(-beta * (vnode[i] - vmin));
    return from_density(g, beta, std::move(d));
}

GridMeasure GridMeasure::from_flat_amplitude(const Grid& g, double beta, Eigen::VectorXd psi) {
    if (psi.size() != static_cast<Eigen::Index>(g.size()))
        throw Error("GridMeasure: amplitude size does not match grid");
    double n2 = psi.squaredNorm();
    if (!(n2 > 0)) throw Error("GridMeasure: zero amplitude");
    if (std::abs(n2 - 1.0) > 1e-12) psi /= std::sqrt(n2);
    GridMeasure mu;
    mu.grid = g;
    mu.beta = beta;
    mu.density = psi.array().square() / g.cell_volume();
    mu.amplitude = std::move(psi);
    return mu;
}

GridMeasure GridMeasure::mixture(const std::vector<GridMeasure>& parts,
                                 const std::vector<double>& weights) {
    if (parts.empty() || parts.size() != weights.size())
        throw Error("GridMeasure::mixture: need matching parts and weights");
    GridMeasure mu;
    mu.grid = parts[0].grid;
    mu.beta = parts[0].beta;
    mu.density = Eigen::VectorXd::Zero(parts[0].density.size());
    double wsum = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].grid != mu.grid) throw GridMismatch("mixture parts on different grids");
        mu.density += weights[i] * parts[i].density;
        wsum += weights[i];
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw Error("GridMeasure::mixture: weights sum to != 1");
    if (parts.size() == 1) mu.amplitude = parts[0].amplitude;
    return mu;
}

void GridFunction::validate(double tol) const {
    if (values.size() != static_cast<Eigen::Index>(grid.size()))
        throw Error("GridFunction: value size does not match grid");
    double n;
    if (norm == Norm::m_beta)
        n = values.norm();  // flat representation carries the m_beta norm
    else
        n = std::sqrt(values.squaredNorm() * grid.cell_volume());
    if (std::abs(n - 1.0) > tol)
        throw Error("GridFunction: declared norm is " + std::to_string(n));
}

GridMeasure GridFunction::measure() const {
    if (norm != Norm::m_beta)
        throw Error("GridFunction::measure: only m_beta-normalized functions induce measures");
    return GridMeasure::from_flat_amplitude(grid, beta, values);
}

}  // namespace mw
