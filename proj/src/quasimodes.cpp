#include "multiwell/quasimodes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mw {

namespace {

/// Quintic smoothstep: 0 at u<=0, 1 at u>=1, C^2 at both ends.
double smoothstep5(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

/// Hermite function values h_n(t) e^{-t^2/2} (orthonormal weight shape) via
/// the stable normalized three-term recurrence.
double hermite_profile(int n, double t) {
    double h0 = std::exp(-0.5 * t * t);
    if (n == 0) return h0;
    double h1 = std::sqrt(2.0) * t * h0;
    for (int m = 1; m < n; ++m) {
        double h2 = std::sqrt(2.0 / (m + 1.0)) * t * h1 - std::sqrt(m / (m + 1.0)) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

}  // namespace

double default_cutoff_radius(const LandscapeReport& report, const Box& box) {
    // supports have radius 2r, so pairwise disjointness needs r < d_pair/4 and
    // staying inside the box needs r < d_boundary/2
    double dpair = std::numeric_limits<double>::infinity();
    double dbound = std::numeric_limits<double>::infinity();
    const auto& cps = report.critical_points;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        for (std::size_t j = i + 1; j < cps.size(); ++j)
            dpair = std::min(dpair, (cps[i].location - cps[j].location).norm());
        for (int a = 0; a < box.dim; ++a) {
            dbound = std::min(dbound, cps[i].location[a] - box.lo[a]);
            dbound = std::min(dbound, box.hi[a] - cps[i].location[a]);
        }
    }
    double r = std::min(0.24 * dpair, 0.49 * dbound);
    if (!std::isfinite(r) || r <= 0)
        throw Error("default_cutoff_radius: no usable critical-point separation");
    return r;
}

double default_delta(const LandscapeReport& report) {
    const int n = report.n_wells();
    if (n < 1) throw Error("default_delta: no barriers");
    double gap = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k) {
        double wk = report.barrier(k)->W;
        double wk1 = k < n ? report.barrier(k + 1)->W : 0.0;  // W_{n+1} = 0
        gap = std::min(gap, wk - wk1);
    }
    return 0.5 * gap;
}

GridFunction hermite_quasimode(const LandscapeReport& report, const Potential& V, int cp_index,
                               std::array<int, 2> nbar, double beta, const Grid& grid,
                               double cutoff_radius) {
    if (cp_index < 0 || cp_index >= static_cast<int>(report.critical_points.size()))
        throw Error("hermite_quasimode: critical point index out of range");
    const CriticalPoint& z = report.critical_points[cp_index];
    const int d = V.dim();

    double r = cutoff_radius > 0 ? cutoff_radius : default_cutoff_radius(report, V.box());
    // supports B_{2r}(z) must stay pairwise disjoint and inside the box
    for (std::size_t i = 0; i < report.critical_points.size(); ++i) {
        if (static_cast<int>(i) == cp_index) continue;
        double dist = (report.critical_points[i].location - z.location).norm();
        if (dist < 4.0 * r)
            throw CutoffOverlap("balls of radius 2r around critical points intersect (r too large)");
    }
    for (int a = 0; a < d; ++a)
        if (z.location[a] - 2.0 * r < V.box().lo[a] || z.location[a] + 2.0 * r > V.box().hi[a])
            throw CutoffOverlap("ball of radius 2r leaves the box");

    // Theta_{beta,z,n}(x): Hermite profile along each Hessian eigen-direction,
    // frequency |xi_a|, rescaled by sqrt(beta); cut off between r and 2r.
    Eigen::VectorXd psi(grid.size());
    const double sb = std::sqrt(beta);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        Vec dx = grid.node(idx) - z.location;
        double rho = dx.norm();
        double chi = 1.0 - smoothstep5((rho - r) / r);
        if (chi == 0.0) {
            psi[idx] = 0.0;
            continue;
        }
        Vec y = z.hess_frame.transpose() * dx;  // Hessian eigenframe coordinates
        double theta = 1.0;
        for (int a = 0; a < d; ++a) {
            double om = std::abs(z.hess_eigs[a]);
            double t = std::sqrt(om / 2.0) * sb * y[a];
            theta *= hermite_profile(nbar[a], t);
        }
        psi[idx] = chi * theta;
    }
    double nrm = psi.norm();
    if (!(nrm > 0)) throw Error("hermite_quasimode: vanishes on the grid (beta too large for h?)");
    psi /= nrm;

    GridFunction f;
    f.grid = grid;
    f.beta = beta;
    f.norm = GridFunction::Norm::m_beta;
    f.values = std::move(psi);
    return f;
}

GridFunction well_quasimode(const LandscapeReport& report, const Potential& V, int k, double beta,
                            double delta, const Grid& grid) {
    if (k < 1 || k > report.n_wells()) throw Error("well_quasimode: k must be in 1..n");
    const BarrierRecord* bar = report.barrier(k);
    if (!bar) throw Error("well_quasimode: no barrier record for k");
    if (delta <= 0) delta = default_delta(report);
    {
        // e:delta bound: delta < min_k (W_k - W_{k+1})
        const int n = report.n_wells();
        double gap = std::numeric_limits<double>::infinity();
        for (int kk = 1; kk <= n; ++kk) {
            double wk = report.barrier(kk)->W;
            double wk1 = kk < n ? report.barrier(kk + 1)->W : 0.0;
            gap = std::min(gap, wk - wk1);
        }
        if (delta >= gap) {
            std::ostringstream os;
            os << "delta = " << delta << " >= min_k(W_k - W_{k+1}) = " << gap;
            throw DeltaTooLarge(os.str());
        }
    }
    const CriticalPoint& xk = report.minimum(k);
    const double level = bar->merge_level;

    std::vector<double> vcell(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vcell[i] = V.value(grid.node(i));

    // Cell centers flanking the saddle dip below V(x̂_k) by O(h^2 |hess|), so
    // the strict sublevel set at exactly the saddle level can leak into the
    // neighboring well. Cut just below the level to keep B_k the single
    // component the construction expects.
    double hess_scale = 1.0;
    if (bar->refined)
        hess_scale = std::abs(bar->saddle.hess_eigs[0]) +
                     (V.dim() == 2 ? std::abs(bar->saddle.hess_eigs[1]) : 0.0);
    const double h2 = grid.max_h() * grid.max_h();
    const double level_cut =
        level - std::max(h2 * hess_scale, 1e-12 * (1.0 + std::abs(level)));

    std::size_t seed = grid.locate(xk.location);
    auto bk = sublevel_component(grid, vcell, seed, level_cut);
    auto bkd = sublevel_component(grid, vcell, seed, level - delta);
    if (bkd.empty())
        throw DeltaTooLarge("component at level V(x̂_k) - delta does not contain x_k");

    // chi = 1 on B_{k,delta}, level-adapted quintic ramp on B_k \ B_{k,delta},
    // 0 outside B_k; flat values chi e^{-beta(V - V(x_k))/2}, normalized (the
    // shift by V(x_k) cancels and keeps the weights representable).
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(grid.size());
    for (std::size_t c : bk) {
        double chi = smoothstep5((level - vcell[c]) / delta);
        psi[c] = chi * std::exp(-0.5 * beta * (vcell[c] - xk.value));
    }
    double nrm = psi.norm();
    if (!(nrm > 0)) throw Error("well_quasimode: vanished on the grid");
    psi /= nrm;

    GridFunction f;
    f.grid = grid;
    f.beta = beta;
    f.norm = GridFunction::Norm::m_beta;
    f.values = std::move(psi);
    return f;
}

GridMeasure recovery_measure_I(const Vec& xbar, double beta, const Grid& grid,
                               const Potential& V) {
    if (!V.box().contains(xbar)) throw Error("recovery_measure_I: xbar outside the box");
    Eigen::VectorXd d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        d[i] = std::exp(-2.0 * beta * (grid.node(i) - xbar).squaredNorm());
    return GridMeasure::from_density(grid, beta, std::move(d));
}

namespace {

std::string point_label(const Vec& p, int dim) {
    std::ostringstream os;
    os.precision(4);
    os << "(" << p[0];
    if (dim == 2) os << "," << p[1];
    os << ")";
    return os.str();
}

}  // namespace

WitnessReport gamma_witness_suite(const LandscapeReport& report, const Potential& V,
                                  const std::vector<double>& betas, const Grid& grid,
                                  const WitnessOptions& opts) {
    WitnessReport rep;
    const int d = V.dim();
    const SupportOptions sup = SupportOptions::for_grid(grid);

    Vec probe;
    if (opts.has_probe) {
        probe = opts.probe;
    } else {
        // default probe: between the global minimum and its nearest critical
        // neighbor, deliberately off every critical point
        probe = report.minimum(0).location;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& cp : report.critical_points) {
            double dist = (cp.location - report.minimum(0).location).norm();
            if (dist > 0 && dist < best) {
                best = dist;
                probe = report.minimum(0).location + 0.5 * (cp.location - report.minimum(0).location);
            }
        }
    }

    for (double beta : betas) {
        DiscreteGenerator gen = build_generator(V, grid, beta, opts.spectral);

        // L1: recovery measures at each critical point and at the probe
        for (std::size_t z = 0; z < report.critical_points.size(); ++z) {
            const Vec& xb = report.critical_points[z].location;
            GridMeasure mu = recovery_measure_I(xb, beta, grid, V);
            WitnessRow row;
            row.beta = beta;
            row.level = 1;
            row.label = "L1 recovery at cp" + std::to_string(z) + " " + point_label(xb, d);
            row.target = eval_I(AtomicMeasure::dirac(xb), V);
            row.computed = fisher_information(mu, gen);
            row.ratio = row.target.value() > 1e-12 ? row.computed / row.target.value() : 0.0;
            rep.rows.push_back(std::move(row));
        }
        {
            GridMeasure mu = recovery_measure_I(probe, beta, grid, V);
            WitnessRow row;
            row.beta = beta;
            row.level = 1;
            row.label = "L1 recovery at probe " + point_label(probe, d);
            row.target = eval_I(AtomicMeasure::dirac(probe), V);
            row.computed = fisher_information(mu, gen);
            row.ratio = row.target.value() > 1e-12 ? row.computed / row.target.value() : 0.0;
            rep.rows.push_back(std::move(row));
        }

        // L2: ground Hermite-quasimode mixtures against J
        {
            std::vector<AtomicMeasure> targets;
            std::vector<std::string> labels;
            for (std::size_t z = 0; z < report.critical_points.size(); ++z) {
                targets.push_back(AtomicMeasure::dirac(report.critical_points[z].location));
                labels.push_back("L2 delta at cp" + std::to_string(z));
            }
            AtomicMeasure mix;
            for (int j = 0; j < static_cast<int>(report.minima_ordered.size()); ++j)
                mix.atoms.push_back({report.minimum(j).location,
                                     1.0 / report.minima_ordered.size()});
            targets.push_back(mix);
            labels.push_back("L2 uniform mixture on minima");

            for (std::size_t t = 0; t < targets.size(); ++t) {
                WitnessRow row;
                row.beta = beta;
                row.level = 2;
                row.label = labels[t];
                row.target = eval_J(targets[t], report, sup);
                try {
                    std::vector<GridMeasure> parts;
                    std::vector<double> weights;
                    for (const auto& atom : targets[t].atoms) {
                        int zi = -1;
                        for (std::size_t z = 0; z < report.critical_points.size(); ++z)
                            if ((report.critical_points[z].location - atom.point).norm() <=
                                sup.atom_tol)
                                zi = static_cast<int>(z);
                        if (zi < 0) throw Error("witness target atom is not a critical point");
                        parts.push_back(hermite_quasimode(report, V, zi, {0, 0}, beta, grid,
                                                          opts.quasimode.cutoff_radius)
                                            .measure());
                        weights.push_back(atom.weight);
                    }
                    GridMeasure mu = GridMeasure::mixture(parts, weights);
                    row.computed = beta * fisher_information(mu, gen);
                    row.ratio = row.target.is_finite() && row.target.value() > 1e-12
                                    ? row.computed / row.target.value()
                                    : 0.0;
                } catch (const Error& e) {
                    row.skipped = true;
                    row.reason = e.what();
                }
                rep.rows.push_back(std::move(row));
            }
        }

        // L3: eigenfunction-measure mixtures against J_k, evaluated through the
        // convex decomposition from one spectral result
        if (report.n_wells() >= 1) {
            SpectralResult spec;
            bool have_spec = false;
            try {
                spec = lowest_eigenpairs(gen, std::min(report.n_wells() + 2, 8),
                                         opts.spectral.solver_tol, opts.spectral);
                have_spec = true;
            } catch (const Error&) {
            }
            for (int k = 1; k <= report.n_wells(); ++k) {
                struct Case {
                    std::string label;
                    std::vector<std::pair<int, double>> mix;  // (j, alpha_j)
                };
                std::vector<Case> cases = {
                    {"L3 k=" + std::to_string(k) + " delta at x_k", {{k, 1.0}}},
                    {"L3 k=" + std::to_string(k) + " delta at x_0", {{0, 1.0}}},
                    {"L3 k=" + std::to_string(k) + " half x_0 half x_k", {{0, 0.5}, {k, 0.5}}},
                };
                for (const auto& c : cases) {
                    WitnessRow row;
                    row.beta = beta;
                    row.level = 3;
                    row.label = c.label;
                    AtomicMeasure target;
                    for (auto [j, a] : c.mix) target.atoms.push_back({report.minimum(j).location, a});
                    try {
                        row.target = eval_Jk(target, report, k, sup);
                    } catch (const Error& e) {
                        row.skipped = true;
                        row.reason = e.what();
                        rep.rows.push_back(std::move(row));
                        continue;
                    }
                    if (report.assumptions.a4_fails_for(k) || report.assumptions.a5_ties(k)) {
                        row.skipped = true;
                        row.reason = "A.4/A.5 failed for this k";
                    } else if (!have_spec || k >= static_cast<int>(spec.eigenvalues.size())) {
                        row.skipped = true;
                        row.reason = "spectral result unavailable";
                    } else {
                        double wk = report.barrier(k)->W;
                        double s = 0.0;
                        for (auto [j, a] : c.mix) s += a * spec.eigenvalues[j];
                        row.computed = 2.0 * std::exp(beta * wk) * s;
                        row.ratio = row.target.is_finite() && row.target.value() > 1e-12
                                        ? row.computed / row.target.value()
                                        : 0.0;
                    }
                    rep.rows.push_back(std::move(row));
                }
            }
        }
    }
    return rep;
}

}  // namespace mw
