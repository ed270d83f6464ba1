#pragma once

#include "multiwell/grid.hpp"
#include "multiwell/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mw {

struct CriticalPoint {
    enum class Kind { minimum, saddle_index_1, higher_index, degenerate };

    Vec location = Vec::Zero();
    double value = 0.0;
    std::array<double, 2> hess_eigs{0.0, 0.0};  // ascending; entries past dim unused
    Mat hess_frame = Mat::Identity();           // eigenvectors as columns, same order
    int morse_index = 0;
    Kind kind = Kind::minimum;
    bool degenerate = false;

    bool is_minimum() const { return kind == Kind::minimum; }
    bool is_saddle() const { return kind == Kind::saddle_index_1; }
    double min_abs_eig(int dim) const;
    double det_hess(int dim) const;
};

const char* to_string(CriticalPoint::Kind k);

struct BarrierRecord {
    int k = 0;              // index into minima_ordered (1..n)
    double W = 0.0;         // merge_level - V(x_k), > 0
    double merge_level = 0.0;  // V(x̂_k) after refinement, raw sweep level otherwise
    double grid_level = 0.0;   // raw sweep level (diagnostic)
    CriticalPoint saddle;
    bool refined = false;
    int partner_minimum = -1;  // critical_points index of the deeper minimum reached
    // Distinct index-1 refinements found at the merge level (A.4 diagnostics);
    // includes the primary saddle when refinement succeeded.
    std::vector<CriticalPoint> saddle_candidates;
};

struct AssumptionFlags {
    struct Flag {
        bool pass = true;
        std::string detail;
    };
    Flag a1, a2, a3, a4, a5;
    std::vector<int> a4_failed_k;  // barrier indices with non-unique saddles
    std::vector<int> a5_tied_k;    // barrier indices involved in W ties

    bool a4_fails_for(int k) const;
    bool a5_ties(int k) const;
    bool all_pass() const { return a1.pass && a2.pass && a3.pass && a4.pass && a5.pass; }
};

struct LandscapeReport {
    std::string potential_name;
    int dim = 1;
    std::vector<CriticalPoint> critical_points;  // lexicographic by location
    std::vector<int> minima_ordered;             // x_0 ... x_n as indices into critical_points
    std::vector<BarrierRecord> barriers;         // k = 1..n, aligned with minima_ordered
    AssumptionFlags assumptions;
    int dropped_seeds = 0;  // Newton seeds that hit the iteration cap

    int n_wells() const { return static_cast<int>(minima_ordered.size()) - 1; }
    const CriticalPoint& minimum(int k) const { return critical_points[minima_ordered[k]]; }
    const BarrierRecord* barrier(int k) const {
        for (const auto& b : barriers)
            if (b.k == k) return &b;
        return nullptr;
    }
};

struct LandscapeOptions {
    Tolerances tol;
    int seeds_per_axis = 24;
    int newton_cap = 100;
    int grid_resolution = 0;  // 0 -> 8192 cells/axis in 1-d, 512 in 2-d
    double beta0 = 1.0;       // reference inverse temperature for the A.2 box-local check
};

/// Newton search for grad V = 0 from a lattice of seeds. Non-converging seeds
/// are dropped (counted in the optional out-parameter), never fatal.
std::vector<CriticalPoint> find_critical_points(const Potential& V, int seeds_per_axis,
                                                double grad_tol,
                                                const LandscapeOptions& opts = {},
                                                int* dropped_seeds = nullptr);

/// Watershed sweep: grid cells in increasing V order, union-find over face
/// neighbors; a minimum's barrier is assigned when its component first merges
/// with one holding a minimum at least as deep. Saddles are Newton-refined
/// from the merge cell.
std::vector<BarrierRecord> compute_barriers(const Potential& V,
                                            const std::vector<CriticalPoint>& critical_points,
                                            int grid_resolution,
                                            const LandscapeOptions& opts = {});

AssumptionFlags verify_assumptions(const Potential& V,
                                   const std::vector<CriticalPoint>& critical_points,
                                   const std::vector<BarrierRecord>& barriers,
                                   double tie_tol, const LandscapeOptions& opts = {});

/// Connected component of cell `seed` among cells with V < level
/// (face adjacency).
std::vector<std::size_t> sublevel_component(const Grid& grid, const std::vector<double>& vcell,
                                            std::size_t seed, double level);

/// Full pipeline: critical points, barrier sweep, e:order labelling of the
/// minima (W decreasing, global minimum first), assumption checks.
LandscapeReport analyze_landscape(const Potential& V, const LandscapeOptions& opts = {});

}  // namespace mw
