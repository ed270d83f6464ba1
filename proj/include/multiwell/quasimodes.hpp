#pragma once

#include "multiwell/spectral.hpp"

namespace mw {

struct QuasimodeOptions {
    double cutoff_radius = 0.0;  // 0 -> 1/3 of the min pairwise/boundary distance
    double delta = 0.0;          // 0 -> 1/2 min_k (W_k - W_{k+1})
};

/// Default cutoff radius: a third of the smallest distance between critical
/// points (and from critical points to the box boundary).
double default_cutoff_radius(const LandscapeReport& report, const Box& box);
/// Default delta: half of min_k (W_k - W_{k+1}) with W_{n+1} = 0.
double default_delta(const LandscapeReport& report);

// Hermite quasimode at critical point z: flat values chi_z(x) Theta_{beta,z,n}(x)
// with Hermite directions along the Hessian eigenframe, frequencies |xi_a(z)|,
// quintic-smoothstep cutoff between radii r and 2r, m_beta-normalized on the
// grid. Throws CutoffOverlap when the 2r balls around distinct critical points
// intersect or leave the box.
GridFunction hermite_quasimode(const LandscapeReport& report, const Potential& V, int cp_index,
                               std::array<int, 2> nbar, double beta, const Grid& grid,
                               double cutoff_radius = 0.0);

// Cutoff-indicator quasimode of well k: chi_k / sqrt(Z_{beta,k}) with chi_k a
// level-adapted quintic smoothstep equal to 1 on the sublevel component of
// x_k below V(x̂_k) - delta and 0 outside the component below V(x̂_k).
GridFunction well_quasimode(const LandscapeReport& report, const Potential& V, int k, double beta,
                            double delta, const Grid& grid);

/// Recovery measure for the first Gamma-limit: density proportional to
/// e^{-2 beta |x - xbar|^2} on the grid.
GridMeasure recovery_measure_I(const Vec& xbar, double beta, const Grid& grid,
                               const Potential& V);

// ---------------------------------------------------------------------------
// Gamma-witness suite: numerical recovery sequences for the three limits.
//   L1: I_beta on recovery measures at critical points and a probe point,
//       tabulated against eval_I (the computed value approaches half the
//       target at non-critical points; see README).
//   L2: beta I_beta on ground Hermite-quasimode mixtures vs eval_J.
//   L3: beta e^{beta W_k} I_beta on eigenfunction-measure mixtures vs eval_Jk,
//       evaluated through the convex decomposition 2 e^{beta W_k} sum a_j l_j
//       from the same spectral result (no independent quadrature).
// ---------------------------------------------------------------------------
struct WitnessRow {
    double beta = 0.0;
    int level = 0;         // 1, 2, 3
    std::string label;
    ExtReal target;
    double computed = 0.0;
    double ratio = 0.0;    // computed / target (0 when target is 0 or infinite)
    bool skipped = false;
    std::string reason;
};

struct WitnessReport {
    std::vector<WitnessRow> rows;
};

struct WitnessOptions {
    QuasimodeOptions quasimode;
    SpectralOptions spectral;
    Vec probe = Vec::Zero();  // non-critical probe for L1
    bool has_probe = false;
};

WitnessReport gamma_witness_suite(const LandscapeReport& report, const Potential& V,
                                  const std::vector<double>& betas, const Grid& grid,
                                  const WitnessOptions& opts = {});

}  // namespace mw
