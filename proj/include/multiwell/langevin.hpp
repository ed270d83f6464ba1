#pragma once

#include "multiwell/landscape.hpp"
#include "multiwell/measures.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mw {

/// Deterministic counter-based stream: engine state derived from
/// (seed, stream index) through splitmix64, normals via Box-Muller. Identical
/// draws for a given pair on every run and under any thread count.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream);
    double uniform();  // (0, 1]
    double normal();

  private:
    std::uint64_t s_[4];
    std::uint64_t next_u64();
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Basin cores: sublevel components below V(x̂_k) - delta around each minimum.
/// A trajectory changes basin only on entering another core, which keeps
/// saddle flicker out of the transition counts.
struct BasinSet {
    Grid grid;
    std::vector<int> label;       // per cell: basin id or -1
    std::vector<int> minimum_cp;  // basin id -> critical_points index

    int locate(const Vec& p) const {
        if (!grid.box.contains(p)) return -1;
        return label[grid.locate(p)];
    }
    int n_basins() const { return static_cast<int>(minimum_cp.size()); }
};

BasinSet make_basins(const LandscapeReport& report, const Potential& V, const Grid& grid,
                     double delta);

struct SimParams {
    double beta = 1.0;
    double dt = 0.0;     // 0 -> 0.05 / max(xi_max, 1)
    double horizon = 0.0;
    std::uint64_t seed = 0;
    Vec x0 = Vec::Zero();
    int occupation_bins = 0;  // per axis; 0 disables the occupation measure
};

struct TrajectoryStats {
    double beta = 0.0, dt = 0.0, horizon = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> occupation_fraction;  // per basin
    double outside_fraction = 0.0;
    std::vector<double> transition_times;     // strictly increasing
    Vec end_point = Vec::Zero();
};

/// Euler-Maruyama for dX = -grad V dt + sqrt(2/beta) dW with reflection at
/// the box; throws UnstableStep when an increment exceeds half the box
/// diameter. Fixed seed gives bitwise-identical results.
TrajectoryStats simulate(const Potential& V, const SimParams& params, const BasinSet& basins,
                         GridMeasure* occupation = nullptr);

/// dt cap 0.1 / max(xi_max, 1) from the stiffest critical point.
double stable_dt_bound(const LandscapeReport& report);

struct ExitOptions {
    double dt = 0.0;             // 0 -> half the stability cap
    double delta = 0.0;          // 0 -> quasimode default
    double t_max_factor = 50.0;  // censor horizon in units of the predicted mean
    // grid for the 1/ell_1 reference value; unset -> 4001 cells in 1-d,
    // 256 per axis in 2-d
    std::optional<Grid> spectral_grid;
    int threads = 1;
};

struct ExitSummary {
    double beta = 0.0;
    int k = 1;
    int n_traj = 0;
    int censored = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double cv = 0.0;               // coefficient of variation
    double t_max = 0.0;
    double pred_spectral = 0.0;    // 1 / ell_{beta,1}
    double pred_kramers = 0.0;     // 2 e^{beta W_1} / eta_1
    double ratio_spectral = 0.0;   // mean / pred_spectral
    double ratio_kramers = 0.0;
    double ks_modified = 0.0;      // Stephens-modified KS statistic vs fitted exponential
    bool ks_pass_5pct = false;
    std::vector<double> exit_times;  // uncensored, trajectory order
};

/// Mean first transition time from the basin of x_k to the basin of a deeper
/// minimum, against the spectral relaxation time and the Eyring-Kramers time.
ExitSummary exit_time_experiment(const Potential& V, const LandscapeReport& report, double beta,
                                 int k, int n_traj, std::uint64_t seed,
                                 const ExitOptions& opts = {});

/// Stephens-modified Kolmogorov-Smirnov statistic against Exp(mean of the
/// sample); the 5% critical value for the fitted exponential is 1.094.
double ks_exponential_modified(std::vector<double> sample);

}  // namespace mw
