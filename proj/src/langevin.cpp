#include "multiwell/langevin.hpp"

#include "multiwell/quasimodes.hpp"
#include "multiwell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace mw {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
    // xoshiro256++ state filled from splitmix64 over (seed, stream)
    std::uint64_t x = seed * 0x9e3779b97f4a7c15ULL + stream * 0xd1b54a32d192ed03ULL + 1;
    for (auto& w : s_) w = splitmix64(x);
}

std::uint64_t RngStream::next_u64() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform() {
    // (0, 1]: 53-bit mantissa, never returns 0 so log() is safe
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

BasinSet make_basins(const LandscapeReport& report, const Potential& V, const Grid& grid,
                     double delta) {
    if (delta <= 0) delta = default_delta(report);
    BasinSet basins;
    basins.grid = grid;
    basins.label.assign(grid.size(), -1);

    std::vector<double> vcell(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vcell[i] = V.value(grid.node(i));

    for (std::size_t pos = 0; pos < report.minima_ordered.size(); ++pos) {
        const CriticalPoint& xk = report.minimum(static_cast<int>(pos));
        // core level: the well's own saddle level minus delta; the deepest well
        // uses the smallest saddle level among the others (its basin floor)
        double level;
        const BarrierRecord* bar = report.barrier(static_cast<int>(pos));
        if (bar) {
            level = bar->merge_level - delta;
        } else {
            level = std::numeric_limits<double>::infinity();
            for (const auto& b : report.barriers) level = std::min(level, b.merge_level);
            level -= delta;
        }
        int id = basins.n_basins();
        basins.minimum_cp.push_back(report.minima_ordered[pos]);
        for (std::size_t c : sublevel_component(grid, vcell, grid.locate(xk.location), level))
            basins.label[c] = id;
    }
    return basins;
}

double stable_dt_bound(const LandscapeReport& report) {
    double xi_max = 1.0;
    for (const auto& cp : report.critical_points)
        for (int a = 0; a < report.dim; ++a) xi_max = std::max(xi_max, std::abs(cp.hess_eigs[a]));
    return 0.1 / xi_max;
}

TrajectoryStats simulate(const Potential& V, const SimParams& params, const BasinSet& basins,
                         GridMeasure* occupation) {
    if (params.dt <= 0) throw Error("simulate: dt must be positive");
    if (!V.box().contains(params.x0)) throw Error("simulate: x0 outside the box");
    const Box& box = V.box();
    const int d = V.dim();
    const double noise = std::sqrt(2.0 * params.dt / params.beta);
    const double blow_up = 0.5 * box.diameter();
    const long steps = static_cast<long>(params.horizon / params.dt);

    RngStream rng(params.seed, 0);
    Vec x = params.x0;

    TrajectoryStats st;
    st.beta = params.beta;
    st.dt = params.dt;
    st.horizon = params.horizon;
    st.seed = params.seed;
    st.occupation_fraction.assign(basins.n_basins(), 0.0);

    std::optional<Grid> occ_grid;
    std::vector<double> occ_counts;
    if (params.occupation_bins > 0) {
        occ_grid = Grid::over(box, params.occupation_bins, params.occupation_bins);
        occ_counts.assign(occ_grid->size(), 0.0);
    }

    int current = basins.locate(x);
    long in_basin_steps = 0;
    std::vector<long> basin_steps(basins.n_basins(), 0);

    for (long s = 0; s < steps; ++s) {
        Vec drift = -V.gradient(x);
        Vec dx = Vec::Zero();
        for (int a = 0; a < d; ++a) dx[a] = drift[a] * params.dt + noise * rng.normal();
        if (dx.norm() > blow_up)
            throw UnstableStep("increment " + std::to_string(dx.norm()) +
                               " exceeds half the box diameter; reduce dt");
        x += dx;
        for (int a = 0; a < d; ++a) {  // reflect at the box faces
            while (x[a] < box.lo[a] || x[a] > box.hi[a]) {
                if (x[a] < box.lo[a]) x[a] = 2 * box.lo[a] - x[a];
                if (x[a] > box.hi[a]) x[a] = 2 * box.hi[a] - x[a];
            }
        }
        int b = basins.locate(x);
        if (b >= 0) {
            basin_steps[b]++;
            in_basin_steps++;
            if (b != current) {  // entering another core counts as a transition
                if (current >= 0) st.transition_times.push_back((s + 1) * params.dt);
                current = b;
            }
        }
        if (occ_grid) occ_counts[occ_grid->locate(x)] += 1.0;
    }

    for (int b = 0; b < basins.n_basins(); ++b)
        st.occupation_fraction[b] = steps > 0 ? static_cast<double>(basin_steps[b]) / steps : 0.0;
    st.outside_fraction = steps > 0 ? 1.0 - static_cast<double>(in_basin_steps) / steps : 0.0;
    st.end_point = x;

    if (occupation && occ_grid) {
        Eigen::VectorXd dens(occ_grid->size());
        for (std::size_t i = 0; i < occ_grid->size(); ++i) dens[i] = occ_counts[i];
        *occupation = GridMeasure::from_density(*occ_grid, params.beta, std::move(dens));
    }
    return st;
}

double ks_exponential_modified(std::vector<double> sample) {
    const std::size_t n = sample.size();
    if (n < 5) throw Error("ks_exponential_modified: need at least 5 samples");
    double mean = 0.0;
    for (double t : sample) mean += t;
    mean /= n;
    std::sort(sample.begin(), sample.end());
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = 1.0 - std::exp(-sample[i] / mean);
        dmax = std::max(dmax, std::abs(f - (i + 1.0) / n));
        dmax = std::max(dmax, std::abs(f - static_cast<double>(i) / n));
    }
    // Stephens' modification for the exponential with estimated mean;
    // reject at 5% when the statistic exceeds 1.094
    double sn = std::sqrt(static_cast<double>(n));
    return (dmax - 0.2 / n) * (sn + 0.26 + 0.5 / sn);
}

ExitSummary exit_time_experiment(const Potential& V, const LandscapeReport& report, double beta,
                                 int k, int n_traj, std::uint64_t seed, const ExitOptions& opts) {
    if (k != 1) throw Error("exit_time_experiment: only k=1 (deepest-barrier transition)");
    if (report.n_wells() != 1)
        throw Error("exit_time_experiment: needs a two-well landscape");
    if (n_traj < 100) throw Error("exit_time_experiment: n_traj must be >= 100");
    if (report.assumptions.a4_fails_for(k) || report.assumptions.a5_ties(k))
        throw AssumptionViolated("exit_time_experiment: A.4/A.5 failed for k=1");

    ExitSummary sum;
    sum.beta = beta;
    sum.k = k;
    sum.n_traj = n_traj;

    sum.pred_kramers = 2.0 * std::exp(beta * report.barrier(1)->W) / eta_k(report, 1);
    {
        Grid sgrid = opts.spectral_grid
                         ? *opts.spectral_grid
                         : (V.dim() == 1 ? Grid::over(V.box(), 4001)
                                         : Grid::over(V.box(), 256, 256));
        SpectralOptions sopts;
        DiscreteGenerator gen = build_generator(V, sgrid, beta, sopts);
        SpectralResult spec = lowest_eigenpairs(gen, std::min(report.n_wells() + 1, 6));
        sum.pred_spectral = 1.0 / spec.eigenvalues[1];
    }

    double dt = opts.dt > 0 ? opts.dt : 0.5 * stable_dt_bound(report);
    if (dt > stable_dt_bound(report))
        throw Error("exit_time_experiment: dt exceeds the stability cap");
    sum.t_max = opts.t_max_factor * sum.pred_spectral;

    double delta = opts.delta > 0 ? opts.delta : default_delta(report);
    Grid bgrid = Grid::over(V.box(), V.dim() == 1 ? 4096 : 256, V.dim() == 1 ? 4096 : 256);
    BasinSet basins = make_basins(report, V, bgrid, delta);
    // basin ids follow minima_ordered: 0 is the deep target, k the start
    const Vec x_start = report.minimum(k).location;
    const int target = 0;
    const Box& box = V.box();
    const int d = V.dim();
    const double noise = std::sqrt(2.0 * dt / beta);
    const double blow_up = 0.5 * box.diameter();
    const long max_steps = static_cast<long>(sum.t_max / dt);

    std::vector<double> times(n_traj, -1.0);  // -1 marks censored
    auto run_range = [&](int lo, int hi) {
        for (int t = lo; t < hi; ++t) {
            RngStream rng(seed, static_cast<std::uint64_t>(t));
            Vec x = x_start;
            for (long s = 0; s < max_steps; ++s) {
                Vec drift = -V.gradient(x);
                Vec dx = Vec::Zero();
                for (int a = 0; a < d; ++a) dx[a] = drift[a] * dt + noise * rng.normal();
                if (dx.norm() > blow_up) throw UnstableStep("exit experiment: reduce dt");
                x += dx;
                for (int a = 0; a < d; ++a) {
                    while (x[a] < box.lo[a] || x[a] > box.hi[a]) {
                        if (x[a] < box.lo[a]) x[a] = 2 * box.lo[a] - x[a];
                        if (x[a] > box.hi[a]) x[a] = 2 * box.hi[a] - x[a];
                    }
                }
                if (basins.locate(x) == target) {
                    times[t] = (s + 1) * dt;
                    break;
                }
            }
        }
    };
    int workers = std::max(1, opts.threads);
    if (workers == 1) {
        run_range(0, n_traj);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        int chunk = (n_traj + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            int lo = w * chunk, hi = std::min(n_traj, lo + chunk);
            if (lo < hi)
                pool.emplace_back([&, lo, hi, w] {
                    try {
                        run_range(lo, hi);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    // deterministic reduction in trajectory order
    for (int t = 0; t < n_traj; ++t) {
        if (times[t] < 0)
            ++sum.censored;
        else
            sum.exit_times.push_back(times[t]);
    }
    const std::size_t m = sum.exit_times.size();
    if (m == 0) throw HorizonExceeded("every trajectory was censored at t_max");
    double mean = 0.0;
    for (double t : sum.exit_times) mean += t;
    mean /= m;
    double var = 0.0;
    for (double t : sum.exit_times) var += (t - mean) * (t - mean);
    var = m > 1 ? var / (m - 1) : 0.0;
    sum.mean = mean;
    sum.std_error = std::sqrt(var / m);
    sum.cv = mean > 0 ? std::sqrt(var) / mean : 0.0;
    sum.ratio_spectral = sum.mean / sum.pred_spectral;
    sum.ratio_kramers = sum.mean / sum.pred_kramers;
    if (m >= 5) {
        sum.ks_modified = ks_exponential_modified(sum.exit_times);
        sum.ks_pass_5pct = sum.ks_modified <= 1.094;
    }
    return sum;
}

}  // namespace mw
