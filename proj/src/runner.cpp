#include "multiwell/runner.hpp"

#include "multiwell/io.hpp"
#include "multiwell/langevin.hpp"
#include "multiwell/quasimodes.hpp"
#include "multiwell/spectral.hpp"

#include <iostream>

namespace mw {

namespace {

using io::ArtifactWriter;
using nlohmann::json;

struct Session {
    ExperimentConfig cfg;
    Potential potential;
    LandscapeReport report;
    Grid grid;

    explicit Session(ExperimentConfig c)
        : cfg(std::move(c)),
          potential(cfg.make_potential()),
          grid(Grid::over(cfg.box, cfg.grid_cells[0], cfg.grid_cells[1])) {
        LandscapeOptions opts;
        opts.tol = cfg.tol;
        opts.seeds_per_axis = cfg.seeds_per_axis;
        opts.grid_resolution = cfg.barrier_resolution;
        opts.beta0 = cfg.beta0;
        report = analyze_landscape(potential, opts);

        // resolve the remaining defaults so the config echo is complete
        if (cfg.lambda_max <= 0) cfg.lambda_max = default_lambda_max(report, potential);
        if (cfg.delta <= 0 && report.n_wells() >= 1) cfg.delta = default_delta(report);
        if (cfg.simulate.dt <= 0) cfg.simulate.dt = 0.5 * stable_dt_bound(report);
        if (!cfg.simulate.x0) cfg.simulate.x0 = report.minimum(0).location;
    }

    SpectralOptions spectral_options() const {
        SpectralOptions s;
        s.solver_tol = cfg.tol.solver_tol;
        return s;
    }
};

void run_landscape(Session& s, ArtifactWriter& out) {
    out.write_json("landscape.json", io::to_json(s.report, s.potential.dim()));
}

void run_spectrum(Session& s, ArtifactWriter& out) {
    HarmonicPrediction pred =
        harmonic_spectrum(s.report, s.potential, s.cfg.lambda_max, s.cfg.tol.tie_tol);
    double epsilon = s.cfg.epsilon;
    if (epsilon <= 0) {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < pred.clusters.size(); ++i)
            gap = std::min(gap, pred.clusters[i].lambda - pred.clusters[i - 1].lambda);
        epsilon = std::isfinite(gap) ? 0.5 * gap : 1.0;
    }
    s.cfg.epsilon = epsilon;

    json pred_json = json::array();
    for (const auto& c : pred.clusters)
        pred_json.push_back(json{{"lambda", c.lambda}, {"multiplicity", c.multiplicity}});
    out.write_json("harmonic_prediction.json", json{{"lambda_max", pred.lambda_max},
                                                    {"clusters", pred_json}});

    std::vector<ComparisonReport> sweep;
    json results = json::array();
    for (double beta : s.cfg.betas) {
        DiscreteGenerator gen = build_generator(s.potential, s.grid, beta, s.spectral_options());
        SpectralResult res = eigenpairs_below(gen, s.cfg.lambda_max + epsilon,
                                              s.cfg.tol.solver_tol, s.spectral_options());
        ComparisonReport cmp = compare_spectra(res, pred, s.report, epsilon);
        sweep.push_back(cmp);
        results.push_back(json{{"beta", beta},
                               {"result", io::to_json(res)},
                               {"comparison", io::to_json(cmp)}});
    }
    out.write_json("spectrum.json", results);
    out.write_text("comparison.csv", io::comparison_csv(sweep));
}

void run_gamma(Session& s, ArtifactWriter& out) {
    WitnessOptions opts;
    opts.spectral = s.spectral_options();
    opts.quasimode.delta = s.cfg.delta;
    if (s.cfg.gamma_probe) {
        opts.probe = *s.cfg.gamma_probe;
        opts.has_probe = true;
    }
    WitnessReport rep = gamma_witness_suite(s.report, s.potential, s.cfg.betas, s.grid, opts);
    out.write_json("witness.json", io::to_json(rep));
    out.write_text("witness.csv", io::witness_csv(rep));
}

void run_simulate(Session& s, ArtifactWriter& out) {
    const double beta = s.cfg.betas.front();
    json summary;

    // occupation run against the Gibbs reference
    {
        SimParams p;
        p.beta = beta;
        p.dt = s.cfg.simulate.dt;
        p.horizon = s.cfg.simulate.horizon;
        p.seed = s.cfg.seed;
        p.x0 = *s.cfg.simulate.x0;
        p.occupation_bins = s.cfg.simulate.occupation_bins;

        Grid bgrid = Grid::over(s.cfg.box, s.potential.dim() == 1 ? 4096 : 256,
                                s.potential.dim() == 1 ? 4096 : 256);
        BasinSet basins = s.report.n_wells() >= 1
                              ? make_basins(s.report, s.potential, bgrid, s.cfg.delta)
                              : BasinSet{bgrid, std::vector<int>(bgrid.size(), -1), {}};
        GridMeasure occupation;
        TrajectoryStats st = simulate(s.potential, p, basins, &occupation);
        summary["trajectory"] = io::to_json(st, s.potential.dim());

        std::vector<double> vcell(occupation.grid.size());
        for (std::size_t i = 0; i < occupation.grid.size(); ++i)
            vcell[i] = s.potential.value(occupation.grid.node(i));
        GridMeasure gibbs = GridMeasure::gibbs(occupation.grid, beta, vcell);
        double tv = 0.5 * ((occupation.density - gibbs.density).cwiseAbs().sum() *
                           occupation.grid.cell_volume());
        summary["tv_to_gibbs"] = tv;
        out.write_text("occupation.csv",
                       io::grid_values_dump(occupation.grid, beta, occupation.density));
    }

    if (s.report.n_wells() >= 1 && !s.report.assumptions.a4_fails_for(1) &&
        !s.report.assumptions.a5_ties(1)) {
        ExitOptions eo;
        eo.dt = s.cfg.simulate.dt;
        eo.delta = s.cfg.delta;
        eo.t_max_factor = s.cfg.simulate.t_max_factor;
        eo.spectral_grid = s.grid;  // the validated experiment grid
        eo.threads = s.cfg.threads;
        ExitSummary es = exit_time_experiment(s.potential, s.report, beta, s.cfg.simulate.k,
                                              s.cfg.simulate.n_traj, s.cfg.seed, eo);
        summary["exit"] = io::to_json(es);
        out.write_text("exit_times.csv", io::exit_times_csv(es));
    } else {
        summary["exit"] = json{{"skipped", true},
                               {"reason", s.report.n_wells() < 1
                                              ? "single well: no transition to measure"
                                              : "A.4/A.5 failed for k=1"}};
    }
    out.write_json("simulate.json", summary);
}

}  // namespace

int run_subcommand(const std::string& subcommand, const std::string& config_path,
                   const CliOverrides& overrides) {
    try {
        ExperimentConfig cfg = ExperimentConfig::load(config_path);
        if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
        if (overrides.seed) cfg.seed = *overrides.seed;
        if (overrides.threads) cfg.threads = *overrides.threads;

        if (subcommand != "landscape" && subcommand != "spectrum" && subcommand != "gamma" &&
            subcommand != "simulate" && subcommand != "all")
            throw ConfigError("unknown subcommand '" + subcommand + "'");

        Session session(std::move(cfg));
        ArtifactWriter out(session.cfg.out_dir);

        if (subcommand == "landscape" || subcommand == "all") run_landscape(session, out);
        if (subcommand == "spectrum" || subcommand == "all") run_spectrum(session, out);
        if (subcommand == "gamma" || subcommand == "all") run_gamma(session, out);
        if (subcommand == "simulate" || subcommand == "all") run_simulate(session, out);

        out.write_json("config_echo.json", session.cfg.echo());
        out.finalize(subcommand);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace mw
