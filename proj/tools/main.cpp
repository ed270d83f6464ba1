#include "multiwell/runner.hpp"

#include <CLI11.hpp>

#include <string>

int main(int argc, char** argv) {
    CLI::App app{"multiwell: landscape, spectral and Langevin analysis of multiwell potentials"};
    app.require_subcommand(1);

    std::string config_path;
    mw::CliOverrides overrides;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "RNG seed (overrides config)");
        sub->add_option("--threads", threads, "worker bound (overrides config)");
    };

    add_common(app.add_subcommand("landscape", "critical points, barriers, assumption flags"));
    add_common(app.add_subcommand("spectrum", "low-lying spectrum vs harmonic and Kramers laws"));
    add_common(app.add_subcommand("gamma", "Fisher-information witness sweeps"));
    add_common(app.add_subcommand("simulate", "Langevin occupation and exit statistics"));
    add_common(app.add_subcommand("all", "full pipeline"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (auto* sub : app.get_subcommands()) {
        if (sub->count("--out")) overrides.out_dir = out_dir;
        if (sub->count("--seed")) overrides.seed = seed;
        if (sub->count("--threads")) overrides.threads = threads;
        return mw::run_subcommand(sub->get_name(), config_path, overrides);
    }
    return 2;
}
