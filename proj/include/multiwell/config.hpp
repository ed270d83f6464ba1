#pragma once

#include "multiwell/landscape.hpp"
#include "multiwell/potential.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace mw {

// Experiment configuration: one strict JSON document. Unknown keys are
// rejected anywhere in the tree and every resolved default is recorded in the
// echoed config, so reruns are reproducible from the echo alone.
struct ExperimentConfig {
    // potential
    std::string family;  // "polynomial1d" | "polynomial2d"
    std::string potential_name;
    std::vector<double> coefficients;            // polynomial1d
    std::vector<Polynomial2D::Term> terms;       // polynomial2d
    Box box;

    // discretization
    std::array<int, 2> grid_cells{2001, 1};
    int barrier_resolution = 0;  // 0 -> landscape default
    int seeds_per_axis = 24;

    // physics / spectral window
    std::vector<double> betas{10.0};
    double lambda_max = 0.0;  // 0 -> 1.25 max_z lambda_{z,0}
    double epsilon = 0.0;     // 0 -> half min predicted gap
    double delta = 0.0;       // 0 -> half min barrier gap
    double beta0 = 1.0;

    Tolerances tol;

    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = "out";

    // subcommand blocks
    int spectrum_count = 8;

    std::optional<Vec> gamma_probe;

    struct Simulate {
        double dt = 0.0;  // 0 -> default from stability cap
        double horizon = 1000.0;
        int n_traj = 200;
        int k = 1;
        int occupation_bins = 64;
        double t_max_factor = 50.0;
        std::optional<Vec> x0;
    } simulate;

    Potential make_potential() const;
    nlohmann::json echo() const;  // full resolved-value dump

    /// Parses and validates; throws ConfigError with a diagnostic (including
    /// parse byte offsets for malformed JSON).
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_json(const nlohmann::json& j);
};

}  // namespace mw
