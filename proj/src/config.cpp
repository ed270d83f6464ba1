#include "multiwell/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace mw {

using nlohmann::json;

namespace {

/// Rejects keys outside the allowed set; validation is strict everywhere so
/// typos never silently fall back to defaults.
void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double need_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

double positive(const json& j, const std::string& where) {
    double v = need_number(j, where);
    if (!(v > 0)) throw ConfigError(where + ": must be positive");
    return v;
}

int positive_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    int v = j.get<int>();
    if (v <= 0) throw ConfigError(where + ": must be positive");
    return v;
}

}  // namespace

Potential ExperimentConfig::make_potential() const {
    if (family == "polynomial1d") return Potential(potential_name, Polynomial1D(coefficients), box);
    return Potential(potential_name, Polynomial2D(terms), box);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    check_keys(j, "config",
               {"potential", "grid", "betas", "lambda_max", "epsilon", "delta", "beta0",
                "tolerances", "seeds_per_axis", "barrier_resolution", "seed", "threads", "out_dir",
                "spectrum", "gamma", "simulate"});

    if (!j.contains("potential")) throw ConfigError("config: missing 'potential'");
    const json& p = j.at("potential");
    check_keys(p, "potential", {"family", "name", "coefficients", "terms", "box"});
    if (!p.contains("family")) throw ConfigError("potential: missing 'family'");
    c.family = p.at("family").get<std::string>();
    c.potential_name = p.value("name", c.family);
    if (!p.contains("box")) throw ConfigError("potential: missing 'box'");
    const json& bx = p.at("box");
    if (!bx.is_array() || bx.empty() || bx.size() > 2)
        throw ConfigError("potential.box: expected [[lo,hi]] or [[lo,hi],[lo,hi]]");
    if (c.family == "polynomial1d") {
        if (bx.size() != 1) throw ConfigError("potential.box: polynomial1d needs one interval");
        c.box = Box::interval(need_number(bx[0].at(0), "box"), need_number(bx[0].at(1), "box"));
        if (!p.contains("coefficients"))
            throw ConfigError("potential: polynomial1d needs 'coefficients'");
        for (const auto& v : p.at("coefficients"))
            c.coefficients.push_back(need_number(v, "coefficients"));
    } else if (c.family == "polynomial2d") {
        if (bx.size() != 2) throw ConfigError("potential.box: polynomial2d needs two intervals");
        c.box = Box::rect(need_number(bx[0].at(0), "box"), need_number(bx[0].at(1), "box"),
                          need_number(bx[1].at(0), "box"), need_number(bx[1].at(1), "box"));
        if (!p.contains("terms")) throw ConfigError("potential: polynomial2d needs 'terms'");
        for (const auto& t : p.at("terms")) {
            if (!t.is_array() || t.size() != 3)
                throw ConfigError("potential.terms: entries are [i, j, c]");
            Polynomial2D::Term term;
            term.i = t.at(0).get<int>();
            term.j = t.at(1).get<int>();
            term.c = need_number(t.at(2), "terms");
            c.terms.push_back(term);
        }
    } else {
        throw ConfigError("potential.family: expected 'polynomial1d' or 'polynomial2d', got '" +
                          c.family + "'");
    }
    for (int a = 0; a < c.box.dim; ++a)
        if (c.box.lo[a] >= c.box.hi[a]) throw ConfigError("potential.box: empty interval");

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"cells"});
        if (!g.contains("cells")) throw ConfigError("grid: missing 'cells'");
        const json& cells = g.at("cells");
        if (!cells.is_array() || cells.empty() || cells.size() > 2)
            throw ConfigError("grid.cells: expected [nx] or [nx, ny]");
        c.grid_cells[0] = positive_int(cells[0], "grid.cells");
        c.grid_cells[1] = cells.size() == 2 ? positive_int(cells[1], "grid.cells") : 1;
        if (c.box.dim == 2 && cells.size() == 1) c.grid_cells[1] = c.grid_cells[0];
    } else {
        c.grid_cells = {c.box.dim == 1 ? 2001 : 129, c.box.dim == 1 ? 1 : 129};
    }

    if (j.contains("betas")) {
        c.betas.clear();
        if (!j.at("betas").is_array() || j.at("betas").empty())
            throw ConfigError("betas: expected a non-empty array");
        for (const auto& b : j.at("betas")) c.betas.push_back(positive(b, "betas"));
    }
    if (j.contains("lambda_max")) c.lambda_max = positive(j.at("lambda_max"), "lambda_max");
    if (j.contains("epsilon")) c.epsilon = positive(j.at("epsilon"), "epsilon");
    if (j.contains("delta")) c.delta = positive(j.at("delta"), "delta");
    if (j.contains("beta0")) c.beta0 = positive(j.at("beta0"), "beta0");

    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        check_keys(t, "tolerances",
                   {"grad_tol", "degeneracy_tol", "tie_tol", "solver_tol", "floor_tol"});
        if (t.contains("grad_tol")) c.tol.grad_tol = positive(t.at("grad_tol"), "grad_tol");
        if (t.contains("degeneracy_tol"))
            c.tol.degeneracy_tol = positive(t.at("degeneracy_tol"), "degeneracy_tol");
        if (t.contains("tie_tol")) c.tol.tie_tol = positive(t.at("tie_tol"), "tie_tol");
        if (t.contains("solver_tol")) c.tol.solver_tol = positive(t.at("solver_tol"), "solver_tol");
        if (t.contains("floor_tol")) c.tol.floor_tol = positive(t.at("floor_tol"), "floor_tol");
    }

    if (j.contains("seeds_per_axis")) {
        c.seeds_per_axis = positive_int(j.at("seeds_per_axis"), "seeds_per_axis");
        if (c.seeds_per_axis < 8) throw ConfigError("seeds_per_axis: must be >= 8");
    }
    if (j.contains("barrier_resolution"))
        c.barrier_resolution = positive_int(j.at("barrier_resolution"), "barrier_resolution");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0)
            throw ConfigError("seed: expected a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("threads")) c.threads = positive_int(j.at("threads"), "threads");
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();

    if (j.contains("spectrum")) {
        const json& s = j.at("spectrum");
        check_keys(s, "spectrum", {"count"});
        if (s.contains("count")) {
            c.spectrum_count = positive_int(s.at("count"), "spectrum.count");
            if (c.spectrum_count > 40) throw ConfigError("spectrum.count: must be <= 40");
        }
    }

    if (j.contains("gamma")) {
        const json& g = j.at("gamma");
        check_keys(g, "gamma", {"probe"});
        if (g.contains("probe")) {
            const json& pr = g.at("probe");
            if (!pr.is_array() || static_cast<int>(pr.size()) != c.box.dim)
                throw ConfigError("gamma.probe: expected a point of the box dimension");
            Vec v = Vec::Zero();
            for (int a = 0; a < c.box.dim; ++a) v[a] = need_number(pr[a], "gamma.probe");
            c.gamma_probe = v;
        }
    }

    if (j.contains("simulate")) {
        const json& s = j.at("simulate");
        check_keys(s, "simulate",
                   {"dt", "horizon", "n_traj", "k", "occupation_bins", "t_max_factor", "x0"});
        if (s.contains("dt")) c.simulate.dt = positive(s.at("dt"), "simulate.dt");
        if (s.contains("horizon")) c.simulate.horizon = positive(s.at("horizon"), "simulate.horizon");
        if (s.contains("n_traj")) c.simulate.n_traj = positive_int(s.at("n_traj"), "simulate.n_traj");
        if (s.contains("k")) c.simulate.k = positive_int(s.at("k"), "simulate.k");
        if (s.contains("occupation_bins"))
            c.simulate.occupation_bins = positive_int(s.at("occupation_bins"), "occupation_bins");
        if (s.contains("t_max_factor"))
            c.simulate.t_max_factor = positive(s.at("t_max_factor"), "t_max_factor");
        if (s.contains("x0")) {
            const json& x0 = s.at("x0");
            if (!x0.is_array() || static_cast<int>(x0.size()) != c.box.dim)
                throw ConfigError("simulate.x0: expected a point of the box dimension");
            Vec v = Vec::Zero();
            for (int a = 0; a < c.box.dim; ++a) v[a] = need_number(x0[a], "simulate.x0");
            c.simulate.x0 = v;
        }
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

nlohmann::json ExperimentConfig::echo() const {
    json pot{{"family", family}, {"name", potential_name}};
    json bx = json::array();
    for (int a = 0; a < box.dim; ++a) bx.push_back(json::array({box.lo[a], box.hi[a]}));
    pot["box"] = bx;
    if (family == "polynomial1d") {
        pot["coefficients"] = coefficients;
    } else {
        json ts = json::array();
        for (const auto& t : terms) ts.push_back(json::array({t.i, t.j, t.c}));
        pot["terms"] = ts;
    }
    json cells = json::array({grid_cells[0]});
    if (box.dim == 2) cells.push_back(grid_cells[1]);

    json sim{{"dt", simulate.dt},
             {"horizon", simulate.horizon},
             {"n_traj", simulate.n_traj},
             {"k", simulate.k},
             {"occupation_bins", simulate.occupation_bins},
             {"t_max_factor", simulate.t_max_factor}};
    if (simulate.x0) {
        json x0 = json::array();
        for (int a = 0; a < box.dim; ++a) x0.push_back((*simulate.x0)[a]);
        sim["x0"] = x0;
    }
    json gamma = json::object();
    if (gamma_probe) {
        json pr = json::array();
        for (int a = 0; a < box.dim; ++a) pr.push_back((*gamma_probe)[a]);
        gamma["probe"] = pr;
    }

    // out_dir is deliberately absent: the output location is not part of the
    // experiment identity, and reruns into different directories must stay
    // byte-identical
    return json{{"potential", pot},
                {"grid", json{{"cells", cells}}},
                {"betas", betas},
                {"lambda_max", lambda_max},
                {"epsilon", epsilon},
                {"delta", delta},
                {"beta0", beta0},
                {"tolerances", json{{"grad_tol", tol.grad_tol},
                                    {"degeneracy_tol", tol.degeneracy_tol},
                                    {"tie_tol", tol.tie_tol},
                                    {"solver_tol", tol.solver_tol},
                                    {"floor_tol", tol.floor_tol}}},
                {"seeds_per_axis", seeds_per_axis},
                {"barrier_resolution", barrier_resolution},
                {"seed", seed},
                {"threads", threads},
                {"spectrum", json{{"count", spectrum_count}}},
                {"gamma", gamma},
                {"simulate", sim}};
}

}  // namespace mw
