#include "multiwell/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mw::io {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

json point_json(const Vec& p, int dim) {
    json a = json::array();
    for (int i = 0; i < dim; ++i) a.push_back(p[i]);
    return a;
}

json ext_json(const ExtReal& v) {
    if (!v.is_finite()) return "inf";
    return v.value();
}

}  // namespace

json to_json(const CriticalPoint& cp, int dim) {
    json eigs = json::array();
    for (int i = 0; i < dim; ++i) eigs.push_back(cp.hess_eigs[i]);
    return json{{"location", point_json(cp.location, dim)},
                {"value", cp.value},
                {"hess_eigs", eigs},
                {"morse_index", cp.morse_index},
                {"kind", to_string(cp.kind)},
                {"degenerate", cp.degenerate}};
}

json to_json(const BarrierRecord& b, int dim) {
    json j{{"k", b.k},
           {"W", b.W},
           {"merge_level", b.merge_level},
           {"grid_level", b.grid_level},
           {"refined", b.refined},
           {"partner_minimum", b.partner_minimum}};
    if (b.refined) j["saddle"] = to_json(b.saddle, dim);
    return j;
}

json to_json(const AssumptionFlags& f) {
    auto flag = [](const AssumptionFlags::Flag& fl) {
        return json{{"pass", fl.pass}, {"detail", fl.detail}};
    };
    return json{{"A1", flag(f.a1)},
                {"A2", flag(f.a2)},
                {"A3", flag(f.a3)},
                {"A4", flag(f.a4)},
                {"A5", flag(f.a5)},
                {"a4_failed_k", f.a4_failed_k},
                {"a5_tied_k", f.a5_tied_k}};
}

json to_json(const LandscapeReport& r, int dim) {
    json cps = json::array();
    for (const auto& cp : r.critical_points) cps.push_back(to_json(cp, dim));
    json minima = json::array();
    for (int idx : r.minima_ordered) minima.push_back(idx);
    json barriers = json::array();
    for (const auto& b : r.barriers) barriers.push_back(to_json(b, dim));
    return json{{"potential", r.potential_name},
                {"dim", dim},
                {"critical_points", cps},
                {"minima_ordered", minima},
                {"barriers", barriers},
                {"assumption_flags", to_json(r.assumptions)},
                {"dropped_seeds", r.dropped_seeds}};
}

json to_json(const SpectralResult& r) {
    return json{{"beta", r.beta},
                {"grid", grid_header(r.grid, r.beta)},
                {"eigenvalues", r.eigenvalues},
                {"residuals", r.residuals},
                {"coverage", r.coverage}};
}

json to_json(const ComparisonReport& r) {
    json clusters = json::array();
    for (const auto& c : r.clusters)
        clusters.push_back(json{{"lambda", c.lambda},
                                {"predicted", c.predicted},
                                {"computed", c.computed},
                                {"covered", c.covered}});
    json kramers = json::array();
    for (const auto& k : r.kramers) {
        json row{{"k", k.k}, {"skipped", k.skipped}};
        if (k.skipped) {
            row["reason"] = k.reason;
        } else {
            row["ell"] = k.ell;
            row["prediction"] = k.prediction;
            row["ratio"] = k.ratio;
        }
        kramers.push_back(row);
    }
    return json{
        {"beta", r.beta}, {"epsilon", r.epsilon}, {"clusters", clusters}, {"kramers", kramers}};
}

json to_json(const WitnessReport& r) {
    json rows = json::array();
    for (const auto& w : r.rows) {
        json row{{"beta", w.beta},  {"level", w.level},       {"label", w.label},
                 {"target", ext_json(w.target)}, {"skipped", w.skipped}};
        if (w.skipped) {
            row["reason"] = w.reason;
        } else {
            row["computed"] = w.computed;
            row["ratio"] = w.ratio;
        }
        rows.push_back(row);
    }
    return json{{"rows", rows}};
}

json to_json(const ExitSummary& s) {
    return json{{"beta", s.beta},
                {"k", s.k},
                {"n_traj", s.n_traj},
                {"censored", s.censored},
                {"mean", s.mean},
                {"std_error", s.std_error},
                {"cv", s.cv},
                {"t_max", s.t_max},
                {"pred_spectral", s.pred_spectral},
                {"pred_kramers", s.pred_kramers},
                {"ratio_spectral", s.ratio_spectral},
                {"ratio_kramers", s.ratio_kramers},
                {"ks_modified", s.ks_modified},
                {"ks_pass_5pct", s.ks_pass_5pct}};
}

json to_json(const TrajectoryStats& s, int dim) {
    return json{{"beta", s.beta},
                {"dt", s.dt},
                {"horizon", s.horizon},
                {"seed", s.seed},
                {"occupation_fraction", s.occupation_fraction},
                {"outside_fraction", s.outside_fraction},
                {"transition_times", s.transition_times},
                {"end_point", point_json(s.end_point, dim)}};
}

json to_json(const AtomicMeasure& mu, int dim) {
    json atoms = json::array();
    for (const auto& a : mu.atoms)
        atoms.push_back(json{{"point", point_json(a.point, dim)}, {"weight", a.weight}});
    return json{{"atoms", atoms}};
}

json grid_header(const Grid& g, double beta) {
    json box = json::array();
    for (int a = 0; a < g.dim(); ++a) box.push_back(json::array({g.box.lo[a], g.box.hi[a]}));
    json shape = json::array();
    for (int a = 0; a < g.dim(); ++a) shape.push_back(g.n[a]);
    return json{{"box", box}, {"shape", shape}, {"beta", beta}};
}

std::string comparison_csv(const std::vector<ComparisonReport>& sweep) {
    std::ostringstream os;
    os << "beta,k,ell,prediction,ratio\n";
    for (const auto& rep : sweep)
        for (const auto& row : rep.kramers) {
            if (row.skipped) continue;
            os << fmt(rep.beta) << "," << row.k << "," << fmt(row.ell) << ","
               << fmt(row.prediction) << "," << fmt(row.ratio) << "\n";
        }
    return os.str();
}

std::string witness_csv(const WitnessReport& report) {
    std::ostringstream os;
    os << "beta,level,target_value,computed,ratio\n";
    for (const auto& w : report.rows) {
        if (w.skipped) continue;
        os << fmt(w.beta) << "," << w.level << ","
           << (w.target.is_finite() ? fmt(w.target.value()) : "inf") << "," << fmt(w.computed)
           << "," << fmt(w.ratio) << "\n";
    }
    return os.str();
}

std::string exit_times_csv(const ExitSummary& summary) {
    std::ostringstream os;
    os << "trajectory,exit_time\n";
    for (std::size_t i = 0; i < summary.exit_times.size(); ++i)
        os << i << "," << fmt(summary.exit_times[i]) << "\n";
    return os.str();
}

std::string grid_values_dump(const Grid& g, double beta, const Eigen::VectorXd& values) {
    std::ostringstream os;
    os << grid_header(g, beta).dump() << "\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec p = g.node(i);
        os << i << "," << fmt(p[0]);
        if (g.dim() == 2) os << "," << fmt(p[1]);
        os << "," << fmt(values[i]) << "\n";
    }
    return os.str();
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

void ArtifactWriter::write_text(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw Error("cannot open output file " + (dir_ / name).string());
    f << content;
    entries_.push_back({name, sha256_hex(content), content.size()});
}

void ArtifactWriter::write_json(const std::string& name, const json& j) {
    write_text(name, j.dump(2) + "\n");
}

void ArtifactWriter::finalize(const std::string& subcommand) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.path < b.path; });
    json files = json::array();
    for (const auto& e : entries_)
        files.push_back(json{{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    json manifest{{"subcommand", subcommand}, {"files", files}};
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << "\n";
}

}  // namespace mw::io
