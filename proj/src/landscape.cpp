#include "multiwell/landscape.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace mw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool lex_less(const Vec& a, const Vec& b) {
    if (a[0] != b[0]) return a[0] < b[0];
    return a[1] < b[1];
}

/// Newton iteration on grad V = 0 with eigenvalue-clamped Hessian: eigenvalues
/// within degeneracy_tol of zero are pushed to +-degeneracy_tol so the step
/// stays finite near degenerate points while saddle-seeking keeps the
/// eigen-directions' signs.
std::optional<Vec> newton_root(const Potential& V, Vec x, double grad_tol, double degeneracy_tol,
                               int cap) {
    const int d = V.dim();
    const double leash = 2.0 * V.box().diameter();  // give up once clearly divergent
    for (int it = 0; it < cap; ++it) {
        Vec g = V.gradient(x);
        if (g.norm() <= grad_tol) return x;
        Mat h = V.hessian(x);
        Vec step = Vec::Zero();
        if (d == 1) {
            double hx = h(0, 0);
            if (std::abs(hx) < degeneracy_tol) hx = hx >= 0 ? degeneracy_tol : -degeneracy_tol;
            step[0] = -g[0] / hx;
        } else {
            Eigen::SelfAdjointEigenSolver<Mat> es(h);
            Vec ev = es.eigenvalues();
            Mat frame = es.eigenvectors();
            Vec gl = frame.transpose() * g;
            Vec sl;
            for (int a = 0; a < 2; ++a) {
                double lam = ev[a];
                if (std::abs(lam) < degeneracy_tol)
                    lam = lam >= 0 ? degeneracy_tol : -degeneracy_tol;
                sl[a] = -gl[a] / lam;
            }
            step = frame * sl;
        }
        // trust region: a single step never exceeds a tenth of the box diagonal
        double cap_len = 0.1 * V.box().diameter();
        if (step.norm() > cap_len) step *= cap_len / step.norm();
        x += step;
        if (!V.box().contains(x, leash)) return std::nullopt;
    }
    return std::nullopt;
}

CriticalPoint classify(const Potential& V, const Vec& x, double degeneracy_tol) {
    CriticalPoint cp;
    cp.location = x;
    cp.value = V.value(x);
    Mat h = V.hessian(x);
    if (V.dim() == 1) {
        cp.hess_eigs = {h(0, 0), 0.0};
        cp.hess_frame = Mat::Identity();
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        cp.hess_eigs = {es.eigenvalues()[0], es.eigenvalues()[1]};
        cp.hess_frame = es.eigenvectors();
    }
    cp.morse_index = 0;
    cp.degenerate = false;
    for (int a = 0; a < V.dim(); ++a) {
        if (cp.hess_eigs[a] < 0) ++cp.morse_index;
        if (std::abs(cp.hess_eigs[a]) < degeneracy_tol) cp.degenerate = true;
    }
    if (cp.degenerate)
        cp.kind = CriticalPoint::Kind::degenerate;
    else if (cp.morse_index == 0)
        cp.kind = CriticalPoint::Kind::minimum;
    else if (cp.morse_index == 1)
        cp.kind = CriticalPoint::Kind::saddle_index_1;
    else
        cp.kind = CriticalPoint::Kind::higher_index;
    return cp;
}

std::string point_str(const Vec& p, int dim) {
    std::ostringstream os;
    os.precision(12);
    os << "(" << p[0];
    if (dim == 2) os << ", " << p[1];
    os << ")";
    return os.str();
}

}  // namespace

double CriticalPoint::min_abs_eig(int dim) const {
    double m = std::abs(hess_eigs[0]);
    if (dim == 2) m = std::min(m, std::abs(hess_eigs[1]));
    return m;
}

double CriticalPoint::det_hess(int dim) const {
    return dim == 1 ? hess_eigs[0] : hess_eigs[0] * hess_eigs[1];
}

const char* to_string(CriticalPoint::Kind k) {
    switch (k) {
        case CriticalPoint::Kind::minimum: return "minimum";
        case CriticalPoint::Kind::saddle_index_1: return "saddle-index-1";
        case CriticalPoint::Kind::higher_index: return "higher-index";
        case CriticalPoint::Kind::degenerate: return "degenerate";
    }
    return "?";
}

bool AssumptionFlags::a4_fails_for(int k) const {
    return std::find(a4_failed_k.begin(), a4_failed_k.end(), k) != a4_failed_k.end();
}

bool AssumptionFlags::a5_ties(int k) const {
    return std::find(a5_tied_k.begin(), a5_tied_k.end(), k) != a5_tied_k.end();
}

std::vector<CriticalPoint> find_critical_points(const Potential& V, int seeds_per_axis,
                                                double grad_tol, const LandscapeOptions& opts,
                                                int* dropped_seeds) {
    if (seeds_per_axis < 8) throw Error("find_critical_points: seeds_per_axis must be >= 8");
    const Box& b = V.box();
    const double dedup = 10.0 * grad_tol;
    std::vector<CriticalPoint> out;
    int dropped = 0;

    std::vector<Vec> seeds;
    const int ny = V.dim() == 2 ? seeds_per_axis : 1;
    for (int i = 0; i < seeds_per_axis; ++i)
        for (int j = 0; j < ny; ++j) {
            Vec s = Vec::Zero();
            s[0] = b.lo[0] + (i + 0.5) * b.extent(0) / seeds_per_axis;
            if (V.dim() == 2) s[1] = b.lo[1] + (j + 0.5) * b.extent(1) / seeds_per_axis;
            seeds.push_back(s);
        }

    for (const Vec& s : seeds) {
        auto root = newton_root(V, s, grad_tol, opts.tol.degeneracy_tol, opts.newton_cap);
        if (!root) {
            ++dropped;
            continue;
        }
        if (!b.contains(*root, 1e-12)) continue;
        bool dup = false;
        for (const auto& cp : out)
            if ((cp.location - *root).norm() <= dedup) {
                dup = true;
                break;
            }
        if (dup) continue;
        out.push_back(classify(V, *root, opts.tol.degeneracy_tol));
    }
    std::sort(out.begin(), out.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) {
                  return lex_less(a.location, b.location);
              });
    if (dropped_seeds) *dropped_seeds = dropped;
    return out;
}

namespace {

struct SweepResult {
    struct Merge {
        int shallower_cp = -1;  // critical_points index whose barrier this fixes
        int deeper_cp = -1;
        double level = 0.0;
        std::size_t cell = 0;
    };
    std::vector<Merge> merges;
};

/// Increasing-V watershed over cell centers. Every component tracks its
/// deepest minimum; a merge fixes the barrier of the shallower side (both, on
/// an exact-depth tie within tie_tol).
SweepResult watershed(const Grid& grid, const std::vector<double>& vcell,
                      const std::vector<int>& min_of_cell,
                      const std::vector<const CriticalPoint*>& minima, double tie_tol) {
    const std::size_t n = grid.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return vcell[a] < vcell[b]; });

    UnionFind uf(n);
    std::vector<char> active(n, 0);
    std::vector<int> deepest(n, -1);  // root -> minima index
    SweepResult res;

    auto vmin_of = [&](int mi) { return minima[mi]->value; };

    for (std::size_t r = 0; r < n; ++r) {
        std::size_t c = order[r];
        active[c] = 1;
        std::size_t root = c;
        if (min_of_cell[c] >= 0) deepest[root] = min_of_cell[c];
        grid.for_each_neighbor(c, [&](std::size_t nb) {
            if (!active[nb]) return;
            std::size_t ra = uf.find(root), rb = uf.find(nb);
            if (ra == rb) {
                root = ra;
                return;
            }
            int da = deepest[ra], db = deepest[rb];
            std::size_t nr = uf.unite(ra, rb);
            int keep;
            if (da < 0 || db < 0) {
                keep = std::max(da, db);
            } else {
                double va = vmin_of(da), vb = vmin_of(db);
                if (std::abs(va - vb) <= tie_tol) {
                    // equal-depth wells see each other as valid targets
                    res.merges.push_back({da, db, vcell[c], c});
                    res.merges.push_back({db, da, vcell[c], c});
                    keep = lex_less(minima[da]->location, minima[db]->location) ? da : db;
                } else if (va < vb) {
                    res.merges.push_back({db, da, vcell[c], c});
                    keep = da;
                } else {
                    res.merges.push_back({da, db, vcell[c], c});
                    keep = db;
                }
            }
            deepest[nr] = keep;
            root = nr;
        });
    }
    return res;
}

}  // namespace

std::vector<std::size_t> sublevel_component(const Grid& grid, const std::vector<double>& vcell,
                                            std::size_t seed, double level) {
    std::vector<std::size_t> comp;
    if (vcell[seed] >= level) return comp;
    std::vector<char> seen(grid.size(), 0);
    std::vector<std::size_t> stack{seed};
    seen[seed] = 1;
    while (!stack.empty()) {
        std::size_t c = stack.back();
        stack.pop_back();
        comp.push_back(c);
        grid.for_each_neighbor(c, [&](std::size_t nb) {
            if (!seen[nb] && vcell[nb] < level) {
                seen[nb] = 1;
                stack.push_back(nb);
            }
        });
    }
    return comp;
}

std::vector<BarrierRecord> compute_barriers(const Potential& V,
                                            const std::vector<CriticalPoint>& critical_points,
                                            int grid_resolution,
                                            const LandscapeOptions& opts) {
    std::vector<const CriticalPoint*> minima;
    std::vector<int> minima_cp_index;
    for (std::size_t i = 0; i < critical_points.size(); ++i)
        if (critical_points[i].is_minimum() || (critical_points[i].degenerate &&
                                                critical_points[i].morse_index == 0)) {
            minima.push_back(&critical_points[i]);
            minima_cp_index.push_back(static_cast<int>(i));
        }
    if (minima.size() < 2) return {};

    int res = grid_resolution;
    if (res <= 0) res = V.dim() == 1 ? 8192 : 512;
    Grid grid = Grid::over(V.box(), res, res);

    const std::size_t n = grid.size();
    std::vector<double> vcell(n);
    for (std::size_t i = 0; i < n; ++i) vcell[i] = V.value(grid.node(i));

    std::vector<int> min_of_cell(n, -1);
    for (std::size_t mi = 0; mi < minima.size(); ++mi) {
        std::size_t c = grid.locate(minima[mi]->location);
        if (min_of_cell[c] >= 0)
            throw ResolutionTooCoarse("two minima fall in the same cell; increase grid_resolution");
        min_of_cell[c] = static_cast<int>(mi);
    }

    SweepResult sweep = watershed(grid, vcell, min_of_cell, minima, opts.tol.tie_tol);

    // first merge per minimum wins
    std::vector<BarrierRecord> records;
    std::vector<char> assigned(minima.size(), 0);
    for (const auto& m : sweep.merges) {
        if (assigned[m.shallower_cp]) continue;
        assigned[m.shallower_cp] = 1;
        const CriticalPoint& xk = *minima[m.shallower_cp];

        BarrierRecord rec;
        rec.k = minima_cp_index[m.shallower_cp];  // provisional: cp index, relabelled later
        rec.partner_minimum = minima_cp_index[m.deeper_cp];
        rec.grid_level = m.level;
        rec.merge_level = m.level;
        rec.refined = false;

        auto saddle = newton_root(V, grid.node(m.cell), opts.tol.grad_tol,
                                  opts.tol.degeneracy_tol, opts.newton_cap);
        if (saddle) {
            CriticalPoint sp = classify(V, *saddle, opts.tol.degeneracy_tol);
            if (sp.kind == CriticalPoint::Kind::saddle_index_1) {
                rec.saddle = sp;
                rec.merge_level = sp.value;
                rec.refined = true;
            }
        }
        rec.W = rec.merge_level - xk.value;

        // A.4 diagnostics. Newton-refine from every near-level cell on the rim
        // of x_k's sublevel component; a refined index-1 point at the merge
        // level whose neighborhood touches both x_k's component and that of an
        // at-least-as-deep minimum is a communicating pass. Two distinct such
        // passes at the same level mean the lowest mountain pass is not
        // unique. Cell values vary by O(h |grad V| + h^2 |hess V|) around the
        // true level, so the seed window is local; refined values are
        // filtered with tie_tol.
        auto comp_a = sublevel_component(grid, vcell, grid.locate(xk.location), m.level);
        std::vector<char> in_a(n, 0), in_b(n, 0);
        for (auto c : comp_a) in_a[c] = 1;
        for (std::size_t mi = 0; mi < minima.size(); ++mi) {
            if (minima_cp_index[mi] == rec.k) continue;
            if (minima[mi]->value > xk.value + opts.tol.tie_tol) continue;
            for (auto c :
                 sublevel_component(grid, vcell, grid.locate(minima[mi]->location), m.level))
                in_b[c] = 1;
        }
        const double hmax = grid.max_h();
        auto touches = [&](std::size_t c, const std::vector<char>& side, int radius) {
            int ci = grid.ix(c), cj = grid.iy(c);
            for (int dj = -radius; dj <= radius; ++dj)
                for (int di = -radius; di <= radius; ++di) {
                    int i = ci + di, j = cj + dj;
                    if (i < 0 || i >= grid.n[0] || j < 0 || j >= grid.n[1]) continue;
                    if (side[grid.index(i, j)]) return true;
                }
            return false;
        };
        for (std::size_t c = 0; c < n; ++c) {
            Vec pc = grid.node(c);
            double kappa = std::max(opts.tol.tie_tol,
                                    2.0 * (hmax * V.gradient(pc).norm() +
                                           hmax * hmax * V.hessian(pc).norm()));
            if (std::abs(vcell[c] - m.level) > kappa) continue;
            if (!touches(c, in_a, 1)) continue;  // seeds sit on x_k's rim
            auto cand = newton_root(V, pc, opts.tol.grad_tol, opts.tol.degeneracy_tol,
                                    opts.newton_cap);
            if (!cand) continue;
            CriticalPoint sp = classify(V, *cand, opts.tol.degeneracy_tol);
            if (sp.kind != CriticalPoint::Kind::saddle_index_1) continue;
            if (std::abs(sp.value - rec.merge_level) > opts.tol.tie_tol) continue;
            std::size_t sc = grid.locate(sp.location);
            if (!touches(sc, in_a, 2) || !touches(sc, in_b, 2)) continue;
            bool dup = false;
            for (const auto& prev : rec.saddle_candidates)
                if ((prev.location - sp.location).norm() <= 10.0 * opts.tol.grad_tol) {
                    dup = true;
                    break;
                }
            if (!dup) rec.saddle_candidates.push_back(sp);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

AssumptionFlags verify_assumptions(const Potential& V,
                                   const std::vector<CriticalPoint>& critical_points,
                                   const std::vector<BarrierRecord>& barriers, double tie_tol,
                                   const LandscapeOptions& opts) {
    AssumptionFlags f;

    // A.1: Morse property <=> no degenerate Hessians among found points
    for (const auto& cp : critical_points)
        if (cp.degenerate) {
            f.a1.pass = false;
            f.a1.detail += "degenerate Hessian at " + point_str(cp.location, V.dim()) + "; ";
        }
    if (f.a1.pass) f.a1.detail = "all critical points nondegenerate";

    // A.2 (box-local proxy): min over the box boundary of
    // 1/4 |grad V|^2 - Lap V / (2 beta0) must exceed its value at every minimum.
    {
        auto schroedinger_floor = [&](const Vec& p) {
            double g2 = V.gradient(p).squaredNorm();
            return 0.25 * g2 - V.laplacian(p) / (2.0 * opts.beta0);
        };
        double bmin = kInf;
        const Box& b = V.box();
        const int samples = 512;
        if (V.dim() == 1) {
            bmin = std::min(schroedinger_floor(make_vec(b.lo[0])),
                            schroedinger_floor(make_vec(b.hi[0])));
        } else {
            for (int s = 0; s <= samples; ++s) {
                double tx = b.lo[0] + s * b.extent(0) / samples;
                double ty = b.lo[1] + s * b.extent(1) / samples;
                bmin = std::min(bmin, schroedinger_floor(make_vec(tx, b.lo[1])));
                bmin = std::min(bmin, schroedinger_floor(make_vec(tx, b.hi[1])));
                bmin = std::min(bmin, schroedinger_floor(make_vec(b.lo[0], ty)));
                bmin = std::min(bmin, schroedinger_floor(make_vec(b.hi[0], ty)));
            }
        }
        double imax = -kInf;
        for (const auto& cp : critical_points)
            if (cp.is_minimum()) imax = std::max(imax, schroedinger_floor(cp.location));
        f.a2.pass = bmin > imax;
        std::ostringstream os;
        os.precision(6);
        os << "box-local check: boundary min " << bmin << (f.a2.pass ? " > " : " <= ")
           << "interior value at minima " << imax;
        f.a2.detail = os.str();
    }

    // A.3: e^{-beta0 V} is integrable on a bounded box for continuous V.
    f.a3.pass = true;
    f.a3.detail = "box-local check: Gibbs weight integrable on a compact box";

    // A.4: unique communicating saddle per barrier
    for (const auto& b : barriers) {
        int distinct = 0;
        for (const auto& cand : b.saddle_candidates)
            if (std::abs(cand.value - b.merge_level) <= tie_tol) ++distinct;
        if (distinct >= 2) {
            f.a4.pass = false;
            f.a4_failed_k.push_back(b.k);
            std::ostringstream os;
            os << distinct << " index-1 saddles at the merge level of minimum k=" << b.k << "; ";
            f.a4.detail += os.str();
        }
    }
    if (f.a4.pass) f.a4.detail = barriers.empty() ? "no barriers (single well)"
                                                  : "unique communicating saddle per barrier";

    // A.5: all barrier heights distinct
    for (std::size_t i = 0; i < barriers.size(); ++i)
        for (std::size_t j = i + 1; j < barriers.size(); ++j)
            if (std::abs(barriers[i].W - barriers[j].W) < tie_tol) {
                f.a5.pass = false;
                f.a5_tied_k.push_back(barriers[i].k);
                f.a5_tied_k.push_back(barriers[j].k);
                std::ostringstream os;
                os.precision(12);
                os << "W tie between k=" << barriers[i].k << " and k=" << barriers[j].k << " ("
                   << barriers[i].W << " vs " << barriers[j].W << "); ";
                f.a5.detail += os.str();
            }
    if (f.a5.pass) f.a5.detail = barriers.empty() ? "vacuous (no finite barriers)"
                                                  : "all barrier heights distinct";
    return f;
}

LandscapeReport analyze_landscape(const Potential& V, const LandscapeOptions& opts) {
    LandscapeReport rep;
    rep.potential_name = V.name();
    rep.dim = V.dim();
    rep.critical_points =
        find_critical_points(V, opts.seeds_per_axis, opts.tol.grad_tol, opts, &rep.dropped_seeds);

    auto barriers =
        compute_barriers(V, rep.critical_points, opts.grid_resolution, opts);

    // e:order labelling: global minimum first, then W descending. Records from
    // the sweep carry critical_points indices in `k`; translate after sorting.
    std::vector<int> min_indices;
    for (std::size_t i = 0; i < rep.critical_points.size(); ++i)
        if (rep.critical_points[i].is_minimum() ||
            (rep.critical_points[i].degenerate && rep.critical_points[i].morse_index == 0))
            min_indices.push_back(static_cast<int>(i));

    auto barrier_of = [&](int cp_index) -> const BarrierRecord* {
        for (const auto& b : barriers)
            if (b.k == cp_index) return &b;
        return nullptr;
    };
    std::stable_sort(min_indices.begin(), min_indices.end(), [&](int a, int b) {
        const BarrierRecord* ba = barrier_of(a);
        const BarrierRecord* bb = barrier_of(b);
        double wa = ba ? ba->W : kInf;
        double wb = bb ? bb->W : kInf;
        if (wa != wb) return wa > wb;
        double va = rep.critical_points[a].value, vb = rep.critical_points[b].value;
        if (va != vb) return va < vb;
        return lex_less(rep.critical_points[a].location, rep.critical_points[b].location);
    });
    rep.minima_ordered = min_indices;

    for (std::size_t pos = 0; pos < min_indices.size(); ++pos) {
        const BarrierRecord* b = barrier_of(min_indices[pos]);
        if (!b) continue;
        BarrierRecord rec = *b;
        rec.k = static_cast<int>(pos);
        rep.barriers.push_back(std::move(rec));
    }
    std::sort(rep.barriers.begin(), rep.barriers.end(),
              [](const BarrierRecord& a, const BarrierRecord& b) { return a.k < b.k; });

    rep.assumptions =
        verify_assumptions(V, rep.critical_points, rep.barriers, opts.tol.tie_tol, opts);
    return rep;
}

}  // namespace mw
