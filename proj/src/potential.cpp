#include "multiwell/potential.hpp"

#include "multiwell/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mw {

Polynomial1D::Polynomial1D(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw Error("Polynomial1D: empty coefficient list");
}

double Polynomial1D::value(double x) const {
    double b = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) b = b * x + *it;
    return b;
}

double Polynomial1D::d1(double x) const {
    double b = 0.0;
    for (std::size_t k = c_.size(); k-- > 1;) b = b * x + k * c_[k];
    return b;
}

double Polynomial1D::d2(double x) const {
    double b = 0.0;
    for (std::size_t k = c_.size(); k-- > 2;) b = b * x + k * (k - 1) * c_[k];
    return b;
}

Polynomial2D::Polynomial2D(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw Error("Polynomial2D: empty term list");
    for (const auto& t : terms_)
        if (t.i < 0 || t.j < 0) throw Error("Polynomial2D: negative exponent");
}

double Polynomial2D::ipow(double b, int e) {
    double r = 1.0;
    while (e-- > 0) r *= b;
    return r;
}

double Polynomial2D::value(double x, double y) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.c * ipow(x, t.i) * ipow(y, t.j);
    return s;
}

void Polynomial2D::gradient(double x, double y, double& gx, double& gy) const {
    gx = gy = 0.0;
    for (const auto& t : terms_) {
        if (t.i > 0) gx += t.c * t.i * ipow(x, t.i - 1) * ipow(y, t.j);
        if (t.j > 0) gy += t.c * t.j * ipow(x, t.i) * ipow(y, t.j - 1);
    }
}

void Polynomial2D::hessian(double x, double y, double& hxx, double& hxy, double& hyy) const {
    hxx = hxy = hyy = 0.0;
    for (const auto& t : terms_) {
        if (t.i > 1) hxx += t.c * t.i * (t.i - 1) * ipow(x, t.i - 2) * ipow(y, t.j);
        if (t.i > 0 && t.j > 0) hxy += t.c * t.i * t.j * ipow(x, t.i - 1) * ipow(y, t.j - 1);
        if (t.j > 1) hyy += t.c * t.j * (t.j - 1) * ipow(x, t.i) * ipow(y, t.j - 2);
    }
}

Potential::Potential(std::string name, Polynomial1D p, Box box)
    : name_(std::move(name)), impl_(std::move(p)), box_(box) {
    if (box_.dim != 1) throw Error("Potential: 1-d polynomial needs a 1-d box");
    if (box_.lo[0] >= box_.hi[0]) throw Error("Potential: empty box");
}

Potential::Potential(std::string name, Polynomial2D p, Box box)
    : name_(std::move(name)), impl_(std::move(p)), box_(box) {
    if (box_.dim != 2) throw Error("Potential: 2-d polynomial needs a 2-d box");
    for (int a = 0; a < 2; ++a)
        if (box_.lo[a] >= box_.hi[a]) throw Error("Potential: empty box");
}

double Potential::value(const Vec& p) const {
    if (const auto* q = std::get_if<Polynomial1D>(&impl_)) return q->value(p[0]);
    return std::get<Polynomial2D>(impl_).value(p[0], p[1]);
}

Vec Potential::gradient(const Vec& p) const {
    Vec g = Vec::Zero();
    if (const auto* q = std::get_if<Polynomial1D>(&impl_)) {
        g[0] = q->d1(p[0]);
    } else {
        std::get<Polynomial2D>(impl_).gradient(p[0], p[1], g[0], g[1]);
    }
    return g;
}

Mat Potential::hessian(const Vec& p) const {
    Mat h = Mat::Zero();
    if (const auto* q = std::get_if<Polynomial1D>(&impl_)) {
        h(0, 0) = q->d2(p[0]);
    } else {
        double hxx, hxy, hyy;
        std::get<Polynomial2D>(impl_).hessian(p[0], p[1], hxx, hxy, hyy);
        h(0, 0) = hxx;
        h(0, 1) = h(1, 0) = hxy;
        h(1, 1) = hyy;
    }
    return h;
}

double Potential::laplacian(const Vec& p) const {
    Mat h = hessian(p);
    return dim() == 1 ? h(0, 0) : h(0, 0) + h(1, 1);
}

double gibbs_effective_grad_max(const Potential& V, const Grid& grid, double beta,
                                double tail_mass) {
    const std::size_t n = grid.size();
    std::vector<double> v(n), g(n);
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        Vec p = grid.node(i);
        v[i] = V.value(p);
        g[i] = V.gradient(p).norm();
        vmin = std::min(vmin, v[i]);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

    double total = 0.0;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::exp(-beta * (v[i] - vmin));
        total += w[i];
    }
    // walk from the highest level down, dropping cells while the dropped mass
    // stays below the tail threshold
    double dropped = 0.0;
    double gmax = 0.0;
    std::size_t keep_until = n;
    for (std::size_t r = n; r-- > 0;) {
        dropped += w[order[r]];
        if (dropped > tail_mass * total) {
            keep_until = r + 1;
            break;
        }
        keep_until = r;
    }
    for (std::size_t r = 0; r < keep_until; ++r) gmax = std::max(gmax, g[order[r]]);
    return gmax;
}

ConsistencyReport check_consistency(const Potential& V, int probes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Box& b = V.box();
    ConsistencyReport rep;
    for (int t = 0; t < probes; ++t) {
        Vec p = Vec::Zero();
        for (int a = 0; a < b.dim; ++a) {
            // keep probes away from the faces so central stencils stay inside
            std::uniform_real_distribution<double> u(b.lo[a] + 0.05 * b.extent(a),
                                                     b.hi[a] - 0.05 * b.extent(a));
            p[a] = u(rng);
        }
        double scale = std::max(1.0, p.norm());
        double step = 1e-6 * scale;
        Vec g = V.gradient(p);
        Mat h = V.hessian(p);
        double gref = std::max(1.0, g.norm());
        for (int a = 0; a < b.dim; ++a) {
            Vec pp = p, pm = p;
            pp[a] += step;
            pm[a] -= step;
            double fd = (V.value(pp) - V.value(pm)) / (2 * step);
            rep.max_grad_rel_err = std::max(rep.max_grad_rel_err, std::abs(fd - g[a]) / gref);
            Vec gd = (V.gradient(pp) - V.gradient(pm)) / (2 * step);
            double href = std::max(1.0, h.norm());
            for (int c = 0; c < b.dim; ++c)
                rep.max_hess_rel_err =
                    std::max(rep.max_hess_rel_err, std::abs(gd[c] - h(c, a)) / href);
        }
    }
    rep.pass = rep.max_grad_rel_err <= 1e-5 && rep.max_hess_rel_err <= 1e-4;
    return rep;
}

}  // namespace mw
