#pragma once

#include "multiwell/common.hpp"

#include <cstddef>
#include <functional>

namespace mw {

// Uniform cell-centered lattice over a box: axis a carries n[a] cells of
// width h(a), node i sits at lo + (i + 1/2) h. Cell-centered nodes make the
// midpoint quadrature weight a single cell volume for every node and give the
// reflecting (Neumann) closure for free: boundary nodes just have fewer
// neighbors.
struct Grid {
    Box box;
    std::array<int, 2> n{1, 1};  // cells per axis; n[1] == 1 in 1-d

    static Grid over(const Box& b, int nx, int ny = 1) {
        Grid g;
        g.box = b;
        g.n = {nx, b.dim == 2 ? ny : 1};
        if (nx < 2 || (b.dim == 2 && ny < 2))
            throw Error("Grid: need at least 2 cells per axis");
        return g;
    }

    int dim() const { return box.dim; }
    double h(int axis) const { return box.extent(axis) / n[axis]; }
    double max_h() const {
        double m = h(0);
        if (dim() == 2) m = std::max(m, h(1));
        return m;
    }
    double cell_volume() const {
        double v = h(0);
        if (dim() == 2) v *= h(1);
        return v;
    }
    std::size_t size() const {
        return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]);
    }

    std::size_t index(int i, int j = 0) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(n[0]) * j;
    }
    int ix(std::size_t idx) const { return static_cast<int>(idx % n[0]); }
    int iy(std::size_t idx) const { return static_cast<int>(idx / n[0]); }

    Vec node(std::size_t idx) const {
        Vec p = Vec::Zero();
        p[0] = box.lo[0] + (ix(idx) + 0.5) * h(0);
        if (dim() == 2) p[1] = box.lo[1] + (iy(idx) + 0.5) * h(1);
        return p;
    }

    /// Cell containing p, clamped to the lattice.
    std::size_t locate(const Vec& p) const {
        int i = static_cast<int>((p[0] - box.lo[0]) / h(0));
        i = std::min(std::max(i, 0), n[0] - 1);
        int j = 0;
        if (dim() == 2) {
            j = static_cast<int>((p[1] - box.lo[1]) / h(1));
            j = std::min(std::max(j, 0), n[1] - 1);
        }
        return index(i, j);
    }

    bool operator==(const Grid& o) const { return box == o.box && n == o.n; }
    bool operator!=(const Grid& o) const { return !(*this == o); }

    /// Visits every lattice edge once: fn(i, j, axis) with j the higher node.
    template <typename Fn>
    void for_each_edge(Fn&& fn) const {
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i + 1 < n[0]; ++i) fn(index(i, j), index(i + 1, j), 0);
        if (dim() == 2)
            for (int j = 0; j + 1 < n[1]; ++j)
                for (int i = 0; i < n[0]; ++i) fn(index(i, j), index(i, j + 1), 1);
    }

    /// Face neighbors (2 in 1-d, 4-neighborhood in 2-d).
    template <typename Fn>
    void for_each_neighbor(std::size_t idx, Fn&& fn) const {
        int i = ix(idx), j = iy(idx);
        if (i > 0) fn(index(i - 1, j));
        if (i + 1 < n[0]) fn(index(i + 1, j));
        if (dim() == 2) {
            if (j > 0) fn(index(i, j - 1));
            if (j + 1 < n[1]) fn(index(i, j + 1));
        }
    }

    bool is_boundary(std::size_t idx) const {
        int i = ix(idx), j = iy(idx);
        if (i == 0 || i == n[0] - 1) return true;
        if (dim() == 2 && (j == 0 || j == n[1] - 1)) return true;
        return false;
    }
};

/// Plain union-find over grid cells, used by the barrier sweep and the
/// sublevel-component extraction.
class UnionFind {
  public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    /// Returns the surviving root.
    std::size_t unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return a;
    }

  private:
    std::vector<std::size_t> parent_;
    std::vector<int> rank_;
};

}  // namespace mw
