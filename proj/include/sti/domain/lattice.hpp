#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sti {

enum class SpatialBoundary { periodic, free };

// The box [-n,n]^d with periodic or free boundary (plus free 1-d chains of
// any length, for the tiny oracle instances). Vertices are indexed
// row-major, first coordinate slowest; edge enumeration is deterministic:
// vertex order, then axis order, each unordered edge listed once via the
// +1 shift.
class Lattice {
  public:
    static constexpr int max_dim = 4;

    Lattice(int d, int n, SpatialBoundary bc) : Lattice(d, 2 * n + 1, n, bc) {
        if (n < 0) throw std::invalid_argument("negative half-width");
    }

    // free path of nv vertices at coordinates 0..nv-1
    static Lattice chain(int nv) { return Lattice(1, nv, 0, SpatialBoundary::free); }

    int dimension() const { return d_; }
    int halfwidth() const { return offset_; }
    int side() const { return side_; }
    SpatialBoundary boundary() const { return bc_; }
    std::int32_t vertex_count() const { return nv_; }
    std::int32_t edge_count() const { return static_cast<std::int32_t>(edges_.size()); }

    const std::vector<std::pair<std::int32_t, std::int32_t>>& edges() const { return edges_; }
    std::pair<std::int32_t, std::int32_t> edge(std::int32_t e) const { return edges_[e]; }

    const std::vector<std::int32_t>& neighbors(std::int32_t v) const { return adj_[v]; }

    // edges incident to v as (neighbor, edge id)
    const std::vector<std::pair<std::int32_t, std::int32_t>>& incident_edges(std::int32_t v) const {
        return adj_edges_[v];
    }

    std::int32_t edge_between(std::int32_t u, std::int32_t v) const {
        for (auto [w, e] : adj_edges_[u])
            if (w == v) return e;
        return -1;
    }

    std::array<int, max_dim> coords(std::int32_t v) const {
        std::array<int, max_dim> c{};
        for (int i = d_ - 1; i >= 0; --i) {
            c[i] = static_cast<int>(v % side_) - offset_;
            v /= side_;
        }
        return c;
    }

    std::int32_t index(const std::array<int, max_dim>& c) const {
        std::int32_t v = 0;
        for (int i = 0; i < d_; ++i) v = v * side_ + (c[i] + offset_);
        return v;
    }

    // vertex at the coordinate origin
    std::int32_t origin() const {
        std::array<int, max_dim> c{};
        return index(c);
    }

    // neighbor of v one step along an axis; -1 outside a free boundary
    std::int32_t shifted(std::int32_t v, int axis, int by) const {
        auto c = coords(v);
        int x = c[axis] + by;
        if (bc_ == SpatialBoundary::periodic) {
            x = ((x + offset_) % side_ + side_) % side_ - offset_;
        } else if (x < -offset_ || x > side_ - 1 - offset_) {
            return -1;
        }
        c[axis] = x;
        return index(c);
    }

  private:
    Lattice(int d, int side, int offset, SpatialBoundary bc)
        : d_(d), bc_(bc), side_(side), offset_(offset) {
        if (d < 1 || d > max_dim) throw std::invalid_argument("lattice dimension out of range");
        if (side < 1) throw std::invalid_argument("empty lattice");
        if (bc == SpatialBoundary::periodic && side < 3)
            throw std::invalid_argument("periodic boundary needs n >= 1 (no loops or multi-edges)");
        nv_ = 1;
        for (int i = 0; i < d_; ++i) nv_ *= side_;
        build_edges();
    }

    void build_edges() {
        adj_.assign(nv_, {});
        adj_edges_.assign(nv_, {});
        for (std::int32_t v = 0; v < nv_; ++v) {
            for (int axis = 0; axis < d_; ++axis) {
                std::int32_t w = shifted(v, axis, +1);
                if (w < 0 || w == v) continue;
                edges_.emplace_back(v, w);
                std::int32_t e = static_cast<std::int32_t>(edges_.size()) - 1;
                adj_[v].push_back(w);
                adj_[w].push_back(v);
                adj_edges_[v].emplace_back(w, e);
                adj_edges_[w].emplace_back(v, e);
            }
        }
    }

    int d_;
    SpatialBoundary bc_;
    int side_, offset_;
    std::int32_t nv_ = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges_;
    std::vector<std::vector<std::int32_t>> adj_;
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> adj_edges_;
};

}  // namespace sti
