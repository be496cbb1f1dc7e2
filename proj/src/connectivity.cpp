#include "sti/switching/connectivity.hpp"

#include <algorithm>
#include <stdexcept>

namespace sti {

std::vector<VertexEvent> sample_cuts(const Region& region, double delta, Rng& rng,
                                     std::span<const double> forbidden) {
    std::vector<VertexEvent> out;
    std::vector<double> ts;
    bool clean = true;
    do {
        out.clear();
        clean = true;
        for (std::int32_t v = 0; v < region.lattice().vertex_count() && clean; ++v) {
            ts.clear();
            sample_poisson_times(region.vertex_line(v), 4.0 * delta, rng, ts);
            std::sort(ts.begin(), ts.end());
            for (std::size_t i = 0; i + 1 < ts.size(); ++i)
                if (ts[i] == ts[i + 1]) clean = false;
            for (double t : ts) {
                for (double f : forbidden)
                    if (t == f) clean = false;
                out.push_back({v, t});
            }
        }
    } while (!clean);
    return out;
}

ConnectivityIndex::ConnectivityIndex(const Colouring& psi1, const Colouring& psi2,
                                     std::span<const VertexEvent> cuts,
                                     std::span<const Point> forced) {
    if (!psi1.valid() || !psi2.valid())
        throw std::domain_error("connectivity needs valid colourings");
    region_ = &psi1.region();
    const Lattice& lat = region_->lattice();
    const double beta = region_->beta();

    // gather candidate boundary times per vertex: switching points of both
    // colourings, cuts, forced deletions
    struct RawB {
        double t;
        bool is_cut;
        bool is_forced;
    };
    std::vector<std::vector<RawB>> per_vertex(lat.vertex_count());
    auto add_colouring = [&](const Colouring& psi) {
        for (const auto& ln : psi.lines())
            for (const auto& s : psi.line_switches(ln))
                per_vertex[ln.vertex].push_back({s.t, false, false});
    };
    add_colouring(psi1);
    add_colouring(psi2);
    for (const auto& c : cuts) per_vertex[c.vertex].push_back({c.t, true, false});
    for (const auto& f : forced) per_vertex[f.vertex].push_back({f.time, false, true});

    arc_begin_.assign(lat.vertex_count() + 1, 0);
    int seg_count = 0;
    for (std::int32_t v = 0; v < lat.vertex_count(); ++v) {
        arc_begin_[v] = static_cast<int>(arcs_.size());
        const IntervalSet& kv = region_->vertex_line(v);
        for (const auto& arc : kv.arcs()) {
            SegArc sa;
            sa.vertex = v;
            sa.arc = arc;
            sa.b_begin = static_cast<int>(bounds_.size());
            for (const auto& rb : per_vertex[v]) {
                if (!kv.closure_contains(rb.t, arc)) continue;
                double pos = arc.full ? (rb.t == 0.0 ? beta : rb.t) : kv.unwrap(rb.t, arc);
                bool blocking = rb.is_forced;
                if (rb.is_cut) {
                    // a cut severs only where both colourings are even
                    blocking = !psi1.odd_after(v, rb.t) && !psi2.odd_after(v, rb.t);
                }
                bounds_.push_back({pos, blocking});
            }
            std::sort(bounds_.begin() + sa.b_begin, bounds_.end(),
                      [](const Boundary& a, const Boundary& b) { return a.pos < b.pos; });
            sa.b_end = static_cast<int>(bounds_.size());
            sa.seg_base = seg_count;
            int nb = sa.b_end - sa.b_begin;
            seg_count += arc.full ? std::max(nb, 1) : nb + 1;
            arcs_.push_back(sa);
        }
    }
    arc_begin_[lat.vertex_count()] = static_cast<int>(arcs_.size());

    ghost_node_ = seg_count;
    parent_.resize(seg_count + 1);
    for (int i = 0; i <= seg_count; ++i) parent_[i] = i;

    auto unite = [&](int a, int b) {
        int ra = find(a), rb = find(b);
        if (ra != rb) parent_[ra] = rb;
    };

    // vertical adjacency across non-blocking boundaries
    for (const auto& sa : arcs_) {
        int nb = sa.b_end - sa.b_begin;
        if (nb == 0) continue;
        if (sa.arc.full) {
            // circular: boundary i separates segment i-1 (mod nb) from segment i
            for (int i = 0; i < nb; ++i) {
                if (bounds_[sa.b_begin + i].blocking) continue;
                unite(sa.seg_base + (i - 1 + nb) % nb, sa.seg_base + i % nb);
            }
        } else {
            // linear: boundary i separates segment i from segment i+1
            for (int i = 0; i < nb; ++i) {
                if (bounds_[sa.b_begin + i].blocking) continue;
                unite(sa.seg_base + i, sa.seg_base + i + 1);
            }
        }
    }

    // bridges of B1 u B2 join the two endpoints' segments
    auto add_bridges = [&](const Colouring& psi) {
        for (const auto& b : psi.events().bridges) {
            auto [u, v] = lat.edge(b.edge);
            unite(segment_after(u, b.t), segment_after(v, b.t));
        }
    };
    add_bridges(psi1);
    add_bridges(psi2);

    // ghost-bonds join their segment to the ghost site
    auto add_ghosts = [&](const Colouring& psi) {
        for (const auto& g : psi.events().ghosts)
            unite(segment_after(g.vertex, g.t), ghost_node_);
    };
    add_ghosts(psi1);
    add_ghosts(psi2);
}

int ConnectivityIndex::find(int a) const {
    while (parent_[a] != a) {
        parent_[a] = parent_[parent_[a]];
        a = parent_[a];
    }
    return a;
}

int ConnectivityIndex::segment_after(std::int32_t vertex, double t) const {
    const IntervalSet& kv = region_->vertex_line(vertex);
    for (int ai = arc_begin_[vertex]; ai < arc_begin_[vertex + 1]; ++ai) {
        const SegArc& sa = arcs_[ai];
        if (!kv.closure_contains(t, sa.arc)) continue;
        int nb = sa.b_end - sa.b_begin;
        double beta = region_->beta();
        if (sa.arc.full) {
            if (nb == 0) return sa.seg_base;
            double pos = (t == 0.0) ? 0.0 : t;
            // segment i spans boundary i .. boundary i+1 (cyclically);
            // the point just after pos lies in the segment whose lower
            // boundary is the last boundary with b.pos <= pos
            int lo = -1;
            for (int i = 0; i < nb; ++i)
                if (bounds_[sa.b_begin + i].pos <= pos) lo = i;
            if (lo < 0) lo = nb - 1;  // before the first boundary: wrap segment
            return sa.seg_base + lo;
        }
        double pos = kv.unwrap(t, sa.arc);
        int idx = 0;
        for (int i = 0; i < nb; ++i)
            if (bounds_[sa.b_begin + i].pos <= pos) idx = i + 1;
        return sa.seg_base + idx;
    }
    throw std::invalid_argument("connectivity query outside region");
}

int ConnectivityIndex::segment_before(std::int32_t vertex, double t) const {
    const IntervalSet& kv = region_->vertex_line(vertex);
    for (int ai = arc_begin_[vertex]; ai < arc_begin_[vertex + 1]; ++ai) {
        const SegArc& sa = arcs_[ai];
        if (!kv.closure_contains(t, sa.arc)) continue;
        int nb = sa.b_end - sa.b_begin;
        double beta = region_->beta();
        if (sa.arc.full) {
            if (nb == 0) return sa.seg_base;
            double pos = (t == 0.0) ? beta : t;
            int lo = -1;
            for (int i = 0; i < nb; ++i)
                if (bounds_[sa.b_begin + i].pos < pos) lo = i;
            if (lo < 0) lo = nb - 1;
            return sa.seg_base + lo;
        }
        double pos = kv.unwrap(t, sa.arc);
        int idx = 0;
        for (int i = 0; i < nb; ++i)
            if (bounds_[sa.b_begin + i].pos < pos) idx = i + 1;
        return sa.seg_base + idx;
    }
    throw std::invalid_argument("connectivity query outside region");
}

int ConnectivityIndex::locate(const Point& x) const { return segment_after(x.vertex, x.time); }

bool ConnectivityIndex::connected(const Point& x, const Point& y) const {
    return find(locate(x)) == find(locate(y));
}

bool ConnectivityIndex::connected_to_ghost(const Point& x) const {
    return find(locate(x)) == find(ghost_node_);
}

bool ConnectivityIndex::connected(const SitePoint& x, const SitePoint& y) const {
    int a = x.is_ghost ? ghost_node_ : locate(x.p);
    int b = y.is_ghost ? ghost_node_ : locate(y.p);
    return find(a) == find(b);
}

int ConnectivityIndex::cluster_of(const Point& x) const { return find(locate(x)); }
int ConnectivityIndex::cluster_before(const Point& x) const {
    return find(segment_before(x.vertex, x.time));
}
int ConnectivityIndex::ghost_cluster() const { return find(ghost_node_); }

bool only_via(const Colouring& psi1, const Colouring& psi2, std::span<const VertexEvent> cuts,
              const SitePoint& x, const SitePoint& y, const Point& z) {
    Point forced[1] = {z};
    ConnectivityIndex idx(psi1, psi2, cuts, forced);
    return !idx.connected(x, y);
}

}  // namespace sti
