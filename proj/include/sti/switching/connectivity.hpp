#pragma once

#include <span>
#include <vector>

#include "sti/core/rng.hpp"
#include "sti/domain/events.hpp"
#include "sti/parity/colouring.hpp"

namespace sti {

// the cut process Delta: Poisson at intensity exactly 4*delta on K,
// independent of both colourings
std::vector<VertexEvent> sample_cuts(const Region& region, double delta, Rng& rng,
                                     std::span<const double> forbidden = {});

// Connectivity in the triple (psi1^A, psi2^B, Delta): nodes are the
// maximal sub-intervals of K delimited by switching points of either
// colouring and by cuts; a cut severs vertical adjacency only where BOTH
// colourings are even. Bridges of B1 u B2 and ghost-bonds of G1 u G2
// (to the ghost site) connect segments. Queries are near-constant
// amortized via union-find.
class ConnectivityIndex {
  public:
    // forced points sever unconditionally (deletion of a point z,
    // realizing the event x <->^z y by rebuilding without z)
    ConnectivityIndex(const Colouring& psi1, const Colouring& psi2,
                      std::span<const VertexEvent> cuts, std::span<const Point> forced = {});

    bool connected(const SitePoint& x, const SitePoint& y) const;
    bool connected(const Point& x, const Point& y) const;
    bool connected_to_ghost(const Point& x) const;

    // root of the cluster containing a point (for cluster-membership scans)
    int cluster_of(const Point& x) const;
    // cluster of the segment just before the time of x on its line
    int cluster_before(const Point& x) const;
    int ghost_cluster() const;

    // boundary scan support: segment id just after/before a time on a line
    int segment_after(std::int32_t vertex, double t) const;
    int segment_before(std::int32_t vertex, double t) const;

  private:
    struct Boundary {
        double pos;
        bool blocking;
    };
    struct SegArc {
        std::int32_t vertex;
        IntervalSet::Arc arc;
        int b_begin, b_end;  // boundaries within this arc
        int seg_base;        // id of the segment preceding boundary b_begin
    };

    int locate(const Point& x) const;
    int find(int a) const;

    const Region* region_;
    std::vector<SegArc> arcs_;
    std::vector<int> arc_begin_;  // per vertex
    std::vector<Boundary> bounds_;
    mutable std::vector<int> parent_;
    int ghost_node_;
};

// the event x <->^z y: there is no open path from x to y avoiding z
// (in particular it holds whenever x and y are not connected at all)
bool only_via(const Colouring& psi1, const Colouring& psi2, std::span<const VertexEvent> cuts,
              const SitePoint& x, const SitePoint& y, const Point& z);

}  // namespace sti
