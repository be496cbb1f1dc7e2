#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "sti/domain/interval_set.hpp"
#include "sti/domain/lattice.hpp"
#include "sti/domain/point.hpp"

namespace sti {

// a closed sub-path of one vertex line: [t0, t1] on vertex v, where
// t1 > t0 or t1 < t0 (wrapping through 0 on the circle)
struct TimeSeg {
    std::int32_t vertex;
    double t0, t1;
};

// The domain Lambda = (K, F): a per-vertex union of time intervals K_v
// together with the edge overlaps K_e = K_u n K_v.
class Region {
  public:
    Region(Lattice lat, double beta, TimeTopology top, bool start_full = true)
        : lat_(std::move(lat)), beta_(beta), top_(top) {
        K_.reserve(lat_.vertex_count());
        for (std::int32_t v = 0; v < lat_.vertex_count(); ++v)
            K_.push_back(start_full ? IntervalSet::whole(top, beta)
                                    : IntervalSet::empty_set(top, beta));
        rebuild_edges();
    }

    static Region box(const Lattice& lat, double beta, TimeTopology top) {
        return Region(lat, beta, top, true);
    }

    const Lattice& lattice() const { return lat_; }
    double beta() const { return beta_; }
    TimeTopology topology() const { return top_; }

    const IntervalSet& vertex_line(std::int32_t v) const { return K_[v]; }
    IntervalSet& mutable_vertex_line(std::int32_t v) { return K_[v]; }
    const IntervalSet& edge_overlap(std::int32_t e) const { return F_[e]; }

    // recompute K_e after direct edits of vertex lines
    void rebuild_edges() {
        F_.clear();
        F_.reserve(lat_.edge_count());
        for (std::int32_t e = 0; e < lat_.edge_count(); ++e) {
            auto [u, v] = lat_.edge(e);
            F_.push_back(K_[u].intersect(K_[v]));
        }
    }

    double k_measure() const {
        double m = 0.0;
        for (const auto& s : K_) m += s.measure();
        return m;
    }

    // Lebesgue measure weighted by a constant or per-vertex constants
    double k_measure(std::span<const double> per_vertex_weight) const {
        double m = 0.0;
        for (std::size_t v = 0; v < K_.size(); ++v)
            m += per_vertex_weight[v % per_vertex_weight.size()] * K_[v].measure();
        return m;
    }

    double f_measure() const {
        double m = 0.0;
        for (const auto& s : F_) m += s.measure();
        return m;
    }

    // N(K): total number of maximal intervals
    int interval_count() const {
        int n = 0;
        for (const auto& s : K_) n += s.count();
        return n;
    }

    // W(K): vertices whose line is the whole circle
    std::vector<std::int32_t> full_vertices() const {
        std::vector<std::int32_t> w;
        for (std::int32_t v = 0; v < lat_.vertex_count(); ++v)
            if (K_[v].is_full_circle()) w.push_back(v);
        return w;
    }

    bool point_in_closure(const Point& p) const {
        const auto arcs = K_[p.vertex].arcs();
        return K_[p.vertex].arc_containing(p.time, arcs) >= 0;
    }

    // K minus a union of closed vertex-line segments (e.g. a backbone)
    Region subtract(const std::vector<TimeSeg>& segs) const {
        Region out = *this;
        for (const auto& s : segs) {
            if (s.vertex < 0 || s.vertex >= lat_.vertex_count())
                throw std::invalid_argument("segment vertex outside lattice");
            if (!out.K_[s.vertex].contains(mid_of(s)))
                throw std::invalid_argument("segment escapes region");
            out.K_[s.vertex].subtract_closed(s.t0, s.t1);
        }
        out.rebuild_edges();
        return out;
    }

    double seg_length(const TimeSeg& s) const {
        double e = s.t1 < s.t0 ? s.t1 + beta_ : s.t1;
        return e - s.t0;
    }

  private:
    double mid_of(const TimeSeg& s) const {
        double e = s.t1 < s.t0 ? s.t1 + beta_ : s.t1;
        double m = 0.5 * (s.t0 + e);
        return m >= beta_ ? m - beta_ : m;
    }

    Lattice lat_;
    double beta_;
    TimeTopology top_;
    std::vector<IntervalSet> K_;
    std::vector<IntervalSet> F_;
};

}  // namespace sti
