#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "sti/core/rng.hpp"
#include "sti/domain/params.hpp"
#include "sti/domain/point.hpp"
#include "sti/domain/region.hpp"

namespace sti {

struct Bridge {
    std::int32_t edge;
    double t;
    friend bool operator==(const Bridge&, const Bridge&) = default;
};

struct VertexEvent {
    std::int32_t vertex;
    double t;
    friend bool operator==(const VertexEvent&, const VertexEvent&) = default;
};

// event sets B (bridges), G (ghost-bonds), D (deaths), each sorted by
// (support index, time); all times across the union are pairwise distinct
struct Configuration {
    std::vector<Bridge> bridges;
    std::vector<VertexEvent> ghosts;
    std::vector<VertexEvent> deaths;
};

// Poisson times on one interval set: each maximal interval receives an
// independent Poisson(intensity * length) number of iid uniform times
inline void sample_poisson_times(const IntervalSet& set, double intensity, Rng& rng,
                                 std::vector<double>& out) {
    if (intensity < 0.0) throw std::invalid_argument("negative intensity");
    if (intensity == 0.0) return;
    double beta = set.beta();
    for (const auto& p : set.pieces()) {
        std::uint64_t n = rng.poisson(intensity * (p.b - p.a));
        for (std::uint64_t k = 0; k < n; ++k) {
            double t = rng.uniform(p.a, p.b);
            if (t >= beta) t -= beta;
            out.push_back(t);
        }
    }
}

enum class EventSupport { edges, vertices };

// spec surface: sample one Poisson event list over the region
inline std::vector<std::pair<std::int32_t, double>> sample_events(const Region& region,
                                                                  double intensity,
                                                                  EventSupport support, Rng& rng) {
    std::vector<std::pair<std::int32_t, double>> out;
    std::vector<double> ts;
    std::int32_t n = support == EventSupport::edges ? region.lattice().edge_count()
                                                    : region.lattice().vertex_count();
    for (std::int32_t i = 0; i < n; ++i) {
        ts.clear();
        const IntervalSet& s =
            support == EventSupport::edges ? region.edge_overlap(i) : region.vertex_line(i);
        sample_poisson_times(s, intensity, rng, ts);
        std::sort(ts.begin(), ts.end());
        for (double t : ts) out.emplace_back(i, t);
    }
    return out;
}

namespace detail {
inline bool times_distinct(const Configuration& c, std::span<const double> forbidden,
                           std::vector<double>& scratch) {
    scratch.clear();
    for (const auto& b : c.bridges) scratch.push_back(b.t);
    for (const auto& g : c.ghosts) scratch.push_back(g.t);
    for (const auto& d : c.deaths) scratch.push_back(d.t);
    for (double t : forbidden) scratch.push_back(t);
    std::sort(scratch.begin(), scratch.end());
    for (std::size_t i = 1; i < scratch.size(); ++i)
        if (scratch[i] == scratch[i - 1]) return false;
    return true;
}
}  // namespace detail

// Draw (B, G) for the random-parity representation: bridges at intensity
// lambda/2 on F, ghost-bonds at intensity gamma on K. `forbidden` lists
// times that must stay event-free (source times); exact collisions are
// events of probability zero and the whole draw is rejected and redrawn.
inline void sample_bridges_ghosts_into(Configuration& c, const Region& region,
                                       const Params& params, Rng& rng,
                                       std::span<const double> forbidden,
                                       std::vector<double>& ts, std::vector<double>& scratch) {
    do {
        c.bridges.clear();
        c.ghosts.clear();
        for (std::int32_t e = 0; e < region.lattice().edge_count(); ++e) {
            ts.clear();
            sample_poisson_times(region.edge_overlap(e), params.bridge_intensity(), rng, ts);
            std::sort(ts.begin(), ts.end());
            for (double t : ts) c.bridges.push_back({e, t});
        }
        for (std::int32_t v = 0; v < region.lattice().vertex_count(); ++v) {
            ts.clear();
            sample_poisson_times(region.vertex_line(v), params.gamma, rng, ts);
            std::sort(ts.begin(), ts.end());
            for (double t : ts) c.ghosts.push_back({v, t});
        }
    } while (!detail::times_distinct(c, forbidden, scratch));
}

inline Configuration sample_bridges_ghosts(const Region& region, const Params& params, Rng& rng,
                                           std::span<const double> forbidden = {}) {
    Configuration c;
    std::vector<double> ts, scratch;
    sample_bridges_ghosts_into(c, region, params, rng, forbidden, ts, scratch);
    return c;
}

// deaths at intensity delta on K (used by oracle cross-checks)
inline std::vector<VertexEvent> sample_deaths(const Region& region, double delta, Rng& rng) {
    std::vector<VertexEvent> out;
    std::vector<double> ts;
    for (std::int32_t v = 0; v < region.lattice().vertex_count(); ++v) {
        ts.clear();
        sample_poisson_times(region.vertex_line(v), delta, rng, ts);
        std::sort(ts.begin(), ts.end());
        for (double t : ts) out.push_back({v, t});
    }
    return out;
}

}  // namespace sti
