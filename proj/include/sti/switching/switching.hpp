#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sti/core/estimate.hpp"
#include "sti/parity/correlation.hpp"
#include "sti/switching/connectivity.hpp"

namespace sti {

// A route from x to y in the union configuration (B1 u B2, G1 u G2):
// alternating vertical sweeps and hops (bridges, or ghost-bonds through
// the ghost site). Endpoints may be the ghost site itself.
struct Route {
    struct Sweep {
        std::int32_t vertex;
        double t_from, t_to;  // circle times; walk direction from -> to
        bool increasing;
    };
    enum class HopKind : std::uint8_t { bridge, ghost_pair, ghost_end };
    struct Hop {
        HopKind kind;
        // bridge: edge and time; ghost_pair: the two ghost locations;
        // ghost_end: the single ghost-bond at a route end
        std::int32_t edge = -1;
        double t = 0;
        Point g1{}, g2{};
    };
    std::vector<Sweep> sweeps;
    std::vector<Hop> hops;
    bool from_ghost_site = false, to_ghost_site = false;

    std::vector<Point> ghost_points() const;          // ghost-bonds used
    std::vector<std::pair<std::int32_t, double>> bridge_events() const;
};

// all simple routes x -> y in the union of the two colourings' events,
// in deterministic DFS order (sweep targets ordered along each line)
std::vector<Route> enumerate_routes(const Colouring& psi1, const Colouring& psi2,
                                    const SitePoint& x, const SitePoint& y,
                                    std::size_t cap = 200000);

// is the route open in (psi1, psi2, Delta)? (no cut inside a sweep where
// both colourings are even)
bool route_open(const Route& r, const Colouring& psi1, const Colouring& psi2,
                std::span<const VertexEvent> cuts);

// earliest open route under an optional precedence predicate (routes with
// pred == true come first, preserving DFS order within each class)
std::optional<Route> earliest_open_route(const Colouring& psi1, const Colouring& psi2,
                                         std::span<const VertexEvent> cuts, const SitePoint& x,
                                         const SitePoint& y,
                                         const std::function<bool(const Route&)>& precedence = {});

// measure of ev(psi_a) n ev(psi_b) n route
double doubly_even_measure_on(const Route& r, const Colouring& a, const Colouring& b);

// The switch map f_pi: toggles the bridges/ghost-bonds of pi between the
// two configurations, updates sources A -> A sym-diff {x,y} (ghost-site
// endpoints toggle nothing), and picks full-circle colours so each output
// agrees with its input off pi. An involution.
std::pair<Colouring, Colouring> switch_along(const Colouring& q1, const Colouring& q2,
                                             const Route& pi, const SitePoint& x,
                                             const SitePoint& y);

struct SwitchingReport {
    double lhs = 0, lhs_se = 0;
    double rhs = 0, rhs_se = 0;
    double z = 0;
    std::int64_t n_samples = 0;
};

// connectivity functions F evaluated on the open-path relation
using ConnectivityFn = std::function<double(const ConnectivityIndex&)>;

// verifies E(dpsi1^A dpsi2^B F 1{x<->y}) = E(dpsi1^{A^xy} dpsi2^{B^xy} F 1{x<->y})
// by two independent Monte Carlo runs (weights in reduced units; the common
// factor e^{4 delta |K|} cancels in the comparison)
SwitchingReport verify_switching(const Region& region, const SourceSet& A, const SourceSet& B,
                                 const SitePoint& x, const SitePoint& y, const Params& params,
                                 const McOptions& opt, const ConnectivityFn& F = {});

}  // namespace sti
