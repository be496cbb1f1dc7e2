#include "sti/switching/switching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sti {

namespace {

// station: a hop opportunity on a vertex line
struct Station {
    double t;
    bool is_bridge;
    std::int32_t id;         // index into the union bridge/ghost tables
    std::int32_t other_vertex;  // bridge: the partner vertex
};

struct UnionConfig {
    std::vector<Bridge> bridges;          // B1 u B2
    std::vector<VertexEvent> ghosts;      // G1 u G2
    std::vector<std::vector<Station>> stations;  // per vertex, sorted by time

    UnionConfig(const Colouring& psi1, const Colouring& psi2) {
        const Lattice& lat = psi1.region().lattice();
        for (const auto& b : psi1.events().bridges) bridges.push_back(b);
        for (const auto& b : psi2.events().bridges) bridges.push_back(b);
        for (const auto& g : psi1.events().ghosts) ghosts.push_back(g);
        for (const auto& g : psi2.events().ghosts) ghosts.push_back(g);
        stations.resize(lat.vertex_count());
        for (std::size_t i = 0; i < bridges.size(); ++i) {
            auto [u, v] = lat.edge(bridges[i].edge);
            stations[u].push_back({bridges[i].t, true, static_cast<std::int32_t>(i), v});
            stations[v].push_back({bridges[i].t, true, static_cast<std::int32_t>(i), u});
        }
        for (std::size_t i = 0; i < ghosts.size(); ++i)
            stations[ghosts[i].vertex].push_back(
                {ghosts[i].t, false, static_cast<std::int32_t>(i), -1});
        for (auto& s : stations)
            std::sort(s.begin(), s.end(),
                      [](const Station& a, const Station& b) { return a.t < b.t; });
    }
};

// closed circle span with possible wrap, for self-avoidance tests
struct Span {
    std::int32_t vertex;
    double lo, hi;  // hi < lo encodes wrap through 0
};

bool spans_intersect(const Span& a, const Span& b, double beta) {
    if (a.vertex != b.vertex) return false;
    auto pieces = [&](const Span& s, double out[2][2]) {
        if (s.hi >= s.lo) {
            out[0][0] = s.lo;
            out[0][1] = s.hi;
            return 1;
        }
        out[0][0] = s.lo;
        out[0][1] = beta;
        out[1][0] = 0.0;
        out[1][1] = s.hi;
        return 2;
    };
    double pa[2][2], pb[2][2];
    int na = pieces(a, pa), nb = pieces(b, pb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            if (std::max(pa[i][0], pb[j][0]) <= std::min(pa[i][1], pb[j][1])) return true;
    return false;
}

struct RouteSearch {
    const Colouring& psi1;
    const UnionConfig& uc;
    const Region& region;
    SitePoint target;
    std::size_t cap;
    std::vector<Route> out;

    Route current;
    std::vector<Span> used_spans;
    std::vector<bool> bridge_used, ghost_used;
    bool ghost_site_used = false;

    RouteSearch(const Colouring& p1, const UnionConfig& u, SitePoint y, std::size_t cap_)
        : psi1(p1), uc(u), region(p1.region()), target(y), cap(cap_),
          bridge_used(u.bridges.size(), false), ghost_used(u.ghosts.size(), false) {}

    void emit() {
        if (out.size() >= cap) throw std::runtime_error("route enumeration cap exceeded");
        out.push_back(current);
    }

    // stations reachable from (v,t) walking dir within the arc, nearest first
    void from_point(std::int32_t v, double t) {
        const IntervalSet& kv = region.vertex_line(v);
        auto arcs = kv.arcs();
        int ai = kv.arc_containing(t, arcs);
        if (ai < 0) throw std::invalid_argument("route point outside region");
        const auto& arc = arcs[ai];
        double beta = region.beta();

        // a station exactly at t allows an immediate hop (zero-length sweep)
        for (const auto& st : uc.stations[v])
            if (st.t == t) hop(v, t, t, true, st);

        for (int dir : {+1, -1}) {
            double pos = arc.full ? (t == 0.0 ? beta : t) : kv.unwrap(t, arc);
            // candidate stops ahead of pos, keyed by distance but carrying
            // the exact circle time (never recomputed, so sweep endpoints
            // coincide bit-exactly with station times)
            struct Stop {
                double dist;
                double t_exact;
                const Station* st;  // null: the target point y
            };
            std::vector<Stop> stops;
            auto push_stop = [&](double st_time, const Station* st) {
                double sp = arc.full ? (st_time == 0.0 ? beta : st_time) : kv.unwrap(st_time, arc);
                double d = dir > 0 ? sp - pos : pos - sp;
                if (arc.full && d <= 0) d += beta;  // cyclic distance, exclude 0
                if (d <= 0 || (arc.full && d >= beta)) return;
                stops.push_back({d, st_time, st});
            };
            for (const auto& st : uc.stations[v]) {
                if (!kv.closure_contains(st.t, arc)) continue;
                push_stop(st.t, &st);
            }
            if (!target.is_ghost && target.p.vertex == v &&
                kv.closure_contains(target.p.time, arc) && !(target.p == Point{v, t}))
                push_stop(target.p.time, nullptr);
            std::sort(stops.begin(), stops.end(),
                      [](const Stop& a, const Stop& b) { return a.dist < b.dist; });
            for (const auto& stop : stops) {
                double t_to = stop.t_exact;
                Span span{v, dir > 0 ? t : t_to, dir > 0 ? t_to : t};
                bool clash = false;
                for (const auto& s : used_spans)
                    if (spans_intersect(span, s, beta)) clash = true;
                if (clash) break;  // stations beyond a used span are unreachable too
                current.sweeps.push_back({v, t, t_to, dir > 0});
                used_spans.push_back(span);
                if (stop.st == nullptr) {
                    emit();
                } else {
                    hop(v, t, t_to, false, *stop.st);
                }
                used_spans.pop_back();
                current.sweeps.pop_back();
                if (stop.st == nullptr) break;  // cannot pass through y
            }
        }
    }

    void hop(std::int32_t v, double t_from, double t_at, bool zero_length, const Station& st) {
        if (zero_length) {
            current.sweeps.push_back({v, t_from, t_at, true});
            used_spans.push_back({v, t_at, t_at});
        }
        if (st.is_bridge) {
            if (!bridge_used[st.id]) {
                bridge_used[st.id] = true;
                current.hops.push_back(
                    {Route::HopKind::bridge, uc.bridges[st.id].edge, uc.bridges[st.id].t});
                Point land{st.other_vertex, st.t};
                if (!target.is_ghost && target.p == land) {
                    emit();
                } else {
                    from_point(land.vertex, land.time);
                }
                current.hops.pop_back();
                bridge_used[st.id] = false;
            }
        } else {
            if (!ghost_used[st.id] && !ghost_site_used) {
                ghost_used[st.id] = true;
                Point g1{uc.ghosts[st.id].vertex, uc.ghosts[st.id].t};
                if (target.is_ghost) {
                    current.hops.push_back({Route::HopKind::ghost_end, -1, 0, g1, {}});
                    current.to_ghost_site = true;
                    emit();
                    current.to_ghost_site = false;
                    current.hops.pop_back();
                } else {
                    ghost_site_used = true;
                    for (std::size_t j = 0; j < uc.ghosts.size(); ++j) {
                        if (ghost_used[j]) continue;
                        ghost_used[j] = true;
                        Point g2{uc.ghosts[j].vertex, uc.ghosts[j].t};
                        current.hops.push_back({Route::HopKind::ghost_pair, -1, 0, g1, g2});
                        if (target.p == g2) {
                            emit();
                        } else {
                            from_point(g2.vertex, g2.time);
                        }
                        current.hops.pop_back();
                        ghost_used[j] = false;
                    }
                    ghost_site_used = false;
                }
                ghost_used[st.id] = false;
            }
        }
        if (zero_length) {
            used_spans.pop_back();
            current.sweeps.pop_back();
        }
    }
};

}  // namespace

std::vector<Point> Route::ghost_points() const {
    std::vector<Point> out;
    for (const auto& h : hops) {
        if (h.kind == HopKind::ghost_end) out.push_back(h.g1);
        if (h.kind == HopKind::ghost_pair) {
            out.push_back(h.g1);
            out.push_back(h.g2);
        }
    }
    return out;
}

std::vector<std::pair<std::int32_t, double>> Route::bridge_events() const {
    std::vector<std::pair<std::int32_t, double>> out;
    for (const auto& h : hops)
        if (h.kind == HopKind::bridge) out.emplace_back(h.edge, h.t);
    return out;
}

std::vector<Route> enumerate_routes(const Colouring& psi1, const Colouring& psi2,
                                    const SitePoint& x, const SitePoint& y, std::size_t cap) {
    UnionConfig uc(psi1, psi2);
    RouteSearch rs(psi1, uc, y, cap);
    if (!x.is_ghost && !y.is_ghost && x.p == y.p) {
        rs.out.push_back({});  // trivial route
        return rs.out;
    }
    if (x.is_ghost && y.is_ghost) {
        rs.out.push_back({});
        return rs.out;
    }
    if (x.is_ghost) {
        // leave the ghost site through each ghost-bond
        rs.ghost_site_used = true;
        for (std::size_t j = 0; j < uc.ghosts.size(); ++j) {
            rs.ghost_used[j] = true;
            Point g{uc.ghosts[j].vertex, uc.ghosts[j].t};
            rs.current.from_ghost_site = true;
            rs.current.hops.push_back({Route::HopKind::ghost_end, -1, 0, g, {}});
            if (!y.is_ghost && y.p == g)
                rs.emit();
            else
                rs.from_point(g.vertex, g.time);
            rs.current.hops.pop_back();
            rs.ghost_used[j] = false;
        }
        return rs.out;
    }
    rs.from_point(x.p.vertex, x.p.time);
    return rs.out;
}

bool route_open(const Route& r, const Colouring& psi1, const Colouring& psi2,
                std::span<const VertexEvent> cuts) {
    const double beta = psi1.region().beta();
    for (const auto& sw : r.sweeps) {
        double lo = sw.increasing ? sw.t_from : sw.t_to;
        double hi = sw.increasing ? sw.t_to : sw.t_from;
        for (const auto& c : cuts) {
            if (c.vertex != sw.vertex) continue;
            double u = c.t, h = hi;
            if (h < lo) h += beta;                      // wrapped span
            if (u < lo) u += beta;
            if (!(u > lo && u < h)) continue;           // strictly inside
            if (!psi1.odd_after(c.vertex, c.t) && !psi2.odd_after(c.vertex, c.t)) return false;
        }
    }
    return true;
}

std::optional<Route> earliest_open_route(const Colouring& psi1, const Colouring& psi2,
                                         std::span<const VertexEvent> cuts, const SitePoint& x,
                                         const SitePoint& y,
                                         const std::function<bool(const Route&)>& precedence) {
    auto routes = enumerate_routes(psi1, psi2, x, y);
    if (precedence)
        std::stable_partition(routes.begin(), routes.end(), precedence);
    for (const auto& r : routes)
        if (route_open(r, psi1, psi2, cuts)) return r;
    return std::nullopt;
}

double doubly_even_measure_on(const Route& r, const Colouring& a, const Colouring& b) {
    const Region& region = a.region();
    const double beta = region.beta();
    double total = 0.0;
    for (const auto& sw : r.sweeps) {
        double lo = sw.increasing ? sw.t_from : sw.t_to;
        double hi = sw.increasing ? sw.t_to : sw.t_from;
        if (hi < lo) hi += beta;
        if (hi == lo) continue;
        // breakpoints: label switches of either colouring inside the span
        std::vector<double> cutpts{lo};
        auto add_switches = [&](const Colouring& c) {
            for (const auto& ln : c.lines()) {
                if (ln.vertex != sw.vertex) continue;
                for (const auto& s : c.line_switches(ln)) {
                    double u = s.t < lo ? s.t + beta : s.t;
                    if (u > lo && u < hi) cutpts.push_back(u);
                }
            }
        };
        add_switches(a);
        add_switches(b);
        cutpts.push_back(hi);
        std::sort(cutpts.begin(), cutpts.end());
        for (std::size_t i = 0; i + 1 < cutpts.size(); ++i) {
            double mid = 0.5 * (cutpts[i] + cutpts[i + 1]);
            double m = mid >= beta ? mid - beta : mid;
            if (!a.odd_after(sw.vertex, m) && !b.odd_after(sw.vertex, m))
                total += cutpts[i + 1] - cutpts[i];
        }
    }
    return total;
}

namespace {

std::vector<Bridge> toggle_bridges(const std::vector<Bridge>& own,
                                   const std::vector<std::pair<std::int32_t, double>>& on_route) {
    std::vector<Bridge> out;
    std::vector<bool> consumed(on_route.size(), false);
    for (const auto& b : own) {
        bool drop = false;
        for (std::size_t i = 0; i < on_route.size(); ++i)
            if (!consumed[i] && on_route[i].first == b.edge && on_route[i].second == b.t) {
                consumed[i] = true;
                drop = true;
                break;
            }
        if (!drop) out.push_back(b);
    }
    for (std::size_t i = 0; i < on_route.size(); ++i)
        if (!consumed[i]) out.push_back({on_route[i].first, on_route[i].second});
    std::sort(out.begin(), out.end(), [](const Bridge& a, const Bridge& b) {
        return a.edge != b.edge ? a.edge < b.edge : a.t < b.t;
    });
    return out;
}

std::vector<VertexEvent> toggle_ghosts(const std::vector<VertexEvent>& own,
                                       const std::vector<Point>& on_route) {
    std::vector<VertexEvent> out;
    std::vector<bool> consumed(on_route.size(), false);
    for (const auto& g : own) {
        bool drop = false;
        for (std::size_t i = 0; i < on_route.size(); ++i)
            if (!consumed[i] && on_route[i].vertex == g.vertex && on_route[i].time == g.t) {
                consumed[i] = true;
                drop = true;
                break;
            }
        if (!drop) out.push_back(g);
    }
    for (std::size_t i = 0; i < on_route.size(); ++i)
        if (!consumed[i]) out.push_back({on_route[i].vertex, on_route[i].time});
    std::sort(out.begin(), out.end(), [](const VertexEvent& a, const VertexEvent& b) {
        return a.vertex != b.vertex ? a.vertex < b.vertex : a.t < b.t;
    });
    return out;
}

// a time on vertex v not covered by the route and clear of events
std::optional<double> reference_off_route(const Region& region, const Route& pi,
                                          std::int32_t v, const Configuration& ev) {
    const double beta = region.beta();
    std::vector<std::pair<double, double>> covered;
    for (const auto& sw : pi.sweeps) {
        if (sw.vertex != v) continue;
        double lo = sw.increasing ? sw.t_from : sw.t_to;
        double hi = sw.increasing ? sw.t_to : sw.t_from;
        if (hi < lo) {
            covered.emplace_back(lo, beta);
            covered.emplace_back(0.0, hi);
        } else {
            covered.emplace_back(lo, hi);
        }
    }
    // candidate reference points: midpoints between consecutive breakpoints
    std::vector<double> marks{0.0};
    for (auto& [a, b] : covered) {
        marks.push_back(a);
        marks.push_back(b);
    }
    for (const auto& b : ev.bridges) marks.push_back(b.t);
    for (const auto& g : ev.ghosts) marks.push_back(g.t);
    marks.push_back(beta);
    std::sort(marks.begin(), marks.end());
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
        double mid = 0.5 * (marks[i] + marks[i + 1]);
        if (mid <= 0.0 || mid >= beta) continue;
        bool inside = false;
        for (auto& [a, b] : covered)
            if (mid >= a && mid <= b) inside = true;
        if (!inside) return mid;
    }
    return std::nullopt;
}

}  // namespace

std::pair<Colouring, Colouring> switch_along(const Colouring& q1, const Colouring& q2,
                                             const Route& pi, const SitePoint& x,
                                             const SitePoint& y) {
    const Region& region = q1.region();
    auto bridge_ev = pi.bridge_events();
    auto ghost_ev = pi.ghost_points();

    auto make_side = [&](const Colouring& q) {
        Configuration c;
        c.bridges = toggle_bridges(q.events().bridges, bridge_ev);
        c.ghosts = toggle_ghosts(q.events().ghosts, ghost_ev);
        SourceSet A = q.sources();
        if (!x.is_ghost) A = A.sym_diff(x.p);
        if (!y.is_ghost) A = A.sym_diff(y.p);

        // probe with all-zero bits, then set each full-circle bit so the
        // output matches the input off the route
        std::vector<std::uint8_t> bits(q.wbits().size(), 0);
        Colouring probe = build_colouring(region, A, c, bits);
        std::size_t wi = 0;
        for (std::int32_t v = 0; v < region.lattice().vertex_count(); ++v) {
            if (!region.vertex_line(v).is_full_circle()) continue;
            Configuration both;
            both.bridges = c.bridges;
            for (const auto& b : q.events().bridges) both.bridges.push_back(b);
            both.ghosts = c.ghosts;
            for (const auto& g : q.events().ghosts) both.ghosts.push_back(g);
            auto ref = reference_off_route(region, pi, v, both);
            if (ref) {
                bool want = q.odd_after(v, *ref);
                bool got = probe.valid() ? probe.odd_after(v, *ref) : false;
                bits[wi] = (want != got) ? 1 : 0;
            } else {
                bits[wi] = q.wbits()[wi];
            }
            ++wi;
        }
        return build_colouring(region, A, c, bits);
    };
    return {make_side(q1), make_side(q2)};
}

SwitchingReport verify_switching(const Region& region, const SourceSet& A, const SourceSet& B,
                                 const SitePoint& x, const SitePoint& y, const Params& params,
                                 const McOptions& opt, const ConnectivityFn& F) {
    params.validate();
    auto run_side = [&](const SourceSet& sa, const SourceSet& sb, std::uint64_t salt) {
        std::vector<double> forbidden;
        for (double t : sa.times()) forbidden.push_back(t);
        for (double t : sb.times()) forbidden.push_back(t);
        if (!x.is_ghost) forbidden.push_back(x.p.time);
        if (!y.is_ghost) forbidden.push_back(y.p.time);
        std::sort(forbidden.begin(), forbidden.end());
        forbidden.erase(std::unique(forbidden.begin(), forbidden.end()), forbidden.end());

        McOptions o = opt;
        o.op_id = Rng::mix(opt.op_id, salt);
        SamplePlan plan = o.plan();
        BatchTable tab = run_batched(plan, 1, [&](Rng& rng, double* row) {
            Configuration c1 = sample_bridges_ghosts(region, params, rng, forbidden);
            auto bits1 = draw_wbits(region, rng);
            Configuration c2 = sample_bridges_ghosts(region, params, rng, forbidden);
            auto bits2 = draw_wbits(region, rng);
            auto cuts = sample_cuts(region, params.delta, rng, forbidden);
            Colouring p1 = build_colouring(region, sa, c1, bits1);
            Colouring p2 = build_colouring(region, sb, c2, bits2);
            double w = p1.reduced_weight(params.delta) * p2.reduced_weight(params.delta);
            if (w == 0.0) {
                row[0] = 0.0;
                return;
            }
            ConnectivityIndex idx(p1, p2, cuts);
            double ind = idx.connected(x, y) ? 1.0 : 0.0;
            double f = F ? F(idx) : 1.0;
            row[0] = w * ind * f;
        });
        return jackknife(tab, [](std::span<const double> m) { return m[0]; });
    };

    SwitchingReport rep;
    Estimate lhs = run_side(A, B, 0x11);
    SourceSet A2 = A, B2 = B;
    if (!x.is_ghost) {
        A2 = A2.sym_diff(x.p);
        B2 = B2.sym_diff(x.p);
    }
    if (!y.is_ghost) {
        A2 = A2.sym_diff(y.p);
        B2 = B2.sym_diff(y.p);
    }
    Estimate rhs = run_side(A2, B2, 0x22);
    rep.lhs = lhs.value;
    rep.lhs_se = lhs.std_error;
    rep.rhs = rhs.value;
    rep.rhs_se = rhs.std_error;
    rep.z = z_difference(lhs, rhs);
    rep.n_samples = lhs.n_samples + rhs.n_samples;
    return rep;
}

}  // namespace sti
