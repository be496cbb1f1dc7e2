#include "sti/observables/inequalities.hpp"

#include <array>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sti/backbone/backbone.hpp"
#include "sti/switching/connectivity.hpp"

namespace sti {

GhsReport check_ghs(const Region& region, const Point& x, const Point& y, const Point& z,
                    const Params& params, const McOptions& opt,
                    std::optional<std::array<double, 3>> gamma_grid) {
    GhsReport rep;
    if (params.gamma == 0.0) {
        // all odd correlations vanish identically
        rep.triple = Estimate::exactly(0.0);
        rep.triple_nonpositive_3se = true;
    } else {
        std::vector<SourceSet> sets{
            SourceSet::of({x, y, z}), SourceSet::pair(x, y), SourceSet::pair(x, z),
            SourceSet::pair(y, z),    SourceSet::single(x),  SourceSet::single(y),
            SourceSet::single(z)};
        BatchTable tab = parity_weight_table(region, sets, params, opt);
        rep.triple = jackknife(tab, [](std::span<const double> m) {
            double n = m[7];
            double xyz = m[0] / n, xy = m[1] / n, xz = m[2] / n, yz = m[3] / n;
            double mx = m[4] / n, my = m[5] / n, mz = m[6] / n;
            return xyz - mx * yz - my * xz - mz * xy + 2.0 * mx * my * mz;
        });
        rep.triple_nonpositive_3se = rep.triple.value <= 3.0 * rep.triple.std_error;
    }

    std::array<double, 3> gs = gamma_grid.value_or(
        std::array<double, 3>{0.5 * params.gamma, params.gamma, 1.5 * params.gamma});
    Estimate m[3];
    for (int i = 0; i < 3; ++i) {
        Params p = params;
        p.gamma = gs[i];
        McOptions o = opt;
        o.op_id = Rng::mix(opt.op_id, 0x6150 + i);
        m[i] = magnetization(region, p, o);
    }
    double second = m[0].value - 2.0 * m[1].value + m[2].value;
    double se = std::sqrt(m[0].std_error * m[0].std_error +
                          4.0 * m[1].std_error * m[1].std_error +
                          m[2].std_error * m[2].std_error);
    rep.concavity_second_difference = {second, se, m[0].n_samples + m[1].n_samples + m[2].n_samples,
                                       false};
    rep.concave_3se = second <= 3.0 * se;
    return rep;
}

namespace {

// components of K \ T under "potential" adjacency: vertical within the
// remaining intervals, horizontal wherever neighboring lines overlap in time
struct PotentialConnectivity {
    Region cut;
    std::vector<int> seg_vertex;
    std::vector<IntervalSet::Arc> seg_arc;
    std::vector<int> parent;
    std::vector<int> arc_base;

    explicit PotentialConnectivity(const Region& region, const SeparatingSet& T)
        : cut(region.subtract(T.segments)) {
        const Lattice& lat = cut.lattice();
        arc_base.assign(lat.vertex_count() + 1, 0);
        for (std::int32_t v = 0; v < lat.vertex_count(); ++v) {
            arc_base[v] = static_cast<int>(seg_arc.size());
            for (const auto& arc : cut.vertex_line(v).arcs()) {
                seg_vertex.push_back(v);
                seg_arc.push_back(arc);
            }
        }
        arc_base[lat.vertex_count()] = static_cast<int>(seg_arc.size());
        parent.resize(seg_arc.size());
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
        // horizontal adjacency: any time overlap across an edge
        const double beta = cut.beta();
        auto pieces = [&](const IntervalSet::Arc& a, double out[2][2]) {
            if (a.end <= beta) {
                out[0][0] = a.start;
                out[0][1] = a.end;
                return 1;
            }
            out[0][0] = a.start;
            out[0][1] = beta;
            out[1][0] = 0;
            out[1][1] = a.end - beta;
            return 2;
        };
        for (auto [u, v] : lat.edges()) {
            for (int i = arc_base[u]; i < arc_base[u + 1]; ++i)
                for (int j = arc_base[v]; j < arc_base[v + 1]; ++j) {
                    double pu[2][2], pv[2][2];
                    int nu = pieces(seg_arc[i], pu), nv = pieces(seg_arc[j], pv);
                    bool ov = false;
                    for (int a = 0; a < nu; ++a)
                        for (int b = 0; b < nv; ++b)
                            if (std::max(pu[a][0], pv[b][0]) < std::min(pu[a][1], pv[b][1]))
                                ov = true;
                    if (ov) unite(i, j);
                }
        }
    }

    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }

    int component_of(const Point& p) {
        const IntervalSet& kv = cut.vertex_line(p.vertex);
        for (int i = arc_base[p.vertex]; i < arc_base[p.vertex + 1]; ++i)
            if (kv.closure_contains(p.time, seg_arc[i])) return find(i);
        return -1;
    }
};

}  // namespace

bool separates(const Region& region, const Point& a, const Point& b, const SeparatingSet& T) {
    PotentialConnectivity pc(region, T);
    int ca = pc.component_of(a), cb = pc.component_of(b);
    if (ca < 0 || cb < 0) return true;  // an endpoint swallowed by T counts as separated
    return ca != cb;
}

SimonLiebReport check_simon_lieb(const Region& region, const Point& a, const Point& b,
                                 const SeparatingSet& T, double epsilon, const Params& params,
                                 int time_points, const McOptions& opt) {
    if (params.gamma != 0.0) throw std::invalid_argument("Simon/Lieb need gamma = 0");
    for (const auto& s : T.segments)
        if (region.seg_length(s) < epsilon)
            throw std::invalid_argument("separating set is not epsilon-fat");
    if (!separates(region, a, b, T)) throw std::invalid_argument("set fails to separate a from b");

    SimonLiebReport rep;
    rep.epsilon = epsilon;

    // U: everything separated from b by T, i.e. K minus b's free component
    PotentialConnectivity pc(region, T);
    int cb = pc.component_of(b);
    std::vector<TimeSeg> b_side;
    for (std::size_t i = 0; i < pc.seg_arc.size(); ++i) {
        if (pc.find(static_cast<int>(i)) != cb) continue;
        const auto& arc = pc.seg_arc[i];
        b_side.push_back({static_cast<std::int32_t>(pc.seg_vertex[i]), arc.start, arc.end});
    }
    Region regU = region.subtract(b_side);

    // grid over T
    std::vector<Point> grid;
    std::vector<double> weight;
    for (const auto& s : T.segments) {
        double len = region.seg_length(s);
        int n = std::max(1, static_cast<int>(std::lround(time_points * len / region.beta())));
        double h = len / n;
        for (int j = 0; j < n; ++j) {
            double t = s.t0 + (j + 0.5) * h;
            if (t >= region.beta()) t -= region.beta();
            grid.push_back({s.vertex, t});
            weight.push_back(h);
        }
    }
    rep.grid_points = static_cast<int>(grid.size());

    McOptions o1 = opt;
    o1.op_id = Rng::mix(opt.op_id, 0x51);
    std::vector<SourceSet> pair_ab{SourceSet::pair(a, b)};
    BatchTable tab_ab = parity_weight_table(region, pair_ab, params, o1);
    rep.lhs = jackknife(tab_ab, [](std::span<const double> m) { return m[0] / m[1]; });

    // Simon: both factors on the full region, common samples
    std::vector<SourceSet> sets;
    for (const auto& x : grid) {
        sets.push_back(SourceSet::pair(a, x));
        sets.push_back(SourceSet::pair(x, b));
    }
    McOptions o2 = opt;
    o2.op_id = Rng::mix(opt.op_id, 0x52);
    BatchTable tab = parity_weight_table(region, sets, params, o2);
    const double pref = std::exp(8.0 * epsilon * params.delta) / epsilon;
    const std::size_t g = grid.size();
    rep.rhs_simon = jackknife(tab, [&, g](std::span<const double> m) {
        double z = m[2 * g];
        double acc = 0;
        for (std::size_t k = 0; k < g; ++k)
            acc += weight[k] * (m[2 * k] / z) * (m[2 * k + 1] / z);
        return pref * acc;
    });

    // Lieb: first factor restricted to U (separate sample stream), second on K
    std::vector<SourceSet> setsU;
    for (const auto& x : grid) setsU.push_back(SourceSet::pair(a, x));
    McOptions o3 = opt;
    o3.op_id = Rng::mix(opt.op_id, 0x53);
    BatchTable tabU = parity_weight_table(regU, setsU, params, o3);
    McOptions o4 = opt;
    o4.op_id = Rng::mix(opt.op_id, 0x54);
    std::vector<SourceSet> setsK;
    for (const auto& x : grid) setsK.push_back(SourceSet::pair(x, b));
    BatchTable tabK = parity_weight_table(region, setsK, params, o4);
    auto mU = tabU.means();
    auto mK = tabK.means();
    Estimate restricted_sum = jackknife(tabU, [&, g](std::span<const double> m) {
        double z = m[g];
        double acc = 0;
        for (std::size_t k = 0; k < g; ++k) acc += weight[k] * (m[k] / z) * (mK[k] / mK[g]);
        return pref * acc;
    });
    Estimate second_sum = jackknife(tabK, [&, g](std::span<const double> m) {
        double z = m[g];
        double acc = 0;
        for (std::size_t k = 0; k < g; ++k) acc += weight[k] * (mU[k] / mU[g]) * (m[k] / z);
        return pref * acc;
    });
    rep.rhs_lieb = {restricted_sum.value,
                    combine_se(restricted_sum.std_error, second_sum.std_error),
                    restricted_sum.n_samples + second_sum.n_samples, false};

    rep.simon_holds_3se =
        rep.lhs.value <= rep.rhs_simon.value + 3.0 * combine_se(rep.lhs.std_error,
                                                                rep.rhs_simon.std_error);
    rep.lieb_holds_3se = rep.lhs.value <= rep.rhs_lieb.value +
                                              3.0 * combine_se(rep.lhs.std_error,
                                                               rep.rhs_lieb.std_error);
    rep.lieb_below_simon_3se =
        rep.rhs_lieb.value <= rep.rhs_simon.value +
                                  3.0 * combine_se(rep.rhs_lieb.std_error,
                                                   rep.rhs_simon.std_error);
    return rep;
}

namespace {

// the four-way decomposition M = T + R0 + Rh + Rv of the PDI proof:
// classify how the backbone of psi1^{0G} first meets the ghost cluster
// of (psi2^0, psi3^0, Delta)
struct Decomposition {
    Estimate t, r0, rh, rv;
};

Decomposition decompose_terms(const Region& region, const Params& params, const McOptions& opt) {
    const Point origin{region.lattice().origin(), 0.0};
    const double delta = params.delta;
    const double beta = region.beta();
    std::vector<double> forbidden{0.0};

    BatchTable tab = run_batched(opt.plan(), 5, [&](Rng& rng, double* row) {
        Configuration c1 = sample_bridges_ghosts(region, params, rng, forbidden);
        auto b1 = draw_wbits(region, rng);
        Configuration c2 = sample_bridges_ghosts(region, params, rng, forbidden);
        auto b2 = draw_wbits(region, rng);
        Configuration c3 = sample_bridges_ghosts(region, params, rng, forbidden);
        auto b3 = draw_wbits(region, rng);
        auto cuts = sample_cuts(region, delta, rng, forbidden);
        Colouring p2 = build_colouring(region, SourceSet::empty(), c2, b2);
        Colouring p3 = build_colouring(region, SourceSet::empty(), c3, b3);
        row[4] = p2.reduced_weight(delta);
        Colouring p1 = build_colouring(region, SourceSet::single(origin), c1, b1);
        double w = p1.reduced_weight(delta) * p2.reduced_weight(delta) *
                   p3.reduced_weight(delta);
        if (w == 0.0) return;
        ConnectivityIndex idx(p2, p3, cuts);
        int gc = idx.ghost_cluster();
        Backbone xi = extract_backbone(p1);
        if (xi.paths.empty()) return;  // cannot happen for a valid psi1^{0G}
        // single path 0 -> Gamma
        int bucket = 0;  // 0: T, 1: R0, 2: Rh, 3: Rv
        if (idx.cluster_of(origin) == gc) {
            bucket = 1;
        } else {
            bool found = false;
            for (std::size_t si = 0; si < xi.paths[0].steps.size() && !found; ++si) {
                const auto& s = xi.paths[0].steps[si];
                // landing point of a bridge hop: meeting here is a bridge entry
                if (si > 0 && idx.cluster_of({s.vertex, s.from}) == gc) {
                    bucket = 2;
                    found = true;
                    break;
                }
                // scan the step for a first entry across a blocking cut
                double lo = s.increasing ? s.from : s.to;
                double hi = s.increasing ? s.to : s.from;
                double span = hi < lo ? hi + beta - lo : hi - lo;
                // sample boundary crossings: walk cuts on this vertex in order
                std::vector<double> inside;
                for (const auto& c : cuts) {
                    if (c.vertex != s.vertex) continue;
                    double u = c.t < lo ? c.t + beta : c.t;
                    if (u > lo && u < lo + span) inside.push_back(u);
                }
                std::sort(inside.begin(), inside.end());
                if (!s.increasing) std::reverse(inside.begin(), inside.end());
                for (double u : inside) {
                    double tc = u >= beta ? u - beta : u;
                    // the segment just past the cut in walk direction
                    int past = s.increasing ? idx.cluster_of({s.vertex, tc})
                                            : idx.cluster_before({s.vertex, tc});
                    if (past == gc) {
                        bucket = 3;
                        found = true;
                        break;
                    }
                }
            }
            if (!found) bucket = 0;
        }
        row[bucket] += w;
    });

    auto term = [&](int k) {
        return jackknife(tab, [k](std::span<const double> m) {
            return m[k] / (m[4] * m[4] * m[4]);
        });
    };
    return {term(0), term(1), term(2), term(3)};
}

}  // namespace

PdiReport check_main_pdi(const Region& region, const Params& params, const PdiOptions& opt) {
    if (!(params.gamma > 0.0)) throw std::invalid_argument("the PDI check needs gamma > 0");
    PdiReport rep;
    McOptions o = opt.mc;
    o.op_id = Rng::mix(opt.mc.op_id, 0x9d1);
    rep.M = magnetization(region, params, o);
    o.op_id = Rng::mix(opt.mc.op_id, 0x9d2);
    SusceptibilityResult chi = susceptibility(region, params, opt.time_points, o);
    rep.chi = chi.chi;
    DerivativeOptions dopt;
    dopt.mc = opt.mc;
    dopt.mc.op_id = Rng::mix(opt.mc.op_id, 0x9d3);
    dopt.time_points = opt.time_points;
    rep.dM_dlambda = estimate_dM_dlambda(region, params, dopt);
    dopt.mc.op_id = Rng::mix(opt.mc.op_id, 0x9d4);
    rep.dM_ddelta = estimate_dM_ddelta(region, params, dopt);

    const double M = rep.M.value;
    rep.lhs = M;
    rep.rhs = params.gamma * rep.chi.value + M * M * M +
              2.0 * params.lambda * M * M * rep.dM_dlambda.value -
              2.0 * params.delta * M * M * rep.dM_ddelta.value;
    rep.slack = rep.rhs - rep.lhs;
    double dM = 3.0 * M * M + 4.0 * params.lambda * M * rep.dM_dlambda.value -
                4.0 * params.delta * M * rep.dM_ddelta.value - 1.0;
    rep.slack_se = std::sqrt(std::pow(dM * rep.M.std_error, 2) +
                             std::pow(params.gamma * rep.chi.std_error, 2) +
                             std::pow(2.0 * params.lambda * M * M * rep.dM_dlambda.std_error, 2) +
                             std::pow(2.0 * params.delta * M * M * rep.dM_ddelta.std_error, 2));
    rep.holds_3se = rep.slack >= -3.0 * rep.slack_se;

    if (opt.with_decomposition) {
        McOptions dmc = opt.mc;
        if (opt.decomposition_samples > 0) dmc.n_samples = opt.decomposition_samples;
        dmc.op_id = Rng::mix(opt.mc.op_id, 0x9d5);
        auto dec = decompose_terms(region, params, dmc);
        rep.term_T = dec.t;
        rep.term_R0 = dec.r0;
        rep.term_Rh = dec.rh;
        rep.term_Rv = dec.rv;
        rep.decomposition_total =
            dec.t.value + dec.r0.value + dec.rh.value + dec.rv.value;
        double se = std::sqrt(std::pow(dec.t.std_error, 2) + std::pow(dec.r0.std_error, 2) +
                              std::pow(dec.rh.std_error, 2) + std::pow(dec.rv.std_error, 2) +
                              std::pow(rep.M.std_error, 2));
        rep.decomposition_z = (rep.decomposition_total - rep.M.value) / se;
    }
    return rep;
}

}  // namespace sti
