#include "sti/backbone/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sti/oracle/oracle.hpp"

namespace sti {

namespace {

struct invariant_violation : std::logic_error {
    using std::logic_error::logic_error;
};

// Gap bookkeeping: gap j of a line is the odd/even segment ending at
// switch j. Non-full lines have k+1 gaps (j = k is the segment reaching
// the arc end) with labels: gap j odd iff j is odd. Full lines have k
// gaps (k = 0 means the uncut circle, a single gap) with labels
// first_odd xor (j & 1); gap 0 is the segment through the reference 0+.
struct GapIndex {
    const Colouring* psi;
    std::vector<int> base;
    int total = 0;

    explicit GapIndex(const Colouring& c) : psi(&c) {
        base.reserve(c.lines().size() + 1);
        for (const auto& ln : c.lines()) {
            base.push_back(total);
            int k = ln.sw_end - ln.sw_begin;
            total += ln.arc.full ? std::max(k, 1) : k + 1;
        }
        base.push_back(total);
    }

    int id(int line, int j) const { return base[line] + j; }

    int count(int line) const { return base[line + 1] - base[line]; }

    bool odd(int line, int j) const {
        const auto& ln = psi->lines()[line];
        if (ln.arc.full) {
            int k = ln.sw_end - ln.sw_begin;
            if (k == 0) return ln.first_odd;
            return ln.first_odd ^ ((j & 1) != 0);
        }
        return (j & 1) != 0;
    }
};

struct Walker {
    const Colouring& psi;
    const Region& region;
    GapIndex gaps;
    std::vector<bool> covered;
    std::vector<bool> switch_used;

    explicit Walker(const Colouring& c)
        : psi(c), region(c.region()), gaps(c), covered(gaps.total, false),
          switch_used(c.switches().size(), false) {}

    double beta() const { return region.beta(); }

    // circle time of a line position
    double fold(double pos) const { return pos >= beta() ? pos - beta() : pos; }

    int line_index_of_switch(int sw) const {
        const auto& lines = psi.lines();
        int lo = 0, hi = static_cast<int>(lines.size()) - 1;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (lines[mid].sw_end > sw)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    // does the gap after (dir=+1) / before (dir=-1) switch sw carry the odd label?
    bool odd_side(int line, int local, int dir) const {
        const auto& ln = psi.lines()[line];
        int k = ln.sw_end - ln.sw_begin;
        if (ln.arc.full) {
            int j = dir > 0 ? (local + 1) % k : local;
            return gaps.odd(line, j);
        }
        int j = dir > 0 ? local + 1 : local;
        return gaps.odd(line, j);
    }

    // walk from switch (line, local) in direction dir across one gap;
    // returns the switch reached and appends the step
    int traverse(int line, int local, int dir, std::vector<BackboneStep>& steps) {
        const auto& ln = psi.lines()[line];
        auto sw = psi.line_switches(ln);
        int k = static_cast<int>(sw.size());
        int gap = 0, nxt = 0;
        double from = sw[local].pos, to = 0;
        if (ln.arc.full) {
            nxt = dir > 0 ? (local + 1) % k : (local - 1 + k) % k;
            gap = dir > 0 ? (local + 1) % k : local;
            to = sw[nxt].pos;
            if (dir > 0 && nxt <= local) to += beta();
            if (dir < 0 && nxt >= local) to -= beta();
        } else {
            nxt = local + dir;
            gap = dir > 0 ? local + 1 : local;
            if (nxt < 0 || nxt >= k)
                throw invariant_violation("odd walk reached an interval end not in A");
            to = sw[nxt].pos;
        }
        int gid = gaps.id(line, gap);
        if (covered[gid]) throw invariant_violation("odd gap walked twice");
        if (!gaps.odd(line, gap)) throw invariant_violation("walked gap is even");
        covered[gid] = true;
        steps.push_back({ln.vertex, fold(from < 0 ? from + beta() : from),
                         fold(to < 0 ? to + beta() : to), dir > 0});
        return ln.sw_begin + nxt;
    }
};

}  // namespace

std::vector<TimeSeg> Backbone::segments() const {
    std::vector<TimeSeg> out;
    for (const auto& p : paths)
        for (const auto& s : p.steps) {
            double lo = s.increasing ? s.from : s.to;
            double hi = s.increasing ? s.to : s.from;
            out.push_back({s.vertex, lo, hi});
        }
    return out;
}

double Backbone::total_length(double beta) const {
    double tot = 0;
    for (const auto& p : paths)
        for (const auto& s : p.steps) {
            double lo = s.increasing ? s.from : s.to;
            double hi = s.increasing ? s.to : s.from;
            tot += hi < lo ? hi + beta - lo : hi - lo;
        }
    return tot;
}

Backbone extract_backbone(const Colouring& psi) {
    Backbone bb;
    if (!psi.valid()) return bb;
    const auto& A = psi.sources();
    if (A.is_empty()) return bb;

    Walker w(psi);
    std::vector<Point> pending = A.points;  // already sorted by the total order

    while (!pending.empty()) {
        Point a = pending.front();
        pending.erase(pending.begin());

        BackbonePath path;
        path.start = a;
        int line = psi.line_of(a.vertex, a.time);
        if (line < 0) throw invariant_violation("source outside region");
        const auto& ln = psi.lines()[line];
        auto sw = psi.line_switches(ln);
        int local = -1;
        for (int i = 0; i < static_cast<int>(sw.size()); ++i)
            if (sw[i].kind == SwitchKind::source && sw[i].t == a.time) local = i;
        if (local < 0) throw invariant_violation("source switch not found");
        w.switch_used[ln.sw_begin + local] = true;

        // exactly one side of a switching point is odd; walk into it
        int dir = w.odd_side(line, local, +1) ? +1 : -1;
        if (w.odd_side(line, local, dir) == w.odd_side(line, local, -dir))
            throw invariant_violation("label fails to switch at a source");

        while (true) {
            int reached = w.traverse(line, local, dir, path.steps);
            if (w.switch_used[reached]) throw invariant_violation("switch revisited");
            w.switch_used[reached] = true;
            const auto& s = psi.switches()[reached];
            std::int32_t v = psi.lines()[w.line_index_of_switch(reached)].vertex;
            if (s.kind == SwitchKind::source) {
                path.end = {v, s.t};
                auto it = std::find(pending.begin(), pending.end(), path.end);
                if (it == pending.end())
                    throw invariant_violation("walk ended at an already-used source");
                pending.erase(it);
                break;
            }
            if (s.kind == SwitchKind::ghost) {
                path.end = {v, s.t};
                path.to_ghost = true;
                break;
            }
            // bridge: hop to the partner endpoint and continue
            auto [s1, s2] = psi.bridge_switches(s.ref);
            int partner = (s1 == reached) ? s2 : s1;
            if (w.switch_used[partner]) throw invariant_violation("bridge partner revisited");
            w.switch_used[partner] = true;
            line = w.line_index_of_switch(partner);
            local = partner - psi.lines()[line].sw_begin;
            dir = w.odd_side(line, local, +1) ? +1 : -1;
        }
        bb.paths.push_back(std::move(path));
    }
    return bb;
}

LeftoverDecomposition decompose_leftover(const Colouring& psi, const Backbone& bb) {
    if (!psi.valid()) return {};
    // re-cover the gaps used by the backbone
    Walker w(psi);
    for (const auto& p : bb.paths)
        for (const auto& s : p.steps) {
            int line = psi.line_of(s.vertex, s.from);
            const auto& ln = psi.lines()[line];
            auto sw = psi.line_switches(ln);
            int k = static_cast<int>(sw.size());
            double from_pos = ln.arc.full ? (s.from == 0.0 ? w.beta() : s.from)
                                          : psi.region().vertex_line(s.vertex).unwrap(s.from, ln.arc);
            int local = -1;
            for (int i = 0; i < k; ++i)
                if (sw[i].pos == from_pos) local = i;
            if (local < 0) throw invariant_violation("backbone step detached from a switch");
            int gap;
            if (ln.arc.full)
                gap = s.increasing ? (local + 1) % k : local;
            else
                gap = s.increasing ? local + 1 : local;
            w.covered[w.gaps.id(line, gap)] = true;
        }

    // remaining odd gaps must glue into cycles, possibly through the ghost
    LeftoverDecomposition out;
    const auto& lines = psi.lines();

    // an uncut fully-odd circle line is a cycle of its own
    for (std::size_t li = 0; li < lines.size(); ++li) {
        int k = lines[li].sw_end - lines[li].sw_begin;
        int line = static_cast<int>(li);
        if (lines[li].arc.full && k == 0 && w.gaps.odd(line, 0) &&
            !w.covered[w.gaps.id(line, 0)]) {
            w.covered[w.gaps.id(line, 0)] = true;
            ++out.n_cycles;
        }
    }

    // switches bounding a gap; -1 marks an arc endpoint
    auto gap_ends = [&](int line, int gap) -> std::pair<int, int> {
        const auto& ln = lines[line];
        int k = ln.sw_end - ln.sw_begin;
        if (ln.arc.full) return {ln.sw_begin + (gap - 1 + k) % k, ln.sw_begin + gap};
        return {gap == 0 ? -1 : ln.sw_begin + gap - 1, gap == k ? -1 : ln.sw_begin + gap};
    };

    // step across a bounding switch into the adjacent odd gap of the
    // bridge partner; returns false when the switch is a ghost (chain end)
    auto cross = [&](int sw, int& next_line, int& next_gap, bool& hit_ghost) {
        const auto& s = psi.switches()[sw];
        if (s.kind == SwitchKind::source)
            throw invariant_violation("leftover odd gap touches a source");
        if (s.kind == SwitchKind::ghost) {
            hit_ghost = true;
            return false;
        }
        auto [b1, b2] = psi.bridge_switches(s.ref);
        int partner = (b1 == sw) ? b2 : b1;
        next_line = w.line_index_of_switch(partner);
        int nlocal = partner - lines[next_line].sw_begin;
        int ndir = w.odd_side(next_line, nlocal, +1) ? +1 : -1;
        int k2 = lines[next_line].sw_end - lines[next_line].sw_begin;
        next_gap = lines[next_line].arc.full
                       ? (ndir > 0 ? (nlocal + 1) % k2 : nlocal)
                       : (ndir > 0 ? nlocal + 1 : nlocal);
        return true;
    };

    for (std::size_t li = 0; li < lines.size(); ++li) {
        int line = static_cast<int>(li);
        if (lines[li].arc.full && lines[li].sw_end == lines[li].sw_begin) continue;
        for (int j = 0; j < w.gaps.count(line); ++j) {
            if (!w.gaps.odd(line, j) || w.covered[w.gaps.id(line, j)]) continue;
            w.covered[w.gaps.id(line, j)] = true;
            int ghosts = 0;
            auto [lo_sw, hi_sw] = gap_ends(line, j);
            for (int start : {lo_sw, hi_sw}) {
                if (start < 0) throw invariant_violation("leftover odd gap at arc end");
                int cl = 0, cg = 0;
                bool hit_ghost = false;
                int sw = start;
                while (cross(sw, cl, cg, hit_ghost)) {
                    if (w.covered[w.gaps.id(cl, cg)]) break;  // closed back onto the component
                    w.covered[w.gaps.id(cl, cg)] = true;
                    auto [a, b] = gap_ends(cl, cg);
                    // continue out of the end we did not enter through
                    int entered = -1;
                    {
                        const auto& ps = psi.switches()[sw];
                        auto [p1, p2] = psi.bridge_switches(ps.ref);
                        entered = (p1 == sw) ? p2 : p1;
                    }
                    if (a < 0 || b < 0) throw invariant_violation("leftover odd gap at arc end");
                    sw = (a == entered) ? b : a;
                }
                if (hit_ghost) ++ghosts;
            }
            if (ghosts == 0)
                ++out.n_cycles;
            else if (ghosts == 2)
                ++out.n_ghost_cycles;
            else
                throw invariant_violation("leftover chain with odd ghost count");
        }
    }
    return out;
}

bool backbone_compatible(const SourceSet& A, const Backbone& nu) {
    // greedy pairing in the total order; a path may be consumed from
    // either endpoint (cut pieces arrive in both orientations)
    std::vector<Point> pending = A.points;
    std::vector<bool> used(nu.paths.size(), false);
    while (!pending.empty()) {
        Point a = pending.front();
        pending.erase(pending.begin());
        bool found = false;
        for (std::size_t i = 0; i < nu.paths.size() && !found; ++i) {
            if (used[i]) continue;
            const auto& p = nu.paths[i];
            if (p.start == a || (!p.to_ghost && p.end == a)) {
                used[i] = true;
                found = true;
                if (!p.to_ghost) {
                    Point other = (p.start == a) ? p.end : p.start;
                    auto it = std::find(pending.begin(), pending.end(), other);
                    if (it == pending.end()) return false;
                    pending.erase(it);
                }
            }
        }
        if (!found) return false;
    }
    for (bool u : used)
        if (!u) return false;
    return true;
}

Estimate backbone_weight(const Region& region, const Backbone& nu, const SourceSet& A,
                         const Params& params, const McOptions& opt) {
    if (!backbone_compatible(A, nu)) return Estimate::exactly(0.0);
    if (nu.empty()) return Estimate::exactly(1.0);
    if (params.delta == 0.0) return Estimate::exactly(1.0);  // Z_R = 1 for every R

    Region cutreg = region.subtract(nu.segments());
    McOptions inner = opt;
    inner.op_id = Rng::mix(opt.op_id, 0xbb1);
    BatchTable num = parity_weight_table(cutreg, {}, params, inner);
    McOptions denopt = opt;
    denopt.op_id = Rng::mix(opt.op_id, 0xbb2);
    BatchTable den = parity_weight_table(region, {}, params, denopt);
    Estimate en = jackknife(num, [](std::span<const double> m) { return m[0]; });
    Estimate ed = jackknife(den, [](std::span<const double> m) { return m[0]; });
    double scale = std::exp(-2.0 * params.delta * nu.total_length(region.beta()));
    double value = scale * en.value / ed.value;
    double rel = std::sqrt(std::pow(en.std_error / en.value, 2) +
                           std::pow(ed.std_error / ed.value, 2));
    return {value, std::abs(value) * rel, en.n_samples + ed.n_samples, false};
}

std::pair<Backbone, Backbone> cut_backbone(const Backbone& nu, const Point& x, double beta) {
    for (std::size_t pi = 0; pi < nu.paths.size(); ++pi) {
        const auto& path = nu.paths[pi];
        for (std::size_t si = 0; si < path.steps.size(); ++si) {
            const auto& s = path.steps[si];
            if (s.vertex != x.vertex) continue;
            double lo = s.increasing ? s.from : s.to;
            double hi = s.increasing ? s.to : s.from;
            double span = hi < lo ? hi + beta - lo : hi - lo;
            double u = x.time < lo ? x.time + beta : x.time;
            if (!(u > lo && u < lo + span)) continue;
            // split this step at x
            BackbonePath front, back;
            front.start = path.start;
            front.end = x;
            front.steps.assign(path.steps.begin(), path.steps.begin() + si);
            BackboneStep head = s, tail = s;
            if (s.increasing) {
                head.to = x.time;
                tail.from = x.time;
            } else {
                head.from = s.from;
                head.to = x.time;
                tail.from = x.time;
                tail.to = s.to;
            }
            front.steps.push_back(head);
            back.start = x;
            back.end = path.end;
            back.to_ghost = path.to_ghost;
            back.steps.push_back(tail);
            back.steps.insert(back.steps.end(), path.steps.begin() + si + 1, path.steps.end());

            Backbone first, second;
            first.paths.assign(nu.paths.begin(), nu.paths.begin() + pi);
            first.paths.push_back(std::move(front));
            second.paths.push_back(std::move(back));
            second.paths.insert(second.paths.end(), nu.paths.begin() + pi + 1, nu.paths.end());
            return {first, second};
        }
    }
    throw std::domain_error("cut point does not lie interior to the backbone");
}

Backbone concat_backbones(const Backbone& a, const Backbone& b) {
    Backbone out = a;
    std::size_t start = 0;
    if (!out.paths.empty() && !b.paths.empty() && out.paths.back().end == b.paths.front().start &&
        !out.paths.back().to_ghost) {
        // re-join halves of a cut path, merging the split step
        BackbonePath& head = out.paths.back();
        const BackbonePath& tail = b.paths.front();
        head.end = tail.end;
        head.to_ghost = tail.to_ghost;
        std::size_t from = 0;
        if (!head.steps.empty() && !tail.steps.empty()) {
            BackboneStep& h = head.steps.back();
            const BackboneStep& t = tail.steps.front();
            if (h.vertex == t.vertex && h.increasing == t.increasing && h.to == t.from) {
                h.to = t.to;
                from = 1;
            }
        }
        head.steps.insert(head.steps.end(), tail.steps.begin() + from, tail.steps.end());
        start = 1;
    }
    out.paths.insert(out.paths.end(), b.paths.begin() + start, b.paths.end());
    return out;
}

BackboneRepresentationReport verify_backbone_representation(const Region& region,
                                                            const SourceSet& A,
                                                            const Params& params,
                                                            const McOptions& opt) {
    BackboneRepresentationReport rep;
    const double delta = params.delta;
    const double beta = region.beta();
    std::int64_t n_inner =
        std::max<std::int64_t>(8, static_cast<std::int64_t>(std::sqrt((double)opt.n_samples)));

    auto forbidden = A.times();
    std::int64_t ghost_pairs = 0, outer_done = 0;

    SamplePlan plan = opt.plan();
    BatchTable tab = run_batched(plan, 1, [&](Rng& rng, double* row) {
        Configuration bg = sample_bridges_ghosts(region, params, rng, forbidden);
        auto bits = draw_wbits(region, rng);
        Colouring psi = build_colouring(region, A, bg, bits);
        ++outer_done;
        if (!psi.valid()) {
            row[0] = 0.0;
            return;
        }
        Backbone xi = extract_backbone(psi);
        if (A.size() == 2 && xi.paths.size() == 2) ++ghost_pairs;
        // Inner estimate of E_{K \ xi}(del psi^0 | valid). The backbone was
        // read off a valid colouring, which tilts the off-backbone law by
        // its validity probability; the conditional mean undoes the tilt:
        // <sigma_A> = E_xi( E_{K \ xi}(del psi^0 | valid) ) / Z_K.
        Region cut = region.subtract(xi.segments());
        double acc = 0;
        std::int64_t n_valid = 0, budget = 16 * n_inner;
        for (std::int64_t i = 0; n_valid < n_inner && i < budget; ++i) {
            Rng inner = Rng::stream(rng.next(), static_cast<std::uint64_t>(i));
            Configuration bg2 = sample_bridges_ghosts(cut, params, inner);
            auto bits2 = draw_wbits(cut, inner);
            Colouring off = build_colouring(cut, SourceSet::empty(), bg2, bits2);
            if (!off.valid()) continue;
            ++n_valid;
            acc += off.reduced_weight(delta);
        }
        row[0] = n_valid ? std::exp(-2.0 * delta * xi.total_length(beta)) * acc / (double)n_valid
                         : 0.0;
    });
    Estimate num = jackknife(tab, [](std::span<const double> m) { return m[0]; });

    McOptions denopt = opt;
    denopt.op_id = Rng::mix(opt.op_id, 0xd2);
    BatchTable dtab = parity_weight_table(region, {}, params, denopt);
    Estimate den = jackknife(dtab, [](std::span<const double> m) { return m[0]; });

    double value = num.value / den.value;
    double rel = std::sqrt(std::pow(num.std_error / std::max(num.value, 1e-300), 2) +
                           std::pow(den.std_error / den.value, 2));
    rep.via_backbone = {value, std::abs(value) * rel, num.n_samples, false};

    McOptions popt = opt;
    popt.op_id = Rng::mix(opt.op_id, 0xd3);
    rep.via_parity = estimate_correlation(region, A, params, popt);
    rep.z_backbone_vs_parity = z_difference(rep.via_backbone, rep.via_parity);
    rep.ghost_pair_fraction = outer_done ? (double)ghost_pairs / (double)outer_done : 0.0;

    if (region.lattice().vertex_count() <= 8) {
        oracle::DenseHamiltonian H(region.lattice(), params);
        rep.oracle =
            oracle::spacetime_correlation(H, beta, region.topology(), A.points);
        rep.z_backbone_vs_oracle =
            (rep.via_backbone.value - *rep.oracle) / rep.via_backbone.std_error;
    }
    return rep;
}

}  // namespace sti
