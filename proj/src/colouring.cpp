#include "sti/parity/colouring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "sti/core/estimate.hpp"

namespace sti {

SourceSet SourceSet::of(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i] == pts[i - 1]) throw std::invalid_argument("duplicate source point");
    return SourceSet{std::move(pts)};
}

bool SourceSet::contains(const Point& p) const {
    return std::binary_search(points.begin(), points.end(), p);
}

std::vector<double> SourceSet::times() const {
    std::vector<double> ts;
    ts.reserve(points.size());
    for (const auto& p : points) ts.push_back(p.time);
    return ts;
}

SourceSet SourceSet::sym_diff(const Point& x, const Point& y) const {
    if (x == y) return *this;
    return sym_diff(x).sym_diff(y);
}

SourceSet SourceSet::sym_diff(const Point& x) const {
    std::vector<Point> pts = points;
    auto it = std::lower_bound(pts.begin(), pts.end(), x);
    if (it != pts.end() && *it == x)
        pts.erase(it);
    else
        pts.insert(it, x);
    return SourceSet{std::move(pts)};
}

std::vector<std::uint8_t> draw_wbits(const Region& region, Rng& rng) {
    std::vector<std::uint8_t> bits;
    for (std::int32_t v = 0; v < region.lattice().vertex_count(); ++v)
        if (region.vertex_line(v).is_full_circle()) bits.push_back(rng.coin() ? 1 : 0);
    return bits;
}

double Colouring::log_reduced_weight(double delta) const {
    if (!valid_) return -std::numeric_limits<double>::infinity();
    return -2.0 * delta * odd_;
}

double Colouring::reduced_weight(double delta) const {
    return valid_ ? std::exp(-2.0 * delta * odd_) : 0.0;
}

int Colouring::line_of(std::int32_t v, double t) const {
    const IntervalSet& kv = region_->vertex_line(v);
    for (int i = line_begin_[v]; i < line_begin_[v + 1]; ++i)
        if (kv.closure_contains(t, lines_[i].arc)) return i;
    return -1;
}

double Colouring::line_pos(const Line& ln, double t) const {
    if (ln.arc.full) return t == 0.0 ? region_->beta() : t;
    return region_->vertex_line(ln.vertex).unwrap(t, ln.arc);
}

bool Colouring::odd_after(std::int32_t v, double t) const {
    int li = line_of(v, t);
    if (li < 0) throw std::invalid_argument("label query outside region");
    const Line& ln = lines_[li];
    auto sw = line_switches(ln);
    double q = ln.arc.full ? (t == 0.0 ? 0.0 : t) : line_pos(ln, t);
    int cnt = 0;
    for (const auto& s : sw) cnt += (s.pos <= q) ? 1 : 0;
    bool base = ln.arc.full ? ln.first_odd : false;
    return base ^ (cnt & 1);
}

bool Colouring::odd_before(std::int32_t v, double t) const {
    int li = line_of(v, t);
    if (li < 0) throw std::invalid_argument("label query outside region");
    const Line& ln = lines_[li];
    auto sw = line_switches(ln);
    double q = ln.arc.full ? (t == 0.0 ? region_->beta() : t) : line_pos(ln, t);
    int cnt = 0;
    for (const auto& s : sw) cnt += (s.pos < q) ? 1 : 0;
    bool base = ln.arc.full ? ln.first_odd : false;
    return base ^ (cnt & 1);
}

Colouring build_colouring(const Region& region, const SourceSet& A, const Configuration& bg,
                          std::span<const std::uint8_t> wbits) {
    Colouring psi;
    psi.region_ = &region;
    psi.A_ = A;
    psi.bg_ = bg;
    psi.wbits_.assign(wbits.begin(), wbits.end());
    psi.bridge_sw_.assign(bg.bridges.size(), {-1, -1});

    const Lattice& lat = region.lattice();
    const double beta = region.beta();

    // lines: maximal arcs per vertex
    psi.line_begin_.assign(lat.vertex_count() + 1, 0);
    for (std::int32_t v = 0; v < lat.vertex_count(); ++v) {
        psi.line_begin_[v] = static_cast<int>(psi.lines_.size());
        for (const auto& arc : region.vertex_line(v).arcs())
            psi.lines_.push_back({v, arc, 0, 0, false});
    }
    psi.line_begin_[lat.vertex_count()] = static_cast<int>(psi.lines_.size());

    // gather switching points per line
    struct Raw {
        int line;
        Colouring::Switch sw;
    };
    std::vector<Raw> raw;
    raw.reserve(A.size() + bg.ghosts.size() + 2 * bg.bridges.size());

    auto locate = [&](std::int32_t v, double t, SwitchKind kind, std::int32_t ref) {
        int li = psi.line_of(v, t);
        if (li < 0) throw std::invalid_argument("switching point outside region");
        const Colouring::Line& ln = psi.lines_[li];
        double pos = ln.arc.full ? (t == 0.0 ? beta : t)
                                 : region.vertex_line(v).unwrap(t, ln.arc);
        raw.push_back({li, {pos, t, kind, ref}});
        return li;
    };

    for (std::size_t i = 0; i < A.points.size(); ++i)
        locate(A.points[i].vertex, A.points[i].time, SwitchKind::source,
               static_cast<std::int32_t>(i));
    for (std::size_t i = 0; i < bg.ghosts.size(); ++i)
        locate(bg.ghosts[i].vertex, bg.ghosts[i].t, SwitchKind::ghost,
               static_cast<std::int32_t>(i));
    for (std::size_t i = 0; i < bg.bridges.size(); ++i) {
        auto [u, v] = lat.edge(bg.bridges[i].edge);
        locate(u, bg.bridges[i].t, SwitchKind::bridge_end, static_cast<std::int32_t>(i));
        locate(v, bg.bridges[i].t, SwitchKind::bridge_end, static_cast<std::int32_t>(i));
    }

    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
        if (a.line != b.line) return a.line < b.line;
        return a.sw.pos < b.sw.pos;
    });

    psi.switches_.reserve(raw.size());
    std::size_t r = 0;
    for (std::size_t li = 0; li < psi.lines_.size(); ++li) {
        psi.lines_[li].sw_begin = static_cast<std::int32_t>(psi.switches_.size());
        while (r < raw.size() && raw[r].line == static_cast<int>(li)) {
            if (raw[r].sw.kind == SwitchKind::bridge_end) {
                auto& link = psi.bridge_sw_[raw[r].sw.ref];
                (link.first < 0 ? link.first : link.second) =
                    static_cast<std::int32_t>(psi.switches_.size());
            }
            psi.switches_.push_back(raw[r].sw);
            ++r;
        }
        psi.lines_[li].sw_end = static_cast<std::int32_t>(psi.switches_.size());
    }

    // parity: a closed maximal interval holding an odd number of switching
    // points admits no valid colouring
    psi.valid_ = true;
    for (const auto& ln : psi.lines_)
        if ((ln.sw_end - ln.sw_begin) & 1) psi.valid_ = false;

    // colours of full-circle lines come from the per-vertex fair bits
    std::size_t bit_idx = 0;
    for (auto& ln : psi.lines_) {
        if (ln.arc.full) {
            if (bit_idx >= psi.wbits_.size()) throw std::invalid_argument("missing W-vertex bits");
            ln.first_odd = psi.wbits_[bit_idx++] != 0;
        }
    }
    if (bit_idx != psi.wbits_.size()) throw std::invalid_argument("excess W-vertex bits");

    if (!psi.valid_) return psi;

    // even/odd measures
    Kahan even, odd;
    for (const auto& ln : psi.lines_) {
        auto sw = psi.line_switches(ln);
        if (ln.arc.full) {
            const std::size_t k = sw.size();
            if (k == 0) {
                (ln.first_odd ? odd : even).add(beta);
            } else {
                // segment containing 0+ runs from sw[k-1].pos - beta to sw[0].pos
                bool lab = ln.first_odd;
                double prev = sw[k - 1].pos - beta;
                for (std::size_t j = 0; j < k; ++j) {
                    (lab ? odd : even).add(sw[j].pos - prev);
                    prev = sw[j].pos;
                    lab = !lab;
                }
            }
        } else {
            bool lab = false;
            double prev = ln.arc.start;
            for (const auto& s : sw) {
                (lab ? odd : even).add(s.pos - prev);
                prev = s.pos;
                lab = !lab;
            }
            (lab ? odd : even).add(ln.arc.end - prev);
        }
    }
    psi.even_ = even.sum();
    psi.odd_ = odd.sum();
    return psi;
}

Colouring build_colouring(const Region& region, const SourceSet& A, const Configuration& bg,
                          Rng& rng) {
    auto bits = draw_wbits(region, rng);
    return build_colouring(region, A, bg, bits);
}

bool Colouring::reconstructs_events() const {
    // classify switch points from labels alone: sources are known; of the
    // rest, two switches at the same time on adjacent vertices form a
    // bridge, a lone one is a ghost-bond
    const Lattice& lat = region_->lattice();
    std::multimap<double, std::pair<std::int32_t, std::size_t>> by_time;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
        auto sw = line_switches(lines_[i]);
        for (std::size_t j = 0; j < sw.size(); ++j) {
            Point p{lines_[i].vertex, sw[j].t};
            if (A_.contains(p)) continue;
            by_time.insert({sw[j].t, {lines_[i].vertex, 0}});
        }
    }
    Configuration rec;
    for (auto it = by_time.begin(); it != by_time.end();) {
        auto jt = std::next(it);
        if (jt != by_time.end() && jt->first == it->first) {
            std::int32_t e = lat.edge_between(it->second.first, jt->second.first);
            if (e < 0) return false;
            rec.bridges.push_back({e, it->first});
            it = std::next(jt);
        } else {
            rec.ghosts.push_back({it->second.first, it->first});
            ++it;
        }
    }
    auto sorted = [](auto v) {
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
            return std::tie(a.t) < std::tie(b.t);
        });
        return v;
    };
    return sorted(rec.bridges) == sorted(bg_.bridges) && sorted(rec.ghosts) == sorted(bg_.ghosts);
}

}  // namespace sti
