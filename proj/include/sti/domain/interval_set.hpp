#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sti {

enum class TimeTopology { circle, interval };

// A finite union of disjoint intervals of the time line [0,beta), either
// on the circle (0 identified with beta) or on the free interval.
//
// Storage is canonical half-open pieces [a,b) with 0 <= a < b <= beta.
// On the circle a maximal interval may pass through 0; this is implied
// exactly when the first piece starts at 0 and the last ends at beta.
// Operations that genuinely delete the point 0 never leave that pattern:
// subtracting a closed arc that covers 0 (or ends at beta) removes every
// piece ending at beta, so the wrap test below cannot fire falsely.
class IntervalSet {
  public:
    struct Piece {
        double a, b;
    };

    // One maximal interval; end exceeds beta when the arc wraps through 0.
    // full == true means the whole circle (no endpoints at all).
    struct Arc {
        double start, end;
        bool full;
        double length() const { return end - start; }
    };

    IntervalSet(TimeTopology top, double beta) : top_(top), beta_(beta) {
        if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    }

    static IntervalSet whole(TimeTopology top, double beta) {
        IntervalSet s(top, beta);
        s.pieces_.push_back({0.0, beta});
        return s;
    }

    static IntervalSet empty_set(TimeTopology top, double beta) { return IntervalSet(top, beta); }

    TimeTopology topology() const { return top_; }
    double beta() const { return beta_; }
    bool empty() const { return pieces_.empty(); }
    const std::vector<Piece>& pieces() const { return pieces_; }

    // the full circle: one maximal interval and no endpoints
    bool is_full_circle() const {
        return top_ == TimeTopology::circle && pieces_.size() == 1 && pieces_[0].a == 0.0 &&
               pieces_[0].b == beta_;
    }

    bool joined_at_zero() const {
        return top_ == TimeTopology::circle && pieces_.size() >= 2 && pieces_.front().a == 0.0 &&
               pieces_.back().b == beta_;
    }

    double measure() const {
        double m = 0.0;
        for (const auto& p : pieces_) m += p.b - p.a;
        return m;
    }

    // number of maximal intervals m(v)
    int count() const {
        if (pieces_.empty()) return 0;
        int n = static_cast<int>(pieces_.size());
        if (joined_at_zero()) --n;
        return n;
    }

    bool contains(double t) const {
        for (const auto& p : pieces_)
            if (t >= p.a && t < p.b) return true;
        return false;
    }

    // maximal intervals in canonical order (a wrapping arc comes last)
    std::vector<Arc> arcs() const {
        std::vector<Arc> out;
        if (pieces_.empty()) return out;
        if (is_full_circle()) {
            out.push_back({0.0, beta_, true});
            return out;
        }
        std::size_t lo = 0, hi = pieces_.size();
        bool wrap = joined_at_zero();
        if (wrap) {
            ++lo;
            --hi;
        }
        for (std::size_t i = lo; i < hi; ++i) out.push_back({pieces_[i].a, pieces_[i].b, false});
        if (wrap) out.push_back({pieces_.back().a, pieces_.front().b + beta_, false});
        return out;
    }

    // coordinate of the circle point t along arc a, in [a.start, a.start+beta)
    double unwrap(double t, const Arc& a) const {
        return (t < a.start) ? t + beta_ : t;
    }

    // whether the closure of arc a contains the circle point t
    bool closure_contains(double t, const Arc& a) const {
        if (a.full) return true;
        double u = unwrap(t, a);
        return u >= a.start && u <= a.end;
    }

    // index into `arcs` of the maximal interval whose closure contains t, or -1.
    // Closures of distinct maximal intervals are disjoint, so this is unique.
    int arc_containing(double t, const std::vector<Arc>& arcs) const {
        for (std::size_t i = 0; i < arcs.size(); ++i)
            if (closure_contains(t, arcs[i])) return static_cast<int>(i);
        return -1;
    }

    // Remove the closed set [s,e] (times mod beta; e > beta, or e < s,
    // denotes an arc wrapping through 0). Wrapping needs circle topology.
    void subtract_closed(double s, double e) {
        if (e < s) e += beta_;
        if (!(e > s)) throw std::invalid_argument("subtract_closed: degenerate arc");
        if (e - s >= beta_) {
            pieces_.clear();
            return;
        }
        if (e <= beta_) {
            subtract_linear(s, e);
        } else {
            if (top_ == TimeTopology::interval)
                throw std::invalid_argument("wrapping subtraction on interval topology");
            subtract_linear(s, beta_);
            subtract_linear(0.0, e - beta_);
        }
    }

    IntervalSet intersect(const IntervalSet& other) const {
        assert(top_ == other.top_ && beta_ == other.beta_);
        IntervalSet out(top_, beta_);
        std::size_t i = 0, j = 0;
        while (i < pieces_.size() && j < other.pieces_.size()) {
            double lo = std::max(pieces_[i].a, other.pieces_[j].a);
            double hi = std::min(pieces_[i].b, other.pieces_[j].b);
            if (hi > lo) out.pieces_.push_back({lo, hi});
            if (pieces_[i].b < other.pieces_[j].b)
                ++i;
            else
                ++j;
        }
        return out;
    }

    friend bool operator==(const IntervalSet& x, const IntervalSet& y) {
        if (x.top_ != y.top_ || x.beta_ != y.beta_ || x.pieces_.size() != y.pieces_.size())
            return false;
        for (std::size_t i = 0; i < x.pieces_.size(); ++i)
            if (x.pieces_[i].a != y.pieces_[i].a || x.pieces_[i].b != y.pieces_[i].b) return false;
        return true;
    }

    // construct from raw pieces (merges touching pieces, drops empties)
    static IntervalSet from_pieces(TimeTopology top, double beta, std::vector<Piece> ps) {
        IntervalSet s(top, beta);
        std::sort(ps.begin(), ps.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
        for (const auto& p : ps) {
            if (!(p.b > p.a)) continue;
            if (!s.pieces_.empty() && s.pieces_.back().b >= p.a)
                s.pieces_.back().b = std::max(s.pieces_.back().b, p.b);
            else
                s.pieces_.push_back(p);
        }
        return s;
    }

  private:
    // remove the closed linear range [s,e]; the right remainder (e,b) is
    // canonicalized to [e,b), a measure-zero re-inclusion
    void subtract_linear(double s, double e) {
        std::vector<Piece> out;
        out.reserve(pieces_.size() + 1);
        for (const auto& p : pieces_) {
            if (p.b <= s || p.a > e) {
                out.push_back(p);
                continue;
            }
            if (p.a < s) out.push_back({p.a, std::min(p.b, s)});
            if (p.b > e) out.push_back({e, p.b});
        }
        pieces_ = std::move(out);
    }

    TimeTopology top_;
    double beta_;
    std::vector<Piece> pieces_;
};

}  // namespace sti
