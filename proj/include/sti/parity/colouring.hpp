#pragma once

#include <span>
#include <vector>

#include "sti/core/rng.hpp"
#include "sti/domain/events.hpp"
#include "sti/domain/point.hpp"
#include "sti/domain/region.hpp"

namespace sti {

// A finite set of sources A in the closure of K. Each source must be the
// endpoint of at most one maximal interval of K, and disjoint from V(B)
// and G (event draws avoid the source times).
struct SourceSet {
    std::vector<Point> points;  // sorted, distinct

    static SourceSet of(std::vector<Point> pts);
    static SourceSet empty() { return {}; }
    static SourceSet single(Point p) { return of({p}); }
    static SourceSet pair(Point p, Point q) { return of({p, q}); }

    std::size_t size() const { return points.size(); }
    bool is_empty() const { return points.empty(); }
    bool contains(const Point& p) const;
    std::vector<double> times() const;

    // A (symmetric difference) {x,y}; x == y leaves A unchanged
    SourceSet sym_diff(const Point& x, const Point& y) const;
    SourceSet sym_diff(const Point& x) const;
};

enum class SwitchKind : std::uint8_t { source, ghost, bridge_end };

// A colouring psi^A(B,G) of K minus its switching points, or the failure
// value (valid() == false, weight 0). Labels alternate at every switching
// point; interval endpoints have even limits except at sources.
class Colouring {
  public:
    struct Switch {
        double pos;        // coordinate along the line (see Line)
        double t;          // circle time
        SwitchKind kind;
        std::int32_t ref;  // bridge index for bridge_end, else source/ghost index
    };

    // One maximal interval of some K_v. For non-full lines, switch
    // positions live in [arc.start, arc.end] (unwrapped), the virtual
    // label before the first switch is even, and the label flips at every
    // switch. For full-circle lines positions live in (0, beta] (a switch
    // at time 0 is placed at beta), and first_odd is the label of the
    // segment containing the reference point (v, 0+).
    struct Line {
        std::int32_t vertex;
        IntervalSet::Arc arc;
        std::int32_t sw_begin, sw_end;
        bool first_odd;
    };

    bool valid() const { return valid_; }
    double even_measure() const { return even_; }
    double odd_measure() const { return odd_; }

    // log of the reduced weight w^ = del(psi) * exp(-2 delta |K|) =
    // exp(-2 delta odd(psi)); the common factor cancels in every ratio
    // over a fixed region. Returns -inf for the failed colouring.
    double log_reduced_weight(double delta) const;
    double reduced_weight(double delta) const;

    const Region& region() const { return *region_; }
    const SourceSet& sources() const { return A_; }
    const Configuration& events() const { return bg_; }
    std::span<const std::uint8_t> wbits() const { return wbits_; }

    const std::vector<Line>& lines() const { return lines_; }
    const std::vector<Switch>& switches() const { return switches_; }
    std::span<const Switch> line_switches(const Line& ln) const {
        return {switches_.data() + ln.sw_begin, static_cast<std::size_t>(ln.sw_end - ln.sw_begin)};
    }

    // line whose closure contains (v,t); -1 if outside the region
    int line_of(std::int32_t v, double t) const;
    int line_begin(std::int32_t v) const { return line_begin_[v]; }
    int line_end(std::int32_t v) const { return line_begin_[v + 1]; }

    // label of the segment just after / just before circle time t on v
    bool odd_after(std::int32_t v, double t) const;
    bool odd_before(std::int32_t v, double t) const;

    // switch indices (into switches()) of the two endpoints of bridge b
    std::pair<std::int32_t, std::int32_t> bridge_switches(std::int32_t b) const {
        return bridge_sw_[b];
    }

    // rebuild (B, G) from the label structure alone and compare (the
    // almost-sure reconstruction property); returns false on mismatch
    bool reconstructs_events() const;

    friend Colouring build_colouring(const Region&, const SourceSet&, const Configuration&,
                                     std::span<const std::uint8_t>);

  private:
    double line_pos(const Line& ln, double t) const;

    const Region* region_ = nullptr;
    SourceSet A_;
    Configuration bg_;
    std::vector<std::uint8_t> wbits_;
    bool valid_ = false;
    double even_ = 0.0, odd_ = 0.0;
    std::vector<Line> lines_;
    std::vector<Switch> switches_;
    std::vector<int> line_begin_;
    std::vector<std::pair<std::int32_t, std::int32_t>> bridge_sw_;
};

// one fair bit per full-circle vertex, drawn in vertex order
std::vector<std::uint8_t> draw_wbits(const Region& region, Rng& rng);

Colouring build_colouring(const Region& region, const SourceSet& A, const Configuration& bg,
                          std::span<const std::uint8_t> wbits);
Colouring build_colouring(const Region& region, const SourceSet& A, const Configuration& bg,
                          Rng& rng);

}  // namespace sti
