#pragma once

#include <cstdint>
#include <compare>

namespace sti {

// A point of K: (vertex index, time). Vertex indices are row-major over
// the box [-n,n]^d, so the lexicographic order below is the total order
// on K used throughout (vertices first, then the natural order on [0,b)).
struct Point {
    std::int32_t vertex = 0;
    double time = 0.0;

    friend bool operator==(const Point& a, const Point& b) {
        return a.vertex == b.vertex && a.time == b.time;
    }
    friend bool operator<(const Point& a, const Point& b) {
        if (a.vertex != b.vertex) return a.vertex < b.vertex;
        return a.time < b.time;
    }
    friend bool operator>(const Point& a, const Point& b) { return b < a; }
    friend bool operator<=(const Point& a, const Point& b) { return !(b < a); }
    friend bool operator>=(const Point& a, const Point& b) { return !(a < b); }
};

enum class Order { less, equal, greater };

inline Order point_order(const Point& x, const Point& y) {
    if (x == y) return Order::equal;
    return x < y ? Order::less : Order::greater;
}

// a point of K^G: either a lattice point or the ghost site
struct SitePoint {
    bool is_ghost = false;
    Point p{};

    static SitePoint ghost() { return {true, {}}; }
    static SitePoint at(Point q) { return {false, q}; }
    friend bool operator==(const SitePoint&, const SitePoint&) = default;
};

}  // namespace sti
