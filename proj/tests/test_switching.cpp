#include "doctest.h"

#include <cmath>

#include "sti/switching/switching.hpp"

using namespace sti;

namespace {

McOptions opts(std::int64_t n, std::uint64_t seed, std::uint64_t op) {
    McOptions o;
    o.n_samples = n;
    o.seed = seed;
    o.op_id = op;
    return o;
}

struct Draw {
    Colouring p1, p2;
    std::vector<VertexEvent> cuts;
};

Draw draw_pair(const Region& reg, const Params& params, const SourceSet& A, const SourceSet& B,
               Rng& rng) {
    std::vector<double> forbidden;
    for (double t : A.times()) forbidden.push_back(t);
    for (double t : B.times()) forbidden.push_back(t);
    auto c1 = sample_bridges_ghosts(reg, params, rng, forbidden);
    auto b1 = draw_wbits(reg, rng);
    auto c2 = sample_bridges_ghosts(reg, params, rng, forbidden);
    auto b2 = draw_wbits(reg, rng);
    auto cuts = sample_cuts(reg, params.delta, rng, forbidden);
    return {build_colouring(reg, A, c1, b1), build_colouring(reg, B, c2, b2), cuts};
}

}  // namespace

TEST_CASE("a point is connected to itself; odd paths are open despite cuts") {
    Region reg = Region::box(Lattice(1, 0, SpatialBoundary::free), 1.0, TimeTopology::circle);
    // psi1 odd between its two sources; a cut inside that stretch must not sever
    auto p1 = build_colouring(reg, SourceSet::pair({0, 0.2}, {0, 0.8}), {},
                              std::vector<std::uint8_t>{0});
    auto p2 = build_colouring(reg, SourceSet::empty(), {}, std::vector<std::uint8_t>{0});
    REQUIRE(p1.valid());
    std::vector<VertexEvent> cuts{{0, 0.5}};
    ConnectivityIndex idx(p1, p2, cuts);
    CHECK(idx.connected(Point{0, 0.3}, Point{0, 0.3}));
    CHECK(idx.connected(Point{0, 0.3}, Point{0, 0.7}));  // via the odd stretch
    // cuts on both sides within the doubly-even stretch isolate its middle
    std::vector<VertexEvent> cuts2{{0, 0.9}, {0, 0.05}};
    ConnectivityIndex idx2(p1, p2, cuts2);
    CHECK(idx2.connected(Point{0, 0.3}, Point{0, 0.7}));
    CHECK(!idx2.connected(Point{0, 0.5}, Point{0, 0.95}));
    CHECK(idx2.connected(Point{0, 0.92}, Point{0, 0.99}));
}

TEST_CASE("doubly-even cut blocks a two-vertex crossing") {
    Lattice lat = Lattice::chain(2);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    // two bridges keep the switching-point parity even on both lines
    Configuration c;
    c.bridges = {{0, 0.5}, {0, 0.6}};
    std::vector<std::uint8_t> bits{0, 0};
    auto p1 = build_colouring(reg, SourceSet::empty(), c, bits);
    REQUIRE(p1.valid());
    auto p2 = build_colouring(reg, SourceSet::empty(), {}, bits);
    {
        ConnectivityIndex idx(p1, p2, {});
        CHECK(idx.connected(Point{0, 0.1}, Point{1, 0.9}));
    }
    {
        // cuts fencing off the bridges on vertex 0 isolate the point 0.1
        std::vector<VertexEvent> cuts{{0, 0.3}, {0, 0.7}};
        ConnectivityIndex idx(p1, p2, cuts);
        CHECK(!idx.connected(Point{0, 0.1}, Point{1, 0.9}));
        CHECK(idx.connected(Point{0, 0.4}, Point{1, 0.9}));
    }
}

TEST_CASE("ghost-bonds connect to the ghost site") {
    Region reg = Region::box(Lattice(1, 0, SpatialBoundary::free), 1.0, TimeTopology::circle);
    Configuration c;
    c.ghosts = {{0, 0.25}};
    std::vector<std::uint8_t> bits{0};
    auto p1 = build_colouring(reg, SourceSet::single({0, 0.25}).sym_diff({0, 0.25}), c, bits);
    // that is: empty sources but one ghost -> invalid parity (odd count)
    CHECK(!p1.valid());
    Configuration c2;
    c2.ghosts = {{0, 0.25}, {0, 0.75}};
    auto p2 = build_colouring(reg, SourceSet::empty(), c2, bits);
    REQUIRE(p2.valid());
    auto pe = build_colouring(reg, SourceSet::empty(), {}, bits);
    ConnectivityIndex idx(p2, pe, {});
    CHECK(idx.connected_to_ghost({0, 0.5}));
    CHECK(idx.connected(SitePoint::ghost(), SitePoint::at({0, 0.1})));
}

TEST_CASE("connectivity is antitone in the cut set") {
    Lattice lat(1, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    Params params{1.2, 1.0, 0.6};
    Rng rng(5);
    SourceSet A = SourceSet::pair({0, 0.25}, {1, 0.5});
    int checked = 0;
    for (int rep = 0; rep < 2000 && checked < 60; ++rep) {
        Draw d = draw_pair(reg, params, A, SourceSet::empty(), rng);
        if (!d.p1.valid() || !d.p2.valid()) continue;
        ++checked;
        auto extra = sample_cuts(reg, 0.7, rng);
        std::vector<VertexEvent> more = d.cuts;
        more.insert(more.end(), extra.begin(), extra.end());
        ConnectivityIndex base(d.p1, d.p2, d.cuts);
        ConnectivityIndex super(d.p1, d.p2, more);
        std::vector<Point> pts{{0, 0.1}, {0, 0.6}, {1, 0.2}, {1, 0.9}, {2, 0.4}};
        for (const auto& a : pts)
            for (const auto& b : pts) {
                if (super.connected(a, b)) CHECK(base.connected(a, b));
                bool gb = base.connected_to_ghost(a);
                if (super.connected_to_ghost(a)) CHECK(gb);
            }
    }
    CHECK(checked > 30);
}

TEST_CASE("raising the odd set never decreases connectivity on fixed events") {
    // psi1a all-even (no events, bit 0) versus psi1b odd on [0.25, 0.75]:
    // odd(psi1a) is a subset of odd(psi1b), events and cuts held fixed
    Lattice lat = Lattice::chain(2);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    Params params{1.0, 1.0, 0.5};
    Rng rng(7);
    std::vector<std::uint8_t> bits{0, 0};
    auto p1a = build_colouring(reg, SourceSet::empty(), {}, bits);
    auto p1b = build_colouring(reg, SourceSet::pair({0, 0.25}, {0, 0.75}), {}, bits);
    REQUIRE(p1a.valid());
    REQUIRE(p1b.valid());
    CHECK(p1b.odd_measure() == doctest::Approx(0.5));
    int checked = 0;
    for (int rep = 0; rep < 600 && checked < 80; ++rep) {
        auto c2 = sample_bridges_ghosts(reg, params, rng);
        auto b2 = draw_wbits(reg, rng);
        auto cuts = sample_cuts(reg, params.delta, rng);
        auto p2 = build_colouring(reg, SourceSet::empty(), c2, b2);
        if (!p2.valid()) continue;
        ConnectivityIndex small(p1a, p2, cuts);
        ConnectivityIndex big(p1b, p2, cuts);
        ++checked;
        std::vector<Point> pts{{0, 0.1}, {0, 0.5}, {1, 0.3}, {1, 0.8}};
        for (const auto& a : pts)
            for (const auto& b : pts)
                if (small.connected(a, b)) CHECK(big.connected(a, b));
    }
    CHECK(checked > 20);
}

TEST_CASE("switch map is an involution and preserves weights and the union") {
    Lattice lat = Lattice::chain(2);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    Params params{1.3, 1.0, 0.7};
    Rng rng(11);
    SitePoint x = SitePoint::at({0, 0.2});
    SitePoint y = SitePoint::at({1, 0.6});
    SourceSet A = SourceSet::empty();
    SourceSet B = SourceSet::pair({0, 0.4}, {1, 0.9});
    int done = 0, checked_pairs = 0;
    while (done < 400 && checked_pairs < 4000) {
        ++checked_pairs;
        Draw d = draw_pair(reg, params, A, B, rng);
        if (!d.p1.valid() || !d.p2.valid()) continue;
        auto pi = earliest_open_route(d.p1, d.p2, d.cuts, x, y);
        if (!pi) continue;
        ++done;
        auto [r1, r2] = switch_along(d.p1, d.p2, *pi, x, y);
        REQUIRE(r1.valid());
        REQUIRE(r2.valid());

        // union preserved
        auto ub = [](const Colouring& a, const Colouring& b) {
            std::vector<Bridge> u = a.events().bridges;
            u.insert(u.end(), b.events().bridges.begin(), b.events().bridges.end());
            std::sort(u.begin(), u.end(), [](const Bridge& p, const Bridge& q) {
                return p.edge != q.edge ? p.edge < q.edge : p.t < q.t;
            });
            return u;
        };
        CHECK(ub(r1, r2) == ub(d.p1, d.p2));

        // switched-weights identity, exact
        double lq = d.p1.log_reduced_weight(params.delta) + d.p2.log_reduced_weight(params.delta) -
                    4.0 * params.delta * doubly_even_measure_on(*pi, d.p1, d.p2);
        double lr = r1.log_reduced_weight(params.delta) + r2.log_reduced_weight(params.delta) -
                    4.0 * params.delta * doubly_even_measure_on(*pi, r1, r2);
        CHECK(std::abs(lq - lr) < 1e-10 * std::max(1.0, std::abs(lq)));

        // involution
        auto [q1, q2] = switch_along(r1, r2, *pi, x, y);
        CHECK(q1.events().bridges == d.p1.events().bridges);
        CHECK(q1.events().ghosts == d.p1.events().ghosts);
        CHECK(q2.events().bridges == d.p2.events().bridges);
        CHECK(q2.events().ghosts == d.p2.events().ghosts);
        CHECK(q1.sources().points == d.p1.sources().points);
        CHECK(q2.sources().points == d.p2.sources().points);
        CHECK(q1.even_measure() == doctest::Approx(d.p1.even_measure()).epsilon(1e-12));
        CHECK(q2.even_measure() == doctest::Approx(d.p2.even_measure()).epsilon(1e-12));
    }
    CHECK(done >= 200);
}

TEST_CASE("switching identity holds for trivial and nontrivial cases") {
    Region reg = Region::box(Lattice(1, 0, SpatialBoundary::free), 1.0, TimeTopology::circle);
    Params params{0.0, 1.0, 0.5};
    SUBCASE("x equals y is trivial") {
        auto rep = verify_switching(reg, SourceSet::empty(), SourceSet::empty(),
                                    SitePoint::at({0, 0.3}), SitePoint::at({0, 0.3}), params,
                                    opts(20000, 3, 200));
        CHECK(std::abs(rep.z) < 3.5);
        CHECK(rep.lhs == doctest::Approx(rep.rhs).epsilon(0.05));
    }
    SUBCASE("one vertex, B empty") {
        auto rep = verify_switching(reg, SourceSet::empty(), SourceSet::empty(),
                                    SitePoint::at({0, 0.0}), SitePoint::at({0, 0.5}), params,
                                    opts(60000, 4, 201));
        CHECK(std::abs(rep.z) < 3.5);
    }
    SUBCASE("two vertices with a connectivity function") {
        Lattice lat = Lattice::chain(2);
        Region reg2 = Region::box(lat, 1.0, TimeTopology::circle);
        Params p2{1.0, 1.0, 0.5};
        ConnectivityFn F = [](const ConnectivityIndex& idx) {
            return idx.connected_to_ghost({1, 0.25}) ? 1.0 : 0.0;
        };
        auto rep = verify_switching(reg2, SourceSet::empty(), SourceSet::pair({0, 0.4}, {1, 0.8}),
                                    SitePoint::at({0, 0.1}), SitePoint::at({1, 0.6}), p2,
                                    opts(60000, 5, 202), F);
        CHECK(std::abs(rep.z) < 3.5);
    }
    SUBCASE("ghost endpoint y = Gamma") {
        auto rep = verify_switching(reg, SourceSet::empty(), SourceSet::empty(),
                                    SitePoint::at({0, 0.3}), SitePoint::ghost(), params,
                                    opts(60000, 6, 203));
        CHECK(std::abs(rep.z) < 3.5);
    }
}
