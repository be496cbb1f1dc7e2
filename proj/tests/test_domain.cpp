#include "doctest.h"

#include <cmath>

#include "sti/domain/events.hpp"
#include "sti/domain/interval_set.hpp"
#include "sti/domain/lattice.hpp"
#include "sti/domain/point.hpp"
#include "sti/domain/region.hpp"

using namespace sti;

TEST_CASE("interval set: whole circle basics") {
    auto s = IntervalSet::whole(TimeTopology::circle, 2.0);
    CHECK(s.is_full_circle());
    CHECK(s.count() == 1);
    CHECK(s.measure() == doctest::Approx(2.0));
    CHECK(s.arcs().size() == 1);
    CHECK(s.arcs()[0].full);
}

TEST_CASE("subtract interior arc from full circle wraps the remainder") {
    auto s = IntervalSet::whole(TimeTopology::circle, 1.0);
    s.subtract_closed(0.2, 0.5);
    CHECK(s.count() == 1);
    CHECK(!s.is_full_circle());
    CHECK(s.joined_at_zero());
    auto arcs = s.arcs();
    REQUIRE(arcs.size() == 1);
    CHECK(arcs[0].start == doctest::Approx(0.5));
    CHECK(arcs[0].end == doctest::Approx(1.2));
    CHECK(s.measure() == doctest::Approx(0.7));
}

TEST_CASE("subtracting a segment interior to an interval splits it") {
    auto s = IntervalSet::whole(TimeTopology::interval, 1.0);
    CHECK(s.count() == 1);
    s.subtract_closed(0.3, 0.4);
    CHECK(s.count() == 2);
    CHECK(s.measure() == doctest::Approx(0.9));
    s.subtract_closed(0.6, 0.7);
    CHECK(s.count() == 3);
}

TEST_CASE("wrapped subtraction across zero") {
    auto s = IntervalSet::whole(TimeTopology::circle, 1.0);
    s.subtract_closed(0.9, 0.1);  // crosses 0
    CHECK(s.count() == 1);
    CHECK(!s.joined_at_zero());
    auto arcs = s.arcs();
    REQUIRE(arcs.size() == 1);
    CHECK(arcs[0].start == doctest::Approx(0.1));
    CHECK(arcs[0].end == doctest::Approx(0.9));
}

TEST_CASE("cut exactly at the seam never fakes a wrap join") {
    auto s = IntervalSet::whole(TimeTopology::circle, 1.0);
    s.subtract_closed(0.4, 1.0);  // removes [0.4, 1.0] incl. the point 0
    CHECK(s.count() == 1);
    CHECK(!s.joined_at_zero());
    auto arcs = s.arcs();
    CHECK(arcs[0].start == doctest::Approx(0.0));
    CHECK(arcs[0].end == doctest::Approx(0.4));
    // further interior cut keeps both remainders un-joined
    s.subtract_closed(0.1, 0.2);
    CHECK(s.count() == 2);
    CHECK(!s.joined_at_zero());
}

TEST_CASE("measure is conserved by subtraction") {
    Rng rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        double beta = 0.5 + rng.uniform() * 3.0;
        auto s = IntervalSet::whole(TimeTopology::circle, beta);
        double removed_expected = 0.0;
        for (int k = 0; k < 4; ++k) {
            double a = rng.uniform(0.0, beta);
            double len = rng.uniform(0.0, beta / 6);
            double before = s.measure();
            // intersect against current set to know how much is actually removed
            IntervalSet cut = IntervalSet::from_pieces(
                TimeTopology::circle, beta,
                a + len <= beta
                    ? std::vector<IntervalSet::Piece>{{a, a + len}}
                    : std::vector<IntervalSet::Piece>{{a, beta}, {0.0, a + len - beta}});
            removed_expected = s.intersect(cut).measure();
            s.subtract_closed(a, a + len);
            CHECK(before - s.measure() == doctest::Approx(removed_expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("interval count matches a from-scratch recount under random cuts") {
    Rng rng(13);
    for (int rep = 0; rep < 100; ++rep) {
        auto s = IntervalSet::whole(TimeTopology::circle, 1.0);
        for (int k = 0; k < 5; ++k) {
            double a = rng.uniform();
            double len = 0.01 + rng.uniform() * 0.1;
            s.subtract_closed(a, a + len);
        }
        // recount: number of maximal arcs
        CHECK(s.count() == static_cast<int>(s.arcs().size()));
        double m = 0;
        for (const auto& a : s.arcs()) m += a.length();
        CHECK(m == doctest::Approx(s.measure()));
    }
}

TEST_CASE("measures: empty set, weight, additivity") {
    auto s = IntervalSet::empty_set(TimeTopology::circle, 1.0);
    CHECK(s.measure() == 0.0);
    CHECK(s.count() == 0);
    // one interval [0.25, 0.75) at weight 2 measures 1.0
    Lattice lat = Lattice::chain(2);
    Region reg = Region::box(lat, 1.0, TimeTopology::interval)
                     .subtract({{0, 0.0, 0.25}, {0, 0.75, 1.0}});
    double w[2] = {2.0, 0.0};
    CHECK(reg.k_measure(w) == doctest::Approx(1.0).epsilon(1e-12));
    // additivity over disjoint pieces
    auto a = IntervalSet::from_pieces(TimeTopology::circle, 1.0, {{0.1, 0.3}});
    auto b = IntervalSet::from_pieces(TimeTopology::circle, 1.0, {{0.5, 0.9}});
    auto both = IntervalSet::from_pieces(TimeTopology::circle, 1.0, {{0.1, 0.3}, {0.5, 0.9}});
    CHECK(both.measure() == a.measure() + b.measure());
}

TEST_CASE("point order is a strict total order") {
    CHECK(point_order({0, 0.3}, {0, 0.3}) == Order::equal);
    CHECK(point_order({0, 0.3}, {0, 0.7}) == Order::less);
    CHECK(point_order({0, 0.9}, {1, 0.1}) == Order::less);
    Rng rng(17);
    std::vector<Point> pts;
    for (int i = 0; i < 50; ++i) pts.push_back({static_cast<std::int32_t>(rng.uniform_int(4)), rng.uniform()});
    for (const auto& x : pts)
        for (const auto& y : pts) {
            auto xy = point_order(x, y), yx = point_order(y, x);
            if (xy == Order::less) CHECK(yx == Order::greater);
            if (xy == Order::equal) CHECK(yx == Order::equal);
            for (const auto& z : pts)
                if (xy == Order::less && point_order(y, z) == Order::less)
                    CHECK(point_order(x, z) == Order::less);
        }
}

TEST_CASE("periodic lattice is degree regular with 2d neighbors") {
    for (int d = 1; d <= 3; ++d) {
        Lattice lat(d, 1, SpatialBoundary::periodic);
        for (std::int32_t v = 0; v < lat.vertex_count(); ++v)
            CHECK(static_cast<int>(lat.neighbors(v).size()) == 2 * d);
        // adjacency symmetric by construction; edge count = d * side^d
        int side = 2 * 1 + 1;
        int exp_edges = d * static_cast<int>(std::pow(side, d));
        CHECK(lat.edge_count() == exp_edges);
    }
    CHECK_THROWS(Lattice(1, 0, SpatialBoundary::periodic));
    Lattice single(1, 0, SpatialBoundary::free);
    CHECK(single.vertex_count() == 1);
    CHECK(single.edge_count() == 0);
}

TEST_CASE("periodic wrap joins coordinates differing by 2n") {
    Lattice lat(1, 2, SpatialBoundary::periodic);
    std::array<int, Lattice::max_dim> cminus{}, cplus{};
    cminus[0] = -2;
    cplus[0] = 2;
    CHECK(lat.edge_between(lat.index(cminus), lat.index(cplus)) >= 0);
}

TEST_CASE("region subtraction restores invariants and conserves measure") {
    Lattice lat(1, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 2.0, TimeTopology::circle);
    CHECK(reg.interval_count() == 3);
    CHECK(reg.full_vertices().size() == 3);

    std::vector<TimeSeg> nu{{0, 0.2, 0.5}};
    Region cut = reg.subtract(nu);
    CHECK(cut.full_vertices().size() == 2);
    CHECK(cut.vertex_line(0).count() == 1);
    CHECK(reg.k_measure() ==
          doctest::Approx(cut.k_measure() + 0.3));
    // subtract empty set: identity
    Region same = reg.subtract({});
    CHECK(same.k_measure() == reg.k_measure());
    CHECK(same.interval_count() == reg.interval_count());
    // escaping path
    Region small = reg.subtract({{0, 0.0, 1.9}});
    CHECK_THROWS(small.subtract({{0, 0.5, 1.0}}));
}

TEST_CASE("zero intensity yields no events") {
    Lattice lat(1, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 2.0, TimeTopology::circle);
    Rng rng(1);
    CHECK(sample_events(reg, 0.0, EventSupport::vertices, rng).empty());
    CHECK_THROWS(sample_events(reg, -1.0, EventSupport::vertices, rng));
}

TEST_CASE("poisson event counts have the right mean (intensity x measure)") {
    // one vertex, K_v = [0,2), intensity 3 -> mean count 6
    Lattice lat(1, 0, SpatialBoundary::free);
    Region reg = Region::box(lat, 2.0, TimeTopology::circle);
    Rng rng(23);
    const int n = 10000;
    double s = 0;
    for (int i = 0; i < n; ++i)
        s += static_cast<double>(sample_events(reg, 3.0, EventSupport::vertices, rng).size());
    double mean = s / n;
    double se = std::sqrt(6.0 / n);
    CHECK(std::abs(mean - 6.0) < 4 * se);
}

TEST_CASE("disjoint intervals receive independent poisson counts") {
    // two maximal intervals of lengths 1 and 2 at intensity 1
    Lattice lat(1, 0, SpatialBoundary::free);
    Region reg = Region::box(lat, 4.0, TimeTopology::circle);
    // build [0,1) and [1.2, 3.2): lengths 1 and 2
    Region r2 = reg.subtract({{0, 1.0, 1.2}, {0, 3.2, 0.0}});
    REQUIRE(r2.vertex_line(0).count() == 2);

    Rng rng(29);
    const int n = 20000;
    double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
    // chi-square against independent Poisson(1) x Poisson(2) on 0..4 x 0..6
    const int c1 = 5, c2 = 7;
    std::vector<double> joint(c1 * c2, 0.0);
    for (int i = 0; i < n; ++i) {
        auto ev = sample_events(r2, 1.0, EventSupport::vertices, rng);
        int k1 = 0, k2 = 0;
        for (auto& [v, t] : ev) (t < 1.0 ? k1 : k2)++;
        s1 += k1;
        s2 += k2;
        s11 += k1 * k1;
        s22 += k2 * k2;
        s12 += static_cast<double>(k1) * k2;
        if (k1 < c1 && k2 < c2) joint[k1 * c2 + k2] += 1.0;
    }
    double m1 = s1 / n, m2 = s2 / n;
    CHECK(std::abs(m1 - 1.0) < 4 * std::sqrt(1.0 / n));
    CHECK(std::abs(m2 - 2.0) < 4 * std::sqrt(2.0 / n));
    double cov = s12 / n - m1 * m2;
    CHECK(std::abs(cov) < 5 * std::sqrt(2.0 / n));  // var(k1 k2)^1/2 approx sqrt(2)

    auto pois = [](double mu, int k) {
        double p = std::exp(-mu);
        for (int i = 1; i <= k; ++i) p *= mu / i;
        return p;
    };
    double chi2 = 0;
    int dof = 0;
    for (int a = 0; a < c1; ++a)
        for (int b = 0; b < c2; ++b) {
            double expct = n * pois(1.0, a) * pois(2.0, b);
            if (expct < 5) continue;
            chi2 += (joint[a * c2 + b] - expct) * (joint[a * c2 + b] - expct) / expct;
            ++dof;
        }
    // generous bound: chi2 ~ dof +- sqrt(2 dof); 5 sigma
    CHECK(chi2 < dof + 5 * std::sqrt(2.0 * dof));
}

TEST_CASE("sampled configurations have distinct in-region times") {
    Lattice lat(1, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    Params p{1.0, 1.0, 0.5};
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        auto c = sample_bridges_ghosts(reg, p, rng);
        std::vector<double> all;
        for (auto& b : c.bridges) {
            all.push_back(b.t);
            CHECK(reg.edge_overlap(b.edge).contains(b.t));
        }
        for (auto& g : c.ghosts) {
            all.push_back(g.t);
            CHECK(reg.vertex_line(g.vertex).contains(g.t));
        }
        std::sort(all.begin(), all.end());
        CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    }
}
