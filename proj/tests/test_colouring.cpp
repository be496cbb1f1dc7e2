#include "doctest.h"

#include <cmath>

#include "sti/parity/colouring.hpp"

using namespace sti;

namespace {

Region one_vertex_free(double beta) {
    return Region::box(Lattice(1, 0, SpatialBoundary::free), beta, TimeTopology::interval);
}

Region one_vertex_circle(double beta) {
    return Region::box(Lattice(1, 0, SpatialBoundary::free), beta, TimeTopology::circle);
}

}  // namespace

TEST_CASE("no switching points on a free interval: the all-even colouring") {
    Region reg = one_vertex_free(1.0);
    auto psi = build_colouring(reg, SourceSet::empty(), {}, std::span<const std::uint8_t>{});
    CHECK(psi.valid());
    CHECK(psi.even_measure() == doctest::Approx(1.0));
    CHECK(psi.odd_measure() == doctest::Approx(0.0));
    // weight: all-even on |K| = 1 at delta = 1 has del psi = e^2
    double del = psi.reduced_weight(1.0) * std::exp(2.0 * 1.0 * reg.k_measure());
    CHECK(del == doctest::Approx(std::exp(2.0)));
}

TEST_CASE("a single interior source is a parity obstruction") {
    Region reg = one_vertex_free(1.0);
    auto psi = build_colouring(reg, SourceSet::single({0, 0.4}), {},
                               std::span<const std::uint8_t>{});
    CHECK(!psi.valid());
    CHECK(psi.reduced_weight(1.0) == 0.0);
}

TEST_CASE("two sources on one interval force odd exactly between them") {
    Region reg = one_vertex_free(1.0);
    auto psi = build_colouring(reg, SourceSet::pair({0, 0.25}, {0, 0.75}), {},
                               std::span<const std::uint8_t>{});
    REQUIRE(psi.valid());
    CHECK(psi.odd_measure() == doctest::Approx(0.5));
    CHECK(psi.even_measure() == doctest::Approx(0.5));
    CHECK(!psi.odd_after(0, 0.1));
    CHECK(psi.odd_after(0, 0.5));
    CHECK(psi.odd_after(0, 0.25));
    CHECK(!psi.odd_before(0, 0.25));
    // sources at both ends of the interval: all odd, del psi = 1
    auto all_odd = build_colouring(reg, SourceSet::pair({0, 0.0}, {0, 1.0}), {},
                                   std::span<const std::uint8_t>{});
    REQUIRE(all_odd.valid());
    CHECK(all_odd.odd_measure() == doctest::Approx(1.0));
    double del = all_odd.reduced_weight(1.0) * std::exp(2.0 * 1.0 * reg.k_measure());
    CHECK(del == doctest::Approx(1.0));
}

TEST_CASE("full-circle vertex takes its colour from the fair bit") {
    Region reg = one_vertex_circle(2.0);
    std::uint8_t even_bit[1] = {0};
    std::uint8_t odd_bit[1] = {1};
    auto psi0 = build_colouring(reg, SourceSet::empty(), {}, even_bit);
    auto psi1 = build_colouring(reg, SourceSet::empty(), {}, odd_bit);
    REQUIRE(psi0.valid());
    REQUIRE(psi1.valid());
    CHECK(psi0.even_measure() == doctest::Approx(2.0));
    CHECK(psi1.odd_measure() == doctest::Approx(2.0));
}

TEST_CASE("ghost pair on a circle line alternates labels") {
    Region reg = one_vertex_circle(1.0);
    Configuration bg;
    bg.ghosts = {{0, 0.2}, {0, 0.6}};
    std::uint8_t bit[1] = {0};
    auto psi = build_colouring(reg, SourceSet::empty(), bg, bit);
    REQUIRE(psi.valid());
    CHECK(psi.odd_measure() == doctest::Approx(0.4));
    CHECK(!psi.odd_after(0, 0.0));
    CHECK(psi.odd_after(0, 0.2));
    CHECK(!psi.odd_after(0, 0.6));
    CHECK(psi.odd_before(0, 0.6));
    // flipped bit swaps even and odd
    std::uint8_t bit1[1] = {1};
    auto flip = build_colouring(reg, SourceSet::empty(), bg, bit1);
    CHECK(flip.odd_measure() == doctest::Approx(0.6));
}

TEST_CASE("labels alternate at every switching point and nowhere else") {
    Lattice lat(1, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 1.5, TimeTopology::circle);
    Params params{1.4, 1.0, 0.8};
    Rng rng(99);
    int valid_seen = 0;
    for (int rep = 0; rep < 300; ++rep) {
        SourceSet A;
        if (rng.coin()) A = SourceSet::pair({0, 0.125}, {1, 0.5});
        auto bg = sample_bridges_ghosts(reg, params, rng, A.times());
        auto psi = build_colouring(reg, A, bg, rng);
        if (!psi.valid()) continue;
        ++valid_seen;
        for (const auto& ln : psi.lines()) {
            for (const auto& s : psi.line_switches(ln)) {
                CHECK(psi.odd_before(ln.vertex, s.t) != psi.odd_after(ln.vertex, s.t));
            }
        }
        CHECK(psi.even_measure() + psi.odd_measure() == doctest::Approx(reg.k_measure()));
    }
    CHECK(valid_seen > 0);
}

TEST_CASE("parity criterion equals a direct closed-interval count") {
    Lattice lat(1, 1, SpatialBoundary::free);
    Rng rng(7);
    Params params{1.0, 1.0, 0.7};
    for (int rep = 0; rep < 300; ++rep) {
        Region reg = Region::box(lat, 1.0, TimeTopology::circle);
        if (rng.coin()) reg = reg.subtract({{1, 0.1, 0.35}});
        SourceSet A;
        if (rng.coin()) A = SourceSet::pair({0, 0.5}, {2, 0.25});
        auto bg = sample_bridges_ghosts(reg, params, rng, A.times());
        auto psi = build_colouring(reg, A, bg, rng);

        bool expect_valid = true;
        for (std::int32_t v = 0; v < lat.vertex_count(); ++v) {
            const auto& kv = reg.vertex_line(v);
            for (const auto& arc : kv.arcs()) {
                int cnt = 0;
                for (const auto& p : A.points)
                    if (p.vertex == v && kv.closure_contains(p.time, arc)) ++cnt;
                for (const auto& g : bg.ghosts)
                    if (g.vertex == v && kv.closure_contains(g.t, arc)) ++cnt;
                for (const auto& b : bg.bridges) {
                    auto [x, y] = lat.edge(b.edge);
                    if ((x == v || y == v) && kv.closure_contains(b.t, arc)) ++cnt;
                }
                if (cnt & 1) expect_valid = false;
            }
        }
        CHECK(psi.valid() == expect_valid);
    }
}

TEST_CASE("events reconstruct from the label structure") {
    Lattice lat(2, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    Params params{0.8, 1.0, 0.5};
    Rng rng(41);
    int checked = 0;
    for (int rep = 0; rep < 100; ++rep) {
        auto bg = sample_bridges_ghosts(reg, params, rng);
        auto psi = build_colouring(reg, SourceSet::empty(), bg, rng);
        if (!psi.valid()) continue;
        ++checked;
        CHECK(psi.reconstructs_events());
    }
    CHECK(checked > 0);
}

TEST_CASE("sources at region endpoints created by subtraction") {
    // remove [0.2,0.5] from a circle line, then place sources at the cut ends
    Region reg = one_vertex_circle(1.0).subtract({{0, 0.2, 0.5}});
    auto psi = build_colouring(reg, SourceSet::pair({0, 0.5}, {0, 0.2}), {},
                               std::span<const std::uint8_t>{});
    REQUIRE(psi.valid());
    CHECK(psi.odd_measure() == doctest::Approx(0.7));
}
