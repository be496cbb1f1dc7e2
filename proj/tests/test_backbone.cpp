#include "doctest.h"

#include <cmath>

#include "sti/backbone/backbone.hpp"
#include "sti/oracle/oracle.hpp"

using namespace sti;

namespace {

McOptions opts(std::int64_t n, std::uint64_t seed, std::uint64_t op) {
    McOptions o;
    o.n_samples = n;
    o.seed = seed;
    o.op_id = op;
    return o;
}

}  // namespace

TEST_CASE("empty sources give the empty backbone") {
    Region reg = Region::box(Lattice(1, 0, SpatialBoundary::free), 1.0, TimeTopology::circle);
    std::uint8_t bit[1] = {0};
    auto psi = build_colouring(reg, SourceSet::empty(), {}, bit);
    CHECK(extract_backbone(psi).empty());
}

TEST_CASE("two sources on one interval give a single covering path") {
    Region reg = Region::box(Lattice(1, 0, SpatialBoundary::free), 1.0, TimeTopology::interval);
    auto psi = build_colouring(reg, SourceSet::pair({0, 0.25}, {0, 0.75}), {},
                               std::span<const std::uint8_t>{});
    REQUIRE(psi.valid());
    Backbone bb = extract_backbone(psi);
    REQUIRE(bb.paths.size() == 1);
    CHECK(bb.paths[0].start == Point{0, 0.25});
    CHECK(bb.paths[0].end == Point{0, 0.75});
    CHECK(!bb.paths[0].to_ghost);
    CHECK(bb.total_length(1.0) == doctest::Approx(0.5));
    auto leftover = decompose_leftover(psi, bb);
    CHECK(leftover.n_cycles == 0);
    CHECK(leftover.n_ghost_cycles == 0);
}

TEST_CASE("a lone source walks to the ghost when gamma > 0") {
    Region reg = Region::box(Lattice(1, 0, SpatialBoundary::free), 1.0, TimeTopology::circle);
    Configuration bg;
    bg.ghosts = {{0, 0.6}};
    std::uint8_t bit[1] = {0};
    auto psi = build_colouring(reg, SourceSet::single({0, 0.2}), bg, bit);
    REQUIRE(psi.valid());
    Backbone bb = extract_backbone(psi);
    REQUIRE(bb.paths.size() == 1);
    CHECK(bb.paths[0].to_ghost);
    CHECK(bb.paths[0].end == Point{0, 0.6});
}

TEST_CASE("extraction is deterministic and leftovers decompose on random instances") {
    Lattice lat(1, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 1.2, TimeTopology::circle);
    Params params{1.6, 1.0, 0.7};
    Rng rng(71);
    int valid = 0, with_cycles = 0, with_ghost_cycles = 0;
    for (int rep = 0; rep < 500; ++rep) {
        SourceSet A;
        int which = static_cast<int>(rng.uniform_int(3));
        if (which == 1) A = SourceSet::pair({0, 0.3}, {2, 0.9});
        if (which == 2) A = SourceSet::of({{0, 0.3}, {1, 0.1}, {1, 0.8}, {2, 0.6}});
        auto bg = sample_bridges_ghosts(reg, params, rng, A.times());
        auto bits = draw_wbits(reg, rng);
        auto psi = build_colouring(reg, A, bg, bits);
        if (!psi.valid()) continue;
        ++valid;
        Backbone bb = extract_backbone(psi);
        Backbone bb2 = extract_backbone(psi);
        CHECK(bb == bb2);
        CHECK(backbone_compatible(A, bb));
        // every source appears as an endpoint
        std::size_t nonghost = 0;
        for (const auto& p : bb.paths) nonghost += p.to_ghost ? 1 : 2;
        CHECK(nonghost == A.size());
        auto leftover = decompose_leftover(psi, bb);  // throws on anomaly
        with_cycles += leftover.n_cycles > 0;
        with_ghost_cycles += leftover.n_ghost_cycles > 0;
        // backbone length is bounded by the odd measure
        CHECK(bb.total_length(1.2) <= psi.odd_measure() + 1e-9);
    }
    CHECK(valid > 40);
    CHECK(with_cycles > 0);
    CHECK(with_ghost_cycles > 0);
}

TEST_CASE("cut and concatenate invert each other") {
    Lattice lat(1, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    Params params{1.5, 1.0, 0.5};
    Rng rng(73);
    int done = 0;
    while (done < 50) {
        SourceSet A = SourceSet::pair({0, 0.2}, {1, 0.7});
        auto bg = sample_bridges_ghosts(reg, params, rng, A.times());
        auto psi = build_colouring(reg, A, bg, rng);
        if (!psi.valid()) continue;
        Backbone bb = extract_backbone(psi);
        if (bb.paths.empty() || bb.paths[0].steps.empty()) continue;
        const auto& s = bb.paths[0].steps[0];
        double lo = s.increasing ? s.from : s.to;
        double hi = s.increasing ? s.to : s.from;
        double span = hi < lo ? hi + 1.0 - lo : hi - lo;
        double mid = lo + span / 2;
        if (mid >= 1.0) mid -= 1.0;
        Point x{s.vertex, mid};
        auto [n1, n2] = cut_backbone(bb, x, 1.0);
        CHECK(n1.paths.back().end == x);
        CHECK(n2.paths.front().start == x);
        Backbone glued = concat_backbones(n1, n2);
        CHECK(glued == bb);
        ++done;
    }
    Backbone none;
    CHECK_THROWS_AS(cut_backbone(none, {0, 0.5}, 1.0), std::domain_error);
}

TEST_CASE("backbone weight: exact special cases") {
    Region reg = Region::box(Lattice(1, 0, SpatialBoundary::free), 1.0, TimeTopology::circle);
    Backbone none;
    auto w = backbone_weight(reg, none, SourceSet::empty(), {0, 1, 0}, opts(10, 1, 60));
    CHECK(w.value == 1.0);
    CHECK(w.exact);
    // incompatible: nu empty but A nonempty
    auto w0 = backbone_weight(reg, none, SourceSet::single({0, 0.5}), {0, 1, 0.5},
                              opts(10, 1, 61));
    CHECK(w0.value == 0.0);
    // delta = 0 makes every partition ratio 1
    Backbone one;
    one.paths.push_back({{0, 0.1}, {0, 0.4}, false, {{0, 0.1, 0.4, true}}});
    auto w1 = backbone_weight(reg, one, SourceSet::pair({0, 0.1}, {0, 0.4}),
                              {0.7, 0.0, 0.5}, opts(10, 1, 62));
    CHECK(w1.value == 1.0);
    CHECK(w1.exact);
}

TEST_CASE("backbone representation reproduces the correlation (single vertex)") {
    // lambda = 0: E(w^{ab}(xi)) must match the single-spin oracle
    Region reg = Region::box(Lattice(1, 0, SpatialBoundary::free), 1.0, TimeTopology::circle);
    Params p{0.0, 1.0, 0.8};
    auto rep = verify_backbone_representation(reg, SourceSet::pair({0, 0.2}, {0, 0.7}), p,
                                              opts(4000, 3, 63));
    REQUIRE(rep.oracle.has_value());
    CHECK(std::abs(rep.z_backbone_vs_oracle) < 3.5);
    CHECK(std::abs(rep.z_backbone_vs_parity) < 3.5);
}

TEST_CASE("ghost-pair contribution vanishes when gamma = 0") {
    Lattice lat = Lattice::chain(2);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    Params p{1.2, 1.0, 0.0};
    auto rep = verify_backbone_representation(reg, SourceSet::pair({0, 0.0}, {1, 0.5}), p,
                                              opts(3000, 5, 64));
    CHECK(rep.ghost_pair_fraction == 0.0);
    REQUIRE(rep.oracle.has_value());
    CHECK(std::abs(rep.z_backbone_vs_oracle) < 3.5);
}

TEST_CASE("weight factorization under cutting (two vertices)") {
    // w^A(nu) = w^{A1 u x}(nu1) * w^{A2 u x}_{K minus nu1}(nu2) within errors
    Lattice lat = Lattice::chain(2);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    Params p{1.0, 1.0, 0.6};
    Rng rng(77);
    int done = 0;
    while (done < 3) {
        SourceSet A = SourceSet::pair({0, 0.2}, {1, 0.7});
        auto bg = sample_bridges_ghosts(reg, p, rng, A.times());
        auto psi = build_colouring(reg, A, bg, rng);
        if (!psi.valid()) continue;
        Backbone bb = extract_backbone(psi);
        if (bb.paths.size() != 1 || bb.paths[0].steps.empty()) continue;
        const auto& s = bb.paths[0].steps[0];
        double lo = s.increasing ? s.from : s.to;
        double hi = s.increasing ? s.to : s.from;
        double span = hi < lo ? hi + 1.0 - lo : hi - lo;
        if (span < 0.1) continue;
        double mid = lo + span / 2;
        if (mid >= 1.0) mid -= 1.0;
        Point x{s.vertex, mid};
        auto [n1, n2] = cut_backbone(bb, x, 1.0);
        ++done;

        auto whole = backbone_weight(reg, bb, A, p, opts(20000, 7, 70 + done));
        SourceSet A1 = SourceSet::of({bb.paths[0].start, x});
        auto w1 = backbone_weight(reg, n1, A1, p, opts(20000, 8, 80 + done));
        Region r1 = reg.subtract(n1.segments());
        SourceSet A2 = n2.paths[0].to_ghost ? SourceSet::single(x)
                                            : SourceSet::of({x, bb.paths[0].end});
        auto w2 = backbone_weight(r1, n2, A2, p, opts(20000, 9, 90 + done));
        double prod = w1.value * w2.value;
        double perr = std::abs(prod) * std::sqrt(std::pow(w1.std_error / w1.value, 2) +
                                                 std::pow(w2.std_error / w2.value, 2));
        CHECK(std::abs(whole.value - prod) < 3.5 * combine_se(whole.std_error, perr));
    }
}
