#include "doctest.h"

#include <cmath>

#include "sti/observables/inequalities.hpp"
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

Region single_vertex(double beta) {
    return Region::box(Lattice(1, 0, SpatialBoundary::free), beta, TimeTopology::circle);
}

}  // namespace

TEST_CASE("magnetization: zero field and the long-beta single spin") {
    Region reg = single_vertex(20.0);
    CHECK(magnetization(reg, {1, 1, 0}, opts(10, 1, 300)).value == 0.0);
    Params p{0.0, 1.0, 1.0};
    auto m = magnetization(reg, p, opts(60000, 2, 301));
    double exact = std::tanh(20.0 * std::sqrt(2.0)) / std::sqrt(2.0);
    CHECK(exact == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(std::abs(m.value - exact) < 3 * m.std_error);
}

TEST_CASE("truncated two-point function") {
    Lattice lat(1, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    SUBCASE("coincident points give 1 - M^2") {
        Params p{1.0, 1.0, 0.5};
        auto t = truncated_two_point(reg, {0, 0.25}, {0, 0.25}, p, opts(30000, 3, 302));
        auto m = magnetization(reg, p, opts(30000, 3, 303));
        CHECK(std::abs(t.value - (1 - m.value * m.value)) <
              3.5 * combine_se(t.std_error, 2 * m.value * m.std_error));
    }
    SUBCASE("lambda = 0 decouples distinct vertices") {
        Params p{0.0, 1.0, 0.7};
        auto t = truncated_two_point(reg, {0, 0.25}, {1, 0.5}, p, opts(60000, 4, 304));
        CHECK(std::abs(t.value) < 3.5 * t.std_error);
    }
    SUBCASE("GKS positivity on random small instances") {
        Rng rng(5);
        for (int rep = 0; rep < 5; ++rep) {
            Params p{rng.uniform(0.3, 1.5), 1.0, rng.uniform(0.0, 0.8)};
            auto t = truncated_two_point(reg, {0, 0.1}, {1, 0.6}, p,
                                         opts(30000, 6 + rep, 310 + rep));
            CHECK(t.value >= -3.0 * t.std_error);
        }
    }
}

TEST_CASE("susceptibility approximates the field derivative of M") {
    Region reg = single_vertex(1.5);
    Params p{0.0, 1.0, 0.6};
    auto chi = susceptibility(reg, p, 64, opts(150000, 7, 320));
    // oracle derivative by central differences
    double dg = 1e-4;
    Params pp = p, pm = p;
    pp.gamma += dg;
    pm.gamma -= dg;
    double exact = (oracle::single_spin_magnetization(pp, 1.5) -
                    oracle::single_spin_magnetization(pm, 1.5)) /
                   (2 * dg);
    CHECK(std::abs(chi.chi.value - exact) <
          3.5 * chi.chi.std_error + 2.0 * chi.quadrature_gap + 0.05 * exact);
    CHECK(chi.chi.value >= 0.0);
    // chi <= M / gamma
    auto m = magnetization(reg, p, opts(60000, 8, 321));
    CHECK(chi.chi.value <= m.value / p.gamma + 3.5 * chi.chi.std_error);
    // halving the grid moves the value by less than a standard error
    CHECK(chi.quadrature_gap < std::max(chi.chi.std_error, 1e-3));
}

TEST_CASE("derivative estimators match oracle finite differences (3-ring)") {
    Lattice lat(1, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    Params p{0.9, 1.0, 0.5};
    DerivativeOptions dopt;
    dopt.mc = opts(12000, 9, 330);
    dopt.time_points = 32;
    auto est = derivative_estimators(reg, p, dopt);

    auto oracle_m = [&](Params q) {
        oracle::DenseHamiltonian H(lat, q);
        return oracle::magnetization(H, 1.0, TimeTopology::circle);
    };
    double d = 2e-4;
    auto fd = [&](double Params::* field) {
        Params qp = p, qm = p;
        qp.*field += d;
        qm.*field -= d;
        return (oracle_m(qp) - oracle_m(qm)) / (2 * d);
    };
    double fg = fd(&Params::gamma), fl = fd(&Params::lambda), fdd = fd(&Params::delta);

    auto close = [](const Estimate& e, double target) {
        double tol = std::max(3.0 * e.std_error, 0.05 * std::abs(target)) + 2e-3;
        return std::abs(e.value - target) < tol;
    };
    CHECK(close(est.dM_dgamma, fg));
    CHECK(close(est.dM_dlambda, fl));
    CHECK(close(est.dM_ddelta, fdd));
    CHECK(est.dM_ddelta.value < 0.0);

    // the three bounds
    auto m = magnetization(reg, p, opts(30000, 10, 333));
    CHECK(est.dM_dgamma.value <=
          m.value / p.gamma + 3.0 * combine_se(est.dM_dgamma.std_error, m.std_error / p.gamma));
    double dge = est.dM_dgamma.value;
    CHECK(est.dM_dlambda.value <=
          2.0 * 1 * m.value * dge +
              3.0 * combine_se(est.dM_dlambda.std_error,
                               2 * m.value * est.dM_dgamma.std_error));
    double bound = 2.0 * m.value / (1.0 - m.value * m.value) * dge;
    CHECK(-est.dM_ddelta.value <= bound + 3.0 * combine_se(est.dM_ddelta.std_error,
                                                           2.0 * est.dM_dgamma.std_error));
}

TEST_CASE("GHS: decoupled triple vanishes; M is concave in gamma") {
    Lattice lat(1, 1, SpatialBoundary::periodic);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    SUBCASE("lambda = 0, distinct vertices") {
        auto rep = check_ghs(reg, {0, 0.2}, {1, 0.5}, {2, 0.8}, {0.0, 1.0, 0.5},
                             opts(60000, 11, 340));
        CHECK(std::abs(rep.triple.value) < 3.5 * rep.triple.std_error);
        CHECK(rep.concave_3se);
    }
    SUBCASE("interacting triple is nonpositive") {
        auto rep = check_ghs(reg, {0, 0.2}, {1, 0.5}, {2, 0.8}, {1.2, 1.0, 0.5},
                             opts(60000, 12, 341));
        CHECK(rep.triple_nonpositive_3se);
        CHECK(rep.concave_3se);
    }
}

TEST_CASE("Simon and Lieb inequalities on a free 3-chain") {
    Lattice lat(1, 1, SpatialBoundary::free);
    Region reg = Region::box(lat, 1.0, TimeTopology::circle);
    Params p{1.0, 1.0, 0.0};
    SeparatingSet T{{{1, 0.0, 1.0}}};  // the whole middle line
    Point a{0, 0.0}, b{2, 0.5};
    CHECK(separates(reg, a, b, T));
    auto rep = check_simon_lieb(reg, a, b, T, 0.5, p, 16, opts(40000, 13, 350));
    CHECK(rep.simon_holds_3se);
    CHECK(rep.lieb_holds_3se);
    CHECK(rep.lieb_below_simon_3se);
    CHECK(rep.rhs_lieb.value <= rep.rhs_simon.value + 3.5 * combine_se(rep.rhs_lieb.std_error,
                                                                       rep.rhs_simon.std_error));
    // epsilon larger than every interval of T
    CHECK_THROWS_AS(check_simon_lieb(reg, a, b, T, 1.5, p, 8, opts(100, 14, 351)),
                    std::invalid_argument);
    // a non-separating set
    SeparatingSet bad{{{1, 0.1, 0.4}}};
    CHECK(!separates(reg, a, b, bad));
    CHECK_THROWS_AS(check_simon_lieb(reg, a, b, bad, 0.2, p, 8, opts(100, 15, 352)),
                    std::invalid_argument);
    // gamma must vanish
    CHECK_THROWS_AS(check_simon_lieb(reg, a, b, T, 0.5, {1, 1, 0.5}, 8, opts(100, 16, 353)),
                    std::invalid_argument);
}

TEST_CASE("main PDI holds and its four-term decomposition reproduces M") {
    SUBCASE("single vertex (lambda = 0 reduces to M <= gamma chi + M^3)") {
        Region reg = single_vertex(1.0);
        PdiOptions o;
        o.mc = opts(20000, 17, 360);
        o.time_points = 32;
        o.decomposition_samples = 20000;
        auto rep = check_main_pdi(reg, {0.0, 1.0, 0.8}, o);
        CHECK(rep.holds_3se);
        CHECK(std::abs(rep.decomposition_z) < 3.5);
        // R0 should match M^3
        double m3 = std::pow(rep.M.value, 3);
        CHECK(std::abs(rep.term_R0.value - m3) <
              3.5 * (rep.term_R0.std_error + 3 * rep.M.value * rep.M.value * rep.M.std_error));
    }
    SUBCASE("interacting 3-ring") {
        Lattice lat(1, 1, SpatialBoundary::periodic);
        Region reg = Region::box(lat, 1.0, TimeTopology::circle);
        PdiOptions o;
        o.mc = opts(8000, 18, 361);
        o.time_points = 24;
        o.decomposition_samples = 12000;
        auto rep = check_main_pdi(reg, {1.0, 1.0, 0.5}, o);
        CHECK(rep.holds_3se);
        CHECK(std::abs(rep.decomposition_z) < 3.5);
        CHECK(rep.term_T.value >= 0);
        CHECK(rep.term_Rh.value >= 0);
        CHECK(rep.term_Rv.value >= 0);
    }
}

TEST_CASE("mass fit: exact exponential and edge cases") {
    std::vector<std::pair<double, Estimate>> pts;
    for (int k = 1; k <= 6; ++k)
        pts.emplace_back(k, Estimate::exactly(std::exp(-0.5 * k)));
    auto fit = mass_estimate(pts);
    CHECK(fit.mass.value == doctest::Approx(0.5).epsilon(1e-12));

    std::vector<std::pair<double, Estimate>> flat;
    for (int k = 1; k <= 5; ++k) flat.emplace_back(k, Estimate{0.4, 0.004, 1000, false});
    auto f2 = mass_estimate(flat);
    CHECK(std::abs(f2.mass.value) < 3 * f2.mass.std_error);

    std::vector<std::pair<double, Estimate>> few{{1.0, Estimate::exactly(0.5)},
                                                 {2.0, Estimate::exactly(0.25)}};
    CHECK_THROWS(mass_estimate(few));
}
