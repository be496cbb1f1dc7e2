#include "sti/observables/derivatives.hpp"

#include <cmath>
#include <stdexcept>

#include "sti/switching/connectivity.hpp"

namespace sti {

namespace {

void require_assumption(const Region& region, const Params& params) {
    if (region.lattice().boundary() != SpatialBoundary::periodic &&
        region.lattice().vertex_count() > 1)
        throw std::invalid_argument("derivative estimators need the periodic box");
    if (region.topology() != TimeTopology::circle)
        throw std::invalid_argument("derivative estimators need the time circle");
    for (std::int32_t v = 0; v < region.lattice().vertex_count(); ++v)
        if (!region.vertex_line(v).is_full_circle())
            throw std::invalid_argument("derivative estimators need K_v = S");
    if (!(params.gamma > 0.0))
        throw std::invalid_argument("derivative estimators need gamma > 0");
}

std::vector<Point> time_grid(const Region& region, int n_time) {
    std::vector<Point> g;
    const double h = region.beta() / n_time;
    for (std::int32_t v = 0; v < region.lattice().vertex_count(); ++v)
        for (int j = 0; j < n_time; ++j) g.push_back({v, (j + 0.5) * h});
    return g;
}

std::vector<double> forbidden_times(const std::vector<Point>& grid) {
    std::vector<double> f{0.0};
    for (const auto& p : grid) f.push_back(p.time);
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
}

}  // namespace

Estimate estimate_dM_dgamma(const Region& region, const Params& params,
                            const DerivativeOptions& opt) {
    require_assumption(region, params);
    const Point origin{region.lattice().origin(), 0.0};
    const SitePoint o = SitePoint::at(origin), gam = SitePoint::ghost();
    auto grid = time_grid(region, opt.time_points);
    auto forbidden = forbidden_times(grid);
    const double h = region.beta() / opt.time_points;
    const double delta = params.delta;

    BatchTable tab = run_batched(opt.mc.plan(), 2, [&](Rng& rng, double* row) {
        Configuration c1 = sample_bridges_ghosts(region, params, rng, forbidden);
        auto b1 = draw_wbits(region, rng);
        Configuration c2 = sample_bridges_ghosts(region, params, rng, forbidden);
        auto b2 = draw_wbits(region, rng);
        auto cuts = sample_cuts(region, delta, rng, forbidden);
        Colouring p2 = build_colouring(region, SourceSet::empty(), c2, b2);
        double w2 = p2.reduced_weight(delta);
        row[1] = w2;
        if (w2 == 0.0) return;
        double acc = 0.0;
        for (const auto& x : grid) {
            Colouring p1 = build_colouring(region, SourceSet::pair(origin, x), c1, b1);
            double w1 = p1.reduced_weight(delta);
            if (w1 == 0.0) continue;
            ConnectivityIndex idx(p1, p2, cuts);
            if (!idx.connected(o, gam)) acc += w1 * w2;
        }
        row[0] = acc * h;
    });
    return jackknife(tab, [](std::span<const double> m) { return m[0] / (m[1] * m[1]); });
}

Estimate estimate_dM_dlambda(const Region& region, const Params& params,
                             const DerivativeOptions& opt) {
    require_assumption(region, params);
    const Lattice& lat = region.lattice();
    const Point origin{lat.origin(), 0.0};
    const SitePoint o = SitePoint::at(origin), gam = SitePoint::ghost();
    auto grid = time_grid(region, opt.time_points);
    auto forbidden = forbidden_times(grid);
    const double h = region.beta() / opt.time_points;
    const double delta = params.delta;

    BatchTable tab = run_batched(opt.mc.plan(), 2, [&](Rng& rng, double* row) {
        Configuration c1 = sample_bridges_ghosts(region, params, rng, forbidden);
        auto b1 = draw_wbits(region, rng);
        Configuration c2 = sample_bridges_ghosts(region, params, rng, forbidden);
        auto b2 = draw_wbits(region, rng);
        auto cuts = sample_cuts(region, delta, rng, forbidden);
        Colouring p2 = build_colouring(region, SourceSet::empty(), c2, b2);
        double w2 = p2.reduced_weight(delta);
        row[1] = w2;
        if (w2 == 0.0) return;
        double acc = 0.0;
        for (const auto& x : grid) {
            for (std::int32_t ynb : lat.neighbors(x.vertex)) {
                Point y{ynb, x.time};
                // sources {0, x, y} (the ghost absorbs the odd parity)
                SourceSet A = SourceSet::single(origin).sym_diff(x).sym_diff(y);
                if (A.size() != 3) continue;  // degenerate coincidences
                Colouring p1 = build_colouring(region, A, c1, b1);
                double w1 = p1.reduced_weight(delta);
                if (w1 == 0.0) continue;
                ConnectivityIndex idx(p1, p2, cuts);
                if (!idx.connected(o, gam)) acc += w1 * w2;
            }
        }
        row[0] = acc * h;
    });
    // paper units (per bridge intensity): m0 / (2 Z^2); Hamiltonian units
    // of lambda carry a further factor 1/2
    return jackknife(tab, [](std::span<const double> m) { return m[0] / (4.0 * m[1] * m[1]); });
}

Estimate estimate_dM_ddelta(const Region& region, const Params& params,
                            const DerivativeOptions& opt) {
    require_assumption(region, params);
    const Point origin{region.lattice().origin(), 0.0};
    const SitePoint o = SitePoint::at(origin), gam = SitePoint::ghost();
    auto grid = time_grid(region, opt.time_points);
    auto forbidden = forbidden_times(grid);
    const double h = region.beta() / opt.time_points;
    const double delta = params.delta;

    BatchTable tab = run_batched(opt.mc.plan(), 2, [&](Rng& rng, double* row) {
        Configuration c1 = sample_bridges_ghosts(region, params, rng, forbidden);
        auto b1 = draw_wbits(region, rng);
        Configuration c2 = sample_bridges_ghosts(region, params, rng, forbidden);
        auto b2 = draw_wbits(region, rng);
        auto cuts = sample_cuts(region, delta, rng, forbidden);
        Colouring p1 = build_colouring(region, SourceSet::single(origin), c1, b1);
        Colouring p2 = build_colouring(region, SourceSet::empty(), c2, b2);
        double w = p1.reduced_weight(delta) * p2.reduced_weight(delta);
        row[1] = p2.reduced_weight(delta);
        if (w == 0.0) return;
        ConnectivityIndex base(p1, p2, cuts);
        double acc = 0.0;
        if (!base.connected(o, gam)) {
            // no open path at all: 0 <->^x G holds for every x
            acc = static_cast<double>(grid.size()) * w;
        } else {
            for (const auto& x : grid) {
                Point forced[1] = {x};
                ConnectivityIndex idx(p1, p2, cuts, forced);
                if (!idx.connected(o, gam)) acc += w;
            }
        }
        row[0] = acc * h;
    });
    // -dM/ddelta = 2 m0 / Z^2; report the derivative itself (negative)
    Estimate e =
        jackknife(tab, [](std::span<const double> m) { return 2.0 * m[0] / (m[1] * m[1]); });
    return {-e.value, e.std_error, e.n_samples, false};
}

DerivativeEstimates derivative_estimators(const Region& region, const Params& params,
                                          const DerivativeOptions& opt) {
    DerivativeEstimates out;
    out.time_points = opt.time_points;
    DerivativeOptions o = opt;
    o.mc.op_id = Rng::mix(opt.mc.op_id, 0xd601);
    out.dM_dgamma = estimate_dM_dgamma(region, params, o);
    o.mc.op_id = Rng::mix(opt.mc.op_id, 0xd602);
    out.dM_dlambda = estimate_dM_dlambda(region, params, o);
    o.mc.op_id = Rng::mix(opt.mc.op_id, 0xd603);
    out.dM_ddelta = estimate_dM_ddelta(region, params, o);
    return out;
}

}  // namespace sti
