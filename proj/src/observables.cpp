#include "sti/observables/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sti {

Estimate magnetization(const Region& region, const Params& params, const McOptions& opt) {
    if (params.gamma == 0.0) return Estimate::exactly(0.0);
    Point origin{region.lattice().origin(), 0.0};
    return estimate_correlation(region, SourceSet::single(origin), params, opt);
}

Estimate truncated_two_point(const Region& region, const Point& x, const Point& y,
                             const Params& params, const McOptions& opt) {
    if (x == y) {
        // sigma_x^2 = 1: the truncated value is 1 - M^2
        Estimate m = magnetization(region, params, opt);
        return {1.0 - m.value * m.value, 2.0 * std::abs(m.value) * m.std_error, m.n_samples,
                m.exact};
    }
    std::vector<SourceSet> sets{SourceSet::pair(x, y), SourceSet::single(x),
                                SourceSet::single(y)};
    BatchTable tab = parity_weight_table(region, sets, params, opt);
    return jackknife(tab, [](std::span<const double> m) {
        return m[0] / m[3] - (m[1] / m[3]) * (m[2] / m[3]);
    });
}

SusceptibilityResult susceptibility(const Region& region, const Params& params, int time_points,
                                    const McOptions& opt) {
    if (time_points <= 0) throw std::invalid_argument("time grid must be positive");
    const Lattice& lat = region.lattice();
    const double beta = region.beta();
    const double h = beta / time_points;
    const Point origin{lat.origin(), 0.0};

    // grid points (v, (j+1/2) h) over every vertex line
    std::vector<Point> grid;
    for (std::int32_t v = 0; v < lat.vertex_count(); ++v)
        for (int j = 0; j < time_points; ++j) grid.push_back({v, (j + 0.5) * h});

    std::vector<SourceSet> sets;
    sets.push_back(SourceSet::single(origin));
    for (const auto& x : grid) {
        sets.push_back(SourceSet::pair(origin, x));
        sets.push_back(SourceSet::single(x));
    }
    BatchTable tab = parity_weight_table(region, sets, params, opt);
    const std::size_t g = grid.size();
    const std::size_t iz = 2 * g + 1;  // the trailing empty-set column

    auto chi_on = [&, h](std::span<const double> m, int stride) {
        double acc = 0.0;
        double m0 = m[0] / m[iz];
        for (std::size_t k = 0; k < g; k += stride) {
            double pair = m[1 + 2 * k] / m[iz];
            double mx = m[2 + 2 * k] / m[iz];
            acc += (pair - m0 * mx) * h * stride;
        }
        return acc;
    };

    SusceptibilityResult out;
    out.time_points = time_points;
    out.chi = jackknife(tab, [&](std::span<const double> m) { return chi_on(m, 1); });
    auto means = tab.means();
    out.chi_coarse = chi_on(means, 2);
    out.quadrature_gap = std::abs(out.chi.value - out.chi_coarse);
    return out;
}

MassFit mass_estimate(const std::vector<std::pair<double, Estimate>>& correlations) {
    // keep the largest distances with usable signal
    std::vector<std::pair<double, Estimate>> pts(correlations.begin(), correlations.end());
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> d, y, w;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        const auto& [dist, est] = *it;
        if (est.value <= 0.0) continue;
        if (!est.exact && est.std_error > 0 && est.value < 3.0 * est.std_error) continue;
        d.push_back(dist);
        y.push_back(-std::log(est.value));
        double se_log = est.value > 0 ? est.std_error / est.value : 0.0;
        w.push_back(se_log > 0 ? 1.0 / (se_log * se_log) : 0.0);
    }
    if (d.size() < 3) throw std::runtime_error("mass fit needs at least 3 usable distances");
    // zero variances (exact inputs): fall back to an unweighted fit
    bool all_exact = std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; });
    if (all_exact)
        for (auto& x : w) x = 1.0;

    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        sw += w[i];
        swx += w[i] * d[i];
        swy += w[i] * y[i];
        swxx += w[i] * d[i] * d[i];
        swxy += w[i] * d[i] * y[i];
    }
    double det = sw * swxx - swx * swx;
    if (det <= 0.0) throw std::runtime_error("degenerate mass fit");
    double slope = (sw * swxy - swx * swy) / det;
    double var_slope = all_exact ? 0.0 : sw / det;
    MassFit fit;
    fit.mass = {slope, std::sqrt(var_slope), static_cast<std::int64_t>(d.size()), all_exact};
    fit.points_used = static_cast<int>(d.size());
    return fit;
}

}  // namespace sti
