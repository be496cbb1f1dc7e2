#include "sti/mcmc/scan.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace sti {

namespace {

// integrated autocorrelation time with the standard self-consistent window
double integrated_autocorrelation(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 32) return 1.0;
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    if (var <= 0) return 1.0;
    double tau = 0.5;
    for (std::size_t t = 1; t < n / 4; ++t) {
        double c = 0;
        for (std::size_t i = 0; i + t < n; ++i) c += (x[i] - mean) * (x[i + t] - mean);
        c /= static_cast<double>(n - t) * var;
        tau += c;
        if (static_cast<double>(t) >= 6.0 * tau) break;
    }
    return std::max(0.5, tau);
}

struct Series {
    std::vector<double> m, m2, m4;
    std::vector<std::vector<double>> corr;  // per displacement
};

Series run_one_chain(const Lattice& lat, double beta, const Params& params,
                     std::span<const int> displacements, std::int64_t sweeps,
                     std::int64_t burn_in, Rng rng) {
    SpinWorld world(lat, beta);
    for (std::int64_t i = 0; i < burn_in; ++i) world.cluster_sweep(params, rng);
    Series s;
    s.m.reserve(sweeps);
    s.corr.resize(displacements.size());
    for (std::int64_t i = 0; i < sweeps; ++i) {
        world.cluster_sweep(params, rng);
        auto smp = world.measure(displacements);
        s.m.push_back(smp.m);
        s.m2.push_back(smp.m2);
        s.m4.push_back(smp.m4);
        for (std::size_t k = 0; k < displacements.size(); ++k)
            s.corr[k].push_back(smp.pair_corr[k]);
    }
    return s;
}


}  // namespace

ChainResult run_chains(const Lattice& lat, double beta, const Params& params,
                       std::span<const int> displacements, const ChainOptions& opt) {
    std::vector<Series> per_chain(opt.n_chains);
    auto run = [&](int c) {
        Rng rng = Rng::stream(opt.seed, Rng::mix(opt.op_id, 0xc0de + c));
        per_chain[c] =
            run_one_chain(lat, beta, params, displacements, opt.sweeps, opt.burn_in, rng);
    };
    if (opt.workers > 1) {
        std::vector<std::thread> pool;
        for (int c = 0; c < opt.n_chains; ++c) pool.emplace_back(run, c);
        for (auto& t : pool) t.join();
    } else {
        for (int c = 0; c < opt.n_chains; ++c) run(c);
    }

    // merge chains into one series (block bookkeeping respects chain ends)
    ChainResult out;
    double tau = 1.0;
    for (auto& s : per_chain) tau = std::max(tau, integrated_autocorrelation(s.m2));
    out.tau_int = tau;
    int block = std::max<int>(static_cast<int>(std::ceil(10.0 * tau)), 4);
    block = std::min<int>(block, static_cast<int>(opt.sweeps / 8) > 0
                                     ? static_cast<int>(opt.sweeps / 8)
                                     : 1);
    out.block_length = block;

    MeanVar m, mabs, m2, m4;
    std::vector<Estimate> corr;
    for (auto& s : per_chain) {
        for (std::size_t i = 0; i + block <= s.m.size(); i += block) {
            double bm = 0, bma = 0, bm2 = 0, bm4 = 0;
            for (int j = 0; j < block; ++j) {
                bm += s.m[i + j];
                bma += std::abs(s.m[i + j]);
                bm2 += s.m2[i + j];
                bm4 += s.m4[i + j];
            }
            m.add(bm / block);
            mabs.add(bma / block);
            m2.add(bm2 / block);
            m4.add(bm4 / block);
            out.m2_blocks.push_back(bm2 / block);
            out.m4_blocks.push_back(bm4 / block);
        }
    }
    auto mk = [&](MeanVar& v) {
        return Estimate{v.mean, v.se_of_mean(), opt.sweeps * opt.n_chains, false};
    };
    out.m = mk(m);
    out.m_abs = mk(mabs);
    out.m2 = mk(m2);
    out.m4 = mk(m4);
    // Binder ratio U = 1 - <m^4> / (3 <m^2>^2): 0 in the Gaussian phase,
    // 2/3 under a symmetric two-point distribution
    double u = 1.0 - out.m4.value / (3.0 * out.m2.value * out.m2.value);
    double du_dm4 = -1.0 / (3.0 * out.m2.value * out.m2.value);
    double du_dm2 = 2.0 * out.m4.value / (3.0 * std::pow(out.m2.value, 3));
    double use = std::sqrt(std::pow(du_dm4 * out.m4.std_error, 2) +
                           std::pow(du_dm2 * out.m2.std_error, 2));
    out.binder = {u, use, out.m2.n_samples, false};

    for (std::size_t k = 0; k < displacements.size(); ++k) {
        MeanVar cv;
        for (auto& s : per_chain)
            for (std::size_t i = 0; i + block <= s.corr[k].size(); i += block) {
                double b = 0;
                for (int j = 0; j < block; ++j) b += s.corr[k][i + j];
                cv.add(b / block);
            }
        out.pair_corr.push_back(mk(cv));
    }
    return out;
}

ScanResult scan_critical(const ScanOptions& opt) {
    ScanResult res;
    if (opt.rho_grid.empty()) {
        res.diagnostic = "empty rho grid";
        return res;
    }
    for (int n : opt.sizes) {
        Lattice lat(1, n, SpatialBoundary::periodic);
        double beta = opt.aspect * n;
        for (double rho : opt.rho_grid) {
            Params p{rho * opt.delta, opt.delta, 0.0};
            ChainOptions co = opt.chain;
            co.op_id = Rng::mix(opt.chain.op_id,
                                Rng::mix(static_cast<std::uint64_t>(n),
                                         static_cast<std::uint64_t>(std::llround(rho * 1e6))));
            ScanCell cell;
            cell.n = n;
            cell.rho = rho;
            cell.stats = run_chains(lat, beta, p, {}, co);
            res.cells.push_back(std::move(cell));
        }
    }

    auto binder_curve = [&](int n) {
        std::vector<const ScanCell*> row;
        for (const auto& c : res.cells)
            if (c.n == n) row.push_back(&c);
        return row;
    };

    // crossings between consecutive sizes, bootstrap over blocks
    Rng boot(Rng::mix(opt.chain.seed, 0xb005));
    const int B = 400;
    std::vector<double> cross_means, cross_ses;
    for (std::size_t si = 0; si + 1 < opt.sizes.size(); ++si) {
        auto row1 = binder_curve(opt.sizes[si]);
        auto row2 = binder_curve(opt.sizes[si + 1]);
        BinderCrossing bc;
        bc.n1 = opt.sizes[si];
        bc.n2 = opt.sizes[si + 1];

        auto crossing_of = [&](const std::vector<double>& u1,
                               const std::vector<double>& u2) -> std::optional<double> {
            // U(n2) - U(n1) goes from negative (disordered side, rho small)
            // to positive; pick the last sign change on the grid
            for (std::size_t k = opt.rho_grid.size() - 1; k >= 1; --k) {
                double d1 = u2[k - 1] - u1[k - 1];
                double d2 = u2[k] - u1[k];
                if (d1 <= 0 && d2 > 0) {
                    double t = d1 / (d1 - d2);
                    return opt.rho_grid[k - 1] +
                           t * (opt.rho_grid[k] - opt.rho_grid[k - 1]);
                }
            }
            return std::nullopt;
        };

        std::vector<double> u1, u2;
        for (auto* c : row1) u1.push_back(c->stats.binder.value);
        for (auto* c : row2) u2.push_back(c->stats.binder.value);
        auto centre = crossing_of(u1, u2);
        if (!centre) {
            res.diagnostic += "no crossing between n=" + std::to_string(bc.n1) + " and n=" +
                              std::to_string(bc.n2) + "; ";
            res.crossings.push_back(bc);
            continue;
        }

        // bootstrap: resample block means per cell
        std::vector<double> samples;
        for (int b = 0; b < B; ++b) {
            auto resample_u = [&](const ScanCell& c) {
                const auto& b2 = c.stats.m2_blocks;
                const auto& b4 = c.stats.m4_blocks;
                double s2 = 0, s4 = 0;
                std::size_t nb = b2.size();
                for (std::size_t k = 0; k < nb; ++k) {
                    std::size_t pick = boot.uniform_int(nb);
                    s2 += b2[pick];
                    s4 += b4[pick];
                }
                s2 /= nb;
                s4 /= nb;
                return 1.0 - s4 / (3.0 * s2 * s2);
            };
            std::vector<double> v1, v2;
            for (auto* c : row1) v1.push_back(resample_u(*c));
            for (auto* c : row2) v2.push_back(resample_u(*c));
            auto x = crossing_of(v1, v2);
            if (x) samples.push_back(*x);
        }
        if (samples.size() < B / 2) {
            res.diagnostic += "unstable crossing bootstrap; ";
            res.crossings.push_back(bc);
            continue;
        }
        MeanVar mv;
        for (double x : samples) mv.add(x);
        bc.rho_hat = *centre;
        bc.se = std::sqrt(std::max(mv.variance(), 1e-12));
        bc.found = true;
        res.crossings.push_back(bc);
        cross_means.push_back(bc.rho_hat);
        cross_ses.push_back(bc.se);
    }

    if (!cross_means.empty()) {
        double wsum = 0, acc = 0;
        for (std::size_t i = 0; i < cross_means.size(); ++i) {
            double w = 1.0 / (cross_ses[i] * cross_ses[i]);
            wsum += w;
            acc += w * cross_means[i];
        }
        res.rho_c = Estimate{acc / wsum, std::sqrt(1.0 / wsum),
                             static_cast<std::int64_t>(cross_means.size()), false};
    } else if (res.diagnostic.empty()) {
        res.diagnostic = "no usable crossings";
    }
    return res;
}

std::vector<std::pair<double, Estimate>> decay_profile(int d, int n, double beta, double rho,
                                                       std::span<const int> displacements,
                                                       const ChainOptions& opt) {
    Lattice lat(d, n, SpatialBoundary::periodic);
    Params p{rho, 1.0, 0.0};
    ChainResult r = run_chains(lat, beta, p, displacements, opt);
    std::vector<std::pair<double, Estimate>> out;
    for (std::size_t k = 0; k < displacements.size(); ++k)
        out.emplace_back(static_cast<double>(displacements[k]), r.pair_corr[k]);
    return out;
}

}  // namespace sti
