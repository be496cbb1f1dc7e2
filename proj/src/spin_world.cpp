#include "sti/mcmc/spin_world.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <cmath>
#include <stdexcept>

namespace sti {

SpinWorld::SpinWorld(Lattice lat, double beta) : lat_(std::move(lat)), beta_(beta) {
    spin0_.assign(lat_.vertex_count(), 1);
    flips_.assign(lat_.vertex_count(), {});
}

int SpinWorld::spin_at(std::int32_t v, double t) const {
    const auto& f = flips_[v];
    auto k = std::upper_bound(f.begin(), f.end(), t) - f.begin();
    return (k & 1) ? -spin0_[v] : spin0_[v];
}

double SpinWorld::line_integral(std::int32_t v) const {
    const auto& f = flips_[v];
    if (f.empty()) return spin0_[v] * beta_;
    double tot = 0.0;
    double prev = 0.0;
    int s = spin0_[v];
    for (double t : f) {
        tot += s * (t - prev);
        prev = t;
        s = -s;
    }
    tot += s * (beta_ - prev);
    return tot;
}

double SpinWorld::pair_overlap(std::int32_t u, std::int32_t v) const {
    const auto& fu = flips_[u];
    const auto& fv = flips_[v];
    double tot = 0.0, prev = 0.0;
    int su = spin0_[u], sv = spin0_[v];
    std::size_t i = 0, j = 0;
    while (i < fu.size() || j < fv.size()) {
        double tu = i < fu.size() ? fu[i] : beta_;
        double tv = j < fv.size() ? fv[j] : beta_;
        double t = std::min(tu, tv);
        tot += su * sv * (t - prev);
        prev = t;
        if (tu <= tv) {
            su = -su;
            ++i;
        } else {
            sv = -sv;
            ++j;
        }
    }
    tot += su * sv * (beta_ - prev);
    return tot;
}

void SpinWorld::cluster_sweep(const Params& params, Rng& rng) {
    const std::int32_t nv = lat_.vertex_count();
    cuts_.resize(nv);

    // cuts: every current flip plus Poisson(delta) null cuts
    for (std::int32_t v = 0; v < nv; ++v) {
        auto& c = cuts_[v];
        c = flips_[v];
        std::uint64_t extra = rng.poisson(params.delta * beta_);
        for (std::uint64_t k = 0; k < extra; ++k) c.push_back(rng.uniform(0.0, beta_));
        std::sort(c.begin(), c.end());
    }

    // segment ids: per vertex, arcs between consecutive cuts (circular)
    seg_base_.assign(nv + 1, 0);
    int total = 0;
    for (std::int32_t v = 0; v < nv; ++v) {
        seg_base_[v] = total;
        total += std::max<std::size_t>(cuts_[v].size(), 1);
    }
    seg_base_[nv] = total;
    const int ghost = total;
    parent_.resize(total + 1);
    for (int i = 0; i <= ghost; ++i) parent_[i] = i;
    auto find = [&](int a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    };
    auto unite = [&](int a, int b) {
        int ra = find(a), rb = find(b);
        if (ra != rb) parent_[ra] = rb;
    };
    auto seg_at = [&](std::int32_t v, double t) {
        const auto& c = cuts_[v];
        if (c.empty()) return seg_base_[v];
        // segment i spans [c[i], c[i+1]); times before c[0] wrap to the last
        auto k = std::upper_bound(c.begin(), c.end(), t) - c.begin();
        int idx = static_cast<int>(k) - 1;
        if (idx < 0) idx = static_cast<int>(c.size()) - 1;
        return seg_base_[v] + idx;
    };

    // bonds at rate lambda on agreeing edge segments (thinning)
    for (std::int32_t e = 0; e < lat_.edge_count(); ++e) {
        auto [u, v] = lat_.edge(e);
        std::uint64_t n = rng.poisson(params.lambda * beta_);
        for (std::uint64_t k = 0; k < n; ++k) {
            double t = rng.uniform(0.0, beta_);
            if (spin_at(u, t) == spin_at(v, t)) unite(seg_at(u, t), seg_at(v, t));
        }
    }

    // ghost pins at rate 2 gamma on spin-up segments
    if (params.gamma > 0.0) {
        for (std::int32_t v = 0; v < nv; ++v) {
            std::uint64_t n = rng.poisson(2.0 * params.gamma * beta_);
            for (std::uint64_t k = 0; k < n; ++k) {
                double t = rng.uniform(0.0, beta_);
                if (spin_at(v, t) == 1) unite(seg_at(v, t), ghost);
            }
        }
    }

    // fresh cluster spins, ghost cluster frozen up; deterministic order
    cluster_spin_.assign(total + 1, 0);
    const int groot = find(ghost);
    cluster_spin_[groot] = 1;
    for (int i = 0; i < total; ++i) {
        int r = find(i);
        if (cluster_spin_[r] == 0) cluster_spin_[r] = rng.coin() ? 1 : -1;
    }

    // rebuild the trajectories
    for (std::int32_t v = 0; v < nv; ++v) {
        const auto& c = cuts_[v];
        auto& f = flips_[v];
        if (c.empty()) {
            spin0_[v] = cluster_spin_[find(seg_base_[v])];
            f.clear();
            continue;
        }
        const int n = static_cast<int>(c.size());
        scratch_.clear();
        // spin just after 0 lives on the wrap segment (index n-1)
        int s0 = cluster_spin_[find(seg_base_[v] + n - 1)];
        int prev = s0;
        for (int i = 0; i < n - 1; ++i) {
            int s = cluster_spin_[find(seg_base_[v] + i)];
            if (s != prev) scratch_.push_back(c[i]);
            prev = s;
        }
        int s_last = cluster_spin_[find(seg_base_[v] + n - 1)];
        if (s_last != prev) scratch_.push_back(c[n - 1]);
        f = scratch_;
        spin0_[v] = s0;
        if (f.size() & 1) throw std::logic_error("odd change-point count after sweep");
    }
    ++sweeps_;
}

SpinWorld::Sample SpinWorld::measure(std::span<const int> displacements) const {
    Sample s;
    const double volume = lat_.vertex_count() * beta_;
    double acc = 0.0;
    for (std::int32_t v = 0; v < lat_.vertex_count(); ++v) acc += line_integral(v);
    s.m = acc / volume;
    s.m2 = s.m * s.m;
    s.m4 = s.m2 * s.m2;
    for (int dsp : displacements) {
        double corr = 0.0;
        int origins = 0;
        for (std::int32_t v = 0; v < lat_.vertex_count(); ++v) {
            std::int32_t w = lat_.shifted(v, 0, dsp);
            if (w < 0) continue;
            corr += pair_overlap(v, w);
            ++origins;
        }
        s.pair_corr.push_back(origins ? corr / (origins * beta_) : 0.0);
    }
    return s;
}

std::uint64_t SpinWorld::fingerprint() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    auto mix = [&h](std::uint64_t x) {
        h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    for (std::int32_t v = 0; v < lat_.vertex_count(); ++v) {
        mix(static_cast<std::uint64_t>(spin0_[v] + 2));
        for (double t : flips_[v]) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(t));
            std::memcpy(&bits, &t, sizeof(bits));
            mix(bits);
        }
    }
    return h;
}

void SpinWorld::set_state(std::vector<int> spin0, std::vector<std::vector<double>> flips,
                          std::int64_t sweeps) {
    if (spin0.size() != static_cast<std::size_t>(lat_.vertex_count()) ||
        flips.size() != spin0.size())
        throw std::invalid_argument("checkpoint state does not match the lattice");
    spin0_ = std::move(spin0);
    flips_ = std::move(flips);
    sweeps_ = sweeps;
}

}  // namespace sti
