#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sti/core/rng.hpp"
#include "sti/domain/lattice.hpp"
#include "sti/domain/params.hpp"

namespace sti {

// Piecewise-constant +-1 spin trajectories on the time circle, one line
// per vertex, stored as the value just after time 0 plus sorted change
// points (always an even number per line).
//
// cluster_sweep resamples by the random-cluster coupling: cuts are laid
// at every spin flip plus a Poisson(delta) of null cuts, bonds arrive at
// rate lambda on segments where the endpoint spins agree, ghost pins at
// rate 2*gamma on spin-up segments; clusters pinned to the ghost freeze
// to +1 and every other cluster draws a fresh fair spin. Stationarity
// with respect to the space-time Ising measure is validated against the
// exact traces by the oracle battery.
class SpinWorld {
  public:
    SpinWorld(Lattice lat, double beta);

    const Lattice& lattice() const { return lat_; }
    double beta() const { return beta_; }
    std::int64_t sweep_count() const { return sweeps_; }

    int spin_at(std::int32_t v, double t) const;
    const std::vector<double>& flips(std::int32_t v) const { return flips_[v]; }
    int spin0(std::int32_t v) const { return spin0_[v]; }

    double line_integral(std::int32_t v) const;  // int sigma_v(t) dt
    double pair_overlap(std::int32_t u, std::int32_t v) const;  // int s_u s_v dt

    void cluster_sweep(const Params& params, Rng& rng);

    struct Sample {
        double m = 0;   // (1/|K|) int sigma
        double m2 = 0, m4 = 0;
        std::vector<double> pair_corr;  // per requested displacement
    };
    // exact space-time averages; displacements are axis-0 shifts, with
    // correlations averaged over all origins
    Sample measure(std::span<const int> displacements) const;

    // deterministic state fingerprint (checkpoint round-trip tests)
    std::uint64_t fingerprint() const;

    // raw state access for checkpoints
    void set_state(std::vector<int> spin0, std::vector<std::vector<double>> flips,
                   std::int64_t sweeps);

  private:
    Lattice lat_;
    double beta_;
    std::int64_t sweeps_ = 0;
    std::vector<int> spin0_;
    std::vector<std::vector<double>> flips_;

    // sweep workspace, reused across calls
    std::vector<std::vector<double>> cuts_;
    std::vector<int> seg_base_;
    std::vector<int> parent_;
    std::vector<std::int8_t> cluster_spin_;
    std::vector<double> scratch_;
};

}  // namespace sti
