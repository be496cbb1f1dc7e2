#pragma once

#include <optional>
#include <vector>

#include "sti/core/estimate.hpp"
#include "sti/mcmc/spin_world.hpp"

namespace sti {

struct ChainOptions {
    std::int64_t sweeps = 20000;
    std::int64_t burn_in = 2000;
    int n_chains = 2;
    std::uint64_t seed = 1;
    std::uint64_t op_id = 0;
    int workers = 1;
};

// one equilibrated run at a fixed parameter point
struct ChainResult {
    Estimate m, m_abs, m2, m4, binder;
    std::vector<Estimate> pair_corr;
    double tau_int = 1.0;   // integrated autocorrelation time of m^2
    int block_length = 1;
    std::vector<double> m2_blocks, m4_blocks;  // per-block means (bootstrap input)
};

ChainResult run_chains(const Lattice& lat, double beta, const Params& params,
                       std::span<const int> displacements, const ChainOptions& opt);

struct ScanOptions {
    std::vector<int> sizes{8, 16, 32};  // half-widths n; beta = aspect * n
    double aspect = 1.0;
    std::vector<double> rho_grid;
    double delta = 1.0;
    ChainOptions chain;
};

struct ScanCell {
    int n = 0;
    double rho = 0;
    ChainResult stats;
};

struct BinderCrossing {
    int n1 = 0, n2 = 0;
    double rho_hat = 0, se = 0;
    bool found = false;
};

struct ScanResult {
    std::vector<ScanCell> cells;
    std::vector<BinderCrossing> crossings;
    std::optional<Estimate> rho_c;  // bootstrap-weighted crossing mean
    std::string diagnostic;
};

// d = 1 critical scan at gamma = 0: Binder-ratio crossings between
// consecutive sizes over the rho grid, bootstrap errors over blocks
ScanResult scan_critical(const ScanOptions& opt);

// correlation versus distance table (feeds mass_estimate)
std::vector<std::pair<double, Estimate>> decay_profile(int d, int n, double beta, double rho,
                                                       std::span<const int> displacements,
                                                       const ChainOptions& opt);

}  // namespace sti
