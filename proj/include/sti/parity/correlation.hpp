#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sti/core/estimate.hpp"
#include "sti/core/sampling.hpp"
#include "sti/domain/params.hpp"
#include "sti/domain/region.hpp"
#include "sti/parity/colouring.hpp"

namespace sti {

struct McOptions {
    std::int64_t n_samples = 100000;
    std::uint64_t seed = 1;
    std::uint64_t op_id = 0;
    int n_batches = 64;
    int workers = 1;

    SamplePlan plan() const { return {seed, op_id, n_samples, n_batches, workers}; }
};

// Reduced weights of several source sets evaluated on common (B,G) draws
// (common random numbers); column j holds sums of w^{A_j}, the last extra
// column holds w^{empty}. Every ratio estimator in the project is a
// function of these column means.
BatchTable parity_weight_table(const Region& region, std::span<const SourceSet> sets,
                               const Params& params, const McOptions& opt);

// <sigma_A> = E(del psi^A) / E(del psi^0) by the random-parity
// representation, with delete-one-batch jackknife errors.
// A empty returns exactly 1; |A| odd with gamma == 0 returns exactly 0.
Estimate estimate_correlation(const Region& region, const SourceSet& A, const Params& params,
                              const McOptions& opt);

struct PartitionReport {
    double log_z_mc = 0, se_mc = 0;
    double log_z_trace = 0;                  // exact, via the quantum trace
    double log_z_quadrature = 0, se_quad = 0;  // Poisson-death quadrature
    double z_vs_trace = 0, z_vs_quadrature = 0;
    double ratio_vs_trace = 1.0;
    std::int64_t n_samples = 0;
};

// Checks Z' = 2^N e^{lam_b(F) + gamma(K) - delta(K)} E(del psi^0) against
// two independent routes: the exact trace and a death-quadrature oracle.
// Box regions of <= 3 vertices.
PartitionReport verify_partition_identity(const Region& region, const Params& params,
                                          const McOptions& opt);

}  // namespace sti
