#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sti/domain/events.hpp"
#include "sti/domain/lattice.hpp"
#include "sti/domain/params.hpp"
#include "sti/domain/point.hpp"
#include "sti/domain/region.hpp"

namespace sti::oracle {

struct capability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense transverse-field Ising Hamiltonian
//   H = -(lambda/2) sum_{uv in E} s3_u s3_v - delta sum_v s1_v - gamma sum_v s3_v
// on up to 12 vertices, factored once; thermal quantities reuse the
// eigendecomposition across beta values.
class DenseHamiltonian {
  public:
    DenseHamiltonian(const Lattice& lat, const Params& params);

    int dim() const { return static_cast<int>(evals_.size()); }
    std::int32_t vertex_count() const { return nv_; }
    const Eigen::VectorXd& eigenvalues() const { return evals_; }
    const Eigen::MatrixXd& eigenvectors() const { return evecs_; }
    const Eigen::MatrixXd& matrix() const { return H_; }

    // diagonal of the product observable prod_{v in vs} s3_v
    Eigen::VectorXd s3_product_diagonal(std::span<const std::int32_t> vs) const;

  private:
    std::int32_t nv_;
    Eigen::MatrixXd H_;
    Eigen::VectorXd evals_;
    Eigen::MatrixXd evecs_;
};

// tr(e^{-beta H} Q) / tr(e^{-beta H}) for a diagonal product observable
double thermal_expectation(const DenseHamiltonian& H, double beta,
                           std::span<const std::int32_t> s3_vertices);

// log tr(e^{-beta H}) (circle) or log 1^T e^{-beta H} 1 (free time ends);
// equals log Z' of the space-time measure on the corresponding box
double log_partition(const DenseHamiltonian& H, double beta, TimeTopology top);

// <sigma_A> for space-time points A on the box lattice: time-ordered
// insertions of s3 between imaginary-time propagators
double spacetime_correlation(const DenseHamiltonian& H, double beta, TimeTopology top,
                             std::span<const Point> A);

// tr(e^{-(beta-|s-t|)H} s3_u e^{-|s-t|H} s3_v) / tr(e^{-beta H})
double time_displaced_correlation(const DenseHamiltonian& H, double beta, std::int32_t u,
                                  std::int32_t v, double s, double t);

double magnetization(const DenseHamiltonian& H, double beta, TimeTopology top);

// closed form for a single spin: <s3> = (gamma/r) tanh(beta r), r = sqrt(delta^2+gamma^2)
double single_spin_magnetization(const Params& p, double beta);

// ---- conditional Ising on the death-partition graph G(D) -------------

struct ConditionalIsing {
    // vertex intervals v-bar with field weights h = gamma |v-bar|, and
    // edge overlaps e-bar with couplings J = (lambda/2) |J^e_{k,l}|
    int n_intervals = 0;
    std::vector<double> field;                          // per interval
    std::vector<std::array<std::int32_t, 2>> bonds;     // interval index pairs
    std::vector<double> coupling;                       // per bond
    std::vector<std::int32_t> interval_of_source;       // aligned with A
    double log_scale = 0.0;                             // sum of couplings+fields (eq. weight bookkeeping)
};

ConditionalIsing build_conditional(const Region& region, std::span<const VertexEvent> deaths,
                                   std::span<const Point> A, const Params& params);

// exact spin sum over 2^{n_intervals} assignments; n_intervals <= 20
double conditional_correlation_spin_sum(const ConditionalIsing& model);

// the same correlation through Poisson bond parities,
// P(odd(mu)) = (1 - e^{-2 mu})/2; agrees with the spin route identically
double conditional_correlation_parity(const ConditionalIsing& model);

// log of the conditional partition sum_{sigma} exp{sum J ss + sum h s}
double conditional_log_partition(const ConditionalIsing& model);

// log of the same conditional partition via transfer matrices along the
// time direction; no interval-count cap (box regions only)
double conditional_log_partition_transfer(const Region& region,
                                          std::span<const VertexEvent> deaths,
                                          const Params& params);

}  // namespace sti::oracle
