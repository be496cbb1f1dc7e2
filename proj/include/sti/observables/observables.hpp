#pragma once

#include <vector>

#include "sti/parity/correlation.hpp"

namespace sti {

// M = <sigma_0> at the origin point (0 when gamma = 0)
Estimate magnetization(const Region& region, const Params& params, const McOptions& opt);

// <sigma_x sigma_y> - <sigma_x><sigma_y>, covariance-aware via common samples
Estimate truncated_two_point(const Region& region, const Point& x, const Point& y,
                             const Params& params, const McOptions& opt);

struct SusceptibilityResult {
    Estimate chi;           // statistical error only
    double chi_coarse = 0;  // same sum on the half-resolution grid
    double quadrature_gap = 0;
    int time_points = 0;
};

// chi = integral over x in Lambda of <sigma_0; sigma_x> dx, midpoint rule
// on a uniform time grid and a full vertex sum
SusceptibilityResult susceptibility(const Region& region, const Params& params, int time_points,
                                    const McOptions& opt);

// weighted least-squares mass fit: slope of -log c(x) against ||x|| over
// the largest distances with signal above 3 standard errors
struct MassFit {
    Estimate mass;
    int points_used = 0;
};
MassFit mass_estimate(const std::vector<std::pair<double, Estimate>>& correlations);

}  // namespace sti
