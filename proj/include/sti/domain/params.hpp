#pragma once

#include <cmath>
#include <stdexcept>

namespace sti {

// Model parameters in the units of the quantum Hamiltonian
//   H = -(lambda/2) sum_{uv in E} s3_u s3_v - delta sum_v s1_v - gamma sum_v s3_v.
// The equivalent space-time Ising measure then carries Poisson intensities
//   bridges: lambda/2,  deaths: delta,  ghost-bonds: gamma,
// a pairing validated against exact traces by the oracle battery.
struct Params {
    double lambda = 0.0;
    double delta = 0.0;
    double gamma = 0.0;

    double bridge_intensity() const { return 0.5 * lambda; }

    double rho() const {
        if (!(delta > 0.0)) throw std::domain_error("rho undefined for delta == 0");
        return lambda / delta;
    }

    void validate() const {
        if (lambda < 0 || delta < 0 || gamma < 0 || !std::isfinite(lambda) ||
            !std::isfinite(delta) || !std::isfinite(gamma))
            throw std::invalid_argument("parameters must be finite and non-negative");
    }
};

}  // namespace sti
