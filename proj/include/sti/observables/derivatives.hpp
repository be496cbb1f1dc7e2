#pragma once

#include "sti/parity/correlation.hpp"

namespace sti {

// The two-replica representations of the magnetization derivatives,
// integrated over a midpoint time grid and summed over vertices:
//   dM/dgamma  = (1/Z^2) int dx E(dpsi1^{0x} dpsi2^0 1{0 </> G})
//   dM/dlambda = (1/2)(1/2Z^2) int dx sum_{y~x} E(dpsi1^{0xyG} dpsi2^0 1{0 </> G})
//   -dM/ddelta = (2/Z^2) int dx E(dpsi1^{0G} dpsi2^0 1{0 <->^x G})
// (the formulas hold per unit bridge intensity; dM/dlambda carries the
// extra 1/2 from lambda's Hamiltonian units). Requires a periodic box
// with K_v = S and gamma > 0.
struct DerivativeEstimates {
    Estimate dM_dgamma;
    Estimate dM_dlambda;
    Estimate dM_ddelta;  // the (negative) derivative itself
    int time_points = 0;
};

struct DerivativeOptions {
    McOptions mc;
    int time_points = 64;
};

DerivativeEstimates derivative_estimators(const Region& region, const Params& params,
                                          const DerivativeOptions& opt);

// individual estimators (independent runs; used by the PDI assembly)
Estimate estimate_dM_dgamma(const Region& region, const Params& params,
                            const DerivativeOptions& opt);
Estimate estimate_dM_dlambda(const Region& region, const Params& params,
                             const DerivativeOptions& opt);
Estimate estimate_dM_ddelta(const Region& region, const Params& params,
                            const DerivativeOptions& opt);

}  // namespace sti
