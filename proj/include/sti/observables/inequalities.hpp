#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sti/observables/derivatives.hpp"
#include "sti/observables/observables.hpp"

namespace sti {

struct GhsReport {
    Estimate triple;               // <sigma_x; sigma_y; sigma_z>
    bool triple_nonpositive_3se = false;
    Estimate concavity_second_difference;  // second difference of M in gamma
    bool concave_3se = false;
};

// truncated triple via its five-term expansion on common samples, plus
// M-concavity in gamma at three field values
GhsReport check_ghs(const Region& region, const Point& x, const Point& y, const Point& z,
                    const Params& params, const McOptions& opt,
                    std::optional<std::array<double, 3>> gamma_grid = std::nullopt);

// an epsilon-fat separating set: closed vertex-line segments
struct SeparatingSet {
    std::vector<TimeSeg> segments;
};

struct SimonLiebReport {
    Estimate lhs;            // <sigma_a sigma_b>
    Estimate rhs_simon;      // (1/eps) e^{8 eps delta} int_T <a x><x b>
    Estimate rhs_lieb;       // restricted first factor <a x>_U
    double epsilon = 0;
    bool simon_holds_3se = false;
    bool lieb_holds_3se = false;
    bool lieb_below_simon_3se = false;
    int grid_points = 0;
};

// Simon and Lieb inequalities at gamma = 0 through a separating set T;
// throws std::invalid_argument when T fails to separate or is not
// epsilon-fat
SimonLiebReport check_simon_lieb(const Region& region, const Point& a, const Point& b,
                                 const SeparatingSet& T, double epsilon, const Params& params,
                                 int time_points, const McOptions& opt);

struct PdiReport {
    Estimate M, chi, dM_dlambda, dM_ddelta;
    double lhs = 0, rhs = 0, slack = 0, slack_se = 0;
    bool holds_3se = false;
    // four-term diagnostics (T + R0 + Rh + Rv = M)
    Estimate term_T, term_R0, term_Rh, term_Rv;
    double decomposition_total = 0, decomposition_z = 0;
};

struct PdiOptions {
    McOptions mc;
    int time_points = 64;
    bool with_decomposition = true;
    std::int64_t decomposition_samples = 0;  // 0: same as mc.n_samples
};

// the principal differential inequality
// M <= gamma chi + M^3 + 2 lambda M^2 dM/dlambda - 2 delta M^2 dM/ddelta
PdiReport check_main_pdi(const Region& region, const Params& params, const PdiOptions& opt);

// separation test used by check_simon_lieb (exposed for tests): can a
// reach b through K \ T using any bridges on edge overlaps?
bool separates(const Region& region, const Point& a, const Point& b, const SeparatingSet& T);

}  // namespace sti
