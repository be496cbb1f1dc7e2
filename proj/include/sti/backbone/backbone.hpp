#pragma once

#include <optional>
#include <vector>

#include "sti/core/estimate.hpp"
#include "sti/parity/colouring.hpp"
#include "sti/parity/correlation.hpp"

namespace sti {

// one closed odd span walked along a vertex line, in walk order
struct BackboneStep {
    std::int32_t vertex;
    double from, to;  // circle times of the walk's entry and exit points
    bool increasing;  // walk direction along the line

    friend bool operator==(const BackboneStep&, const BackboneStep&) = default;
};

// a directed odd path: source -> source or source -> ghost
struct BackbonePath {
    Point start;
    Point end;            // lattice endpoint, or the ghost-bond location if to_ghost
    bool to_ghost = false;
    std::vector<BackboneStep> steps;

    friend bool operator==(const BackbonePath&, const BackbonePath&) = default;
};

struct Backbone {
    std::vector<BackbonePath> paths;

    bool empty() const { return paths.empty(); }

    // closed segments for region subtraction
    std::vector<TimeSeg> segments() const;
    double total_length(double beta) const;

    friend bool operator==(const Backbone&, const Backbone&) = default;
};

// deterministic extraction: walk odd intervals from each pending source in
// the total order, crossing bridges, until a source or ghost-bond is hit.
// The failed colouring yields the empty backbone.
Backbone extract_backbone(const Colouring& psi);

// Decomposition of the odd set left after removing the backbone: it must
// consist of disjoint self-avoiding cycles, where a ghost-to-ghost odd
// chain counts as a cycle through the ghost site. Throws on any anomaly.
struct LeftoverDecomposition {
    int n_cycles = 0;        // lattice cycles (bridges only)
    int n_ghost_cycles = 0;  // chains closed through the ghost site
};
LeftoverDecomposition decompose_leftover(const Colouring& psi, const Backbone& bb);

// Whether a backbone is feasible for source set A: path starts consume A
// in the total order and every non-ghost endpoint lies in A.
bool backbone_compatible(const SourceSet& A, const Backbone& nu);

// w^A(nu) = Z_{K \ nu} / Z_K when A ~ nu, else exactly 0; both partition
// ratios estimated by independent Monte Carlo means of the sourceless weight.
Estimate backbone_weight(const Region& region, const Backbone& nu, const SourceSet& A,
                         const Params& params, const McOptions& opt);

// cut nu at a point x interior to one of its paths; both halves are closed at x
std::pair<Backbone, Backbone> cut_backbone(const Backbone& nu, const Point& x, double beta);

// inverse of cut_backbone (re-joins the severed path when ends meet at x)
Backbone concat_backbones(const Backbone& a, const Backbone& b);

struct BackboneRepresentationReport {
    Estimate via_backbone;     // E(w^A(xi))
    Estimate via_parity;       // estimate_correlation
    std::optional<double> oracle;
    double z_backbone_vs_parity = 0;
    double z_backbone_vs_oracle = 0;
    double ghost_pair_fraction = 0;  // paths ending at the ghost, both-ends case
};

// verifies <sigma_A> = E(w^A(xi)) by nested Monte Carlo (inner samples
// default to sqrt of outer) against the parity estimator and, when the
// lattice is small, the exact trace
BackboneRepresentationReport verify_backbone_representation(const Region& region,
                                                            const SourceSet& A,
                                                            const Params& params,
                                                            const McOptions& opt);

}  // namespace sti
