#include "sti/parity/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <memory>

#include "sti/oracle/oracle.hpp"

namespace sti {

namespace {

// Weight-only evaluation of several source sets on a common event draw:
// per vertex line, merge the (few) sources into the sorted switch times
// and walk each maximal interval once, accumulating the parity and the
// odd measure. Avoids building label structures in the sampling loop;
// agreement with build_colouring is pinned by tests.
class WeightEvaluator {
  public:
    explicit WeightEvaluator(const Region& region) : region_(&region) {
        const Lattice& lat = region.lattice();
        arc_begin_.assign(lat.vertex_count() + 1, 0);
        for (std::int32_t v = 0; v < lat.vertex_count(); ++v) {
            arc_begin_[v] = static_cast<int>(arcs_.size());
            for (const auto& a : region.vertex_line(v).arcs()) arcs_.push_back({v, a});
        }
        arc_begin_[lat.vertex_count()] = static_cast<int>(arcs_.size());
        wbit_index_.assign(arcs_.size(), -1);
        int wb = 0;
        for (std::size_t i = 0; i < arcs_.size(); ++i)
            if (arcs_[i].arc.full) wbit_index_[i] = wb++;
        n_wbits_ = wb;
    }

    int wbit_count() const { return n_wbits_; }

    // sort the draw's switch times into per-arc buffers (positions along
    // the arc, full-circle convention: time 0 maps to beta)
    void load_events(const Configuration& bg) {
        const Lattice& lat = region_->lattice();
        const double beta = region_->beta();
        per_arc_.resize(arcs_.size());
        for (auto& pa : per_arc_) pa.clear();
        auto place = [&](std::int32_t v, double t) {
            for (int i = arc_begin_[v]; i < arc_begin_[v + 1]; ++i) {
                const auto& a = arcs_[i].arc;
                if (!region_->vertex_line(v).closure_contains(t, a)) continue;
                double pos = a.full ? (t == 0.0 ? beta : t)
                                    : region_->vertex_line(v).unwrap(t, a);
                per_arc_[i].push_back(pos);
                return;
            }
            throw std::invalid_argument("event outside region");
        };
        for (const auto& b : bg.bridges) {
            auto [u, v] = lat.edge(b.edge);
            place(u, b.t);
            place(v, b.t);
        }
        for (const auto& g : bg.ghosts) place(g.vertex, g.t);
        for (auto& pa : per_arc_) std::sort(pa.begin(), pa.end());
    }

    // reduced weight exp(-2 delta odd(psi^A)); 0 for the failed colouring
    double weight(const SourceSet& A, std::span<const std::uint8_t> wbits, double delta) const {
        double odd_total = 0.0;
        const double beta = region_->beta();
        std::size_t matched = 0;
        for (std::size_t i = 0; i < arcs_.size(); ++i) {
            const auto& [v, arc] = arcs_[i];
            const auto& ev = per_arc_[i];
            // merge sources on this arc (sorted within the set)
            merged_.assign(ev.begin(), ev.end());
            const IntervalSet& kv = region_->vertex_line(v);
            for (const auto& p : A.points) {
                if (p.vertex != v || !kv.closure_contains(p.time, arc)) continue;
                double pos = arc.full ? (p.time == 0.0 ? beta : p.time) : kv.unwrap(p.time, arc);
                merged_.insert(std::upper_bound(merged_.begin(), merged_.end(), pos), pos);
                ++matched;
            }
            if (merged_.size() & 1) return 0.0;
            // linear walk: label parity flips at every switch position
            double lo = arc.full ? 0.0 : arc.start;
            double hi = arc.full ? beta : arc.end;
            double odd = 0.0, prev = lo;
            bool lab = false;
            for (double p : merged_) {
                if (lab) odd += p - prev;
                prev = p;
                lab = !lab;
            }
            if (lab) odd += hi - prev;
            if (arc.full && wbits[wbit_index_[i]]) odd = (hi - lo) - odd;
            odd_total += odd;
        }
        if (matched != A.size()) throw std::invalid_argument("source outside region");
        return std::exp(-2.0 * delta * odd_total);
    }

  private:
    struct ArcRef {
        std::int32_t vertex;
        IntervalSet::Arc arc;
    };
    const Region* region_;
    std::vector<ArcRef> arcs_;
    std::vector<int> arc_begin_;
    std::vector<int> wbit_index_;
    int n_wbits_ = 0;
    std::vector<std::vector<double>> per_arc_;
    mutable std::vector<double> merged_;
};

}  // namespace

BatchTable parity_weight_table(const Region& region, std::span<const SourceSet> sets,
                               const Params& params, const McOptions& opt) {
    params.validate();
    std::vector<double> forbidden;
    for (const auto& A : sets)
        for (double t : A.times()) forbidden.push_back(t);
    std::sort(forbidden.begin(), forbidden.end());
    forbidden.erase(std::unique(forbidden.begin(), forbidden.end()), forbidden.end());

    const int width = static_cast<int>(sets.size()) + 1;
    const double delta = params.delta;
    const SourceSet empty_set = SourceSet::empty();

    struct Workspace {
        std::uint64_t token;
        WeightEvaluator eval;
        Configuration bg;
        std::vector<std::uint8_t> bits;
        std::vector<double> ts, scratch;
        Workspace(std::uint64_t tok, const Region& r) : token(tok), eval(r) {}
    };
    static std::atomic<std::uint64_t> call_counter{0};
    const std::uint64_t token = ++call_counter;

    return run_batched(opt.plan(), width, [&, token](Rng& rng, double* row) {
        // one workspace per thread, rebuilt on every new table call
        thread_local std::unique_ptr<Workspace> ws;
        if (!ws || ws->token != token) ws = std::make_unique<Workspace>(token, region);
        Workspace& w = *ws;
        sample_bridges_ghosts_into(w.bg, region, params, rng, forbidden, w.ts, w.scratch);
        w.bits.clear();
        for (int k = 0; k < w.eval.wbit_count(); ++k) w.bits.push_back(rng.coin() ? 1 : 0);
        w.eval.load_events(w.bg);
        for (std::size_t j = 0; j < sets.size(); ++j)
            row[j] = w.eval.weight(sets[j], w.bits, delta);
        row[sets.size()] = w.eval.weight(empty_set, w.bits, delta);
    });
}

Estimate estimate_correlation(const Region& region, const SourceSet& A, const Params& params,
                              const McOptions& opt) {
    if (A.is_empty()) return Estimate::exactly(1.0);
    if ((A.size() & 1) && params.gamma == 0.0) return Estimate::exactly(0.0);
    for (const auto& p : A.points)
        if (!region.point_in_closure(p)) throw std::invalid_argument("source outside region");

    std::vector<SourceSet> sets{A};
    BatchTable tab = parity_weight_table(region, sets, params, opt);
    return jackknife(tab, [](std::span<const double> m) { return m[0] / m[1]; });
}

PartitionReport verify_partition_identity(const Region& region, const Params& params,
                                          const McOptions& opt) {
    if (region.lattice().vertex_count() > 3)
        throw oracle::capability_error("partition identity oracle limited to 3 vertices");

    PartitionReport rep;
    BatchTable tab = parity_weight_table(region, {}, params, opt);
    Estimate mean_w = jackknife(tab, [](std::span<const double> m) { return m[0]; });
    const double lam_b = params.bridge_intensity();
    const double prefix = region.interval_count() * std::log(2.0) +
                          lam_b * region.f_measure() + params.gamma * region.k_measure() +
                          params.delta * region.k_measure();
    // Z' = 2^N e^{lam_b(F)+gamma(K)-delta(K)} E(del psi^0); the reduced
    // weight w^ = del psi^0 e^{-2 delta(K)} shifts the exponent to +delta(K)
    rep.log_z_mc = prefix + std::log(mean_w.value);
    rep.se_mc = mean_w.std_error / mean_w.value;
    rep.n_samples = mean_w.n_samples;

    oracle::DenseHamiltonian H(region.lattice(), params);
    rep.log_z_trace = oracle::log_partition(H, region.beta(), region.topology());

    // death quadrature: Z' = E_D[ conditional partition ]
    const std::int64_t nq = std::max<std::int64_t>(opt.n_samples / 4, 1000);
    SamplePlan qplan{opt.seed, Rng::mix(opt.op_id, 0x5eed), nq, opt.n_batches, opt.workers};
    // accumulate exp(logZcond - log_z_trace) for overflow-free averaging
    BatchTable qtab = run_batched(qplan, 1, [&](Rng& rng, double* row) {
        auto deaths = sample_deaths(region, params.delta, rng);
        row[0] = std::exp(oracle::conditional_log_partition_transfer(region, deaths, params) -
                          rep.log_z_trace);
    });
    Estimate qmean = jackknife(qtab, [](std::span<const double> m) { return m[0]; });
    rep.log_z_quadrature = rep.log_z_trace + std::log(qmean.value);
    rep.se_quad = qmean.std_error / qmean.value;

    rep.z_vs_trace = (rep.log_z_mc - rep.log_z_trace) / rep.se_mc;
    rep.z_vs_quadrature =
        (rep.log_z_mc - rep.log_z_quadrature) / combine_se(rep.se_mc, rep.se_quad);
    rep.ratio_vs_trace = std::exp(rep.log_z_mc - rep.log_z_trace);
    return rep;
}

}  // namespace sti
