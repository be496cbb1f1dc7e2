#include "sti/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sti::oracle {

namespace {

// spin of vertex v in basis state s: bit clear = +1
inline double spin_of(std::uint32_t s, std::int32_t v) { return (s >> v) & 1u ? -1.0 : 1.0; }

}  // namespace

DenseHamiltonian::DenseHamiltonian(const Lattice& lat, const Params& params) : nv_(lat.vertex_count()) {
    params.validate();
    if (nv_ > 12) throw capability_error("dense oracle limited to 12 vertices");
    const int dim = 1 << nv_;
    H_ = Eigen::MatrixXd::Zero(dim, dim);
    for (int s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (const auto& [u, v] : lat.edges())
            diag -= 0.5 * params.lambda * spin_of(s, u) * spin_of(s, v);
        for (std::int32_t v = 0; v < nv_; ++v) diag -= params.gamma * spin_of(s, v);
        H_(s, s) = diag;
        for (std::int32_t v = 0; v < nv_; ++v) H_(s ^ (1 << v), s) -= params.delta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H_);
    evals_ = solver.eigenvalues();
    evecs_ = solver.eigenvectors();
}

Eigen::VectorXd DenseHamiltonian::s3_product_diagonal(std::span<const std::int32_t> vs) const {
    const int dim = 1 << nv_;
    Eigen::VectorXd q(dim);
    for (int s = 0; s < dim; ++s) {
        double prod = 1.0;
        for (auto v : vs) prod *= spin_of(s, v);
        q[s] = prod;
    }
    return q;
}

double thermal_expectation(const DenseHamiltonian& H, double beta,
                           std::span<const std::int32_t> s3_vertices) {
    const auto& E = H.eigenvalues();
    const double e0 = E.minCoeff();
    Eigen::VectorXd w = (-(beta) * (E.array() - e0)).exp();
    Eigen::VectorXd q = H.s3_product_diagonal(s3_vertices);
    // <n|Q|n> = sum_s U(s,n)^2 q_s
    Eigen::VectorXd qn = (H.eigenvectors().array().square().matrix().transpose() * q);
    return w.dot(qn) / w.sum();
}

double log_partition(const DenseHamiltonian& H, double beta, TimeTopology top) {
    const auto& E = H.eigenvalues();
    const double e0 = E.minCoeff();
    Eigen::VectorXd w = (-(beta) * (E.array() - e0)).exp();
    if (top == TimeTopology::circle) return std::log(w.sum()) - beta * e0;
    Eigen::VectorXd c = H.eigenvectors().transpose() * Eigen::VectorXd::Ones(H.dim());
    return std::log(c.array().square().matrix().dot(w)) - beta * e0;
}

double spacetime_correlation(const DenseHamiltonian& H, double beta, TimeTopology top,
                             std::span<const Point> A) {
    if (A.empty()) return 1.0;
    if (H.dim() > 256) throw capability_error("multi-time oracle limited to 8 vertices");
    std::vector<Point> pts(A.begin(), A.end());
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.time < b.time; });

    // group equal times into one diagonal product insertion
    struct Group {
        double t;
        std::vector<std::int32_t> vs;
    };
    std::vector<Group> groups;
    for (const auto& p : pts) {
        if (!groups.empty() && groups.back().t == p.time)
            groups.back().vs.push_back(p.vertex);
        else
            groups.push_back({p.time, {p.vertex}});
    }

    const auto& E = H.eigenvalues();
    const double e0 = E.minCoeff();
    const auto& U = H.eigenvectors();
    auto prop = [&](double tau) {
        return ((-(tau) * (E.array() - e0)).exp()).matrix().asDiagonal();
    };

    Eigen::MatrixXd M;
    double prev = 0.0;
    bool first = true;
    for (const auto& g : groups) {
        Eigen::MatrixXd Qt =
            U.transpose() * H.s3_product_diagonal(g.vs).asDiagonal() * U;
        if (first) {
            M = Qt * prop(g.t - prev);
            first = false;
        } else {
            M = Qt * (prop(g.t - prev) * M).eval();
        }
        prev = g.t;
    }
    M = prop(beta - prev) * M;

    if (top == TimeTopology::circle) {
        double num = M.trace();
        double den = prop(beta).diagonal().sum();
        return num / den;
    }
    Eigen::VectorXd c = U.transpose() * Eigen::VectorXd::Ones(H.dim());
    double num = c.dot(M * c);
    double den = c.dot(prop(beta) * c);
    return num / den;
}

double time_displaced_correlation(const DenseHamiltonian& H, double beta, std::int32_t u,
                                  std::int32_t v, double s, double t) {
    Point a{u, s}, b{v, t};
    std::vector<Point> A{a, b};
    return spacetime_correlation(H, beta, TimeTopology::circle, A);
}

double magnetization(const DenseHamiltonian& H, double beta, TimeTopology top) {
    Point origin{0, 0.0};
    if (top == TimeTopology::circle) {
        std::int32_t vs[1] = {0};
        return thermal_expectation(H, beta, vs);
    }
    std::vector<Point> A{origin};
    return spacetime_correlation(H, beta, top, A);
}

double single_spin_magnetization(const Params& p, double beta) {
    double r = std::hypot(p.delta, p.gamma);
    if (r == 0.0) return 0.0;
    return (p.gamma / r) * std::tanh(beta * r);
}

// ---- conditional Ising ------------------------------------------------

namespace {

// linear pieces of one death-free interval (wrapping intervals get two)
struct SubInterval {
    std::int32_t vertex;
    double pieces[2][2];
    int n_pieces;
    double length;
};

double piece_overlap(const SubInterval& a, const SubInterval& b) {
    double tot = 0.0;
    for (int i = 0; i < a.n_pieces; ++i)
        for (int j = 0; j < b.n_pieces; ++j) {
            double lo = std::max(a.pieces[i][0], b.pieces[j][0]);
            double hi = std::min(a.pieces[i][1], b.pieces[j][1]);
            if (hi > lo) tot += hi - lo;
        }
    return tot;
}

bool closure_holds(const SubInterval& s, double t) {
    for (int i = 0; i < s.n_pieces; ++i)
        if (t >= s.pieces[i][0] && t <= s.pieces[i][1]) return true;
    return false;
}

}  // namespace

ConditionalIsing build_conditional(const Region& region, std::span<const VertexEvent> deaths,
                                   std::span<const Point> A, const Params& params) {
    const Lattice& lat = region.lattice();
    const double beta = region.beta();
    std::vector<SubInterval> ivs;
    std::vector<int> first_iv(lat.vertex_count() + 1, 0);

    for (std::int32_t v = 0; v < lat.vertex_count(); ++v) {
        first_iv[v] = static_cast<int>(ivs.size());
        std::vector<double> dv;
        for (const auto& d : deaths)
            if (d.vertex == v) dv.push_back(d.t);
        std::sort(dv.begin(), dv.end());
        for (const auto& arc : region.vertex_line(v).arcs()) {
            if (arc.full) {
                if (dv.empty()) {
                    ivs.push_back({v, {{0.0, beta}, {0, 0}}, 1, beta});
                } else {
                    for (std::size_t k = 0; k < dv.size(); ++k) {
                        double a = dv[k];
                        double b = (k + 1 < dv.size()) ? dv[k + 1] : dv[0] + beta;
                        SubInterval s{v, {{a, std::min(b, beta)}, {0, 0}}, 1, b - a};
                        if (b > beta) {
                            s.pieces[1][0] = 0.0;
                            s.pieces[1][1] = b - beta;
                            s.n_pieces = 2;
                        }
                        ivs.push_back(s);
                    }
                }
            } else {
                // deaths inside this arc split it along the unwrapped coordinate
                std::vector<double> cuts{arc.start};
                const IntervalSet& kv = region.vertex_line(v);
                for (double t : dv)
                    if (kv.closure_contains(t, arc)) cuts.push_back(kv.unwrap(t, arc));
                std::sort(cuts.begin(), cuts.end());
                cuts.push_back(arc.end);
                for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
                    double a = cuts[k], b = cuts[k + 1];
                    SubInterval s{v, {{a, std::min(b, beta)}, {0, 0}}, 1, b - a};
                    if (a >= beta) {
                        s.pieces[0][0] = a - beta;
                        s.pieces[0][1] = b - beta;
                    } else if (b > beta) {
                        s.pieces[1][0] = 0.0;
                        s.pieces[1][1] = b - beta;
                        s.n_pieces = 2;
                    }
                    ivs.push_back(s);
                }
            }
        }
    }
    first_iv[lat.vertex_count()] = static_cast<int>(ivs.size());

    ConditionalIsing m;
    m.n_intervals = static_cast<int>(ivs.size());
    m.field.reserve(ivs.size());
    for (const auto& s : ivs) m.field.push_back(params.gamma * s.length);

    const double lam_b = params.bridge_intensity();
    for (std::int32_t e = 0; e < lat.edge_count(); ++e) {
        auto [u, v] = lat.edge(e);
        for (int i = first_iv[u]; i < first_iv[u + 1]; ++i)
            for (int j = first_iv[v]; j < first_iv[v + 1]; ++j) {
                double ov = piece_overlap(ivs[i], ivs[j]);
                if (ov > 0.0) {
                    m.bonds.push_back({i, j});
                    m.coupling.push_back(lam_b * ov);
                }
            }
    }

    for (const auto& a : A) {
        std::int32_t hit = -1;
        for (int i = first_iv[a.vertex]; i < first_iv[a.vertex + 1]; ++i)
            if (closure_holds(ivs[i], a.time)) {
                hit = i;
                break;
            }
        if (hit < 0) throw std::invalid_argument("source not inside any death-free interval");
        m.interval_of_source.push_back(hit);
    }

    m.log_scale = std::accumulate(m.coupling.begin(), m.coupling.end(), 0.0) +
                  std::accumulate(m.field.begin(), m.field.end(), 0.0);
    return m;
}

namespace {

double spin_energy(const ConditionalIsing& m, std::uint32_t s) {
    double e = 0.0;
    for (std::size_t b = 0; b < m.bonds.size(); ++b)
        e += m.coupling[b] * spin_of(s, m.bonds[b][0]) * spin_of(s, m.bonds[b][1]);
    for (int i = 0; i < m.n_intervals; ++i) e += m.field[i] * spin_of(s, i);
    return e;
}

void check_cap(const ConditionalIsing& m) {
    if (m.n_intervals > 20) throw capability_error("conditional Ising limited to 20 intervals");
}

}  // namespace

double conditional_correlation_spin_sum(const ConditionalIsing& m) {
    check_cap(m);
    const std::uint32_t n = 1u << m.n_intervals;
    const double shift = m.log_scale;
    double num = 0.0, den = 0.0;
    for (std::uint32_t s = 0; s < n; ++s) {
        double w = std::exp(spin_energy(m, s) - shift);
        double sa = 1.0;
        for (auto i : m.interval_of_source) sa *= spin_of(s, i);
        num += sa * w;
        den += w;
    }
    return num / den;
}

double conditional_correlation_parity(const ConditionalIsing& m) {
    check_cap(m);
    // P(dPsi = A) = 2^-n sum_tau tau_A prod_bonds [P_even + P_odd tau tau']
    // with P(odd) = (1 - e^{-2 mu})/2 for Poisson(mu) multiplicities;
    // ghost-bonds enter as field bonds to the (unconstrained) ghost site
    const std::uint32_t n = 1u << m.n_intervals;
    double num = 0.0, den = 0.0;
    for (std::uint32_t s = 0; s < n; ++s) {
        double w = 1.0;
        for (std::size_t b = 0; b < m.bonds.size(); ++b) {
            double podd = 0.5 * (1.0 - std::exp(-2.0 * m.coupling[b]));
            double tt = spin_of(s, m.bonds[b][0]) * spin_of(s, m.bonds[b][1]);
            w *= (1.0 - podd) + podd * tt;
        }
        for (int i = 0; i < m.n_intervals; ++i) {
            double podd = 0.5 * (1.0 - std::exp(-2.0 * m.field[i]));
            w *= (1.0 - podd) + podd * spin_of(s, i);
        }
        double sa = 1.0;
        for (auto i : m.interval_of_source) sa *= spin_of(s, i);
        num += sa * w;
        den += w;
    }
    return num / den;
}

double conditional_log_partition(const ConditionalIsing& m) {
    check_cap(m);
    const std::uint32_t n = 1u << m.n_intervals;
    const double shift = m.log_scale;
    double den = 0.0;
    for (std::uint32_t s = 0; s < n; ++s) den += std::exp(spin_energy(m, s) - shift);
    return std::log(den) + shift;
}

double conditional_log_partition_transfer(const Region& region,
                                          std::span<const VertexEvent> deaths,
                                          const Params& params) {
    const Lattice& lat = region.lattice();
    const std::int32_t nv = lat.vertex_count();
    if (nv > 12) throw capability_error("transfer partition limited to 12 vertices");
    const double beta = region.beta();
    for (std::int32_t v = 0; v < nv; ++v) {
        const auto& kv = region.vertex_line(v);
        bool box_line = kv.is_full_circle() ||
                        (kv.pieces().size() == 1 && kv.pieces()[0].a == 0.0 &&
                         kv.pieces()[0].b == beta);
        if (!box_line) throw capability_error("transfer partition needs a box region");
    }

    const int dim = 1 << nv;
    const double lam_b = params.bridge_intensity();
    Eigen::VectorXd rate(dim);
    for (int s = 0; s < dim; ++s) {
        double w = 0.0;
        for (const auto& [u, v] : lat.edges()) w += lam_b * spin_of(s, u) * spin_of(s, v);
        for (std::int32_t v = 0; v < nv; ++v) w += params.gamma * spin_of(s, v);
        rate[s] = w;
    }

    std::vector<VertexEvent> ev(deaths.begin(), deaths.end());
    std::sort(ev.begin(), ev.end(),
              [](const VertexEvent& a, const VertexEvent& b) { return a.t < b.t; });

    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(dim, dim);
    double log_scale = 0.0;
    double prev = 0.0;
    auto advance = [&](double to) {
        double dt = to - prev;
        if (dt <= 0.0) {
            prev = to;
            return;
        }
        Eigen::VectorXd g = (dt * rate.array()).exp();
        M = g.asDiagonal() * M;
        prev = to;
        double mx = M.cwiseAbs().maxCoeff();
        if (mx > 0) {
            M /= mx;
            log_scale += std::log(mx);
        }
    };
    for (const auto& d : ev) {
        advance(d.t);
        // sum over the fresh spin on line d.vertex
        const int bit = 1 << d.vertex;
        for (int s = 0; s < dim; ++s) {
            if (s & bit) continue;
            Eigen::RowVectorXd sum = M.row(s) + M.row(s | bit);
            M.row(s) = sum;
            M.row(s | bit) = sum;
        }
    }
    advance(beta);

    double val = region.topology() == TimeTopology::circle
                     ? M.trace()
                     : (Eigen::RowVectorXd::Ones(dim) * M * Eigen::VectorXd::Ones(dim)).value();
    return std::log(val) + log_scale;
}

}  // namespace sti::oracle
