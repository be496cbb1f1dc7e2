// Batch driver for the space-time Ising engine: estimation, verification
// and scanning subcommands with reproducible seeding. All randomness
// derives from --seed through documented stream splitting; identical
// configurations produce byte-identical primary outputs at workers = 1.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sti/io/json_io.hpp"
#include "sti/io/run_config.hpp"
#include "sti/mcmc/scan.hpp"
#include "sti/observables/inequalities.hpp"
#include "sti/oracle/oracle.hpp"
#include "sti/switching/switching.hpp"

using namespace sti;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapability = 3;

struct Cli {
    RunConfig cfg;
    std::string out_prefix = "sti_out";

    Lattice lattice() const {
        int d = static_cast<int>(cfg.get_int("d", 1));
        int n = static_cast<int>(cfg.get_int("n", 1));
        std::string bc = cfg.get("boundary", "periodic");
        if (bc == "chain") return Lattice::chain(static_cast<int>(cfg.get_int("vertices", 2)));
        return Lattice(d, n, bc == "free" ? SpatialBoundary::free : SpatialBoundary::periodic);
    }
    double beta() const { return cfg.get_num("beta", 1.0); }
    TimeTopology topology() const {
        return cfg.get("topology", "circle") == "interval" ? TimeTopology::interval
                                                           : TimeTopology::circle;
    }
    Region region() const { return Region::box(lattice(), beta(), topology()); }
    Params params() const {
        Params p{cfg.get_num("lambda", 1.0), cfg.get_num("delta", 1.0), cfg.get_num("gamma", 0.0)};
        p.validate();
        return p;
    }
    McOptions mc(std::uint64_t op) const {
        McOptions o;
        o.n_samples = cfg.get_int("n_samples", 100000);
        o.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
        o.op_id = op;
        o.workers = static_cast<int>(cfg.get_int("workers", 1));
        return o;
    }
    ChainOptions chain_opt(std::uint64_t op) const {
        ChainOptions o;
        o.sweeps = cfg.get_int("sweeps", 20000);
        o.burn_in = cfg.get_int("burn_in", 2000);
        o.n_chains = static_cast<int>(cfg.get_int("chains", 2));
        o.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
        o.op_id = op;
        o.workers = static_cast<int>(cfg.get_int("workers", 1));
        return o;
    }

    json stamp() const {
        char hex[32];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(cfg.hash()));
        return json{{"version", kVersion},
                    {"config_hash", hex},
                    {"seed", cfg.get_int("seed", 1)},
                    {"config", cfg.canonical_text()}};
    }

    void write_json(const std::string& suffix, json j) const {
        j["meta"] = stamp();
        write_text_file(out_prefix + suffix, j.dump(2) + "\n");
    }

    void write_csv(const std::string& suffix, const std::string& header,
                   const std::vector<std::string>& rows) const {
        std::ostringstream out;
        out << "# " << kVersion << " config_hash=" << std::hex << cfg.hash() << std::dec << "\n";
        out << header << "\n";
        for (const auto& r : rows) out << r << "\n";
        write_text_file(out_prefix + suffix, out.str());
    }

    std::string csv_row(const std::string& observable, const Estimate& e) const {
        std::ostringstream s;
        s.precision(12);
        s << observable << ',' << e.value << ',' << e.std_error << ',' << e.n_samples << ','
          << cfg.get_int("seed", 1) << ',' << params().lambda << ',' << params().delta << ','
          << params().gamma << ',' << beta() << ',' << cfg.get_int("d", 1) << ','
          << cfg.get_int("n", 1);
        return s.str();
    }
};

Point parse_point(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("point must be vertex,time");
    return {static_cast<std::int32_t>(std::stol(s.substr(0, comma))),
            std::stod(s.substr(comma + 1))};
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

const char* kCsvHeader = "observable,value,std_error,n_samples,seed,lambda,delta,gamma,beta,d,n";

int cmd_estimate(const Cli& cli, const std::string& observable, const std::string& xs,
                 const std::string& ys) {
    Region reg = cli.region();
    Params p = cli.params();
    std::vector<std::string> rows;
    if (observable == "magnetization") {
        rows.push_back(cli.csv_row("magnetization", magnetization(reg, p, cli.mc(0xe1))));
    } else if (observable == "correlation") {
        Point x = parse_point(xs), y = parse_point(ys);
        auto e = estimate_correlation(reg, SourceSet::pair(x, y), p, cli.mc(0xe2));
        rows.push_back(cli.csv_row("correlation", e));
    } else if (observable == "truncated") {
        Point x = parse_point(xs), y = parse_point(ys);
        rows.push_back(cli.csv_row("truncated",
                                   truncated_two_point(reg, x, y, p, cli.mc(0xe3))));
    } else if (observable == "susceptibility") {
        auto r = susceptibility(reg, p, static_cast<int>(cli.cfg.get_int("time_points", 64)),
                                cli.mc(0xe4));
        rows.push_back(cli.csv_row("susceptibility", r.chi));
        std::ostringstream extra;
        extra << "quadrature_gap," << r.quadrature_gap << ",0,0,0,0,0,0,0,0,0";
        rows.push_back(extra.str());
    } else {
        std::cerr << "unknown observable: " << observable << "\n";
        return kExitUsage;
    }
    cli.write_csv(".csv", kCsvHeader, rows);
    std::cout << rows[0] << "\n";
    return kExitOk;
}

int cmd_oracle_compare(const Cli& cli) {
    Region reg = cli.region();
    Params p = cli.params();
    oracle::DenseHamiltonian H(cli.lattice(), p);
    Point origin{cli.lattice().origin(), 0.0};
    Point other{cli.lattice().vertex_count() - 1, cli.beta() / 3.0};

    auto m = magnetization(reg, p, cli.mc(0xa1));
    double m_exact = oracle::magnetization(H, cli.beta(), cli.topology());
    std::vector<Point> pairpts{origin, other};
    auto c = estimate_correlation(reg, SourceSet::pair(origin, other), p, cli.mc(0xa2));
    double c_exact = oracle::spacetime_correlation(H, cli.beta(), cli.topology(), pairpts);

    double zm = m.std_error > 0 ? (m.value - m_exact) / m.std_error : 0.0;
    double zc = c.std_error > 0 ? (c.value - c_exact) / c.std_error : 0.0;
    json j{{"magnetization", estimate_to_json(m)},
           {"magnetization_oracle", m_exact},
           {"magnetization_z", zm},
           {"two_point", estimate_to_json(c)},
           {"two_point_oracle", c_exact},
           {"two_point_z", zc}};
    cli.write_json(".json", j);
    std::printf("M: %.6f +- %.6f vs %.6f (z = %+.2f)\n", m.value, m.std_error, m_exact, zm);
    std::printf("two-point: %.6f +- %.6f vs %.6f (z = %+.2f)\n", c.value, c.std_error, c_exact,
                zc);
    bool ok = std::abs(zm) < 3 && std::abs(zc) < 3;
    std::printf("oracle-compare: %s\n", ok ? "PASS" : "FAIL");
    return ok ? kExitOk : kExitAssertion;
}

int cmd_verify(const Cli& cli, const std::string& which) {
    Region reg = cli.region();
    Params p = cli.params();
    if (which == "switching") {
        Point x{0, 0.0};
        Point y{cli.lattice().vertex_count() > 1 ? 1 : 0, cli.beta() / 2};
        auto rep = verify_switching(reg, SourceSet::empty(), SourceSet::empty(), SitePoint::at(x),
                                    SitePoint::at(y), p, cli.mc(0xf1));
        json j{{"lhs", rep.lhs}, {"lhs_se", rep.lhs_se}, {"rhs", rep.rhs},
               {"rhs_se", rep.rhs_se}, {"z", rep.z}};
        cli.write_json(".json", j);
        std::printf("switching identity: z = %+.3f -> %s\n", rep.z,
                    std::abs(rep.z) < 3 ? "PASS" : "FAIL");
        return std::abs(rep.z) < 3 ? kExitOk : kExitAssertion;
    }
    if (which == "ghs") {
        std::int32_t nv = cli.lattice().vertex_count();
        Point x{0, cli.beta() * 0.2};
        Point y{nv > 1 ? 1 : 0, cli.beta() * 0.5};
        Point z{nv > 2 ? 2 : 0, cli.beta() * 0.8};
        auto rep = check_ghs(reg, x, y, z, p, cli.mc(0xf2));
        json j{{"triple", estimate_to_json(rep.triple)},
               {"concavity_second_difference",
                estimate_to_json(rep.concavity_second_difference)},
               {"triple_nonpositive", rep.triple_nonpositive_3se},
               {"concave", rep.concave_3se}};
        cli.write_json(".json", j);
        bool ok = rep.triple_nonpositive_3se && rep.concave_3se;
        std::printf("GHS: triple = %.5f +- %.5f, concavity diff = %.5f -> %s\n",
                    rep.triple.value, rep.triple.std_error,
                    rep.concavity_second_difference.value, ok ? "PASS" : "FAIL");
        return ok ? kExitOk : kExitAssertion;
    }
    if (which == "simon-lieb") {
        if (cli.lattice().vertex_count() < 3 ||
            cli.lattice().boundary() != SpatialBoundary::free) {
            std::cerr << "simon-lieb needs a free chain of >= 3 vertices (boundary = free)\n";
            return kExitUsage;
        }
        Point a{0, 0.0}, b{2, cli.beta() / 2};
        SeparatingSet T{{{1, 0.0, cli.beta()}}};
        double eps = cli.cfg.get_num("epsilon", 0.5 * cli.beta());
        auto rep = check_simon_lieb(reg, a, b, T, eps, p,
                                    static_cast<int>(cli.cfg.get_int("time_points", 16)),
                                    cli.mc(0xf3));
        json j{{"lhs", estimate_to_json(rep.lhs)},
               {"rhs_simon", estimate_to_json(rep.rhs_simon)},
               {"rhs_lieb", estimate_to_json(rep.rhs_lieb)},
               {"epsilon", rep.epsilon},
               {"simon_holds", rep.simon_holds_3se},
               {"lieb_holds", rep.lieb_holds_3se},
               {"lieb_below_simon", rep.lieb_below_simon_3se}};
        cli.write_json(".json", j);
        bool ok = rep.simon_holds_3se && rep.lieb_holds_3se;
        std::printf("Simon: %.5f <= %.5f;  Lieb rhs: %.5f -> %s\n", rep.lhs.value,
                    rep.rhs_simon.value, rep.rhs_lieb.value, ok ? "PASS" : "FAIL");
        return ok ? kExitOk : kExitAssertion;
    }
    if (which == "pdi") {
        PdiOptions o;
        o.mc = cli.mc(0xf4);
        o.time_points = static_cast<int>(cli.cfg.get_int("time_points", 32));
        auto rep = check_main_pdi(reg, p, o);
        json j{{"M", estimate_to_json(rep.M)},
               {"chi", estimate_to_json(rep.chi)},
               {"dM_dlambda", estimate_to_json(rep.dM_dlambda)},
               {"dM_ddelta", estimate_to_json(rep.dM_ddelta)},
               {"lhs", rep.lhs},
               {"rhs", rep.rhs},
               {"slack", rep.slack},
               {"slack_se", rep.slack_se},
               {"terms",
                {{"T", estimate_to_json(rep.term_T)},
                 {"R0", estimate_to_json(rep.term_R0)},
                 {"Rh", estimate_to_json(rep.term_Rh)},
                 {"Rv", estimate_to_json(rep.term_Rv)},
                 {"total", rep.decomposition_total},
                 {"z_vs_M", rep.decomposition_z}}}};
        cli.write_json(".json", j);
        std::printf("PDI: slack = %.5f +- %.5f -> %s\n", rep.slack, rep.slack_se,
                    rep.holds_3se ? "PASS" : "FAIL");
        return rep.holds_3se ? kExitOk : kExitAssertion;
    }
    if (which == "derivatives") {
        DerivativeOptions o;
        o.mc = cli.mc(0xf5);
        o.time_points = static_cast<int>(cli.cfg.get_int("time_points", 32));
        auto est = derivative_estimators(reg, p, o);
        auto m = magnetization(reg, p, cli.mc(0xf6));
        bool b1 = est.dM_dgamma.value <=
                  m.value / p.gamma + 3 * combine_se(est.dM_dgamma.std_error,
                                                     m.std_error / p.gamma);
        double twod = 2.0 * cli.lattice().dimension();
        bool b2 = est.dM_dlambda.value <=
                  twod * m.value * est.dM_dgamma.value +
                      3 * combine_se(est.dM_dlambda.std_error,
                                     twod * m.value * est.dM_dgamma.std_error);
        double mb = 2.0 * m.value / (1.0 - m.value * m.value);
        bool b3 = -est.dM_ddelta.value <=
                  mb * est.dM_dgamma.value +
                      3 * combine_se(est.dM_ddelta.std_error, mb * est.dM_dgamma.std_error);
        json j{{"dM_dgamma", estimate_to_json(est.dM_dgamma)},
               {"dM_dlambda", estimate_to_json(est.dM_dlambda)},
               {"dM_ddelta", estimate_to_json(est.dM_ddelta)},
               {"M", estimate_to_json(m)},
               {"bound_gamma", b1},
               {"bound_lambda", b2},
               {"bound_delta", b3}};
        cli.write_json(".json", j);
        bool ok = b1 && b2 && b3;
        std::printf("derivatives: dM/dg = %.5f, dM/dl = %.5f, dM/dd = %.5f -> %s\n",
                    est.dM_dgamma.value, est.dM_dlambda.value, est.dM_ddelta.value,
                    ok ? "PASS" : "FAIL");
        return ok ? kExitOk : kExitAssertion;
    }
    if (which == "partition") {
        auto rep = verify_partition_identity(reg, p, cli.mc(0xf7));
        json j{{"log_z_mc", rep.log_z_mc},     {"se_mc", rep.se_mc},
               {"log_z_trace", rep.log_z_trace}, {"log_z_quadrature", rep.log_z_quadrature},
               {"z_vs_trace", rep.z_vs_trace},   {"z_vs_quadrature", rep.z_vs_quadrature},
               {"ratio_vs_trace", rep.ratio_vs_trace}};
        cli.write_json(".json", j);
        bool ok = std::abs(rep.z_vs_trace) < 3;
        std::printf("partition identity: ratio = %.6f, z = %+.3f -> %s\n", rep.ratio_vs_trace,
                    rep.z_vs_trace, ok ? "PASS" : "FAIL");
        return ok ? kExitOk : kExitAssertion;
    }
    if (which == "backbone") {
        Point a{0, 0.0};
        Point b{cli.lattice().vertex_count() > 1 ? 1 : 0, cli.beta() / 2};
        auto rep = verify_backbone_representation(reg, SourceSet::pair(a, b), p, cli.mc(0xf8));
        json j{{"via_backbone", estimate_to_json(rep.via_backbone)},
               {"via_parity", estimate_to_json(rep.via_parity)},
               {"z_backbone_vs_parity", rep.z_backbone_vs_parity},
               {"ghost_pair_fraction", rep.ghost_pair_fraction}};
        if (rep.oracle) {
            j["oracle"] = *rep.oracle;
            j["z_backbone_vs_oracle"] = rep.z_backbone_vs_oracle;
        }
        cli.write_json(".json", j);
        bool ok = std::abs(rep.z_backbone_vs_parity) < 3 &&
                  (!rep.oracle || std::abs(rep.z_backbone_vs_oracle) < 3);
        std::printf("backbone representation: z(parity) = %+.3f -> %s\n",
                    rep.z_backbone_vs_parity, ok ? "PASS" : "FAIL");
        return ok ? kExitOk : kExitAssertion;
    }
    std::cerr << "unknown verification: " << which << "\n";
    return kExitUsage;
}

int cmd_scan(const Cli& cli, const std::string& sizes_str) {
    ScanOptions o;
    o.sizes = parse_int_list(sizes_str);
    o.aspect = cli.cfg.get_num("aspect", 1.0);
    o.delta = cli.cfg.get_num("delta", 1.0);
    double lo = cli.cfg.get_num("rho_min", 1.5);
    double hi = cli.cfg.get_num("rho_max", 2.5);
    double step = cli.cfg.get_num("rho_step", 0.1);
    for (double r = lo; r <= hi + 1e-9; r += step) o.rho_grid.push_back(r);
    o.chain = cli.chain_opt(0x5ca0);
    auto res = scan_critical(o);

    std::vector<std::string> rows;
    for (const auto& c : res.cells) {
        std::ostringstream s;
        s.precision(10);
        s << c.n << ',' << c.rho << ',' << c.stats.binder.value << ','
          << c.stats.binder.std_error << ',' << c.stats.m2.value << ',' << c.stats.m4.value
          << ',' << c.stats.m_abs.value << ',' << c.stats.tau_int;
        rows.push_back(s.str());
    }
    cli.write_csv(".csv", "n,rho,binder,binder_se,m2,m4,m_abs,tau_int", rows);

    json j;
    json xs = json::array();
    for (const auto& c : res.crossings)
        xs.push_back({{"n1", c.n1}, {"n2", c.n2}, {"rho_hat", c.rho_hat}, {"se", c.se},
                      {"found", c.found}});
    j["crossings"] = xs;
    if (res.rho_c) j["rho_c"] = estimate_to_json(*res.rho_c);
    if (!res.diagnostic.empty()) j["diagnostic"] = res.diagnostic;
    cli.write_json(".json", j);

    if (res.rho_c)
        std::printf("rho_c = %.4f +- %.4f\n", res.rho_c->value, res.rho_c->std_error);
    else
        std::printf("no crossing estimate: %s\n", res.diagnostic.c_str());
    return kExitOk;
}

// resumable single-chain run: per-sweep series CSV, world + position in a
// checkpoint; continuation re-derives the stream from (seed, sweep count)
int cmd_decay_resumable(const Cli& cli, const std::string& disp_str,
                        const std::string& ckpt_path) {
    auto displacements = parse_int_list(disp_str);
    int n = static_cast<int>(cli.cfg.get_int("n", 16));
    int d = static_cast<int>(cli.cfg.get_int("d", 1));
    double beta = cli.cfg.get_num("beta", n);
    double rho = cli.cfg.get_num("rho", 1.0);
    Params p{rho * cli.cfg.get_num("delta", 1.0), cli.cfg.get_num("delta", 1.0), 0.0};
    std::uint64_t seed = static_cast<std::uint64_t>(cli.cfg.get_int("seed", 1));
    std::int64_t target = cli.cfg.get_int("sweeps", 20000);
    std::int64_t burn = cli.cfg.get_int("burn_in", 2000);

    Lattice lat(d, n, SpatialBoundary::periodic);
    SpinWorld world(lat, beta);
    std::ifstream ck(ckpt_path);
    if (ck) {
        json j;
        ck >> j;
        checkpoint_into_world(j, world);
        std::printf("resuming at sweep %lld\n",
                    static_cast<long long>(world.sweep_count()));
    }
    std::ofstream series(cli.out_prefix + ".series.csv",
                         world.sweep_count() > 0 ? std::ios::app : std::ios::trunc);
    if (world.sweep_count() == 0) series << "sweep,m\n";
    std::vector<MeanVar> corr(displacements.size());
    while (world.sweep_count() < burn + target) {
        // one stream per sweep: continuation is independent of stop points
        Rng rng = Rng::stream(seed, Rng::mix(0xdeca, static_cast<std::uint64_t>(world.sweep_count())));
        world.cluster_sweep(p, rng);
        auto smp = world.measure(displacements);
        series << world.sweep_count() << ',' << smp.m << '\n';
        if (world.sweep_count() > burn)
            for (std::size_t k = 0; k < displacements.size(); ++k)
                corr[k].add(smp.pair_corr[k]);
    }
    write_text_file(ckpt_path, checkpoint_to_json(world, seed).dump(2) + "\n");
    std::vector<std::string> rows;
    for (std::size_t k = 0; k < displacements.size(); ++k) {
        std::ostringstream s;
        s.precision(10);
        s << displacements[k] << ',' << corr[k].mean << ',' << corr[k].se_of_mean() << ','
          << corr[k].n;
        rows.push_back(s.str());
    }
    cli.write_csv(".csv", "distance,value,std_error,n_samples", rows);
    std::printf("checkpoint written to %s at sweep %lld\n", ckpt_path.c_str(),
                static_cast<long long>(world.sweep_count()));
    return kExitOk;
}

int cmd_decay(const Cli& cli, const std::string& disp_str) {
    auto displacements = parse_int_list(disp_str);
    int n = static_cast<int>(cli.cfg.get_int("n", 16));
    auto prof = decay_profile(static_cast<int>(cli.cfg.get_int("d", 1)), n,
                              cli.cfg.get_num("beta", n), cli.cfg.get_num("rho", 1.0),
                              displacements, cli.chain_opt(0xdecb));
    std::vector<std::string> rows;
    for (const auto& [dist, e] : prof) {
        std::ostringstream s;
        s.precision(10);
        s << dist << ',' << e.value << ',' << e.std_error << ',' << e.n_samples;
        rows.push_back(s.str());
    }
    cli.write_csv(".csv", "distance,value,std_error,n_samples", rows);
    try {
        auto fit = mass_estimate(prof);
        json j{{"mass", estimate_to_json(fit.mass)}, {"points_used", fit.points_used}};
        cli.write_json(".json", j);
        std::printf("mass = %.5f +- %.5f (%d points)\n", fit.mass.value, fit.mass.std_error,
                    fit.points_used);
    } catch (const std::exception& e) {
        std::printf("mass fit unavailable: %s\n", e.what());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"space-time Ising engine: estimation, verification, scanning"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_prefix = "sti_out";
    std::int64_t seed = -1;
    int workers = -1;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--seed", seed, "root seed (overrides config)");
    app.add_option("--workers", workers, "worker threads (overrides config)");
    app.add_option("--out", out_prefix, "output path prefix");
    app.add_option("--set", sets, "extra key=value overrides (repeatable)")->type_size(1)->expected(-1);

    auto* est = app.add_subcommand("estimate", "estimate an observable");
    std::string observable = "magnetization", xs = "0,0", ys = "0,0";
    est->add_option("observable", observable,
                    "magnetization | correlation | truncated | susceptibility");
    est->add_option("--x", xs, "first point as vertex,time");
    est->add_option("--y", ys, "second point as vertex,time");

    auto* ver = app.add_subcommand("verify", "verify an identity or inequality");
    std::string which;
    ver->add_option("which", which,
                    "switching | ghs | simon-lieb | pdi | derivatives | partition | backbone")
        ->required();

    auto* orc = app.add_subcommand("oracle-compare", "compare estimators to the exact trace");

    auto* scan = app.add_subcommand("scan-critical", "Binder-crossing scan over rho");
    std::string sizes = "8,16,32";
    scan->add_option("--sizes", sizes, "comma-separated half-widths");

    auto* dec = app.add_subcommand("decay", "correlation decay profile and mass fit");
    std::string displacements = "1,2,3,4,5,6";
    std::string ckpt_path;
    dec->add_option("--displacements", displacements, "comma-separated distances");
    dec->add_option("--checkpoint", ckpt_path,
                    "resumable run: load/store a world checkpoint, write the m time series");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" ? kExitOk : kExitUsage;
    }

    try {
        Cli cli;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot open config " << config_path << "\n";
                return kExitUsage;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            cli.cfg = RunConfig::parse(ss.str());
        }
        for (const auto& kv : sets) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) {
                std::cerr << "--set needs key=value\n";
                return kExitUsage;
            }
            cli.cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (seed >= 0) cli.cfg.set("seed", std::to_string(seed));
        if (workers > 0) cli.cfg.set("workers", std::to_string(workers));
        cli.out_prefix = out_prefix;

        if (est->parsed()) return cmd_estimate(cli, observable, xs, ys);
        if (ver->parsed()) return cmd_verify(cli, which);
        if (orc->parsed()) return cmd_oracle_compare(cli);
        if (scan->parsed()) return cmd_scan(cli, sizes);
        if (dec->parsed())
            return ckpt_path.empty() ? cmd_decay(cli, displacements)
                                     : cmd_decay_resumable(cli, displacements, ckpt_path);
        return kExitUsage;
    } catch (const oracle::capability_error& e) {
        std::cerr << "capability error: " << e.what() << "\n";
        return kExitCapability;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAssertion;
    }
}
