// Command-line front end: partition functions, correlations, limit kernels, ring
// processes, simulation and the acceptance battery. Reports are JSON (or CSV) on stdout.
#include "snake/error.hpp"
#include "snake/io.hpp"
#include "snake/kasteleyn.hpp"
#include "snake/lattice.hpp"
#include "snake/limits.hpp"
#include "snake/ring.hpp"
#include "snake/simulate.hpp"
#include "snake/verify.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace snake;
using io::Json;

namespace {

constexpr int kExitBreach = 2;
constexpr int kExitUsage = 64;

struct Output {
    std::string format = "json";
    std::string path;
    std::string table = "rows";
};

struct LatticeArgs {
    int m1 = 3, m2 = 3;
    double alpha = 1.0, beta = 0.0, gamma = 0.0, delta = 0.0;
    TorusShape shape() const { return {m1, m2}; }
    Params params() const { return {alpha, beta, gamma, delta}; }
};

struct RingArgs {
    int n = 5, ell = 2;
    double T = 1.0, Tp = 0.0;
    RateParams rates() const { return {T, Tp}; }
};

void add_lattice(CLI::App* app, LatticeArgs& a, bool with_shape = true) {
    if (with_shape) {
        app->add_option("--m1", a.m1, "torus width")->check(CLI::PositiveNumber);
        app->add_option("--m2", a.m2, "torus height")->check(CLI::PositiveNumber);
    }
    app->add_option("--alpha", a.alpha, "Fixed weight");
    app->add_option("--beta", a.beta, "Right weight");
    app->add_option("--gamma", a.gamma, "Up weight");
    app->add_option("--delta", a.delta, "Down weight");
}

void add_ring(CLI::App* app, RingArgs& a) {
    app->add_option("--n", a.n, "ring size")->check(CLI::Range(2, 1 << 20));
    app->add_option("--ell", a.ell, "number of walkers")->check(CLI::PositiveNumber);
    app->add_option("--T", a.T, "up-jump rate")->check(CLI::NonNegativeNumber);
    app->add_option("--Tp", a.Tp, "down-jump rate")->check(CLI::NonNegativeNumber);
}

Json params_json(const Params& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"delta", p.delta}};
}

Json rates_json(const RateParams& r) { return {{"T", r.T}, {"Tp", r.Tp}}; }

std::string positions_string(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}

std::vector<int> parse_positions(const std::string& text) {
    std::vector<int> v;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        if (!item.empty()) {
            try {
                v.push_back(std::stoi(item));
            } catch (const std::exception&) {
                throw Error(ErrorCode::Precondition, "bad position '" + item + "'");
            }
        }
    return v;
}

WalkerConfig spread_config(int n, int ell) {
    require(ell >= 1 && ell <= n, ErrorCode::Precondition, "need 1 <= ell <= n");
    std::vector<int> pos;
    for (int i = 0; i < ell; ++i) pos.push_back(static_cast<int>(static_cast<long>(i) * n / ell));
    return make_config(n, pos);
}

Json limit_json(const LimitCorrelation& c) {
    return {{"value", c.value}, {"kernel_trace", io::words_json(c.words)}, {"quadrature_error", c.quadrature_error}};
}

// ---- partition ----

struct PartitionCmd {
    LatticeArgs lat;
    bool check = false;
    double tol = 1e-9;
};

int run_partition(const PartitionCmd& c, Json& result) {
    const TorusShape sh = c.lat.shape();
    const Params p = c.lat.params();
    PartitionReport rep = partition_report(sh, p);
    result["shape"] = {{"m1", sh.m1}, {"m2", sh.m2}};
    result["params"] = params_json(p);
    result["z"] = rep.z;
    result["log_abs_z"] = rep.log_abs_z;
    Json rows = Json::array();
    for (std::size_t i = 0; i < kSectors.size(); ++i)
        rows.push_back({{"theta1", kSectors[i].theta1},
                        {"theta2", kSectors[i].theta2},
                        {"c_det_re", rep.c_det[i].real()},
                        {"c_det_im", rep.c_det[i].imag()},
                        {"log_abs_det", rep.det[i].log_abs},
                        {"lambda_re", rep.lambda[i].real()},
                        {"lambda_im", rep.lambda[i].imag()}});
    result["rows"] = rows;
    if (!c.check) return 0;
    const double bf = brute_force_partition(sh, p).value;
    const double residual = std::abs(rep.z - bf) / std::max(1.0, std::abs(bf));
    const bool pass = residual <= c.tol;
    result["check"] = {{"brute_force", bf}, {"residual", residual}, {"tolerance", c.tol}, {"pass", pass}};
    return pass ? 0 : kExitBreach;
}

// ---- correlate ----

struct CorrelateCmd {
    LatticeArgs lat;
    std::string query, events;
    int theta2 = -1;
    bool trace = false;
};

int run_correlate(const CorrelateCmd& c, Json& result) {
    io::CorrelationRequest req;
    if (!c.query.empty()) {
        req = io::parse_correlation_request(io::json_argument(c.query));
    } else {
        require(!c.events.empty(), ErrorCode::Precondition, "give --query or --events");
        req = {c.lat.shape(), c.lat.params(), io::parse_event_query(io::json_argument(c.events))};
    }
    CorrelationOptions opt;
    opt.theta2 = c.theta2;
    CorrelationReport rep = correlate(req.shape, req.params, req.events, opt);
    result["shape"] = {{"m1", req.shape.m1}, {"m2", req.shape.m2}};
    result["params"] = params_json(req.params);
    result["events"] = io::event_query_json(req.events);
    result["theta2"] = c.theta2;
    result["value"] = rep.value;
    Json rows = Json::array();
    for (const SectorTerm& t : rep.sectors)
        rows.push_back({{"theta1", t.sector.theta1},
                        {"theta2", t.sector.theta2},
                        {"lambda_re", t.lambda.real()},
                        {"lambda_im", t.lambda.imag()},
                        {"log_abs_det", t.det.log_abs},
                        {"det_phase_re", t.det.phase.real()},
                        {"det_phase_im", t.det.phase.imag()},
                        {"dense_fallback", t.dense_fallback}});
    result["rows"] = rows;
    if (c.trace) result["words"] = io::words_json(rep.words);
    return 0;
}

// ---- limit ----

struct LimitCmd {
    int ell = 2, n = 4;
    double tau = 0.5, beta = 1.0, gamma = 0.0, delta = 0.0, tolerance = 1e-10;
    int samples = 10000;
    std::string events;
};

int run_cylinder(const LimitCmd& c, Json& result) {
    CylinderSpec spec{c.ell, c.n, c.gamma, c.delta};
    LimitCorrelation r = cylinder_correlation(spec, io::parse_event_query(io::json_argument(c.events)));
    result = limit_json(r);
    result["ell"] = c.ell;
    result["n"] = c.n;
    return 0;
}

int run_plane(const LimitCmd& c, Json& result) {
    PlaneSpec spec{c.tau, c.gamma, c.delta, c.tolerance};
    LimitCorrelation r = plane_correlation(spec, io::parse_event_query(io::json_argument(c.events)));
    result = limit_json(r);
    result["tau"] = c.tau;
    return 0;
}

int run_arc(const LimitCmd& c, Json& result) {
    ArcGeometry g = arc_geometry(c.beta, c.gamma, c.delta, c.n);
    result["beta"] = c.beta;
    result["intersects"] = g.intersects;
    result["full"] = g.full;
    result["empty"] = g.empty;
    result["t_beta"] = g.t_beta ? Json(*g.t_beta) : Json(nullptr);
    result["generic_theta2_0"] = g.generic[0];
    result["generic_theta2_1"] = g.generic[1];
    result["single_interval"] = arc_single_interval(c.beta, c.gamma, c.delta, c.samples);
    Json rows = Json::array();
    for (int theta2 = 0; theta2 < 2; ++theta2)
        try {
            rows.push_back({{"theta2", theta2}, {"ell", cylinder_ell_from_beta(c.beta, c.gamma, c.delta, c.n, theta2)}});
        } catch (const Error&) {
            rows.push_back({{"theta2", theta2}, {"ell", nullptr}});
        }
    result["rows"] = rows;
    return 0;
}

// ---- ring ----

struct RingCmd {
    RingArgs ring;
    double t = 1.0;
    int x = -1, y = -1;
    std::string state, events;
};

int run_ring_kernel(const RingCmd& c, Json& result) {
    const RingArgs& r = c.ring;
    result["n"] = r.n;
    result["ell"] = r.ell;
    result["rates"] = rates_json(r.rates());
    result["t"] = c.t;
    Json rows = Json::array();
    for (int x = 0; x < r.n; ++x)
        for (int y = 0; y < r.n; ++y) {
            if ((c.x >= 0 && x != c.x) || (c.y >= 0 && y != c.y)) continue;
            rows.push_back({{"x", x}, {"y", y}, {"value", km_kernel(r.n, r.ell, r.rates(), x, y, c.t)}});
        }
    result["rows"] = rows;
    return 0;
}

int run_ring_stationary(const RingCmd& c, Json& result) {
    const RingArgs& r = c.ring;
    RingConstants k = ring_constants(r.ell, r.n);
    result["n"] = r.n;
    result["ell"] = r.ell;
    result["mu"] = k.mu;
    result["c"] = k.c;
    result["C"] = k.Cln;
    Json rows = Json::array();
    for (const WalkerConfig& h : StateSpace(r.n, r.ell).states())
        rows.push_back({{"state", positions_string(h.positions)},
                        {"delta", vandermonde_delta(h)},
                        {"traffic", traffic(h)},
                        {"probability", stationary_prob(h)}});
    result["rows"] = rows;
    return 0;
}

int run_ring_rates(const RingCmd& c, Json& result) {
    const RingArgs& r = c.ring;
    WalkerConfig h = c.state.empty() ? spread_config(r.n, r.ell) : make_config(r.n, parse_positions(c.state));
    result["n"] = h.n;
    result["state"] = positions_string(h.positions);
    result["rates"] = rates_json(r.rates());
    Json rows = Json::array();
    auto add = [&](const char* process, const std::vector<Move>& moves) {
        for (const Move& m : moves)
            rows.push_back({{"process", process},
                            {"particle", m.particle},
                            {"direction", m.direction},
                            {"to", positions_string(m.to.positions)},
                            {"rate", m.rate}});
    };
    add("conditioned", conditioned_moves(h, r.rates()));
    add("asep", asep_moves(h, r.rates()));
    result["rows"] = rows;
    return 0;
}

int run_ring_correlate(const RingCmd& c, Json& result) {
    const RingArgs& r = c.ring;
    std::vector<SpaceTimeEvent> events = io::parse_spacetime_events(io::json_argument(c.events));
    SpaceTimeResult s = spacetime_correlation(r.ell, r.n, r.rates(), events);
    result["n"] = r.n;
    result["ell"] = r.ell;
    result["rates"] = rates_json(r.rates());
    result["value"] = s.value;
    result["density_order"] = s.density_order;
    result["units"] = s.density_order == 0 ? "probability" : fmt::format("per unit time^{}", s.density_order);
    result["conflict"] = s.conflict;
    return 0;
}

int run_ring_generator(const RingCmd& c, Json& result) {
    const RingArgs& r = c.ring;
    double worst = 0.0;
    Json rows = Json::array();
    for (const WalkerConfig& h : StateSpace(r.n, r.ell).states()) {
        double res = generator_residual(h, r.rates());
        worst = std::max(worst, res);
        rows.push_back({{"state", positions_string(h.positions)},
                        {"traffic", traffic(h)},
                        {"generator_delta", asep_generator_delta(h, r.rates())},
                        {"residual", res}});
    }
    result["n"] = r.n;
    result["ell"] = r.ell;
    result["max_residual"] = worst;
    result["rows"] = rows;
    return 0;
}

// ---- sim ----

struct SimCmd {
    RingArgs ring;
    std::string start;
    double horizon = 1.0;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    int snapshots = 0;
};

int run_sim(Dynamics d, const SimCmd& c, Json& result, Output& out) {
    const RingArgs& r = c.ring;
    WalkerConfig x = c.start.empty() ? spread_config(r.n, r.ell) : make_config(r.n, parse_positions(c.start));
    StateSpace space(x.n, x.ell());
    const double t = c.horizon;
    std::vector<PathFunctional> fs;
    for (const WalkerConfig& y : space.states())
        fs.push_back([y, t, d](const PathRecord& p) {
            if (d == Dynamics::Free && p.tau && *p.tau <= t) return 0.0;
            std::vector<int> v = p.positions_at(t);
            std::sort(v.begin(), v.end());
            return v == y.positions ? 1.0 : 0.0;
        });
    fs.push_back([t](const PathRecord& p) { return p.tau && *p.tau <= t ? 0.0 : 1.0; });
    fs.push_back([](const PathRecord& p) { return static_cast<double>(p.jumps.size()); });
    if (d == Dynamics::Asep)
        fs.push_back([t, rates = r.rates()](const PathRecord& p) { return unit_mean_martingale(p, rates, t); });
    std::vector<EstimatorReport> est = estimate_many(fs, {d, x, r.rates(), t}, c.samples, c.seed, c.threads);

    auto report = [](const EstimatorReport& e) { return Json{{"estimate", e.estimate}, {"std_error", e.std_error}}; };
    result["dynamics"] = dynamics_name(d);
    result["start"] = positions_string(x.positions);
    result["n"] = x.n;
    result["rates"] = rates_json(r.rates());
    result["horizon"] = t;
    result["samples"] = c.samples;
    result["seed"] = c.seed;
    // exact law at the horizon: non-collision determinant for free walkers, Qtran otherwise
    Json rows = Json::array();
    for (std::size_t i = 0; i < space.size(); ++i) {
        Json row{{"state", positions_string(space[i].positions)},
                 {"estimate", est[i].estimate},
                 {"std_error", est[i].std_error}};
        if (d != Dynamics::Asep) {
            double exact = d == Dynamics::Free ? noncollision_det(x, space[i], r.rates(), t)
                                               : conditioned_transition(x, space[i], r.rates(), t);
            row["exact"] = exact;
        }
        rows.push_back(row);
    }
    result["rows"] = rows;
    const std::size_t k = space.size();
    if (d == Dynamics::Free) {
        result["survival"] = report(est[k]);
        result["survival_exact"] = survival_probability(x, r.rates(), t);
    }
    result["jumps"] = report(est[k + 1]);
    if (d == Dynamics::Asep) result["unit_mean_martingale"] = report(est[k + 2]);
    if (c.snapshots > 0) {
        PathRecord path = [&] {
            Rng rng(replica_seed(c.seed, 0));
            return simulate(d, x, r.rates(), t, rng);
        }();
        Json series = Json::array();
        for (int i = 0; i <= c.snapshots; ++i) {
            double s = t * i / c.snapshots;
            series.push_back({{"t", s}, {"positions", positions_string(path.positions_at(s))}});
        }
        result["series"] = series;
        out.table = "series";
    }
    return 0;
}

// ---- verify ----

struct VerifyCmd {
    std::string suite = "all";
    std::uint64_t seed = 42;
};

int run_verify(const VerifyCmd& c, Json& result, Json& timing) {
    std::vector<std::string> names = c.suite == "all" ? verify::suite_names() : std::vector<std::string>{c.suite};
    bool all_pass = true;
    Json suites = Json::array(), rows = Json::array();
    for (const std::string& name : names) {
        verify::SuiteReport rep = verify::run_suite(name, c.seed);
        Json criteria = Json::array();
        for (const verify::Criterion& k : rep.criteria) {
            if (k.timing) {
                timing.push_back({{"name", k.name}, {"seconds", k.measured}, {"limit", k.tolerance}, {"pass", k.pass}});
                continue;
            }
            Json j{{"name", k.name}, {"measured", k.measured}, {"tolerance", k.tolerance}, {"pass", k.pass},
                   {"detail", k.detail}};
            criteria.push_back(j);
            rows.push_back(j);
        }
        all_pass = all_pass && rep.pass();
        suites.push_back({{"suite", name}, {"pass", rep.pass()}, {"criteria", criteria}});
    }
    result["seed"] = c.seed;
    result["pass"] = all_pass;
    result["suites"] = suites;
    result["rows"] = rows;
    return all_pass ? 0 : 1;
}

std::string command_line(int argc, char** argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) s += (i > 1 ? " " : "") + std::string(argv[i]);
    return s;
}

void emit(const Json& doc, const Output& out) {
    std::string text = out.format == "csv" ? io::to_csv(doc["result"], out.table) : io::dump(doc) + "\n";
    if (out.path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out.path);
    require(f.good(), ErrorCode::Precondition, "cannot write " + out.path);
    f << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Snake model: partition functions, correlations, limits and ring processes"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "flat key-value file of flag values; flags on the command line win");
    Output out;
    app.add_option("--output", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", out.path, "write the report to this file instead of stdout");

    PartitionCmd part;
    auto* partition = app.add_subcommand("partition", "partition function as a sum of four determinants");
    add_lattice(partition, part.lat);
    partition->add_flag("--check", part.check, "compare with exhaustive enumeration (exit 2 on breach)");
    partition->add_option("--tol", part.tol, "relative tolerance for --check")->check(CLI::PositiveNumber);

    CorrelateCmd corr;
    auto* correlate_cmd = app.add_subcommand("correlate", "event probability from the kernel determinants");
    add_lattice(correlate_cmd, corr.lat);
    auto* query_opt = correlate_cmd->add_option("--query", corr.query, "request JSON {shape, params, events} (file or inline)");
    correlate_cmd->add_option("--events", corr.events, "event list JSON (file or inline)")->excludes(query_opt);
    for (const char* flag : {"--m1", "--m2", "--alpha", "--beta", "--gamma", "--delta"})
        correlate_cmd->get_option(flag)->excludes(query_opt);
    correlate_cmd->add_option("--theta2", corr.theta2, "-1 for the full measure, 0 or 1 for a sector")
        ->check(CLI::IsMember({-1, 0, 1}));
    correlate_cmd->add_flag("--trace", corr.trace, "include the word expansion");

    LimitCmd lim;
    auto* limit = app.add_subcommand("limit", "scaling-limit kernels");
    limit->require_subcommand(1);
    auto* cylinder = limit->add_subcommand("cylinder", "semi-infinite cylinder measure");
    cylinder->add_option("--ell", lim.ell, "Right steps per column")->check(CLI::NonNegativeNumber);
    cylinder->add_option("--n", lim.n, "column height")->check(CLI::PositiveNumber);
    cylinder->add_option("--gamma", lim.gamma);
    cylinder->add_option("--delta", lim.delta);
    cylinder->add_option("--events", lim.events, "event list JSON (file or inline)")->required();
    auto* plane = limit->add_subcommand("plane", "plane measure by contour integration");
    plane->add_option("--tau", lim.tau, "Right density")->check(CLI::Range(0.0, 1.0));
    plane->add_option("--gamma", lim.gamma);
    plane->add_option("--delta", lim.delta);
    plane->add_option("--tolerance", lim.tolerance, "quadrature tolerance")->check(CLI::PositiveNumber);
    plane->add_option("--events", lim.events, "event list JSON (file or inline)")->required();
    auto* arc = limit->add_subcommand("arc", "arc geometry of the root sets");
    arc->add_option("--beta", lim.beta)->check(CLI::NonNegativeNumber);
    arc->add_option("--gamma", lim.gamma);
    arc->add_option("--delta", lim.delta);
    arc->add_option("--n", lim.n, "column height for the root genericity test")->check(CLI::PositiveNumber);
    arc->add_option("--samples", lim.samples, "circle samples")->check(CLI::PositiveNumber);

    RingCmd rc;
    auto* ring = app.add_subcommand("ring", "walkers on the ring");
    ring->require_subcommand(1);
    auto* kernel = ring->add_subcommand("kernel", "twisted single-walker kernel");
    add_ring(kernel, rc.ring);
    kernel->add_option("--t", rc.t, "time")->check(CLI::NonNegativeNumber);
    kernel->add_option("--x", rc.x, "restrict to one start site");
    kernel->add_option("--y", rc.y, "restrict to one end site");
    auto* stationary = ring->add_subcommand("stationary", "stationary law of the conditioned walkers");
    add_ring(stationary, rc.ring);
    auto* rates = ring->add_subcommand("rates", "jump rates out of a configuration");
    add_ring(rates, rc.ring);
    rates->add_option("--state", rc.state, "comma-separated positions (default: spread out)");
    auto* ring_corr = ring->add_subcommand("correlate", "space-time correlation of the stationary process");
    add_ring(ring_corr, rc.ring);
    ring_corr->add_option("--events", rc.events, "[{t, h, f}] JSON (file or inline)")->required();
    auto* gen = ring->add_subcommand("check-generator", "exclusion generator applied to Delta, per configuration");
    add_ring(gen, rc.ring);

    SimCmd sc;
    auto* sim = app.add_subcommand("sim", "exact simulation and replicated estimators");
    sim->require_subcommand(1);
    std::vector<std::pair<CLI::App*, Dynamics>> sims;
    for (Dynamics d : {Dynamics::Free, Dynamics::Conditioned, Dynamics::Asep}) {
        auto* s = sim->add_subcommand(dynamics_name(d), std::string(dynamics_name(d)) + " walkers");
        add_ring(s, sc.ring);
        s->add_option("--start", sc.start, "comma-separated start positions (default: spread out)");
        s->add_option("--horizon", sc.horizon, "time horizon")->check(CLI::NonNegativeNumber);
        s->add_option("--samples", sc.samples, "replicas")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
        s->add_option("--seed", sc.seed, "master seed");
        s->add_option("--threads", sc.threads, "worker threads (0: all cores); results do not depend on it");
        s->add_option("--snapshots", sc.snapshots, "configuration of replica 0 at this many equal steps")
            ->check(CLI::NonNegativeNumber);
        sims.emplace_back(s, d);
    }

    VerifyCmd vc;
    auto* verify_cmd = app.add_subcommand("verify", "run acceptance suites");
    verify_cmd->add_option("--suite", vc.suite, "suite name or all");
    verify_cmd->add_option("--seed", vc.seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (verify_cmd->parsed() && vc.suite != "all" && !verify::is_suite(vc.suite)) {
        std::string names;
        for (const auto& n : verify::suite_names()) names += " " + n;
        fmt::print(stderr, "unknown suite '{}'; expected all or one of:{}\n", vc.suite, names);
        return kExitUsage;
    }

    Json result = Json::object();
    Json timing = Json::array();
    std::string command = command_line(argc, argv);
    int code = 0;
    try {
        if (partition->parsed()) code = run_partition(part, result);
        else if (correlate_cmd->parsed()) code = run_correlate(corr, result);
        else if (cylinder->parsed()) code = run_cylinder(lim, result);
        else if (plane->parsed()) code = run_plane(lim, result);
        else if (arc->parsed()) code = run_arc(lim, result);
        else if (kernel->parsed()) code = run_ring_kernel(rc, result);
        else if (stationary->parsed()) code = run_ring_stationary(rc, result);
        else if (rates->parsed()) code = run_ring_rates(rc, result);
        else if (ring_corr->parsed()) code = run_ring_correlate(rc, result);
        else if (gen->parsed()) code = run_ring_generator(rc, result);
        else if (verify_cmd->parsed()) code = run_verify(vc, result, timing);
        else
            for (auto& [s, d] : sims)
                if (s->parsed()) code = run_sim(d, sc, result, out);
    } catch (const Error& e) {
        fmt::print(stderr, "{}\n", e.what());
        const bool usage = e.code() == ErrorCode::Precondition || e.code() == ErrorCode::UnsupportedParameter;
        return usage ? kExitUsage : 1;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }

    Json doc = io::document(command, std::move(result), io::utc_timestamp());
    if (!timing.empty()) doc["header"]["timing"] = timing;
    try {
        emit(doc, out);
    } catch (const Error& e) {
        fmt::print(stderr, "{}\n", e.what());
        return kExitUsage;
    }
    return code;
}
