#include "snake/verify.hpp"

#include "snake/error.hpp"
#include "snake/kasteleyn.hpp"
#include "snake/lattice.hpp"
#include "snake/limits.hpp"
#include "snake/oracles.hpp"
#include "snake/ring.hpp"
#include "snake/simulate.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

namespace snake::verify {

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Criterion timing(std::string name, Clock::time_point start, double limit) {
    Criterion c = at_most(std::move(name), seconds_since(start), limit, "seconds");
    c.timing = true;
    return c;
}

Criterion count_zero(std::string name, long failures, long total) {
    return at_most(std::move(name), static_cast<double>(failures), 0.0, fmt::format("{} of {} failed", failures, total));
}

EventQuery random_query(const TorusShape& sh, int size, std::mt19937_64& rng) {
    std::vector<int> idx(sh.sites());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    EventQuery q;
    for (int i = 0; i < size && i < sh.sites(); ++i) {
        Step s;
        do {
            s = kAllSteps[rng() % 4];
        } while (!step_allowed(sh, s));
        q.push_back({site_at(sh, idx[i]), s});
    }
    return q;
}

// ---- lattice identities ----

SuiteReport partition_suite(std::uint64_t) {
    const auto start = Clock::now();
    const std::vector<TorusShape> shapes{{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}, {4, 2}, {3, 4}, {4, 3}, {4, 4}};
    double worst = 0.0;
    int points = 0;
    for (const TorusShape& sh : shapes)
        for (double beta : {0.0, 0.5, 1.2})
            for (double gamma : {0.0, 0.3, 0.5})
                for (double delta : {0.0, 0.3, 0.5}) {
                    Params p{1.0, beta, gamma, delta};
                    if (p.alpha * p.alpha < 4 * gamma * delta) continue;
                    double bf = brute_force_partition(sh, p).value;
                    worst = std::max(worst, std::abs(partition_function(sh, p) - bf) / std::max(1.0, std::abs(bf)));
                    ++points;
                }
    return {"partition",
            {at_most("partition.determinant_vs_enumeration", worst, 1e-9,
                     fmt::format("max relative residual over {} (shape, parameter) points", points)),
             timing("partition.runtime", start, 300.0)}};
}

SuiteReport correlation_suite(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::vector<Params> points{{1, 0.5, 0.3, 0.2}, {1, 1.2, 0.5, 0.3}, {1, 0.8, 0.3, 0.5}};
    double worst = 0.0, worst_sum = 0.0;
    int queries = 0;
    for (TorusShape sh : {TorusShape{3, 3}, TorusShape{2, 4}})
        for (const Params& p : points) {
            oracle::WeightedPure wp(sh, p);
            for (int s = 0; s < sh.sites(); ++s) {
                double total = 0.0;
                for (Step st : kAllSteps) {
                    if (!step_allowed(sh, st)) continue;
                    EventQuery q{{site_at(sh, s), st}};
                    double v = correlation(sh, p, q);
                    worst = std::max(worst, std::abs(v - wp.probability(q)));
                    total += v;
                    ++queries;
                }
                worst_sum = std::max(worst_sum, std::abs(total - 1.0));
            }
            for (int i = 0; i < 20; ++i) {
                EventQuery q = random_query(sh, 2 + i % 2, rng);
                worst = std::max(worst, std::abs(correlation(sh, p, q) - wp.probability(q)));
                ++queries;
            }
        }
    return {"correlation",
            {at_most("correlation.kernel_vs_enumeration", worst, 1e-9, fmt::format("max abs error over {} queries", queries)),
             at_most("correlation.step_probabilities_sum_to_one", worst_sum, 1e-9)}};
}

SuiteReport sign_suite(std::uint64_t) {
    long failures = 0, total = 0;
    for (int m1 = 1; m1 <= 4; ++m1)
        for (int m2 = 1; m2 <= 4; ++m2) {
            TorusShape sh{m1, m2};
            enumerate_configs(sh, false, [&](const SnakeConfig& c) {
                CycleData d = cycle_data(c);
                cplx sum = 0.0;
                for (Sector s : kSectors)
                    sum += c_coeff(s, sh) * std::polar(1.0, kPi * (s.theta1 * double(d.counts.right) / m1 +
                                                                   s.theta2 * double(d.counts.up - d.counts.down) / m2));
                double expect = (d.snakelets % 2 ? -1.0 : 1.0) * oracle::permutation_sign(c);
                failures += std::abs(sum - expect) > 1e-12;
                ++total;
            });
        }
    return {"sign", {count_zero("sign.sector_sum_equals_signature", failures, total)}};
}

// ---- limits ----

SuiteReport cylinder_suite(std::uint64_t) {
    const CylinderSpec spec{2, 4, 0.2, 0.2};
    const Params p{1.0, 1.0, 0.2, 0.2};
    const std::vector<EventQuery> battery{
        {{{0, 0}, Step::Right}},
        {{{0, 1}, Step::Up}},
        {{{0, 2}, Step::Down}},
        {{{0, 3}, Step::Fixed}},
        {{{0, 0}, Step::Right}, {{1, 0}, Step::Right}},
        {{{0, 0}, Step::Up}, {{1, 2}, Step::Down}},
        {{{0, 0}, Step::Right}, {{0, 1}, Step::Right}},
        {{{0, 0}, Step::Fixed}, {{2, 1}, Step::Up}},
        {{{0, 0}, Step::Right}, {{1, 1}, Step::Up}, {{3, 2}, Step::Right}},
        {{{0, 1}, Step::Down}, {{1, 3}, Step::Fixed}, {{2, 0}, Step::Right}},
    };
    std::map<int, double> residual;
    for (int m : {64, 128, 256}) {
        double worst = 0.0;
        for (const EventQuery& q : battery)
            worst = std::max(worst, std::abs(sector_measure(1, {m, 4}, p, q) - cylinder_correlation(spec, q).value));
        residual[m] = worst;
    }
    double density = 0.0;
    for (int j = 0; j < 4; ++j)
        density = std::max(density, std::abs(cylinder_correlation(spec, {{{0, j}, Step::Right}}).value - 0.5));
    return {"cylinder",
            {at_most("cylinder.torus_residual_m256", residual[256], 1e-3,
                     fmt::format("m=64: {:.3g}, m=128: {:.3g}", residual[64], residual[128])),
             at_most("cylinder.right_density", density, 1e-12)}};
}

SuiteReport renewal_suite(std::uint64_t) {
    const double gamma = 0.2, delta = 0.2;
    const CylinderSpec spec{1, 2, gamma, delta};
    const double p = (gamma + delta) / (1 + gamma + delta);
    // Up events on row 0; Down is not a separate step when n = 2
    auto up = [](int x) { return Event{{x, 0}, Step::Up}; };
    const double rho1 = cylinder_correlation(spec, {up(0)}).value;
    // A symmetric kernel is fixed by rho1 = K(x,x) and rho2 = rho1^2 - K(x,y)^2.
    double kernel_err = 0.0;
    for (int k = 0; k <= 10; ++k) {
        double measured = k == 0 ? rho1 : std::sqrt(std::max(0.0, rho1 * rho1 - cylinder_correlation(spec, {up(0), up(k)}).value));
        kernel_err = std::max(kernel_err, std::abs(measured - (1 - p) / (1 + p) * std::pow(p, k)));
    }
    // gap law by inclusion-exclusion over the sites in between
    double gap_err = 0.0;
    for (int k = 1; k <= 10; ++k) {
        double total = 0.0;
        for (int mask = 0; mask < (1 << (k - 1)); ++mask) {
            EventQuery q{up(0), up(k)};
            for (int i = 0; i < k - 1; ++i)
                if (mask >> i & 1) q.push_back(up(i + 1));
            total += (std::popcount(static_cast<unsigned>(mask)) % 2 ? -1.0 : 1.0) * cylinder_correlation(spec, q).value;
        }
        double nb = k < 2 ? 0.0 : (k - 1) * p * p * std::pow(1 - p, k - 2);
        gap_err = std::max(gap_err, std::abs(total / rho1 - nb));
    }
    return {"renewal",
            {at_most("renewal.kernel_matches_claimed_form", kernel_err, 1e-10,
                     fmt::format("K(x,x) = {:.10g}, claimed (1-p)/(1+p) = {:.10g}", rho1, (1 - p) / (1 + p))),
             at_most("renewal.gap_law_negative_binomial", gap_err, 1e-10, "gaps k <= 10 against (k-1) p^2 (1-p)^(k-2)")}};
}

SuiteReport sine_suite(std::uint64_t) {
    double worst = 0.0;
    for (double tau : {0.2, 0.5, 0.7})
        for (int dh = 0; dh <= 10; ++dh) {
            PlaneSpec s{tau, 0.4, 0.0};
            double k = -plane_h(s, {1, 0}, {0, dh}).value.real() * (dh % 2 ? -1.0 : 1.0);
            double sine = dh == 0 ? tau : std::sin(kPi * tau * dh) / (kPi * dh);
            worst = std::max(worst, std::abs(k - sine));
        }
    return {"sine", {at_most("sine.column_kernel", worst, 1e-8, "tau in {0.2, 0.5, 0.7}, 0 <= dh <= 10")}};
}

SuiteReport geometry_suite(std::uint64_t seed) {
    long arc_fail = 0, arc_total = 0;
    for (int b = 1; b <= 25; ++b)
        for (double gamma : {0.0, 0.1, 0.25, 0.5, 1.0, 2.0})
            for (double delta : {0.0, 0.1, 0.125, 0.25, 0.5}) {
                if (4 * gamma * delta > 1.0) continue;
                const double beta = 0.1 * b;
                arc_fail += !arc_single_interval(beta, gamma, delta, 10000);
                ++arc_total;
            }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long sign_fail = 0, checked = 0;
    while (checked < 200) {
        TorusShape sh{3 + int(rng() % 20), 3 + int(rng() % 20)};
        Sector sec = kSectors[rng() % 4];
        double g = u(rng), d = u(rng) * std::min(1.0, 0.25 / std::max(g, 1e-9));
        double b = 2.5 * u(rng);
        auto pred = predicted_sector_sign(b, g, d, sh, sec);
        if (!pred) continue;
        LogDet ld = log_det_K(sec, sh, {1, b, g, d});
        cplx v = c_coeff(sec, sh) * ld.phase;
        sign_fail += std::abs(v.imag()) > 1e-9 || (v.real() > 0 ? 1 : -1) != *pred;
        ++checked;
    }
    return {"geometry",
            {count_zero("geometry.arc_single_interval", arc_fail, arc_total),
             count_zero("geometry.sector_sign_table", sign_fail, checked)}};
}

// ---- ring ----

SuiteReport ring_suite(std::uint64_t) {
    const RateParams rates{1.0, 0.3};
    double sums = 0.0, occupied = 0.0, up = 0.0;
    for (int n = 2; n <= 8; ++n)
        for (int ell = 1; ell <= n; ++ell) {
            StateSpace space(n, ell);
            double total = 0.0, occ = 0.0;
            for (const WalkerConfig& h : space.states()) {
                double pi = stationary_prob(h);
                total += pi;
                if (h.positions.front() == 0) occ += pi;
            }
            sums = std::max(sums, std::abs(total - 1.0));
            const double rho = static_cast<double>(ell) / n;
            occupied = std::max(occupied, std::abs(occ - rho));
            for (int h = 0; h < n; ++h) {
                occupied = std::max(occupied, std::abs(spacetime_correlation(ell, n, rates, {{0.0, h, Step::Right}}).value - rho));
                double bead = rates.T / n * mu_ln(ell, n);
                up = std::max(up, std::abs(spacetime_correlation(ell, n, rates, {{0.0, h, Step::Up}}).value - bead));
            }
        }
    double ck = 0.0, stat = 0.0;
    for (RateParams r : {RateParams{1.0, 0.3}, RateParams{0.7, 0.0}, RateParams{0.0, 1.1}, RateParams{0.5, 0.5}})
        for (int n = 2; n <= 6; ++n)
            for (int ell = 1; ell <= n; ++ell) {
                StateSpace space(n, ell);
                ck = std::max(ck, chapman_kolmogorov_residual(space, r, 0.3, 0.7));
                stat = std::max(stat, stationarity_residual(space, r, 0.9));
            }
    double gen = 0.0;
    long configs = 0;
    for (int n = 2; n <= 7; ++n)
        for (int ell = 1; ell <= n; ++ell)
            for (const WalkerConfig& h : StateSpace(n, ell).states()) {
                gen = std::max(gen, generator_residual(h, rates));
                ++configs;
            }
    double markov = markov_check(2, 4, rates, {0.2, 0.5, 1.1});
    return {"ring",
            {at_most("ring.stationary_law_sums_to_one", sums, 1e-12, "n <= 8, all ell"),
             at_most("ring.occupied_density", occupied, 1e-12, "ell/n from the law and from the kernel"),
             at_most("ring.up_bead_density", up, 1e-12, "(T/n) sin(pi ell/n)/sin(pi/n)"),
             at_most("ring.chapman_kolmogorov", ck, 1e-8, "n <= 6"),
             at_most("ring.stationarity", stat, 1e-8, "n <= 6"),
             at_most("ring.generator_identity", gen, 1e-10, fmt::format("{} configurations, n <= 7", configs)),
             at_most("ring.markov_property", markov, 1e-8, "n = 4, ell = 2, three times")}};
}

// ---- Monte Carlo ----

double z_score(const EstimatorReport& r, double exact) {
    double d = std::abs(r.estimate - exact);
    if (r.std_error == 0.0) return d == 0.0 ? 0.0 : INFINITY;
    return d / r.std_error;
}

std::vector<int> sorted_positions(const PathRecord& p, double t) {
    std::vector<int> v = p.positions_at(t);
    std::sort(v.begin(), v.end());
    return v;
}

SuiteReport montecarlo_suite(std::uint64_t seed) {
    const auto start = Clock::now();
    const RateParams rates{1.0, 0.3};
    const StateSpace space(5, 2);
    const WalkerConfig x = make_config(5, {0, 2});
    std::vector<Criterion> out;

    {
        const double t = 0.5;
        std::vector<PathFunctional> fs;
        for (const WalkerConfig& y : space.states())
            fs.push_back([y, t](const PathRecord& p) {
                return (!p.tau || *p.tau > t) && sorted_positions(p, t) == y.positions ? 1.0 : 0.0;
            });
        auto r = estimate_many(fs, {Dynamics::Free, x, rates, t}, 1000000, seed);
        double z = 0.0;
        for (std::size_t i = 0; i < space.size(); ++i) z = std::max(z, z_score(r[i], noncollision_det(x, space[i], rates, t)));
        out.push_back(at_most("montecarlo.free_noncollision", z, 3.0, "max |z| over 10 states, 1e6 paths, t = 0.5"));
    }
    {
        // start from the stationary law, stratified over the starting state
        const double t = 1.0;
        const std::size_t per_start = 100000;
        std::vector<double> mean(space.size(), 0.0), var(space.size(), 0.0);
        for (std::size_t a = 0; a < space.size(); ++a) {
            std::vector<PathFunctional> fs;
            for (const WalkerConfig& y : space.states())
                fs.push_back([y, t](const PathRecord& p) { return sorted_positions(p, t) == y.positions ? 1.0 : 0.0; });
            auto r = estimate_many(fs, {Dynamics::Conditioned, space[a], rates, t}, per_start, seed + 1 + a);
            const double w = stationary_prob(space[a]);
            for (std::size_t b = 0; b < space.size(); ++b) {
                mean[b] += w * r[b].estimate;
                var[b] += w * w * r[b].std_error * r[b].std_error;
            }
        }
        double z = 0.0;
        for (std::size_t b = 0; b < space.size(); ++b)
            z = std::max(z, z_score({mean[b], std::sqrt(var[b]), per_start * space.size(), seed}, stationary_prob(space[b])));
        out.push_back(at_most("montecarlo.conditioned_stationary_law", z, 3.0,
                              "max |z| over 10 states, 1e5 paths per stratified start, t = 1"));
    }
    {
        const double t = 1.0;
        std::vector<PathFunctional> fs{[rates](const PathRecord& p) { return unit_mean_martingale(p, rates, 0.5); },
                                       [rates](const PathRecord& p) { return unit_mean_martingale(p, rates, 1.0); }};
        for (const WalkerConfig& y : space.states())
            fs.push_back([y, rates, t](const PathRecord& p) {
                return sorted_positions(p, t) == y.positions ? unit_mean_martingale(p, rates, t) : 0.0;
            });
        auto r = estimate_many(fs, {Dynamics::Asep, x, rates, t}, 1000000, seed + 100);
        double z = 0.0;
        for (std::size_t i = 0; i < space.size(); ++i)
            z = std::max(z, z_score(r[i + 2], conditioned_transition(x, space[i], rates, t)));
        out.push_back(at_most("montecarlo.reweighted_exclusion", z, 3.0, "max |z| over 10 states, 1e6 paths, t = 1"));
        out.push_back(at_most("montecarlo.unit_mean_martingale", std::max(z_score(r[0], 1.0), z_score(r[1], 1.0)), 3.0,
                              "max |z| at t = 0.5 and t = 1"));
    }
    out.push_back(timing("montecarlo.runtime", start, 600.0));
    return {"montecarlo", out};
}

// ---- Fibonacci ----

SuiteReport fibonacci_suite(std::uint64_t) {
    double worst = 0.0;
    for (double lam : {-4.0, -1.3, -0.25, -0.1, 0.0, 0.3, 1.0, 2.5, 4.0})
        for (int n = 0; n <= 64; ++n) {
            double f = fibonacci_f(n, lam), scale = oracle::fibonacci_abs_scale(n, lam);
            worst = std::max(worst, std::abs(f - oracle::fibonacci_binomial(n, lam)) / scale);
            worst = std::max(worst, std::abs(f - oracle::fibonacci_closed(n, lam).real()) / scale);
        }
    long fib_fail = 0, half_fail = 0;
    double a = 1.0, b = 1.0; // F_0 = F_1 = 1
    for (int n = 0; n <= 20; ++n) {
        double expect = n < 2 ? 1.0 : a + b;
        if (n >= 2) {
            a = b;
            b = expect;
        }
        fib_fail += fibonacci_f(n, 1.0) != expect;
    }
    for (int n = 0; n <= 30; ++n) half_fail += fibonacci_f(n, -0.25) != (n + 1) * std::ldexp(1.0, -n);
    return {"fibonacci",
            {at_most("fibonacci.recurrence_closed_form_binomial", worst, 1e-12,
                     "relative to the sum of absolute binomial terms, n <= 64"),
             count_zero("fibonacci.fibonacci_numbers", fib_fail, 21),
             count_zero("fibonacci.minus_quarter", half_fail, 31)}};
}

using SuiteFn = SuiteReport (*)(std::uint64_t);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r{
        {"partition", partition_suite}, {"correlation", correlation_suite}, {"sign", sign_suite},
        {"cylinder", cylinder_suite},   {"renewal", renewal_suite},         {"sine", sine_suite},
        {"ring", ring_suite},           {"montecarlo", montecarlo_suite},   {"fibonacci", fibonacci_suite},
        {"geometry", geometry_suite}};
    return r;
}

} // namespace

bool SuiteReport::pass() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, fn] : registry()) v.push_back(name);
        return v;
    }();
    return names;
}

bool is_suite(const std::string& name) {
    const auto& v = suite_names();
    return std::find(v.begin(), v.end(), name) != v.end();
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
    for (const auto& [n, fn] : registry())
        if (n == name) return fn(seed);
    throw Error(ErrorCode::Precondition, "unknown suite '" + name + "'");
}

Criterion at_most(std::string name, double measured, double tolerance, std::string detail) {
    return {std::move(name), measured, tolerance, measured <= tolerance, std::move(detail), false};
}

} // namespace snake::verify
