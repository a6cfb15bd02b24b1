#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snake/error.hpp"
#include "snake/limits.hpp"
#include "snake/oracles.hpp"
#include "snake/ring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace snake;

namespace {


const RateParams kRates[] = {{1.0, 0.3}, {0.7, 0.0}, {0.0, 1.1}, {0.5, 0.5}};

} // namespace

TEST_CASE("vandermonde modulus") {
    CHECK(vandermonde_delta(make_config(7, {3})) == 1.0);
    CHECK(vandermonde_delta(make_config(4, {0, 2})) == doctest::Approx(2.0).epsilon(1e-15));
    for (int n = 2; n <= 8; ++n) {
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i;
        double d = vandermonde_delta(make_config(n, all));
        CHECK(d * d == doctest::Approx(std::pow(n, n)).epsilon(1e-12));
    }
    CHECK(vandermonde_delta(5, {1, 3, 1}) == 0.0);
    CHECK(vandermonde_delta(5, {4, 1}) == doctest::Approx(vandermonde_delta(5, {1, 4})).epsilon(1e-15));
}

TEST_CASE("phi determinant sign formula on every ordered tuple") {
    for (int n = 2; n <= 6; ++n)
        for (int ell = 1; ell <= n; ++ell)
            for (const WalkerConfig& h : StateSpace(n, ell).states()) {
                std::vector<int> tuple = h.positions;
                do {
                    cplx d = phi_det(n, tuple);
                    CHECK(std::abs(d - phi_formula(n, tuple)) < 1e-10);
                    CHECK(std::abs(std::abs(d) - vandermonde_delta(n, tuple)) < 1e-10);
                } while (std::next_permutation(tuple.begin(), tuple.end()));
            }
}

TEST_CASE("computational lemma") {
    for (int n = 2; n <= 6; ++n)
        for (int ell = 1; ell <= n; ++ell)
            for (const WalkerConfig& h : StateSpace(n, ell).states()) {
                CHECK(computational_lemma_residual(h, 1) < 1e-10);
                CHECK(computational_lemma_residual(h, -1) < 1e-10);
            }
}

TEST_CASE("traffic") {
    CHECK(traffic(make_config(8, {0, 3, 5})) == 0);
    CHECK(traffic(make_config(5, {0, 1, 2, 3, 4})) == 5);
    CHECK(traffic(make_config(9, {2, 3, 4, 5})) == 3);
    CHECK(traffic(make_config(6, {0, 5})) == 1);
    CHECK(traffic(make_config(2, {0, 1})) == 2);
}

TEST_CASE("ring constants") {
    for (int n = 2; n <= 9; ++n) {
        CHECK(ring_constants(1, n).mu == doctest::Approx(1.0));
        CHECK(ring_constants(1, n).c == doctest::Approx(0.0));
        for (int ell = 1; ell < n; ++ell) {
            RootSets r = root_sets(ell, n);
            cplx sum = 0.0;
            for (cplx w : r.L) sum += w;
            CHECK(std::abs(sum + ring_constants(ell, n).mu) < 1e-12);
            CHECK(ring_constants(ell, n).mu == doctest::Approx(ring_constants(n - ell, n).mu));
        }
    }
    // C_{1,n} = 1 (every Delta is 1, n configurations)
    CHECK(ring_constants(1, 6).Cln == doctest::Approx(1.0));
}

TEST_CASE("twisted single-walker kernel") {
    for (int n : {2, 3, 5, 8})
        for (int ell = 1; ell <= n; ++ell)
            for (const RateParams& r : kRates) {
                for (int x = 0; x < n; ++x)
                    for (int y = 0; y < n; ++y) {
                        CHECK(km_kernel(n, ell, r, x, y, 0.0) == (x == y ? doctest::Approx(1.0) : doctest::Approx(0.0)));
                        for (double t : {0.1, 0.8, 2.5})
                            CHECK(std::abs(km_kernel(n, ell, r, x, y, t) - oracle::km_kernel_series(n, ell, r, x, y, t)) <
                                  1e-13);
                    }
                if (ell % 2 == 1) {
                    double total = 0.0;
                    for (int y = 0; y < n; ++y) total += km_kernel(n, ell, r, 1 % n, y, 1.3);
                    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
                }
            }
    // far from the seam and for short times the walker is a Poisson process
    const int n = 60;
    for (int k = 0; k <= 8; ++k) {
        double t = 0.4;
        double pois = std::exp(-t) * std::pow(t, k) / std::tgamma(k + 1.0);
        CHECK(std::abs(km_kernel(n, 2, {1.0, 0.0}, 5, 5 + k, t) - pois) < 1e-15);
    }
}

TEST_CASE("non-collision determinants") {
    const RateParams r{1.0, 0.3};
    WalkerConfig a = make_config(5, {3}), b = make_config(5, {1});
    CHECK(noncollision_det(a, b, r, 0.7) == doctest::Approx(km_kernel(5, 1, r, 3, 1, 0.7)).epsilon(1e-14));
    StateSpace space(5, 2);
    for (const WalkerConfig& x : space.states())
        for (const WalkerConfig& y : space.states()) {
            CHECK(noncollision_det(x, y, r, 0.0) == (x == y ? 1.0 : 0.0));
            std::vector<int> xs = x.positions, ys = y.positions;
            for (int& p : xs) ++p;
            for (int& p : ys) ++p;
            CHECK(std::abs(noncollision_det(x, y, r, 0.9) - noncollision_det(make_config(5, xs), make_config(5, ys), r, 0.9)) <
                  1e-14);
        }
    WalkerConfig x = make_config(6, {0, 2, 3});
    double prev = 1.0;
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
        double s = survival_probability(x, r, t);
        CHECK(s < prev);
        CHECK(s > 0.0);
        prev = s;
    }
}

TEST_CASE("conditioned transitions: rows, Chapman-Kolmogorov, stationarity, generator") {
    for (int n = 2; n <= 6; ++n)
        for (int ell = 1; ell <= n; ++ell) {
            StateSpace space(n, ell);
            for (const RateParams& r : kRates) {
                CHECK(row_sum_residual(space, r, 0.8) < 1e-10);
                CHECK(chapman_kolmogorov_residual(space, r, 0.3, 0.9) < 1e-8);
                CHECK(stationarity_residual(space, r, 1.7) < 1e-8);
                Eigen::MatrixXd q = conditioned_matrix(space, r, 0.6);
                Eigen::MatrixXd e = oracle::semigroup(oracle::conditioned_generator(space, r), 0.6);
                CHECK((q - e).cwiseAbs().maxCoeff() < 1e-10);
            }
        }
    // one walker is a free walker
    const RateParams r{1.0, 0.3};
    for (int y = 0; y < 5; ++y)
        CHECK(conditioned_transition(make_config(5, {2}), make_config(5, {y}), r, 0.9) ==
              doctest::Approx(km_kernel(5, 1, r, 2, y, 0.9)).epsilon(1e-13));
}

TEST_CASE("stationary law") {
    for (int n = 2; n <= 8; ++n)
        for (int ell = 1; ell <= n; ++ell) {
            double total = 0.0, occupied = 0.0;
            for (const WalkerConfig& h : StateSpace(n, ell).states()) {
                double p = stationary_prob(h);
                total += p;
                if (h.positions[0] == 0) occupied += p;
            }
            CHECK(std::abs(total - 1.0) < 1e-12);
            CHECK(std::abs(occupied - double(ell) / n) < 1e-12);
        }
    CHECK(stationary_prob(make_config(7, {4})) == doctest::Approx(1.0 / 7));
}

TEST_CASE("small-t rates") {
    const RateParams r{1.0, 0.3};
    const double t = 1e-6;
    for (const WalkerConfig& x : StateSpace(6, 3).states())
        for (const Move& m : conditioned_moves(x, r)) {
            double base = m.direction == 1 ? r.T : r.Tp;
            CHECK(std::abs(small_t_det_rate(x, m.to, r, t) - base) < 1e-6);
            CHECK(std::abs(small_t_conditioned_rate(x, m.to, r, t) - m.rate) < 1e-6);
            CHECK(m.rate == doctest::Approx(base * vandermonde_delta(m.to) / vandermonde_delta(x)));
        }
    // blocked moves have rate zero, so they are absent
    CHECK(conditioned_moves(make_config(4, {0, 1, 2, 3}), r).empty());
    CHECK(asep_moves(make_config(5, {1, 2}), r).size() == 2);
}

TEST_CASE("generator identity for the exclusion process") {
    for (int n = 2; n <= 7; ++n)
        for (int ell = 1; ell <= n; ++ell)
            for (const WalkerConfig& h : StateSpace(n, ell).states())
                for (const RateParams& r : kRates) CHECK(generator_residual(h, r) < 1e-10);
}

TEST_CASE("survival asymptotics") {
    for (const RateParams& r : {RateParams{1.0, 0.3}, RateParams{0.4, 0.4}}) {
        WalkerConfig x = make_config(7, {0, 1, 4});
        double prev = 1e9;
        for (double s : {5.0, 10.0, 20.0}) {
            double res = std::abs(asymptotic_residual(x, r, s / (r.T + r.Tp)));
            CHECK(res < prev);
            prev = res;
        }
        CHECK(prev < 1e-3);
    }
}

TEST_CASE("space-time correlations of the stationary conditioned process") {
    const RateParams r{1.0, 0.3};
    for (int n = 2; n <= 6; ++n)
        for (int ell = 1; ell <= n; ++ell) {
            double mu = mu_ln(ell, n);
            auto single = [&](Step f) { return spacetime_correlation(ell, n, r, {{0.4, 1, f}}).value; };
            CHECK(std::abs(single(Step::Right) - double(ell) / n) < 1e-12);
            CHECK(std::abs(single(Step::Fixed) - (1.0 - double(ell) / n)) < 1e-12);
            CHECK(std::abs(single(Step::Up) - r.T / n * mu) < 1e-12);
            CHECK(std::abs(single(Step::Down) - r.Tp / n * mu) < 1e-12);
        }
    SUBCASE("equal-time occupation queries") {
        for (int n = 2; n <= 6; ++n)
            for (int ell = 1; ell <= n; ++ell)
                for (int p = 1; p <= n; ++p)
                    for (const WalkerConfig& e : StateSpace(n, p).states()) {
                        std::vector<SpaceTimeEvent> ev;
                        for (int h = 0; h < n; ++h) {
                            bool in = std::binary_search(e.positions.begin(), e.positions.end(), h);
                            ev.push_back({0.0, h, in ? Step::Right : Step::Fixed});
                        }
                        double v = spacetime_correlation(ell, n, r, ev).value;
                        CHECK(std::abs(v - (p == ell ? stationary_prob(e) : 0.0)) < 1e-12);
                    }
    }
    SUBCASE("two-time occupations are the stationary law times the transition kernel") {
        for (const RateParams& rr : kRates) {
            StateSpace space(5, 2);
            for (const WalkerConfig& a : space.states())
                for (const WalkerConfig& b : space.states()) {
                    double joint = joint_occupation(rr, {0.2, 0.9}, {a, b});
                    CHECK(std::abs(joint - stationary_prob(a) * conditioned_transition(a, b, rr, 0.7)) < 1e-12);
                }
        }
    }
    SUBCASE("jump densities are the stationary law times the rate") {
        for (const WalkerConfig& a : StateSpace(5, 2).states())
            for (const Move& m : conditioned_moves(a, r)) {
                std::vector<SpaceTimeEvent> ev;
                for (int j = 0; j < 2; ++j)
                    ev.push_back({0.0, a.positions[j], j == m.particle ? (m.direction == 1 ? Step::Up : Step::Down)
                                                                       : Step::Right});
                double v = spacetime_correlation(2, 5, r, ev).value;
                CHECK(std::abs(v - stationary_prob(a) * m.rate) < 1e-12);
            }
    }
    SUBCASE("conflicts") {
        SpaceTimeResult c = spacetime_correlation(2, 5, r, {{0.0, 1, Step::Right}, {0.0, 1, Step::Fixed}});
        CHECK(c.conflict);
        CHECK(c.value == 0.0);
        CHECK(spacetime_correlation(2, 5, r, {{0.0, 1, Step::Up}, {0.0, 6, Step::Down}}).conflict);
        CHECK(spacetime_correlation(2, 5, r, {{0.0, 1, Step::Up}, {0.0, 1, Step::Right}}).conflict);
        SpaceTimeResult dup = spacetime_correlation(2, 5, r, {{0.0, 1, Step::Up}, {0.0, 1, Step::Up}});
        CHECK_FALSE(dup.conflict);
        CHECK(dup.density_order == 1);
    }
}

TEST_CASE("Markov property") {
    const RateParams r{1.0, 0.3};
    CHECK(markov_check(1, 5, r, {0.0, 0.4, 1.1}) < 1e-12);
    double res = markov_check(2, 4, r, {0.0, 0.5, 1.2});
    CHECK(res < 1e-8);
    CHECK(std::abs(markov_check(2, 4, r, {3.0, 3.5, 4.2}) - res) < 1e-10);
    CHECK(markov_check(3, 5, {0.4, 0.9}, {0.0, 0.3, 0.5}) < 1e-8);
}

TEST_CASE("ring errors") {
    CHECK_THROWS_AS(make_config(1, {0}), Error);
    CHECK_THROWS_AS(make_config(5, {1, 6}), Error);
    CHECK_THROWS_AS(make_config(5, {}), Error);
    CHECK_THROWS_AS(check_config(WalkerConfig{5, {3, 1}}), Error);
    CHECK_THROWS_AS(StateSpace(40, 20), Error);
    CHECK_THROWS_AS(km_kernel(5, 2, {1.0, 0.0}, 0, 1, -1.0), Error);
    CHECK_THROWS_AS(noncollision_det(make_config(5, {1}), make_config(6, {1}), {1.0, 0.0}, 1.0), Error);
    CHECK_THROWS_AS(markov_check(3, 9, {1.0, 0.0}, {0.0, 1.0, 2.0}), Error);
    try {
        StateSpace(40, 20);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EnumerationTooLarge);
    }
}
