#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snake/error.hpp"
#include "snake/kasteleyn.hpp"
#include "snake/limits.hpp"
#include "snake/linalg.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace snake;

namespace {

constexpr double kPi = std::numbers::pi;

double gap_pmf(const CylinderSpec& spec, int k) {
    // P(next Up event on row 0 after the one at 0 is at k), by inclusion-exclusion
    double rho1 = cylinder_correlation(spec, {{{0, 0}, Step::Up}}).value;
    double total = 0.0;
    const int inner = k - 1;
    for (int mask = 0; mask < (1 << inner); ++mask) {
        EventQuery q{{{0, 0}, Step::Up}, {{k, 0}, Step::Up}};
        int bits = 0;
        for (int i = 0; i < inner; ++i)
            if (mask >> i & 1) {
                q.push_back({{i + 1, 0}, Step::Up});
                ++bits;
            }
        total += (bits % 2 ? -1.0 : 1.0) * cylinder_correlation(spec, q).value;
    }
    return total / rho1;
}

} // namespace

TEST_CASE("root sets") {
    for (int n = 1; n <= 64; ++n)
        for (int ell = 0; ell <= n; ++ell) {
            RootSets r = root_sets(ell, n);
            REQUIRE(r.L.size() == static_cast<std::size_t>(ell));
            REQUIRE(r.R.size() == static_cast<std::size_t>(n - ell));
            double sign = (n - ell + 1) % 2 ? -1.0 : 1.0;
            cplx sum = 0.0, inv_sum = 0.0;
            for (cplx w : r.L) {
                CHECK(std::abs(std::pow(w, n) - sign) < 1e-12);
                sum += w;
                inv_sum += 1.0 / w;
            }
            for (cplx w : r.R) CHECK(std::abs(std::pow(w, n) - sign) < 1e-12);
            if (!r.L.empty() && !r.R.empty()) {
                double max_l = -2, min_r = 2;
                for (cplx w : r.L) max_l = std::max(max_l, w.real());
                for (cplx w : r.R) min_r = std::min(min_r, w.real());
                CHECK(max_l <= min_r + 1e-15);
            }
            CHECK(std::abs(sum + mu_ln(ell, n)) < 1e-12);
            CHECK(std::abs(inv_sum + mu_ln(ell, n)) < 1e-12);
        }
    CHECK(root_sets(0, 5).L.empty());
    CHECK(root_sets(1, 7).L_k[0] == 7);
    CHECK(mu_ln(1, 9) == doctest::Approx(1.0));
    CHECK(mu_ln(3, 8) == doctest::Approx(mu_ln(5, 8)));
}

TEST_CASE("cylinder kernel basics") {
    CylinderSpec free{2, 5, 0.0, 0.0};
    CylinderKernel k(free);
    RootSets r = root_sets(2, 5);
    for (int d2 = -3; d2 <= 3; ++d2) {
        cplx ref = 0.0;
        for (cplx w : r.R) ref += std::pow(w, -d2);
        CHECK(std::abs(k.h({0, 0}, {2, d2}) - ref / 5.0) < 1e-14);
    }
    for (double g : {0.0, 0.2, 0.5, 1.0})
        for (double d : {0.0, 0.2, 0.25})
            for (int n : {3, 4, 7})
                for (int ell = 0; ell <= n; ++ell) {
                    CylinderSpec s{ell, n, g, d};
                    double right = cylinder_correlation(s, {{{3, 1}, Step::Right}}).value;
                    CHECK(std::abs(right - double(ell) / n) < 1e-12);
                    double total = 0.0;
                    for (Step st : kAllSteps) {
                        double p = cylinder_correlation(s, {{{3, 1}, st}}).value;
                        CHECK(p >= -1e-8);
                        CHECK(p <= 1 + 1e-8);
                        total += p;
                    }
                    CHECK(std::abs(total - 1.0) < 1e-10);
                }
}

TEST_CASE("cylinder kernel symmetry when gamma = delta") {
    CylinderKernel k({2, 6, 0.3, 0.3});
    for (int d1 = -3; d1 <= 3; ++d1)
        for (int d2 = 0; d2 <= 4; ++d2)
            CHECK(std::abs(k.h({0, 0}, {d1, d2}) - std::conj(k.h({0, 0}, {d1, -d2}))) < 1e-14);
}

TEST_CASE("all-Right queries are a plain determinant of -H") {
    CylinderSpec s{2, 5, 0.3, 0.2};
    CylinderKernel k(s);
    EventQuery q{{{0, 0}, Step::Right}, {{1, 2}, Step::Right}, {{0, 3}, Step::Right}};
    MatrixC m(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = -k.h({q[i].site.x1 + 1, q[i].site.x2}, q[j].site);
    CHECK(std::abs(cylinder_correlation(s, q).value - m.determinant().real()) < 1e-14);
}

TEST_CASE("torus sector measure converges to the cylinder") {
    CylinderSpec s{2, 4, 0.2, 0.2};
    std::vector<EventQuery> battery{{{{0, 0}, Step::Right}},
                                    {{{0, 0}, Step::Up}},
                                    {{{0, 0}, Step::Right}, {{1, 0}, Step::Right}},
                                    {{{0, 0}, Step::Up}, {{1, 2}, Step::Down}}};
    for (const auto& q : battery) {
        double cyl = cylinder_correlation(s, q).value;
        double e32 = std::abs(sector_measure(1, {32, 4}, {1, 1, 0.2, 0.2}, q) - cyl);
        double e64 = std::abs(sector_measure(1, {64, 4}, {1, 1, 0.2, 0.2}, q) - cyl);
        CHECK(e64 < 1e-12);
        CHECK(e64 <= 2 * e32 + 1e-12);
    }
    CHECK(cylinder_ell_from_beta(1.0, 0.2, 0.2, 4, 1) == 2);
    CHECK_THROWS_AS(cylinder_ell_from_beta(1.0, 0.2, 0.2, 4, 0), Error); // w = i has modulus exactly 1
}

TEST_CASE("n = 2 cylinder: Up events on a row form a renewal process with NB(2, p) gaps") {
    for (double g : {0.1, 0.2, 0.35}) {
        CylinderSpec s{1, 2, g, g};
        double p = 2 * g / (1 + 2 * g);
        CHECK(cylinder_correlation(s, {{{0, 0}, Step::Up}}).value == doctest::Approx(p / 2).epsilon(1e-12));
        CHECK(std::abs(cylinder_correlation(s, {{{0, 0}, Step::Up}, {{1, 0}, Step::Up}}).value) < 1e-14);
        for (int k = 2; k <= 8; ++k)
            CHECK(std::abs(gap_pmf(s, k) - (k - 1) * p * p * std::pow(1 - p, k - 2)) < 1e-12);
    }
    CHECK_THROWS_AS(cylinder_correlation({1, 2, 0.2, 0.2}, {{{0, 0}, Step::Down}}), Error);
}

TEST_CASE("cylinder errors") {
    CHECK_THROWS_AS(CylinderKernel({1, 4, 1.0, 0.5}), Error);
    CHECK_THROWS_AS(root_sets(5, 4), Error);
    // gamma = delta = 1/2 puts the zero of 1 + gamma w + delta/w at w = -1, which is
    // either in L (only used with non-positive powers) or not a root at all
    for (int n = 2; n <= 6; ++n)
        for (int ell = 0; ell <= n; ++ell) {
            CylinderKernel k({ell, n, 0.5, 0.5});
            CHECK(std::isfinite(std::abs(k.h({0, 0}, {3, 1}))));
        }
}

TEST_CASE("plane kernel") {
    SUBCASE("densities") {
        for (double tau : {0.1, 0.3, 0.5, 0.9}) {
            PlaneSpec s{tau, 0.3, 0.2};
            CHECK(plane_correlation(s, {{{0, 0}, Step::Right}}).value == doctest::Approx(tau).epsilon(1e-10));
            CHECK(std::abs(plane_h(s, {0, 0}, {-1, 0}).value + tau) < 1e-10);
            double total = 0.0;
            for (Step st : kAllSteps) total += plane_correlation(s, {{{0, 0}, st}}).value;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("degenerate arcs") {
        CHECK(std::abs(plane_h({1.0, 0.3, 0.2}, {0, 0}, {2, 1}).value) < 1e-15);
        CHECK(std::abs(plane_h({0.0, 0.3, 0.2}, {2, 0}, {0, 1}).value) < 1e-15);
    }
    SUBCASE("discrete sine kernel on a column, up to the gauge (-1)^dh") {
        for (double tau : {0.2, 0.5, 0.7})
            for (int dh = 1; dh <= 10; ++dh) {
                PlaneSpec s{tau, 0.4, 0.0};
                double k = -plane_h(s, {1, 0}, {0, dh}).value.real() * (dh % 2 ? -1.0 : 1.0);
                CHECK(std::abs(k - std::sin(kPi * tau * dh) / (kPi * dh)) < 1e-10);
            }
    }
    SUBCASE("extended sine kernel at delta = 0 off the column") {
        // residue form of the contour integral: for d1 = y1 - x1 >= 0 the integrand is
        // a power series in w, so only the arc contributes; compare with a direct sum
        double tau = 0.35, g = 0.4;
        PlaneSpec s{tau, g, 0.0};
        for (int d1 = 0; d1 <= 3; ++d1)
            for (int d2 = -3; d2 <= 3; ++d2) {
                // (1 + g w)^{-(d1+1)} = sum_j C(j+d1, d1) (-g)^j w^j
                double ref = 0.0, a = kPi * (1 - tau);
                for (int j = 0; j < 200; ++j) {
                    double c = std::exp(std::lgamma(j + d1 + 1.0) - std::lgamma(j + 1.0) - std::lgamma(d1 + 1.0)) *
                               std::pow(-g, j);
                    int m = j - d2;
                    ref += c * (m == 0 ? 2 * a : 2 * std::sin(m * a) / m) / (2 * kPi);
                }
                CHECK(std::abs(plane_h(s, {0, 0}, {d1, d2}).value - ref) < 1e-10);
            }
    }
    SUBCASE("cylinder approaches the plane") {
        double tau = 0.4;
        PlaneSpec ps{tau, 0.3, 0.2};
        double prev = 1.0;
        for (int n : {10, 40, 160}) {
            CylinderKernel ck({int(std::floor(tau * n)), n, 0.3, 0.2});
            double err = 0.0;
            for (Site y : {Site{0, 0}, Site{1, 2}, Site{-1, 1}, Site{2, -1}})
                err = std::max(err, std::abs(ck.h({0, 0}, y) - plane_h(ps, {0, 0}, y).value));
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 0.02);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(plane_h({0.5, 0.5, 0.5}, {0, 0}, {0, 0}), Error);
        CHECK_THROWS_AS(plane_h({1.5, 0.1, 0.1}, {0, 0}, {0, 0}), Error);
    }
}

TEST_CASE("arc geometry") {
    ArcGeometry a = arc_geometry(1.0, 0.25, 0.25);
    REQUIRE(a.t_beta.has_value());
    CHECK(*a.t_beta == doctest::Approx(kPi / 2).epsilon(1e-14));
    CHECK(arc_geometry(1.6, 0.3, 0.2).empty);
    CHECK(!arc_geometry(1.6, 0.3, 0.2).intersects);
    CHECK(arc_geometry(0.4, 0.3, 0.2).full);
    CHECK(!arc_geometry(1.0, 0.0, 0.0).t_beta.has_value());
    // t_beta decreases in beta
    double prev = kPi;
    for (double b = 0.55; b < 1.45; b += 0.05) {
        double t = *arc_geometry(b, 0.3, 0.2).t_beta;
        CHECK(t < prev);
        prev = t;
    }
    // n = 4, theta2 = 0 roots are 1, i, -1, -i; |1 + 0.4 Re w| = 1 at w = +-i
    ArcGeometry g = arc_geometry(1.0, 0.2, 0.2, 4);
    CHECK(!g.generic[0]);
    CHECK(g.generic[1]);
    for (double b : {0.3, 0.7, 1.0, 1.3})
        for (double gm : {0.0, 0.2, 0.5, 1.0})
            for (double dl : {0.0, 0.1, 0.25})
                CHECK(arc_single_interval(b, gm, dl, 10000));
}

TEST_CASE("sign of C det K follows the three-case table") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 60) {
        TorusShape sh{3 + int(rng() % 20), 3 + int(rng() % 20)};
        Sector sec = kSectors[rng() % 4];
        double g = u(rng), d = u(rng) * std::min(1.0, 0.25 / std::max(g, 1e-9));
        double b = 2.5 * u(rng);
        auto pred = predicted_sector_sign(b, g, d, sh, sec);
        if (!pred) continue;
        LogDet ld = log_det_K(sec, sh, {1, b, g, d});
        cplx v = c_coeff(sec, sh) * ld.phase;
        CHECK(std::abs(v.imag()) < 1e-9);
        CHECK((v.real() > 0 ? 1 : -1) == *pred);
        ++checked;
    }
}
