#include "snake/limits.hpp"

#include "snake/error.hpp"
#include "snake/linalg.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace snake {

namespace {

constexpr double kPi = std::numbers::pi;

cplx unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

// exp(i pi k / n) with k reduced mod 2n before the angle is formed
cplx root_power(int k, long long power, int n) {
    long long e = (static_cast<long long>(k) * power) % (2LL * n);
    if (e < 0) e += 2LL * n;
    return unit(kPi * static_cast<double>(e) / n);
}

cplx ellipse_point(cplx w, double gamma, double delta) { return 1.0 + gamma * w + delta / w; }

double imag_checked(cplx v, const char* what) {
    if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v.real())))
        throw Error(ErrorCode::Internal, std::string(what) + " has a non-negligible imaginary part");
    return v.real();
}

void check_regime(double gamma, double delta) {
    require(gamma >= 0.0 && delta >= 0.0, ErrorCode::Precondition, "gamma and delta must be non-negative");
    require(4.0 * gamma * delta <= 1.0, ErrorCode::RegimeViolation, "4 gamma delta > 1");
}

// Roots w^n = (-1)^eta as angle numerators k in (-n, n].
std::vector<int> root_numerators(int n, int eta) {
    std::vector<int> ks;
    for (int k = -n + 1; k <= n; ++k)
        if (((k - eta) % 2 + 2) % 2 == 0) ks.push_back(k);
    return ks;
}

} // namespace

RootSets root_sets(int ell, int n) {
    require(n >= 1, ErrorCode::Precondition, "n must be positive");
    require(ell >= 0 && ell <= n, ErrorCode::Precondition, "ell must lie in [0, n]");
    std::vector<int> ks = root_numerators(n, ((n - ell + 1) % 2 + 2) % 2);
    // least real part first; a conjugate pair keeps the positive angle first
    std::sort(ks.begin(), ks.end(), [](int a, int b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        return a > b;
    });
    RootSets r;
    r.ell = ell;
    r.n = n;
    for (int i = 0; i < n; ++i) {
        cplx w = unit(kPi * ks[i] / n);
        if (i < ell) {
            r.L.push_back(w);
            r.L_k.push_back(ks[i]);
        } else {
            r.R.push_back(w);
            r.R_k.push_back(ks[i]);
        }
    }
    return r;
}

double mu_ln(int ell, int n) {
    require(n >= 1 && ell >= 0 && ell <= n, ErrorCode::Precondition, "need 0 <= ell <= n");
    if (n == 1) return ell; // the single root -1 of w = -1
    if (ell == 0 || ell == n) return 0.0;
    return std::sin(kPi * ell / n) / std::sin(kPi / n);
}

// ---------------------------------------------------------------- cylinder

CylinderKernel::CylinderKernel(const CylinderSpec& spec) : spec_(spec) {
    require(spec.n >= 2, ErrorCode::Precondition, "the cylinder needs n >= 2");
    check_regime(spec.gamma, spec.delta);
    roots_ = root_sets(spec.ell, spec.n);
    gamma_ = spec.n == 2 ? spec.gamma + spec.delta : spec.gamma;
    delta_ = spec.n == 2 ? 0.0 : spec.delta;
    for (cplx w : roots_.L) dL_.push_back(ellipse_point(w, gamma_, delta_));
    for (cplx w : roots_.R) dR_.push_back(ellipse_point(w, gamma_, delta_));
}

double CylinderKernel::prefactor(Step s) const {
    switch (s) {
    case Step::Fixed: return 1.0;
    case Step::Right: return -1.0;
    case Step::Up: return gamma_;
    case Step::Down: return delta_;
    }
    return 0.0;
}

cplx CylinderKernel::h(Site x, Site y) const {
    const int n = spec_.n;
    const long long d2 = static_cast<long long>(y.x2) - x.x2;
    const int e = y.x1 - x.x1 + 1;
    cplx total = 0.0;
    if (y.x1 >= x.x1) {
        for (std::size_t i = 0; i < dR_.size(); ++i) {
            if (std::abs(dR_[i]) < 1e-14)
                throw Error(ErrorCode::VanishingDenominator,
                            "1 + gamma w + delta/w vanishes at w = exp(i pi " + std::to_string(roots_.R_k[i]) + "/" +
                                std::to_string(n) + ")");
            total += root_power(roots_.R_k[i], -d2, n) * std::pow(dR_[i], -e);
        }
        return total / static_cast<double>(n);
    }
    for (std::size_t i = 0; i < dL_.size(); ++i) total += root_power(roots_.L_k[i], -d2, n) * std::pow(dL_[i], -e);
    return -total / static_cast<double>(n);
}

cplx cylinder_h(const CylinderSpec& spec, Site x, Site y) { return CylinderKernel(spec).h(x, y); }

namespace {

template <class Kernel>
LimitCorrelation limit_correlation(const Kernel& kernel, const EventQuery& query, int n) {
    LimitCorrelation out;
    out.words = expand_events(query, Wrap{0, n});
    cplx total = 0.0;
    for (const RWord& w : out.words) {
        const std::size_t k = w.factors.size();
        MatrixC m(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            const RFactor& fi = w.factors[i];
            Site d = displacement(fi.step);
            Site from{fi.site.x1 + d.x1, fi.site.x2 + d.x2};
            double pref = kernel.prefactor(fi.step);
            for (std::size_t j = 0; j < k; ++j) m(i, j) = pref * kernel.entry(from, w.factors[j].site);
        }
        total += static_cast<double>(w.coefficient) * determinant(m);
    }
    out.value = imag_checked(total, "limit correlation");
    return out;
}

struct CylinderAdapter {
    const CylinderKernel& k;
    double prefactor(Step s) const { return k.prefactor(s); }
    cplx entry(Site x, Site y) const { return k.h(x, y); }
};

} // namespace

LimitCorrelation cylinder_correlation(const CylinderSpec& spec, const EventQuery& query) {
    CylinderKernel kernel(spec);
    for (const Event& e : query)
        require(!(spec.n == 2 && e.step == Step::Down), ErrorCode::Precondition,
                "on n = 2 every vertical step is an Up step");
    return limit_correlation(CylinderAdapter{kernel}, query, spec.n);
}

int cylinder_ell_from_beta(double beta, double gamma, double delta, int n, int theta2) {
    check_regime(gamma, delta);
    require(theta2 == 0 || theta2 == 1, ErrorCode::Precondition, "theta2 must be 0 or 1");
    require(beta >= 0.0, ErrorCode::Precondition, "beta must be non-negative");
    double g = n == 2 ? gamma + delta : gamma, d = n == 2 ? 0.0 : delta;
    int ell = 0;
    for (int k : root_numerators(n, theta2)) {
        double mod = std::abs(ellipse_point(unit(kPi * k / n), g, d));
        if (std::abs(mod - beta) <= 1e-9)
            throw Error(ErrorCode::RegimeViolation, "beta is not generic: it equals a root modulus");
        if (mod < beta) ++ell;
    }
    if (((n - ell + 1 - theta2) % 2 + 2) % 2 != 0)
        throw Error(ErrorCode::Internal, "root count has the wrong parity for this sector");
    return ell;
}

// ---------------------------------------------------------------- plane

QuadResult plane_h(const PlaneSpec& spec, Site x, Site y) {
    check_regime(spec.gamma, spec.delta);
    require(spec.tau >= 0.0 && spec.tau <= 1.0, ErrorCode::Precondition, "tau must lie in [0, 1]");
    require(spec.tolerance > 0.0, ErrorCode::Precondition, "tolerance must be positive");
    if (spec.gamma + spec.delta >= 1.0)
        throw Error(ErrorCode::PoleOnContour, "gamma + delta >= 1 puts a zero of 1 + gamma w + delta/w on the circle");
    const double d2 = static_cast<double>(y.x2) - x.x2;
    const int e = y.x1 - x.x1 + 1;
    auto f = [&](double t) {
        cplx w = unit(t);
        return unit(-d2 * t) * std::pow(ellipse_point(w, spec.gamma, spec.delta), -e) / (2.0 * kPi);
    };
    const bool right = y.x1 >= x.x1;
    const double a = kPi * (1.0 - spec.tau);
    double lo = right ? -a : a, hi = right ? a : kPi * (1.0 + spec.tau);
    QuadResult r;
    if (hi <= lo) return r;
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double err = 0.0;
    cplx v = GK::integrate(f, lo, hi, 20, spec.tolerance, &err);
    r.error = err * std::max(1.0, std::abs(v));
    if (!(r.error <= 100.0 * spec.tolerance * std::max(1.0, std::abs(v))))
        throw Error(ErrorCode::QuadratureFailure, "contour integral did not reach the requested tolerance");
    r.value = right ? v : -v;
    return r;
}

namespace {

struct PlaneAdapter {
    const PlaneSpec& spec;
    double* err;
    double prefactor(Step s) const {
        switch (s) {
        case Step::Fixed: return 1.0;
        case Step::Right: return -1.0;
        case Step::Up: return spec.gamma;
        case Step::Down: return spec.delta;
        }
        return 0.0;
    }
    cplx entry(Site x, Site y) const {
        QuadResult q = plane_h(spec, x, y);
        *err = std::max(*err, q.error);
        return q.value;
    }
};

} // namespace

LimitCorrelation plane_correlation(const PlaneSpec& spec, const EventQuery& query) {
    double err = 0.0;
    LimitCorrelation out = limit_correlation(PlaneAdapter{spec, &err}, query, 0);
    out.quadrature_error = err;
    return out;
}

// ---------------------------------------------------------------- arc geometry

ArcGeometry arc_geometry(double beta, double gamma, double delta, int n) {
    check_regime(gamma, delta);
    require(beta >= 0.0, ErrorCode::Precondition, "beta must be non-negative");
    const double s = gamma + delta, q = gamma - delta;
    const double lo = std::abs(1.0 - s), hi = 1.0 + s;
    ArcGeometry g;
    g.intersects = beta >= lo && beta <= hi;
    g.full = beta < lo;
    g.empty = beta >= hi;
    if (s > 0.0) {
        if (g.empty) {
            g.t_beta = 0.0;
        } else if (g.full) {
            g.t_beta = kPi;
        } else {
            // |1 + gamma w + delta/w|^2 = 1 + q^2 + 2 s c + 4 gamma delta c^2, increasing in c = cos t
            double disc = std::max(0.0, s * s - 4.0 * gamma * delta * (1.0 + q * q - beta * beta));
            double c = (beta * beta - 1.0 - q * q) / (s + std::sqrt(disc));
            g.t_beta = std::acos(std::clamp(c, -1.0, 1.0));
        }
    }
    if (n > 0) {
        for (int eta = 0; eta < 2; ++eta)
            for (int k : root_numerators(n, eta))
                if (std::abs(std::abs(ellipse_point(unit(kPi * k / n), gamma, delta)) - beta) <= 1e-9)
                    g.generic[eta] = false;
    }
    return g;
}

bool arc_single_interval(double beta, double gamma, double delta, int samples) {
    ArcGeometry g = arc_geometry(beta, gamma, delta);
    // samples whose modulus ties beta to rounding sit on the arc ends and are skipped
    const double tie = 1e-12 * std::max(1.0, beta);
    std::vector<int> in(samples); // 1 inside, 0 outside, -1 tie
    for (int i = 0; i < samples; ++i) {
        double m = std::abs(ellipse_point(unit(2.0 * kPi * i / samples), gamma, delta));
        in[i] = std::abs(m - beta) <= tie ? -1 : m > beta;
    }
    std::vector<int> seq;
    for (int v : in)
        if (v >= 0) seq.push_back(v);
    int changes = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) changes += seq[i] != seq[(i + 1) % seq.size()];
    if (changes != 0 && changes != 2) return false;
    for (int i = 1; i < samples; ++i)
        if (in[i] >= 0 && in[samples - i] >= 0 && in[i] != in[samples - i]) return false;
    if (changes == 2 && in[0] == 0) return false;
    if (!g.t_beta) return true;
    const double h = 2.0 * kPi / samples;
    for (int i = 0; i < samples; ++i) {
        double t = 2.0 * kPi * i / samples;
        if (t > kPi) t -= 2.0 * kPi;
        if (std::abs(t) < *g.t_beta - h && in[i] == 0) return false;
        if (std::abs(t) > *g.t_beta + h && in[i] == 1) return false;
    }
    return true;
}

std::optional<int> predicted_sector_sign(double beta, double gamma, double delta, const TorusShape& shape,
                                         Sector sector) {
    const double s = gamma + delta;
    if (!(beta > 0.0) || std::abs(beta - (1.0 - s)) <= 1e-9 || std::abs(beta - (1.0 + s)) <= 1e-9) return std::nullopt;
    ArcGeometry g = arc_geometry(beta, gamma, delta, shape.m2);
    if (!g.generic[sector.theta2]) return std::nullopt;
    if (beta < 1.0 - s) return c_coeff(sector, shape) > 0 ? 1 : -1;
    if (beta < 1.0 + s) return 1;
    return ((shape.m1 + sector.theta1 + 1) * (sector.theta2 + 1)) % 2 == 0 ? 1 : -1;
}

} // namespace snake
