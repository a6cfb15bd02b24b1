#include "snake/kasteleyn.hpp"

#include "snake/error.hpp"
#include "snake/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace snake {

namespace {

cplx unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

// exp(i pi k / m) for k in [0, 2m)
std::vector<cplx> phase_table(int m) {
    std::vector<cplx> t(2 * m);
    for (int k = 0; k < 2 * m; ++k) t[k] = unit(std::numbers::pi * k / m);
    return t;
}

long long mod2(long long a, int m) {
    long long r = a % (2LL * m);
    return r < 0 ? r + 2LL * m : r;
}

void check_shape(const TorusShape& s) {
    require(s.m1 >= 1 && s.m2 >= 1, ErrorCode::Precondition, "torus periods must be positive");
}

} // namespace

double step_weight(const Params& p, Step s) {
    switch (s) {
    case Step::Fixed: return p.alpha;
    case Step::Right: return p.beta;
    case Step::Up: return p.gamma;
    case Step::Down: return p.delta;
    }
    return 0.0;
}

cplx k_entry(Sector sector, const TorusShape& shape, const Params& raw, Site x, Site y) {
    check_shape(shape);
    Params p = effective_params(shape, raw);
    x = wrap(shape, x);
    y = wrap(shape, y);
    const double pi = std::numbers::pi;
    cplx v = 0.0;
    if (y == x) v += p.alpha;
    if (y == add(shape, x, {1, 0})) v += p.beta * unit(pi * sector.theta1 / shape.m1);
    if (y == add(shape, x, {0, 1})) v += p.gamma * unit(pi * sector.theta2 / shape.m2);
    if (step_allowed(shape, Step::Down) && y == add(shape, x, {0, -1}))
        v += p.delta * unit(-pi * sector.theta2 / shape.m2);
    return v;
}

cplx twisted_root_z(Sector sector, const TorusShape& shape, int j) {
    return unit(std::numbers::pi * (2 * j + sector.theta1) / shape.m1);
}

cplx twisted_root_w(Sector sector, const TorusShape& shape, int k) {
    return unit(std::numbers::pi * (2 * k + sector.theta2) / shape.m2);
}

namespace {

std::vector<cplx> eigenvalues(Sector sector, const TorusShape& shape, const Params& raw) {
    Params p = effective_params(shape, raw);
    std::vector<cplx> ev;
    ev.reserve(shape.sites());
    for (int j = 0; j < shape.m1; ++j) {
        cplx z = twisted_root_z(sector, shape, j);
        for (int k = 0; k < shape.m2; ++k) {
            cplx w = twisted_root_w(sector, shape, k);
            ev.push_back(p.alpha + p.beta * z + p.gamma * w + p.delta * std::conj(w));
        }
    }
    return ev;
}

bool singular_spectrum(const std::vector<cplx>& ev) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (cplx e : ev) {
        lo = std::min(lo, std::abs(e));
        hi = std::max(hi, std::abs(e));
    }
    return hi == 0.0 || lo <= 1e-12 * hi;
}

} // namespace

cplx LogDet::value() const {
    if (zero) return 0.0;
    return std::exp(log_abs) * phase;
}

LogDet log_det_K(Sector sector, const TorusShape& shape, const Params& params) {
    check_shape(shape);
    std::vector<cplx> ev = eigenvalues(sector, shape, params);
    LogDet d;
    d.singular = singular_spectrum(ev);
    for (cplx e : ev) {
        double a = std::abs(e);
        if (a == 0.0) {
            d.zero = true;
            d.log_abs = -std::numeric_limits<double>::infinity();
            d.phase = 0.0;
            return d;
        }
        d.log_abs += std::log(a);
        d.phase *= e / a;
    }
    d.phase /= std::abs(d.phase);
    return d;
}

cplx det_K(Sector sector, const TorusShape& shape, const Params& params) {
    return log_det_K(sector, shape, params).value();
}

double c_coeff(Sector sector, const TorusShape& shape) {
    int e = (sector.theta1 + shape.m1 + 1) * (sector.theta2 + shape.m2 + 1);
    return (e % 2 == 0) ? 0.5 : -0.5;
}

namespace {

struct ScaledSectors {
    std::array<LogDet, 4> det;
    std::array<cplx, 4> scaled{}; // C det exp(-M)
    double shift = 0.0;           // M
};

ScaledSectors scaled_sectors(const TorusShape& shape, const Params& params) {
    ScaledSectors s;
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        s.det[i] = log_det_K(kSectors[i], shape, params);
        if (!s.det[i].zero) m = std::max(m, s.det[i].log_abs);
    }
    s.shift = std::isfinite(m) ? m : 0.0;
    for (int i = 0; i < 4; ++i)
        if (!s.det[i].zero)
            s.scaled[i] = c_coeff(kSectors[i], shape) * s.det[i].phase * std::exp(s.det[i].log_abs - s.shift);
    return s;
}

double real_part_checked(cplx v, const char* what) {
    if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v.real())))
        throw Error(ErrorCode::Internal, std::string(what) + " has a non-negligible imaginary part");
    return v.real();
}

} // namespace

PartitionReport partition_report(const TorusShape& shape, const Params& params) {
    ScaledSectors s = scaled_sectors(shape, params);
    PartitionReport r;
    cplx zs = 0.0;
    for (cplx v : s.scaled) zs += v;
    double zr = real_part_checked(zs, "partition function");
    r.z = zr * std::exp(s.shift);
    r.log_abs_z = std::log(std::abs(zr)) + s.shift;
    for (int i = 0; i < 4; ++i) {
        r.det[i] = s.det[i];
        r.c_det[i] = s.scaled[i] * std::exp(s.shift);
        r.lambda[i] = zr != 0.0 ? s.scaled[i] / zr : cplx(0.0);
    }
    return r;
}

double partition_function(const TorusShape& shape, const Params& params) {
    return partition_report(shape, params).z;
}

double sector_partition(int theta2, const TorusShape& shape, const Params& params) {
    require(theta2 == 0 || theta2 == 1, ErrorCode::Precondition, "theta2 must be 0 or 1");
    ScaledSectors s = scaled_sectors(shape, params);
    cplx zs = 0.0;
    for (int i = 0; i < 4; ++i)
        if (kSectors[i].theta2 == theta2) zs += s.scaled[i];
    return real_part_checked(zs, "sector partition function") * std::exp(s.shift);
}

// ---------------------------------------------------------------- kernel

KernelTable::KernelTable(Sector sector, const TorusShape& shape, const Params& params)
    : sector_(sector), shape_(shape) {
    check_shape(shape);
    std::vector<cplx> ev = eigenvalues(sector, shape, params);
    singular_ = singular_spectrum(ev);
    inv_.resize(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) inv_[i] = singular_ ? cplx(0.0) : 1.0 / ev[i];
    e1_ = phase_table(shape.m1);
    e2_ = phase_table(shape.m2);
}

cplx KernelTable::h(Site x, Site xp) const {
    if (singular_) throw Error(ErrorCode::SingularSector, "K_theta is singular in this sector");
    const long long d1 = xp.x1 - x.x1, d2 = xp.x2 - x.x2;
    const int m1 = shape_.m1, m2 = shape_.m2;
    cplx total = 0.0;
    for (int j = 0; j < m1; ++j) {
        cplx zpow = e1_[mod2(-(2LL * j + sector_.theta1) * d1, m1)];
        cplx inner = 0.0;
        for (int k = 0; k < m2; ++k)
            inner += e2_[mod2(-(2LL * k + sector_.theta2) * d2, m2)] * inv_[j * m2 + k];
        total += zpow * inner;
    }
    return total / static_cast<double>(shape_.sites());
}

cplx h_kernel(Sector sector, const TorusShape& shape, const Params& params, Site x, Site xp) {
    return KernelTable(sector, shape, params).h(x, xp);
}

cplx signed_correlation(const KernelTable& table, const Params& params, const RWord& word) {
    const std::size_t k = word.factors.size();
    MatrixC m(k, k);
    double pref = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        const RFactor& fi = word.factors[i];
        pref *= step_weight(params, fi.step);
        Site d = displacement(fi.step);
        Site from{fi.site.x1 + d.x1, fi.site.x2 + d.x2};
        for (std::size_t j = 0; j < k; ++j) m(i, j) = table.h(from, word.factors[j].site);
    }
    if (pref == 0.0) return 0.0;
    return pref * determinant(m);
}

cplx signed_correlation(Sector sector, const TorusShape& shape, const Params& params, const RWord& word) {
    KernelTable t(sector, shape, params);
    return signed_correlation(t, effective_params(shape, params), word);
}

namespace {

// Signed sum over configurations containing the word, for one sector, via a
// dense determinant whose word rows are replaced by the single chosen term.
cplx dense_word_sum(Sector sector, const TorusShape& shape, const Params& params, const RWord& word) {
    const int n = shape.sites();
    MatrixC k(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) k(a, b) = k_entry(sector, shape, params, site_at(shape, a), site_at(shape, b));
    const double pi = std::numbers::pi;
    for (const RFactor& f : word.factors) {
        int row = site_index(shape, wrap(shape, f.site));
        int col = site_index(shape, add(shape, f.site, displacement(f.step)));
        cplx term = step_weight(params, f.step);
        if (f.step == Step::Right) term *= unit(pi * sector.theta1 / shape.m1);
        if (f.step == Step::Up) term *= unit(pi * sector.theta2 / shape.m2);
        if (f.step == Step::Down) term *= unit(-pi * sector.theta2 / shape.m2);
        k.row(row).setZero();
        k(row, col) = term;
    }
    return determinant(k);
}

} // namespace

CorrelationReport correlate(const TorusShape& shape, const Params& raw, const EventQuery& query,
                            const CorrelationOptions& opt) {
    check_shape(shape);
    Params params = effective_params(shape, raw);
    if (opt.require_regime)
        require(params.probabilistic(), ErrorCode::RegimeViolation, "alpha^2 - 4 gamma delta < 0");
    for (const Event& e : query)
        require(step_allowed(shape, e.step), ErrorCode::Precondition, "Down event on a torus with m2 = 2");

    ScaledSectors s = scaled_sectors(shape, params);
    cplx zs = 0.0;
    double mag = 0.0;
    for (int i = 0; i < 4; ++i)
        if (opt.theta2 < 0 || kSectors[i].theta2 == opt.theta2) {
            zs += s.scaled[i];
            mag += std::abs(s.scaled[i]);
        }
    if (!(std::abs(zs) > 1e-13 * mag) || mag == 0.0)
        throw Error(ErrorCode::ZeroPartition, "partition function vanishes");

    CorrelationReport rep;
    rep.words = expand_events(query, Wrap{shape.m1, shape.m2});
    cplx total = 0.0;
    for (int i = 0; i < 4; ++i) {
        Sector sec = kSectors[i];
        if (opt.theta2 >= 0 && sec.theta2 != opt.theta2) continue;
        SectorTerm term{sec, s.scaled[i] / zs, s.det[i], false};
        if (!s.det[i].singular) {
            KernelTable table(sec, shape, params);
            for (const RWord& w : rep.words)
                total += static_cast<double>(w.coefficient) * term.lambda * signed_correlation(table, params, w);
        } else {
            if (shape.sites() > opt.dense_fallback_cap)
                throw Error(ErrorCode::SingularSector, "singular sector on a torus too large for the dense fallback");
            term.dense_fallback = true;
            double scale = c_coeff(sec, shape) * std::exp(-s.shift);
            for (const RWord& w : rep.words)
                total += static_cast<double>(w.coefficient) * scale * dense_word_sum(sec, shape, params, w) / zs;
        }
        rep.sectors.push_back(term);
    }
    rep.value = real_part_checked(total, "correlation");
    return rep;
}

double correlation(const TorusShape& shape, const Params& params, const EventQuery& query) {
    return correlate(shape, params, query).value;
}

double sector_measure(int theta2, const TorusShape& shape, const Params& params, const EventQuery& query) {
    require(theta2 == 0 || theta2 == 1, ErrorCode::Precondition, "theta2 must be 0 or 1");
    CorrelationOptions opt;
    opt.theta2 = theta2;
    return correlate(shape, params, query, opt).value;
}

} // namespace snake
