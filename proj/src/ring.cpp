#include "snake/ring.hpp"

#include "snake/error.hpp"
#include "snake/limits.hpp"
#include "snake/linalg.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace snake {

namespace {

constexpr double kPi = std::numbers::pi;

int mod(long long a, int n) {
    long long r = a % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

// exp(i pi num / n) with num reduced mod 2n first.
cplx half_root(long long num, int n) {
    double a = kPi * static_cast<double>(mod(num, 2 * n)) / n;
    return {std::cos(a), std::sin(a)};
}

double clamp_probability(double v, const char* what) {
    if (v >= 0.0) return v;
    if (v >= -1e-12) {
        fmt::print(stderr, "warning: {} = {:.3e} clamped to 0\n", what, v);
        return 0.0;
    }
    throw Error(ErrorCode::NegativeProbability, fmt::format("{} = {:.17g}", what, v));
}

double det_sub(const Eigen::MatrixXd& p, const std::vector<int>& rows, const std::vector<int>& cols) {
    const auto k = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) m(i, j) = p(rows[i], cols[j]);
    return k == 0 ? 1.0 : m.partialPivLu().determinant();
}

void check_rates(const RateParams& r) {
    require(r.T >= 0.0 && r.Tp >= 0.0, ErrorCode::Precondition, "rates must be non-negative");
}

void check_pair(const WalkerConfig& x, const WalkerConfig& y) {
    check_config(x);
    check_config(y);
    require(x.n == y.n && x.ell() == y.ell(), ErrorCode::Precondition, "configurations differ in n or ell");
}

std::vector<int> shifted(const std::vector<int>& h, std::size_t j, int by, int n) {
    std::vector<int> out = h;
    out[j] = mod(out[j] + by, n);
    return out;
}

} // namespace

WalkerConfig make_config(int n, std::vector<int> positions) {
    require(n >= 2, ErrorCode::Precondition, "the ring needs n >= 2");
    for (int& p : positions) p = mod(p, n);
    std::sort(positions.begin(), positions.end());
    WalkerConfig h{n, std::move(positions)};
    check_config(h);
    return h;
}

void check_config(const WalkerConfig& h) {
    require(h.n >= 2, ErrorCode::Precondition, "the ring needs n >= 2");
    require(h.ell() >= 1 && h.ell() <= h.n, ErrorCode::Precondition, "need 1 <= ell <= n");
    for (int i = 0; i < h.ell(); ++i) {
        require(h.positions[i] >= 0 && h.positions[i] < h.n, ErrorCode::Precondition, "positions must lie in [0, n)");
        if (i > 0)
            require(h.positions[i] > h.positions[i - 1], ErrorCode::Precondition,
                    "positions must be strictly increasing");
    }
}

RingConstants ring_constants(int ell, int n) {
    require(n >= 2 && ell >= 1 && ell <= n, ErrorCode::Precondition, "need n >= 2 and 1 <= ell <= n");
    RingConstants c;
    c.mu = mu_ln(ell, n);
    c.c = ell - c.mu;
    double total = 0.0;
    for (const WalkerConfig& y : StateSpace(n, ell, 1u << 20).states()) total += vandermonde_delta(y);
    c.Cln = total / std::pow(static_cast<double>(n), ell);
    return c;
}

double vandermonde_delta(int n, const std::vector<int>& h) {
    double d = 1.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = i + 1; j < h.size(); ++j) {
            int diff = mod(static_cast<long long>(h[j]) - h[i], n);
            // |omega^a - omega^b| = 2 |sin(pi (a - b) / n)|
            d *= 2.0 * std::abs(std::sin(kPi * diff / n));
            if (diff == 0) return 0.0;
        }
    return d;
}

double vandermonde_delta(const WalkerConfig& h) { return vandermonde_delta(h.n, h.positions); }

cplx phi_det(int n, const std::vector<int>& h) {
    const int ell = static_cast<int>(h.size());
    MatrixC a(ell, ell);
    for (int j = 0; j < ell; ++j)
        for (int k = 0; k < ell; ++k)
            a(j, k) = half_root(static_cast<long long>(n - ell + 1 + 2 * k) * h[j], n);
    return determinant(a);
}

cplx phi_formula(int n, const std::vector<int>& h) {
    const int ell = static_cast<int>(h.size());
    int inversions = 0;
    long long sum = 0;
    for (int i = 0; i < ell; ++i) {
        sum += h[i];
        for (int j = i + 1; j < ell; ++j) inversions += h[i] > h[j];
    }
    static const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    double sign = ((inversions + sum) % 2 == 0) ? 1.0 : -1.0;
    return sign * kIPow[(ell * (ell - 1) / 2) % 4] * vandermonde_delta(n, h);
}

double computational_lemma_residual(const WalkerConfig& h, int direction) {
    check_config(h);
    require(direction == 1 || direction == -1, ErrorCode::Precondition, "direction must be +1 or -1");
    const int n = h.n, ell = h.ell();
    const int theta = (n - ell + 1) % 2;
    const int edge = direction == 1 ? n - 1 : 0;
    cplx total = 0.0;
    for (int j = 0; j < ell; ++j) {
        double s = (theta && h.positions[j] == edge) ? -1.0 : 1.0;
        total += s * phi_det(n, shifted(h.positions, j, direction, n));
    }
    return std::abs(total + mu_ln(ell, n) * phi_det(n, h.positions));
}

int traffic(const WalkerConfig& h) {
    check_config(h);
    int count = 0;
    for (int a : h.positions)
        for (int b : h.positions) count += mod(b - a, h.n) == mod(1, h.n);
    return count;
}

double km_kernel(int n, int ell, const RateParams& rates, int x, int y, double t) {
    require(n >= 2, ErrorCode::Precondition, "the ring needs n >= 2");
    require(t >= 0.0, ErrorCode::Precondition, "t must be non-negative");
    check_rates(rates);
    const long long d = static_cast<long long>(y) - x;
    const int eta = mod(ell + 1, 2);
    if (t == 0.0) return d % n != 0 ? 0.0 : ((eta * (d / n)) % 2 == 0 ? 1.0 : -1.0);
    double total = 0.0;
    // z = exp(i pi k / n) with z^n = (-1)^(ell+1)
    for (int k = -n + 1; k <= n; ++k) {
        if (mod(k - eta, 2) != 0) continue;
        double a = kPi * k / n;
        cplx growth = std::exp(t * cplx((rates.T + rates.Tp) * std::cos(a), (rates.T - rates.Tp) * std::sin(a)));
        total += (half_root(-static_cast<long long>(k) * d, n) * growth).real();
    }
    return total * std::exp(-(rates.T + rates.Tp) * t) / n;
}

Eigen::MatrixXd km_matrix(int n, int ell, const RateParams& rates, double t) {
    Eigen::MatrixXd p(n, n);
    std::vector<double> by_offset(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d) by_offset[d + n - 1] = km_kernel(n, ell, rates, 0, d, t);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) p(x, y) = by_offset[y - x + n - 1];
    return p;
}

double noncollision_det(const WalkerConfig& x, const WalkerConfig& y, const RateParams& rates, double t) {
    check_pair(x, y);
    Eigen::MatrixXd p = km_matrix(x.n, x.ell(), rates, t);
    return clamp_probability(det_sub(p, x.positions, y.positions), "non-collision determinant");
}

double survival_probability(const WalkerConfig& x, const RateParams& rates, double t) {
    check_config(x);
    StateSpace space(x.n, x.ell());
    Eigen::MatrixXd p = km_matrix(x.n, x.ell(), rates, t);
    double total = 0.0;
    for (const WalkerConfig& y : space.states()) total += det_sub(p, x.positions, y.positions);
    return clamp_probability(total, "survival probability");
}

double conditioned_transition(const WalkerConfig& x, const WalkerConfig& y, const RateParams& rates, double t) {
    check_pair(x, y);
    const double c = x.ell() - mu_ln(x.ell(), x.n);
    Eigen::MatrixXd p = km_matrix(x.n, x.ell(), rates, t);
    double v = vandermonde_delta(y) / vandermonde_delta(x) * std::exp(c * (rates.T + rates.Tp) * t) *
               det_sub(p, x.positions, y.positions);
    return clamp_probability(v, "conditioned transition");
}

double stationary_prob(const WalkerConfig& h) {
    check_config(h);
    double d = vandermonde_delta(h);
    return d * d / std::pow(static_cast<double>(h.n), h.ell());
}

// ---------------------------------------------------------------- state space

StateSpace::StateSpace(int n, int ell, std::size_t cap) : n_(n), ell_(ell) {
    require(n >= 2 && ell >= 1 && ell <= n, ErrorCode::Precondition, "need n >= 2 and 1 <= ell <= n");
    double count = 1.0;
    for (int i = 0; i < ell; ++i) count = count * (n - i) / (i + 1);
    if (count > static_cast<double>(cap))
        throw Error(ErrorCode::EnumerationTooLarge,
                    fmt::format("C({}, {}) = {:.0f} states exceeds the cap {}", n, ell, count, cap));
    std::vector<int> c(ell);
    std::iota(c.begin(), c.end(), 0);
    while (true) {
        index_.emplace(c, states_.size());
        states_.push_back(WalkerConfig{n, c});
        int i = ell - 1;
        while (i >= 0 && c[i] == n - ell + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < ell; ++j) c[j] = c[j - 1] + 1;
    }
}

std::size_t StateSpace::index(const WalkerConfig& h) const {
    auto it = index_.find(h.positions);
    require(h.n == n_ && it != index_.end(), ErrorCode::Precondition, "configuration is not in this state space");
    return it->second;
}

Eigen::MatrixXd noncollision_matrix(const StateSpace& space, const RateParams& rates, double t) {
    Eigen::MatrixXd p = km_matrix(space.n(), space.ell(), rates, t);
    const auto m = static_cast<Eigen::Index>(space.size());
    Eigen::MatrixXd q(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) q(i, j) = det_sub(p, space[i].positions, space[j].positions);
    return q;
}

Eigen::MatrixXd conditioned_matrix(const StateSpace& space, const RateParams& rates, double t) {
    Eigen::MatrixXd q = noncollision_matrix(space, rates, t);
    const double growth = std::exp((space.ell() - mu_ln(space.ell(), space.n())) * (rates.T + rates.Tp) * t);
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = 0; j < q.cols(); ++j)
            q(i, j) *= vandermonde_delta(space[j]) / vandermonde_delta(space[i]) * growth;
    return q;
}

double chapman_kolmogorov_residual(const StateSpace& space, const RateParams& rates, double s, double t) {
    Eigen::MatrixXd lhs = conditioned_matrix(space, rates, s) * conditioned_matrix(space, rates, t);
    return (lhs - conditioned_matrix(space, rates, s + t)).cwiseAbs().maxCoeff();
}

double stationarity_residual(const StateSpace& space, const RateParams& rates, double t) {
    Eigen::RowVectorXd pi(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) pi(i) = stationary_prob(space[i]);
    return (pi * conditioned_matrix(space, rates, t) - pi).cwiseAbs().maxCoeff();
}

double row_sum_residual(const StateSpace& space, const RateParams& rates, double t) {
    Eigen::VectorXd sums = conditioned_matrix(space, rates, t).rowwise().sum();
    return (sums.array() - 1.0).abs().maxCoeff();
}

// ---------------------------------------------------------------- rates and generators

namespace {

std::vector<Move> moves(const WalkerConfig& h, const RateParams& rates, bool conditioned) {
    check_config(h);
    check_rates(rates);
    std::vector<Move> out;
    const double dh = vandermonde_delta(h);
    for (int j = 0; j < h.ell(); ++j)
        for (int dir : {1, -1}) {
            const double base = dir == 1 ? rates.T : rates.Tp;
            const int target = mod(h.positions[j] + dir, h.n);
            if (base == 0.0 || std::binary_search(h.positions.begin(), h.positions.end(), target)) continue;
            Move m{j, dir, make_config(h.n, shifted(h.positions, j, dir, h.n)), base};
            if (conditioned) m.rate *= vandermonde_delta(m.to) / dh;
            out.push_back(std::move(m));
        }
    return out;
}

} // namespace

std::vector<Move> conditioned_moves(const WalkerConfig& h, const RateParams& rates) { return moves(h, rates, true); }
std::vector<Move> asep_moves(const WalkerConfig& h, const RateParams& rates) { return moves(h, rates, false); }

double asep_generator_delta(const WalkerConfig& h, const RateParams& rates) {
    const double dh = vandermonde_delta(h);
    double total = 0.0;
    for (const Move& m : asep_moves(h, rates)) total += m.rate * (vandermonde_delta(m.to) - dh);
    return total;
}

double generator_residual(const WalkerConfig& h, const RateParams& rates) {
    const double rhs = (rates.T + rates.Tp) * (mu_ln(h.ell(), h.n) - h.ell() + traffic(h)) * vandermonde_delta(h);
    return std::abs(asep_generator_delta(h, rates) - rhs);
}

double asymptotic_residual(const WalkerConfig& x, const RateParams& rates, double t) {
    RingConstants c = ring_constants(x.ell(), x.n);
    return std::log(survival_probability(x, rates, t)) + (rates.T + rates.Tp) * c.c * t -
           std::log(c.Cln * vandermonde_delta(x));
}

double small_t_det_rate(const WalkerConfig& x, const WalkerConfig& y, const RateParams& rates, double t) {
    check_pair(x, y);
    auto r = [&](double s) { return det_sub(km_matrix(x.n, x.ell(), rates, s), x.positions, y.positions) / s; };
    return 2.0 * r(t / 2) - r(t);
}

double small_t_conditioned_rate(const WalkerConfig& x, const WalkerConfig& y, const RateParams& rates, double t) {
    auto r = [&](double s) { return conditioned_transition(x, y, rates, s) / s; };
    return 2.0 * r(t / 2) - r(t);
}

// ---------------------------------------------------------------- space-time kernel

cplx ring_h(int ell, int n, const RateParams& rates, Step f, double s, int h, double s2, int h2) {
    check_rates(rates);
    RootSets roots = root_sets(ell, n);
    const long long e = static_cast<long long>(h2) - h + (f == Step::Down) - (f == Step::Up);
    const double dt = s2 - s;
    const bool right = s2 > s || (s2 == s && f != Step::Right);
    const auto& ks = right ? roots.R_k : roots.L_k;
    cplx total = 0.0;
    for (int k : ks) {
        cplx w = half_root(k, n);
        total += half_root(-k * e, n) * std::exp(-(rates.T * w + rates.Tp / w) * dt);
    }
    return (right ? 1.0 : -1.0) * total / static_cast<double>(n);
}

SpaceTimeResult spacetime_correlation(int ell, int n, const RateParams& rates,
                                      const std::vector<SpaceTimeEvent>& events) {
    require(n >= 2 && ell >= 1 && ell <= n, ErrorCode::Precondition, "need n >= 2 and 1 <= ell <= n");
    check_rates(rates);
    std::vector<SpaceTimeEvent> ev;
    for (SpaceTimeEvent e : events) {
        e.h = mod(e.h, n);
        bool dup = false;
        for (const SpaceTimeEvent& o : ev) dup = dup || (o.t == e.t && o.h == e.h && o.f == e.f);
        if (!dup) ev.push_back(e);
    }
    SpaceTimeResult out;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        out.density_order += ev[i].f == Step::Up || ev[i].f == Step::Down;
        for (std::size_t j = i + 1; j < ev.size(); ++j) {
            if (ev[i].t != ev[j].t || ev[i].h != ev[j].h) continue;
            out.conflict = true; // one site carries one step
        }
    }
    if (out.conflict) return out;
    const auto k = static_cast<Eigen::Index>(ev.size());
    MatrixC m(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        double pref = ev[i].f == Step::Right ? -1.0 : ev[i].f == Step::Up ? rates.T : ev[i].f == Step::Down ? rates.Tp : 1.0;
        for (Eigen::Index j = 0; j < k; ++j)
            m(i, j) = pref * ring_h(ell, n, rates, ev[i].f, ev[i].t, ev[i].h, ev[j].t, ev[j].h);
    }
    cplx d = determinant(m);
    if (std::abs(d.imag()) > 1e-9 * (1.0 + std::abs(d.real())))
        throw Error(ErrorCode::Internal, "space-time correlation has a non-negligible imaginary part");
    out.value = d.real();
    return out;
}

double joint_occupation(const RateParams& rates, const std::vector<double>& times,
                        const std::vector<WalkerConfig>& configs) {
    require(times.size() == configs.size() && !configs.empty(), ErrorCode::Precondition,
            "need one configuration per time");
    std::vector<SpaceTimeEvent> ev;
    for (std::size_t i = 0; i < times.size(); ++i) {
        check_pair(configs[0], configs[i]);
        for (int p : configs[i].positions) ev.push_back({times[i], p, Step::Right});
    }
    return spacetime_correlation(configs[0].ell(), configs[0].n, rates, ev).value;
}

double markov_check(int ell, int n, const RateParams& rates, const std::vector<double>& times,
                    std::vector<WalkerConfig> states) {
    require(times.size() >= 2, ErrorCode::Precondition, "need at least two times");
    for (std::size_t i = 1; i < times.size(); ++i)
        require(times[i] > times[i - 1], ErrorCode::Precondition, "times must be increasing");
    if (states.empty()) states = StateSpace(n, ell).states();
    const std::size_t m = states.size(), k = times.size();
    if (std::pow(static_cast<double>(m), static_cast<double>(k)) > 2e5)
        throw Error(ErrorCode::Intractable, "too many state tuples for the Markov check");

    const double tiny = 1e-14;
    std::vector<double> single(m);
    Eigen::MatrixXd pair(m, m);
    const double ta = times[k - 2], tb = times[k - 1];
    for (std::size_t b = 0; b < m; ++b) {
        single[b] = joint_occupation(rates, {ta}, {states[b]});
        for (std::size_t c = 0; c < m; ++c) pair(b, c) = joint_occupation(rates, {ta, tb}, {states[b], states[c]});
    }
    double worst = 0.0;
    std::vector<std::size_t> idx(k - 1, 0);
    while (true) {
        std::vector<WalkerConfig> prefix;
        for (std::size_t i : idx) prefix.push_back(states[i]);
        std::vector<double> pre_times(times.begin(), times.end() - 1);
        const double p_prefix = joint_occupation(rates, pre_times, prefix);
        const std::size_t b = idx.back();
        if (p_prefix > tiny && single[b] > tiny) {
            pre_times.push_back(tb);
            for (std::size_t c = 0; c < m; ++c) {
                prefix.push_back(states[c]);
                double full = joint_occupation(rates, pre_times, prefix);
                prefix.pop_back();
                worst = std::max(worst, std::abs(full / p_prefix - pair(b, c) / single[b]));
            }
        }
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == m) idx[pos++] = 0;
        if (pos == idx.size()) break;
    }
    return worst;
}

} // namespace snake
