#include "snake/oracles.hpp"

#include "snake/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>
#include <numbers>

namespace snake::oracle {

std::complex<double> fibonacci_closed(int n, double lambda) {
    std::complex<double> c = std::sqrt(std::complex<double>(1.0 + 4.0 * lambda, 0.0));
    if (std::abs(c) < 1e-300) return (n + 1) * std::pow(0.5, n);
    std::complex<double> a = (1.0 + c) / 2.0, b = (1.0 - c) / 2.0;
    return (std::pow(a, n + 1) - std::pow(b, n + 1)) / c;
}

double fibonacci_binomial(int n, double lambda) {
    double s = 0.0;
    for (int k = 0; 2 * k <= n; ++k) {
        double binom = std::exp(std::lgamma(n - k + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - 2 * k + 1.0));
        s += std::round(binom) * std::pow(lambda, k);
    }
    return s;
}

double fibonacci_abs_scale(int n, double lambda) { return fibonacci_binomial(n, std::abs(lambda)); }

MatrixC dense_K(Sector sector, const TorusShape& shape, const Params& params) {
    const int n = shape.sites();
    MatrixC k(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) k(a, b) = k_entry(sector, shape, params, site_at(shape, a), site_at(shape, b));
    return k;
}

int permutation_sign(const SnakeConfig& c) {
    const int n = c.shape().sites();
    std::vector<char> seen(n, 0);
    int sign = 1;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        int len = 0;
        for (int i = s; !seen[i]; i = c.target(i)) {
            seen[i] = 1;
            ++len;
        }
        if (len % 2 == 0) sign = -sign;
    }
    return sign;
}

std::complex<double> sector_weight(Sector sector, const SnakeConfig& c, const Params& raw) {
    const TorusShape& sh = c.shape();
    Params p = effective_params(sh, raw);
    const double pi = std::numbers::pi;
    std::complex<double> w = static_cast<double>(permutation_sign(c));
    for (Step s : c.steps()) {
        std::complex<double> term = step_weight(p, s);
        if (s == Step::Right) term *= std::polar(1.0, pi * sector.theta1 / sh.m1);
        if (s == Step::Up) term *= std::polar(1.0, pi * sector.theta2 / sh.m2);
        if (s == Step::Down) term *= std::polar(1.0, -pi * sector.theta2 / sh.m2);
        w *= term;
    }
    return w;
}

bool contains_word(const SnakeConfig& c, const RWord& word) {
    for (const RFactor& f : word.factors)
        if (c.step(f.site) != f.step) return false;
    return true;
}

bool satisfies(const SnakeConfig& c, const EventQuery& query) {
    for (const Event& e : query)
        if (c.step(e.site) != e.step) return false;
    return true;
}

double nest_sum(const SnakeConfig& c, const Params& raw) {
    const TorusShape& sh = c.shape();
    Params p = effective_params(sh, raw);
    StepCounts k = step_counts(c);
    const int n = sh.sites();
    std::vector<char> taken(n, 0);
    double total = 0.0;
    // placements chosen in increasing base index to visit each set once
    std::function<void(int, int)> rec = [&](int from, int pairs) {
        double w = std::pow(-1.0, pairs) * std::pow(p.alpha, k.fixed - 2 * pairs) * std::pow(p.beta, k.right) *
                   std::pow(p.gamma, k.up + pairs) * std::pow(p.delta, k.down + pairs);
        total += w;
        if (sh.m2 < 3) return;
        for (int i = from; i < n; ++i) {
            if (taken[i] || c.step(i) != Step::Fixed) continue;
            int j = site_index(sh, add(sh, site_at(sh, i), {0, 1}));
            if (taken[j] || c.step(j) != Step::Fixed) continue;
            taken[i] = taken[j] = 1;
            rec(i + 1, pairs + 1);
            taken[i] = taken[j] = 0;
        }
    };
    rec(0, 0);
    return total;
}

WeightedPure::WeightedPure(const TorusShape& shape, const Params& params) {
    enumerate_configs(shape, true, [&](const SnakeConfig& c) {
        configs.push_back(c);
        weights.push_back(coarse_weight(c, params));
        z += weights.back();
    });
}

double WeightedPure::probability(const EventQuery& query, int theta2) const {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const SnakeConfig& c = configs[i];
        if (theta2 >= 0) {
            int occ = cycle_data(c).occupation;
            if (((occ - theta2 - c.shape().m2 - 1) % 2 + 2) % 2 != 0) continue;
        }
        den += weights[i];
        if (satisfies(c, query)) num += weights[i];
    }
    require(den != 0.0, ErrorCode::ZeroPartition, "empty class");
    return num / den;
}

namespace {

std::vector<double> poisson_pmf(double mean) {
    const int top = static_cast<int>(std::ceil(mean + 40.0 * std::sqrt(mean) + 40.0));
    std::vector<double> p(top + 1);
    for (int j = 0; j <= top; ++j)
        p[j] = mean == 0.0 ? (j == 0 ? 1.0 : 0.0) : std::exp(j * std::log(mean) - mean - std::lgamma(j + 1.0));
    return p;
}

Eigen::MatrixXd generator_of(const StateSpace& space, const RateParams& rates, bool conditioned) {
    const auto m = static_cast<Eigen::Index>(space.size());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (const Move& mv : conditioned ? conditioned_moves(space[i], rates) : asep_moves(space[i], rates)) {
            g(i, static_cast<Eigen::Index>(space.index(mv.to))) += mv.rate;
            g(i, i) -= mv.rate;
        }
    return g;
}

} // namespace

double km_kernel_series(int n, int ell, const RateParams& rates, int x, int y, double t) {
    std::vector<double> up = poisson_pmf(rates.T * t), down = poisson_pmf(rates.Tp * t);
    double total = 0.0;
    for (std::size_t j = 0; j < up.size(); ++j)
        for (std::size_t k = 0; k < down.size(); ++k) {
            long long d = static_cast<long long>(y) - x + static_cast<long long>(k) - static_cast<long long>(j);
            if (d % n != 0) continue;
            long long winding = d / n;
            double sign = ((ell + 1) * winding) % 2 == 0 ? 1.0 : -1.0;
            total += sign * up[j] * down[k];
        }
    return total;
}

Eigen::MatrixXd conditioned_generator(const StateSpace& space, const RateParams& rates) {
    return generator_of(space, rates, true);
}

Eigen::MatrixXd asep_generator(const StateSpace& space, const RateParams& rates) {
    return generator_of(space, rates, false);
}

Eigen::MatrixXd semigroup(const Eigen::MatrixXd& generator, double t) { return (generator * t).exp(); }

} // namespace snake::oracle
