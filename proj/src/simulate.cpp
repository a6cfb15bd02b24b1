#include "snake/simulate.hpp"

#include "snake/error.hpp"
#include "snake/limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace snake {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kBlock = 1024;

int wrap(int a, int n) { return ((a % n) + n) % n; }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

bool occupied(const std::vector<int>& pos, int site) { return std::find(pos.begin(), pos.end(), site) != pos.end(); }

// Delta(pos with pos[j] -> to) / Delta(pos)
double delta_ratio(const std::vector<int>& pos, std::size_t j, int to, int n) {
    double r = 1.0;
    for (std::size_t k = 0; k < pos.size(); ++k) {
        if (k == j) continue;
        r *= std::abs(std::sin(kPi * (to - pos[k]) / n)) / std::abs(std::sin(kPi * (pos[j] - pos[k]) / n));
    }
    return r;
}

int traffic_of(const std::vector<int>& pos, int n) {
    int count = 0;
    for (int a : pos)
        for (int b : pos) count += wrap(b - a, n) == wrap(1, n);
    return count;
}

std::vector<int> sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}

struct Candidate {
    int particle;
    int direction;
    double rate;
};

struct Welford {
    double n = 0.0, mean = 0.0, m2 = 0.0;
    void add(double x) {
        n += 1.0;
        double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Welford& o) {
        if (o.n == 0.0) return;
        double total = n + o.n, d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }
};

} // namespace

const char* dynamics_name(Dynamics d) {
    switch (d) {
    case Dynamics::Free: return "free";
    case Dynamics::Conditioned: return "conditioned";
    case Dynamics::Asep: return "asep";
    }
    return "?";
}

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) { return splitmix64(splitmix64(seed) + replica); }

std::vector<int> PathRecord::positions_at(double t) const {
    std::vector<int> pos = initial.positions;
    for (const Jump& j : jumps) {
        if (j.t > t) break;
        pos[j.particle] = wrap(pos[j.particle] + j.direction, initial.n);
    }
    return pos;
}

WalkerConfig PathRecord::state_at(double t) const { return make_config(initial.n, positions_at(t)); }

std::vector<int> PathRecord::winding_from_jumps() const {
    std::vector<int> w(initial.positions.size(), 0);
    std::vector<int> pos = initial.positions;
    const int n = initial.n;
    for (const Jump& j : jumps) {
        int from = pos[j.particle];
        if (j.direction == 1 && from == n - 1) ++w[j.particle];
        if (j.direction == -1 && from == 0) --w[j.particle];
        pos[j.particle] = wrap(from + j.direction, n);
    }
    return w;
}

PathRecord simulate(Dynamics d, const WalkerConfig& x, const RateParams& rates, double horizon, Rng& rng) {
    check_config(x);
    require(rates.T >= 0.0 && rates.Tp >= 0.0, ErrorCode::Precondition, "rates must be non-negative");
    require(horizon >= 0.0, ErrorCode::Precondition, "horizon must be non-negative");
    PathRecord path;
    path.dynamics = d;
    path.initial = x;
    path.horizon = horizon;
    path.winding.assign(x.positions.size(), 0);
    const int n = x.n;
    std::vector<int> pos = x.positions;
    std::vector<Candidate> cand;
    double t = 0.0;
    while (true) {
        cand.clear();
        double total = 0.0;
        for (std::size_t j = 0; j < pos.size(); ++j)
            for (int dir : {1, -1}) {
                double rate = dir == 1 ? rates.T : rates.Tp;
                if (rate == 0.0) continue;
                int to = wrap(pos[j] + dir, n);
                if (d != Dynamics::Free && occupied(pos, to)) continue;
                if (d == Dynamics::Conditioned) rate *= delta_ratio(pos, j, to, n);
                cand.push_back({static_cast<int>(j), dir, rate});
                total += rate;
            }
        if (total <= 0.0) break;
        t += std::exponential_distribution<double>(total)(rng);
        if (t > horizon) break;
        double u = std::uniform_real_distribution<double>(0.0, total)(rng);
        std::size_t pick = 0;
        while (pick + 1 < cand.size() && u >= cand[pick].rate) u -= cand[pick++].rate;
        const Candidate& c = cand[pick];
        int from = pos[c.particle];
        if (c.direction == 1 && from == n - 1) ++path.winding[c.particle];
        if (c.direction == -1 && from == 0) --path.winding[c.particle];
        pos[c.particle] = wrap(from + c.direction, n);
        path.jumps.push_back({t, c.particle, c.direction});
        if (d == Dynamics::Free && !path.tau) {
            for (std::size_t k = 0; k < pos.size(); ++k)
                if (static_cast<int>(k) != c.particle && pos[k] == pos[c.particle]) path.tau = t;
        }
    }
    return path;
}

PathRecord simulate_free(const WalkerConfig& x, const RateParams& rates, double horizon, std::uint64_t seed) {
    Rng rng(replica_seed(seed, 0));
    return simulate(Dynamics::Free, x, rates, horizon, rng);
}

PathRecord simulate_conditioned(const WalkerConfig& x, const RateParams& rates, double horizon, std::uint64_t seed) {
    Rng rng(replica_seed(seed, 0));
    return simulate(Dynamics::Conditioned, x, rates, horizon, rng);
}

PathRecord simulate_asep(const WalkerConfig& x, const RateParams& rates, double horizon, std::uint64_t seed) {
    Rng rng(replica_seed(seed, 0));
    return simulate(Dynamics::Asep, x, rates, horizon, rng);
}

double traffic_integral(const PathRecord& path, double t) {
    require(t >= 0.0 && t <= path.horizon, ErrorCode::Precondition, "t must lie in [0, horizon]");
    const int n = path.initial.n;
    std::vector<int> pos = path.initial.positions;
    double total = 0.0, last = 0.0;
    for (const Jump& j : path.jumps) {
        if (j.t > t) break;
        total += traffic_of(pos, n) * (j.t - last);
        last = j.t;
        pos[j.particle] = wrap(pos[j.particle] + j.direction, n);
    }
    return total + traffic_of(pos, n) * (t - last);
}

double traffic_martingale(const PathRecord& path, const RateParams& rates, double t) {
    return 1.0 / unit_mean_martingale(path, rates, t);
}

double unit_mean_martingale(const PathRecord& path, const RateParams& rates, double t) {
    require(path.dynamics == Dynamics::Asep, ErrorCode::Precondition, "the traffic martingale needs an exclusion path");
    const int n = path.initial.n, ell = path.initial.ell();
    const double mu = mu_ln(ell, n);
    const double ratio = vandermonde_delta(n, path.positions_at(t)) / vandermonde_delta(path.initial);
    return ratio * std::exp(-(rates.T + rates.Tp) * ((mu - ell) * t + traffic_integral(path, t)));
}

double time_fraction(const PathRecord& path, const WalkerConfig& y, double from, double to) {
    require(0.0 <= from && from < to && to <= path.horizon, ErrorCode::Precondition, "need 0 <= from < to <= horizon");
    const int n = path.initial.n;
    std::vector<int> pos = path.initial.positions;
    double inside = 0.0, last = 0.0;
    auto credit = [&](double a, double b) {
        double lo = std::max(a, from), hi = std::min(b, to);
        if (hi > lo && sorted(pos) == y.positions) inside += hi - lo;
    };
    for (const Jump& j : path.jumps) {
        credit(last, j.t);
        last = j.t;
        pos[j.particle] = wrap(pos[j.particle] + j.direction, n);
    }
    credit(last, path.horizon);
    return inside / (to - from);
}

std::vector<EstimatorReport> estimate_many(const std::vector<PathFunctional>& fs, const SimSpec& spec,
                                           std::size_t n_samples, std::uint64_t seed, unsigned threads) {
    require(n_samples >= 2, ErrorCode::Precondition, "need at least two samples");
    require(!fs.empty(), ErrorCode::Precondition, "need at least one functional");
    check_config(spec.start);
    const std::size_t blocks = (n_samples + kBlock - 1) / kBlock;
    std::vector<std::vector<Welford>> acc(blocks, std::vector<Welford>(fs.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t b; (b = next.fetch_add(1)) < blocks;) {
            const std::size_t end = std::min(n_samples, (b + 1) * kBlock);
            for (std::size_t i = b * kBlock; i < end; ++i) {
                Rng rng(replica_seed(seed, i));
                PathRecord path = simulate(spec.dynamics, spec.start, spec.rates, spec.horizon, rng);
                for (std::size_t k = 0; k < fs.size(); ++k) acc[b][k].add(fs[k](path));
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    std::vector<EstimatorReport> out;
    for (std::size_t k = 0; k < fs.size(); ++k) {
        Welford total;
        for (std::size_t b = 0; b < blocks; ++b) total.merge(acc[b][k]);
        double var = total.m2 / (total.n - 1.0);
        out.push_back({total.mean, std::sqrt(std::max(var, 0.0) / total.n), n_samples, seed});
    }
    return out;
}

EstimatorReport estimate(const PathFunctional& f, const SimSpec& spec, std::size_t n_samples, std::uint64_t seed,
                         unsigned threads) {
    return estimate_many({f}, spec, n_samples, seed, threads).front();
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // P(K <= lambda) = sqrt(2 pi)/lambda sum_k exp(-(2k-1)^2 pi^2 / (8 lambda^2))
        double s = 0.0;
        for (int k = 1; k <= 20; ++k) s += std::exp(-(2.0 * k - 1) * (2.0 * k - 1) * kPi * kPi / (8 * lambda * lambda));
        return std::clamp(1.0 - std::sqrt(2.0 * kPi) / lambda * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(s, 0.0, 1.0);
}

KsResult ks_exponential(std::vector<double> samples, double rate) {
    require(!samples.empty() && rate > 0.0, ErrorCode::Precondition, "need samples and a positive rate");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = 1.0 - std::exp(-rate * samples[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)};
}

} // namespace snake
