// Exact event-driven simulation of the ring walkers (free, conditioned, exclusion),
// the traffic martingale, and replicated estimators with standard errors.
#pragma once

#include "snake/ring.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace snake {

enum class Dynamics { Free, Conditioned, Asep };

const char* dynamics_name(Dynamics d);

using Rng = std::mt19937_64;

// Stream seed for replica i of a run with master seed s (splitmix64 mixing).
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica);

struct Jump {
    double t = 0.0;
    int particle = 0;  // label fixed at time 0 (rank in the initial configuration)
    int direction = 0; // +1 or -1
};

struct PathRecord {
    Dynamics dynamics = Dynamics::Free;
    WalkerConfig initial;
    std::vector<Jump> jumps; // strictly increasing times
    double horizon = 0.0;
    std::vector<int> winding; // per particle: crossings n-1 -> 0 minus 0 -> n-1
    std::optional<double> tau; // first collision time (free dynamics only)

    // Labelled positions just after time t (right-continuous).
    std::vector<int> positions_at(double t) const;
    // Occupied set at time t; throws if two walkers share a site.
    WalkerConfig state_at(double t) const;
    std::vector<int> winding_from_jumps() const;
};

PathRecord simulate(Dynamics d, const WalkerConfig& x, const RateParams& rates, double horizon, Rng& rng);
PathRecord simulate_free(const WalkerConfig& x, const RateParams& rates, double horizon, std::uint64_t seed);
PathRecord simulate_conditioned(const WalkerConfig& x, const RateParams& rates, double horizon, std::uint64_t seed);
PathRecord simulate_asep(const WalkerConfig& x, const RateParams& rates, double horizon, std::uint64_t seed);

// Integral of Traffic(X_s) over [0, t], exact for the piecewise-constant path.
double traffic_integral(const PathRecord& path, double t);
// (Delta(X_0)/Delta(X_t)) exp((T + T') int_0^t (Traffic - c) ds): the density of
// the exclusion law against the conditioned law on F_t.
double traffic_martingale(const PathRecord& path, const RateParams& rates, double t);
// Its reciprocal, a unit-mean martingale under the exclusion law.
double unit_mean_martingale(const PathRecord& path, const RateParams& rates, double t);

// Fraction of [from, to] spent in configuration y.
double time_fraction(const PathRecord& path, const WalkerConfig& y, double from, double to);

struct EstimatorReport {
    double estimate = 0.0;
    double std_error = 0.0; // sample standard deviation / sqrt(n_samples)
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct SimSpec {
    Dynamics dynamics = Dynamics::Free;
    WalkerConfig start;
    RateParams rates;
    double horizon = 1.0;
};

using PathFunctional = std::function<double(const PathRecord&)>;

// Replica i is simulated from replica_seed(seed, i); replicas are grouped in fixed
// blocks whose Welford accumulators merge in block order, so the report does not
// depend on the thread count (0 means hardware concurrency).
std::vector<EstimatorReport> estimate_many(const std::vector<PathFunctional>& fs, const SimSpec& spec,
                                           std::size_t n_samples, std::uint64_t seed, unsigned threads = 0);
EstimatorReport estimate(const PathFunctional& f, const SimSpec& spec, std::size_t n_samples, std::uint64_t seed,
                         unsigned threads = 0);

// One-sample Kolmogorov-Smirnov test against Exp(rate): statistic and asymptotic p-value.
struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};
KsResult ks_exponential(std::vector<double> samples, double rate);
double kolmogorov_survival(double lambda); // P(K > lambda) for the Kolmogorov distribution

} // namespace snake
