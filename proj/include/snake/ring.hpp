// Poisson walkers on the ring Z_n: the cyclic Karlin-McGregor kernel, walkers
// conditioned never to collide, their space-time determinantal structure, and
// the traffic identity linking them to the exclusion process.
#pragma once

#include "snake/kasteleyn.hpp"
#include "snake/lattice.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace snake {

struct WalkerConfig {
    int n = 2;
    std::vector<int> positions; // strictly increasing in [0, n)
    int ell() const { return static_cast<int>(positions.size()); }
    bool operator==(const WalkerConfig&) const = default;
};

// Reduces mod n, sorts and validates (n >= 2, 1 <= ell <= n, distinct).
WalkerConfig make_config(int n, std::vector<int> positions);
void check_config(const WalkerConfig& h);

struct RateParams {
    double T = 1.0;  // up-jump rate
    double Tp = 0.0; // down-jump rate
};

struct RingConstants {
    double mu = 0.0;  // sin(pi ell / n) / sin(pi / n)
    double c = 0.0;   // ell - mu
    double Cln = 0.0; // n^-ell * sum of Delta over all configurations
};

RingConstants ring_constants(int ell, int n);

// prod_{i<j} |omega^{h_j} - omega^{h_i}|, omega = exp(2 pi i / n). Tuples may be
// unsorted; a repeated site gives 0.
double vandermonde_delta(int n, const std::vector<int>& h);
double vandermonde_delta(const WalkerConfig& h);

// det(z_k^{h_j}) with z_k = exp(2 pi i ((n - ell + 1)/2 + k - 1) / n), the ell roots
// of least real part. Row order follows the tuple.
cplx phi_det(int n, const std::vector<int>& h);
// sgn(sorting permutation) (-1)^{sum h} i^{ell(ell-1)/2} Delta(h).
cplx phi_formula(int n, const std::vector<int>& h);
// |sum_j (-1)^{theta [h_j at the edge]} phi(h +- e_j) + mu phi(h)|, theta = n - ell + 1.
double computational_lemma_residual(const WalkerConfig& h, int direction);

int traffic(const WalkerConfig& h);

// Single-walker kernel E_x[1{X_t = y} (-1)^{(ell+1) W_t}] as a root-of-unity sum.
double km_kernel(int n, int ell, const RateParams& rates, int x, int y, double t);
// All n x n values of km_kernel at one time.
Eigen::MatrixXd km_matrix(int n, int ell, const RateParams& rates, double t);

// P_x({X_t} = y, tau > t) for independent walkers, as det p_t^ell(x_i, y_j).
// Values in [-1e-12, 0) are clamped to 0 with a warning; lower ones throw.
double noncollision_det(const WalkerConfig& x, const WalkerConfig& y, const RateParams& rates, double t);
double survival_probability(const WalkerConfig& x, const RateParams& rates, double t);

// Law of the walkers conditioned never to collide.
double conditioned_transition(const WalkerConfig& x, const WalkerConfig& y, const RateParams& rates, double t);
double stationary_prob(const WalkerConfig& h);

// Every ell-subset of [n] in lexicographic order; throws past the cap.
class StateSpace {
public:
    StateSpace(int n, int ell, std::size_t cap = 3000);
    int n() const { return n_; }
    int ell() const { return ell_; }
    std::size_t size() const { return states_.size(); }
    const WalkerConfig& operator[](std::size_t i) const { return states_[i]; }
    const std::vector<WalkerConfig>& states() const& { return states_; }
    std::vector<WalkerConfig> states() && { return std::move(states_); }
    std::size_t index(const WalkerConfig& h) const;

private:
    int n_, ell_;
    std::vector<WalkerConfig> states_;
    std::map<std::vector<int>, std::size_t> index_;
};

Eigen::MatrixXd noncollision_matrix(const StateSpace& space, const RateParams& rates, double t);
Eigen::MatrixXd conditioned_matrix(const StateSpace& space, const RateParams& rates, double t);

// max |Q_s Q_t - Q_{s+t}|, max |pi Q_t - pi| and max |row sum - 1|.
double chapman_kolmogorov_residual(const StateSpace& space, const RateParams& rates, double s, double t);
double stationarity_residual(const StateSpace& space, const RateParams& rates, double t);
double row_sum_residual(const StateSpace& space, const RateParams& rates, double t);

struct Move {
    int particle = 0;    // index into the sorted positions
    int direction = 0;   // +1 up, -1 down
    WalkerConfig to;
    double rate = 0.0;
};

// Moves out of h with positive rate. Conditioned: T Delta(h+e_j)/Delta(h) and
// T' Delta(h-e_j)/Delta(h). Exclusion: T and T' into empty neighbours.
std::vector<Move> conditioned_moves(const WalkerConfig& h, const RateParams& rates);
std::vector<Move> asep_moves(const WalkerConfig& h, const RateParams& rates);

// Generator of the exclusion process applied to Delta, and its residual against
// (T + T')(mu - ell + Traffic(h)) Delta(h).
double asep_generator_delta(const WalkerConfig& h, const RateParams& rates);
double generator_residual(const WalkerConfig& h, const RateParams& rates);

// log P_x(tau > t) + (T + T')(ell - mu) t - log(C Delta(x)).
double asymptotic_residual(const WalkerConfig& x, const RateParams& rates, double t);

// (1/t) det p_t(x_i, y_j) and (1/t) Q_t(x, y) at step t, with one Richardson step.
double small_t_det_rate(const WalkerConfig& x, const WalkerConfig& y, const RateParams& rates, double t);
double small_t_conditioned_rate(const WalkerConfig& x, const WalkerConfig& y, const RateParams& rates, double t);

// One event of the stationary conditioned process: Fixed means h is empty at t,
// Right means h is occupied, Up/Down mean a jump out of h in [t, t + dt).
struct SpaceTimeEvent {
    double t = 0.0;
    int h = 0;
    Step f = Step::Right;
};

struct SpaceTimeResult {
    double value = 0.0;
    int density_order = 0; // number of jump events; the value is per unit time to this power
    bool conflict = false; // a site was given incompatible steps at one time; value is 0
};

cplx ring_h(int ell, int n, const RateParams& rates, Step f, double s, int h, double s2, int h2);
SpaceTimeResult spacetime_correlation(int ell, int n, const RateParams& rates,
                                      const std::vector<SpaceTimeEvent>& events);

// P(X_{t_1} = x_1, ..., X_{t_k} = x_k) from a single determinant.
double joint_occupation(const RateParams& rates, const std::vector<double>& times,
                        const std::vector<WalkerConfig>& configs);

// max over states of |P(x_k | x_{k-1}, ..., x_1) - P(x_k | x_{k-1})| for increasing times.
// Empty `states` means all of them.
double markov_check(int ell, int n, const RateParams& rates, const std::vector<double>& times,
                    std::vector<WalkerConfig> states = {});

} // namespace snake
