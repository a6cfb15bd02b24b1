// Independent reference computations used by tests and the acceptance suite.
#pragma once

#include "snake/kasteleyn.hpp"
#include "snake/lattice.hpp"
#include "snake/linalg.hpp"
#include "snake/ring.hpp"

#include <complex>
#include <vector>

namespace snake::oracle {

std::complex<double> fibonacci_closed(int n, double lambda);
double fibonacci_binomial(int n, double lambda);
// Sum of |terms| of the binomial form; the natural rounding scale of f_n(lambda).
double fibonacci_abs_scale(int n, double lambda);

MatrixC dense_K(Sector sector, const TorusShape& shape, const Params& params);
int permutation_sign(const SnakeConfig& c);

// Signed step product of one configuration in a sector: sgn * prod of K_theta terms.
std::complex<double> sector_weight(Sector sector, const SnakeConfig& c, const Params& params);

bool contains_word(const SnakeConfig& c, const RWord& word);
bool satisfies(const SnakeConfig& c, const EventQuery& query);

// Sum over all snakelet placements inside the Fixed set of a pure configuration.
double nest_sum(const SnakeConfig& c, const Params& params);

// Pure configurations with their coarse weights, shared by many queries.
struct WeightedPure {
    std::vector<SnakeConfig> configs;
    std::vector<double> weights;
    double z = 0.0;
    WeightedPure(const TorusShape& shape, const Params& params);
    double probability(const EventQuery& query, int theta2 = -1) const;
};

// Double Poisson series for the twisted single-walker kernel, truncated past 1e-18.
double km_kernel_series(int n, int ell, const RateParams& rates, int x, int y, double t);

// Generators on the state space and their matrix exponentials.
Eigen::MatrixXd conditioned_generator(const StateSpace& space, const RateParams& rates);
Eigen::MatrixXd asep_generator(const StateSpace& space, const RateParams& rates);
Eigen::MatrixXd semigroup(const Eigen::MatrixXd& generator, double t);

} // namespace snake::oracle
