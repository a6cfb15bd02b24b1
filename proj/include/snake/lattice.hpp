// Snake configurations on a discrete torus: enumeration, cycles, gaps and weights.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace snake {

struct TorusShape {
    int m1 = 1; // horizontal period
    int m2 = 1; // vertical period

    int sites() const { return m1 * m2; }
    bool operator==(const TorusShape&) const = default;
};

struct Site {
    int x1 = 0;
    int x2 = 0;
    bool operator==(const Site&) const = default;
    auto operator<=>(const Site&) const = default;
};

enum class Step : std::uint8_t { Fixed = 0, Right = 1, Up = 2, Down = 3 };

inline constexpr std::array<Step, 4> kAllSteps{Step::Fixed, Step::Right, Step::Up, Step::Down};

// Displacement of a step in Z^2.
Site displacement(Step s);
char step_char(Step s);   // '.', '>', '^', 'v'
Step step_from_char(char c);
const char* step_name(Step s); // "fixed", "right", "up", "down"
Step step_from_name(const std::string& name);

// Down steps do not exist when m2 = 2.
bool step_allowed(const TorusShape& shape, Step s);

struct Params {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;

    bool probabilistic() const { return alpha * alpha - 4.0 * gamma * delta >= 0.0; }
};

// Parameters actually seen by a shape: delta is dropped when m2 = 2.
Params effective_params(const TorusShape& shape, const Params& p);

// Site index is column-major: idx = x1 * m2 + x2.
inline int site_index(const TorusShape& s, Site x) { return x.x1 * s.m2 + x.x2; }
Site site_at(const TorusShape& s, int idx);
Site wrap(const TorusShape& s, Site x);
Site add(const TorusShape& s, Site x, Site d);

class SnakeConfig {
public:
    // Throws Precondition if the steps do not induce a bijection or use a forbidden step.
    SnakeConfig(TorusShape shape, std::vector<Step> steps);

    static SnakeConfig identity(TorusShape shape);

    const TorusShape& shape() const { return shape_; }
    const std::vector<Step>& steps() const { return steps_; }
    Step step(Site x) const { return steps_[site_index(shape_, wrap(shape_, x))]; }
    Step step(int idx) const { return steps_[idx]; }
    int target(int idx) const;
    bool is_snakelet_base(int idx) const; // Up at x with Down at x+e2
    bool pure() const;
    bool operator==(const SnakeConfig& o) const { return shape_ == o.shape_ && steps_ == o.steps_; }

private:
    SnakeConfig() = default;
    TorusShape shape_;
    std::vector<Step> steps_;
};

struct StepCounts {
    int fixed = 0;
    int right = 0;
    int up = 0;
    int down = 0;
};

struct Winding {
    int q1 = 0;
    int q2 = 0;
    bool operator==(const Winding&) const = default;
};

struct CycleData {
    int r = 0;          // non-trivial cycles other than snakelets
    int snakelets = 0;  // N
    std::optional<Winding> winding;
    int occupation = 0; // L, Right steps per column
    StepCounts counts;
};

struct Gap {
    int size = 0;
    bool cyclic = false; // a whole Fixed column, closed on itself
};

struct GapDecomposition {
    std::vector<Gap> gaps;
    int total() const;
};

std::size_t enumeration_cap(); // default 20 sites, overridden by SNAKE_ENUM_CAP

// Calls visit for every configuration in a deterministic order.
void enumerate_configs(const TorusShape& shape, bool pure_only,
                       const std::function<void(const SnakeConfig&)>& visit);
std::vector<SnakeConfig> all_configs(const TorusShape& shape, bool pure_only);

StepCounts step_counts(const SnakeConfig& c);
CycleData cycle_data(const SnakeConfig& c);

double fibonacci_f(int n, double lambda);
// Matching polynomial of a closed column of m Fixed sites.
double cyclic_gap_poly(int m, double lambda);

GapDecomposition vertical_gaps(const SnakeConfig& c);
double gap_weight(const GapDecomposition& g, double lambda);

double weight(const SnakeConfig& c, const Params& p);
double coarse_weight(const SnakeConfig& c, const Params& p);
SnakeConfig shape_projection(const SnakeConfig& c);

// Aggregated monomials of a shape, evaluated cheaply for many parameter points.
class ConfigCensus {
public:
    explicit ConfigCensus(const TorusShape& shape);

    const TorusShape& shape() const { return shape_; }
    double sum_generalised(const Params& p) const;
    double sum_pure(const Params& p) const;
    std::size_t generalised_count() const { return n_generalised_; }
    std::size_t pure_count() const { return n_pure_; }

private:
    struct Term {
        std::array<int, 5> key{}; // F, R, U, D, N
        std::size_t mult = 0;
    };
    struct PureTerm {
        std::array<int, 4> counts{};
        std::vector<Gap> gaps;
        std::size_t mult = 0;
    };
    TorusShape shape_;
    std::vector<Term> gen_;
    std::vector<PureTerm> pure_;
    std::size_t n_generalised_ = 0;
    std::size_t n_pure_ = 0;
};

struct BruteForcePartition {
    double value = 0.0;
    double pure_sum = 0.0;
    double generalised_sum = 0.0;
};

// Both formulas are evaluated and required to agree.
BruteForcePartition brute_force_partition(const TorusShape& shape, const Params& p);

std::string to_grid(const SnakeConfig& c);
SnakeConfig from_grid(const std::string& grid);

} // namespace snake
