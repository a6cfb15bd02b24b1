#include "snake/lattice.hpp"

#include "snake/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <sstream>

namespace snake {

Site displacement(Step s) {
    switch (s) {
    case Step::Fixed: return {0, 0};
    case Step::Right: return {1, 0};
    case Step::Up: return {0, 1};
    case Step::Down: return {0, -1};
    }
    return {0, 0};
}

char step_char(Step s) {
    static constexpr char chars[] = {'.', '>', '^', 'v'};
    return chars[static_cast<int>(s)];
}

Step step_from_char(char c) {
    switch (c) {
    case '.': return Step::Fixed;
    case '>': return Step::Right;
    case '^': return Step::Up;
    case 'v': return Step::Down;
    default: throw Error(ErrorCode::Precondition, std::string("bad step character '") + c + "'");
    }
}

const char* step_name(Step s) {
    static constexpr const char* names[] = {"fixed", "right", "up", "down"};
    return names[static_cast<int>(s)];
}

Step step_from_name(const std::string& name) {
    for (Step s : kAllSteps)
        if (name == step_name(s)) return s;
    if (name.size() == 1) return step_from_char(name[0]);
    throw Error(ErrorCode::Precondition, "unknown step '" + name + "'");
}

bool step_allowed(const TorusShape& shape, Step s) { return !(shape.m2 == 2 && s == Step::Down); }

Params effective_params(const TorusShape& shape, const Params& p) {
    Params q = p;
    if (shape.m2 == 2) q.delta = 0.0;
    return q;
}

Site site_at(const TorusShape& s, int idx) { return {idx / s.m2, idx % s.m2}; }

static int mod(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

Site wrap(const TorusShape& s, Site x) { return {mod(x.x1, s.m1), mod(x.x2, s.m2)}; }

Site add(const TorusShape& s, Site x, Site d) { return wrap(s, {x.x1 + d.x1, x.x2 + d.x2}); }

// ---------------------------------------------------------------- SnakeConfig

SnakeConfig::SnakeConfig(TorusShape shape, std::vector<Step> steps)
    : shape_(shape), steps_(std::move(steps)) {
    require(shape_.m1 >= 1 && shape_.m2 >= 1, ErrorCode::Precondition, "torus periods must be positive");
    require(static_cast<int>(steps_.size()) == shape_.sites(), ErrorCode::Precondition,
            "step list length does not match the torus");
    std::vector<char> hit(steps_.size(), 0);
    for (int i = 0; i < shape_.sites(); ++i) {
        require(step_allowed(shape_, steps_[i]), ErrorCode::Precondition, "Down step on a torus with m2 = 2");
        int t = target(i);
        require(!hit[t], ErrorCode::Precondition, "steps do not induce a bijection");
        hit[t] = 1;
    }
}

SnakeConfig SnakeConfig::identity(TorusShape shape) {
    return SnakeConfig(shape, std::vector<Step>(shape.sites(), Step::Fixed));
}

int SnakeConfig::target(int idx) const {
    return site_index(shape_, add(shape_, site_at(shape_, idx), displacement(steps_[idx])));
}

bool SnakeConfig::is_snakelet_base(int idx) const {
    if (shape_.m2 < 3 || steps_[idx] != Step::Up) return false;
    return steps_[target(idx)] == Step::Down;
}

bool SnakeConfig::pure() const {
    for (int i = 0; i < shape_.sites(); ++i)
        if (is_snakelet_base(i)) return false;
    return true;
}

// ---------------------------------------------------------------- enumeration

std::size_t enumeration_cap() {
    if (const char* env = std::getenv("SNAKE_ENUM_CAP")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && v > 0) return v;
    }
    return 20;
}

void enumerate_configs(const TorusShape& shape, bool pure_only,
                       const std::function<void(const SnakeConfig&)>& visit) {
    require(shape.m1 >= 1 && shape.m2 >= 1, ErrorCode::Precondition, "torus periods must be positive");
    const int n = shape.sites();
    if (static_cast<std::size_t>(n) > enumeration_cap())
        throw Error(ErrorCode::EnumerationTooLarge,
                    "torus has " + std::to_string(n) + " sites, cap is " + std::to_string(enumeration_cap()));

    std::vector<Step> allowed;
    for (Step s : kAllSteps)
        if (step_allowed(shape, s)) allowed.push_back(s);

    // targets[i][k]: target of site i under allowed[k]
    std::vector<std::vector<int>> targets(n);
    std::vector<int> last_pre(n, -1);
    for (int i = 0; i < n; ++i)
        for (Step s : allowed) {
            int t = site_index(shape, add(shape, site_at(shape, i), displacement(s)));
            targets[i].push_back(t);
            last_pre[t] = std::max(last_pre[t], i);
        }
    // closed[i]: targets whose every preimage has index <= i
    std::vector<std::vector<int>> closed(n);
    for (int t = 0; t < n; ++t) closed[last_pre[t]].push_back(t);

    std::vector<Step> steps(n, Step::Fixed);
    std::vector<char> used(n, 0);
    auto emit = [&] {
        SnakeConfig c(shape, steps);
        if (!pure_only || c.pure()) visit(c);
    };
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            emit();
            return;
        }
        for (std::size_t k = 0; k < allowed.size(); ++k) {
            int t = targets[i][k];
            if (used[t]) continue;
            if (pure_only && allowed[k] == Step::Down && shape.m2 >= 3) {
                int below = site_index(shape, add(shape, site_at(shape, i), {0, -1}));
                if (below < i && steps[below] == Step::Up) continue;
            }
            used[t] = 1;
            steps[i] = allowed[k];
            bool ok = true;
            for (int c : closed[i])
                if (!used[c]) {
                    ok = false;
                    break;
                }
            if (ok) rec(i + 1);
            used[t] = 0;
        }
    };
    rec(0);
}

std::vector<SnakeConfig> all_configs(const TorusShape& shape, bool pure_only) {
    std::vector<SnakeConfig> out;
    enumerate_configs(shape, pure_only, [&](const SnakeConfig& c) { out.push_back(c); });
    return out;
}

// ---------------------------------------------------------------- cycles

StepCounts step_counts(const SnakeConfig& c) {
    StepCounts k;
    for (Step s : c.steps()) {
        switch (s) {
        case Step::Fixed: ++k.fixed; break;
        case Step::Right: ++k.right; break;
        case Step::Up: ++k.up; break;
        case Step::Down: ++k.down; break;
        }
    }
    return k;
}

CycleData cycle_data(const SnakeConfig& c) {
    const TorusShape& sh = c.shape();
    const int n = sh.sites();
    CycleData d;
    d.counts = step_counts(c);

    std::vector<char> seen(n, 0);
    for (int i = 0; i < n; ++i) {
        if (c.is_snakelet_base(i)) {
            ++d.snakelets;
            seen[i] = 1;
            seen[c.target(i)] = 1;
        }
    }
    for (int start = 0; start < n; ++start) {
        if (seen[start]) continue;
        if (c.step(start) == Step::Fixed) {
            seen[start] = 1;
            continue;
        }
        // signed crossings of the seams x1 = m1-1 -> 0 and x2 = m2-1 <-> 0
        Winding w;
        int idx = start;
        do {
            seen[idx] = 1;
            Site x = site_at(sh, idx);
            switch (c.step(idx)) {
            case Step::Right:
                if (x.x1 == sh.m1 - 1) ++w.q1;
                break;
            case Step::Up:
                if (x.x2 == sh.m2 - 1) ++w.q2;
                break;
            case Step::Down:
                if (x.x2 == 0) --w.q2;
                break;
            case Step::Fixed:
                throw Error(ErrorCode::Internal, "fixed site inside a non-trivial cycle");
            }
            idx = c.target(idx);
        } while (idx != start);
        // a vertical loop may run either way; windings are taken up to sign
        if (w.q1 == 0 && w.q2 < 0) w.q2 = -w.q2;
        ++d.r;
        if (!d.winding) {
            d.winding = w;
        } else if (!(*d.winding == w)) {
            throw Error(ErrorCode::Internal, "cycles with different windings");
        }
    }

    std::vector<int> per_column(sh.m1, 0);
    for (int i = 0; i < n; ++i)
        if (c.step(i) == Step::Right) ++per_column[site_at(sh, i).x1];
    for (int v : per_column)
        if (v != per_column[0]) throw Error(ErrorCode::Internal, "Right count differs between columns");
    d.occupation = per_column[0];
    return d;
}

// ---------------------------------------------------------------- Fibonacci weights

double fibonacci_f(int n, double lambda) {
    require(n >= 0, ErrorCode::Precondition, "fibonacci index must be non-negative");
    double prev = 1.0, cur = 1.0; // f_0, f_1
    for (int k = 2; k <= n; ++k) {
        double next = cur + lambda * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double cyclic_gap_poly(int m, double lambda) {
    if (m <= 2) return 1.0; // no snakelet fits: m2 = 1 has no room, m2 = 2 has no Down
    return fibonacci_f(m, lambda) + lambda * fibonacci_f(m - 2, lambda);
}

int GapDecomposition::total() const {
    int s = 0;
    for (const Gap& g : gaps) s += g.size;
    return s;
}

GapDecomposition vertical_gaps(const SnakeConfig& c) {
    require(c.pure(), ErrorCode::Precondition, "vertical gaps need a pure configuration");
    const TorusShape& sh = c.shape();
    GapDecomposition out;
    for (int x1 = 0; x1 < sh.m1; ++x1) {
        int first_busy = -1;
        for (int x2 = 0; x2 < sh.m2; ++x2)
            if (c.step(Site{x1, x2}) != Step::Fixed) {
                first_busy = x2;
                break;
            }
        if (first_busy < 0) {
            out.gaps.push_back({sh.m2, true});
            continue;
        }
        int run = 0;
        for (int k = 1; k <= sh.m2; ++k) {
            int x2 = (first_busy + k) % sh.m2;
            if (c.step(Site{x1, x2}) == Step::Fixed) {
                ++run;
            } else {
                if (run > 0) out.gaps.push_back({run, false});
                run = 0;
            }
        }
    }
    return out;
}

double gap_weight(const GapDecomposition& g, double lambda) {
    double j = 1.0;
    for (const Gap& gap : g.gaps) j *= gap.cyclic ? cyclic_gap_poly(gap.size, lambda) : fibonacci_f(gap.size, lambda);
    return j;
}

static double monomial(const Params& p, int f, int r, int u, int d) {
    return std::pow(p.alpha, f) * std::pow(p.beta, r) * std::pow(p.gamma, u) * std::pow(p.delta, d);
}

double weight(const SnakeConfig& c, const Params& p) {
    StepCounts k = step_counts(c);
    int n_snake = 0;
    for (int i = 0; i < c.shape().sites(); ++i)
        if (c.is_snakelet_base(i)) ++n_snake;
    double sign = (n_snake % 2) ? -1.0 : 1.0;
    return sign * monomial(p, k.fixed, k.right, k.up, k.down);
}

static double snakelet_lambda(const TorusShape& shape, const Params& raw, bool has_gap) {
    Params p = effective_params(shape, raw);
    if (p.gamma * p.delta == 0.0 || !has_gap) return 0.0;
    require(p.alpha != 0.0, ErrorCode::UnsupportedParameter,
            "alpha = 0 with gamma*delta > 0 and a nonempty vertical gap");
    return -p.gamma * p.delta / (p.alpha * p.alpha);
}

double coarse_weight(const SnakeConfig& c, const Params& p) {
    GapDecomposition g = vertical_gaps(c);
    double lambda = snakelet_lambda(c.shape(), p, !g.gaps.empty());
    return weight(c, p) * gap_weight(g, lambda);
}

SnakeConfig shape_projection(const SnakeConfig& c) {
    std::vector<Step> steps = c.steps();
    for (int i = 0; i < c.shape().sites(); ++i)
        if (c.is_snakelet_base(i)) {
            steps[i] = Step::Fixed;
            steps[c.target(i)] = Step::Fixed;
        }
    return SnakeConfig(c.shape(), std::move(steps));
}

// ---------------------------------------------------------------- census

ConfigCensus::ConfigCensus(const TorusShape& shape) : shape_(shape) {
    std::map<std::array<int, 5>, std::size_t> gen;
    std::map<std::pair<std::array<int, 4>, std::vector<std::pair<int, int>>>, std::size_t> pure;
    enumerate_configs(shape, false, [&](const SnakeConfig& c) {
        ++n_generalised_;
        StepCounts k = step_counts(c);
        int n_snake = 0;
        for (int i = 0; i < shape.sites(); ++i)
            if (c.is_snakelet_base(i)) ++n_snake;
        ++gen[{k.fixed, k.right, k.up, k.down, n_snake}];
        if (n_snake == 0) {
            ++n_pure_;
            std::vector<std::pair<int, int>> gaps;
            for (const Gap& g : vertical_gaps(c).gaps) gaps.emplace_back(g.size, g.cyclic ? 1 : 0);
            std::sort(gaps.begin(), gaps.end());
            ++pure[{{k.fixed, k.right, k.up, k.down}, gaps}];
        }
    });
    for (const auto& [key, mult] : gen) gen_.push_back({key, mult});
    for (const auto& [key, mult] : pure) {
        PureTerm t;
        t.counts = key.first;
        for (auto [s, cyc] : key.second) t.gaps.push_back({s, cyc != 0});
        t.mult = mult;
        pure_.push_back(std::move(t));
    }
}

double ConfigCensus::sum_generalised(const Params& p) const {
    double z = 0.0;
    for (const Term& t : gen_) {
        double sign = (t.key[4] % 2) ? -1.0 : 1.0;
        z += sign * static_cast<double>(t.mult) * monomial(p, t.key[0], t.key[1], t.key[2], t.key[3]);
    }
    return z;
}

double ConfigCensus::sum_pure(const Params& p) const {
    double z = 0.0;
    for (const PureTerm& t : pure_) {
        GapDecomposition g{t.gaps};
        double lambda = snakelet_lambda(shape_, p, !g.gaps.empty());
        z += static_cast<double>(t.mult) * monomial(p, t.counts[0], t.counts[1], t.counts[2], t.counts[3]) *
             gap_weight(g, lambda);
    }
    return z;
}

BruteForcePartition brute_force_partition(const TorusShape& shape, const Params& p) {
    ConfigCensus census(shape);
    BruteForcePartition out;
    out.generalised_sum = census.sum_generalised(p);
    out.pure_sum = census.sum_pure(p);
    out.value = out.pure_sum;
    double scale = std::max(1.0, std::abs(out.value));
    if (std::abs(out.pure_sum - out.generalised_sum) > 1e-9 * scale)
        throw Error(ErrorCode::Internal, "pure and generalised partition sums disagree");
    return out;
}

// ---------------------------------------------------------------- text grid

std::string to_grid(const SnakeConfig& c) {
    const TorusShape& sh = c.shape();
    std::string out;
    for (int x2 = sh.m2 - 1; x2 >= 0; --x2) {
        for (int x1 = 0; x1 < sh.m1; ++x1) out += step_char(c.step(Site{x1, x2}));
        out += '\n';
    }
    return out;
}

SnakeConfig from_grid(const std::string& grid) {
    std::vector<std::string> rows;
    std::istringstream in(grid);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) rows.push_back(line);
    require(!rows.empty(), ErrorCode::Precondition, "empty grid");
    TorusShape sh{static_cast<int>(rows[0].size()), static_cast<int>(rows.size())};
    std::vector<Step> steps(sh.sites());
    for (int r = 0; r < sh.m2; ++r) {
        require(static_cast<int>(rows[r].size()) == sh.m1, ErrorCode::Precondition, "ragged grid");
        int x2 = sh.m2 - 1 - r;
        for (int x1 = 0; x1 < sh.m1; ++x1) steps[site_index(sh, {x1, x2})] = step_from_char(rows[r][x1]);
    }
    return SnakeConfig(sh, std::move(steps));
}

} // namespace snake
