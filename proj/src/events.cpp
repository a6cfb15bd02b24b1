#include "snake/events.hpp"

#include "snake/error.hpp"

#include <map>
#include <optional>
#include <set>

namespace snake {

Site Wrap::reduce(Site x) const {
    auto md = [](int a, int m) {
        if (m <= 0) return a;
        int r = a % m;
        return r < 0 ? r + m : r;
    };
    return {md(x.x1, m1), md(x.x2, m2)};
}

namespace {

struct Term {
    long coefficient;
    std::vector<RFactor> factors;
};

std::vector<Term> pushforward(const Event& e, const Wrap& wrap) {
    Site x = wrap.reduce(e.site);
    Site above = wrap.reduce({x.x1, x.x2 + 1});
    Site below = wrap.reduce({x.x1, x.x2 - 1});
    switch (e.step) {
    case Step::Fixed:
        return {{1, {{x, Step::Fixed}}},
                {1, {{x, Step::Up}, {above, Step::Down}}},
                {1, {{x, Step::Down}, {below, Step::Up}}}};
    case Step::Right:
        return {{1, {{x, Step::Right}}}};
    case Step::Up:
        return {{1, {{x, Step::Up}}}, {-1, {{x, Step::Up}, {above, Step::Down}}}};
    case Step::Down:
        return {{1, {{x, Step::Down}}}, {-1, {{x, Step::Down}, {below, Step::Up}}}};
    }
    return {};
}

// Multiplies two monomials; an empty result means the product vanishes.
std::optional<std::vector<RFactor>> multiply(const std::vector<RFactor>& a, const std::vector<RFactor>& b) {
    std::map<Site, Step> m;
    for (const RFactor& f : a) m[f.site] = f.step;
    for (const RFactor& f : b) {
        auto [it, inserted] = m.emplace(f.site, f.step);
        if (!inserted && it->second != f.step) return std::nullopt;
    }
    std::vector<RFactor> out;
    for (auto [s, st] : m) out.push_back({s, st});
    return out;
}

} // namespace

std::vector<RWord> expand_events(const EventQuery& query, const Wrap& wrap) {
    std::set<Site> seen;
    for (const Event& e : query) {
        bool fresh = seen.insert(wrap.reduce(e.site)).second;
        require(fresh, ErrorCode::Precondition, "event query repeats a site");
    }

    std::map<std::vector<RFactor>, long> acc{{{}, 1}};
    for (const Event& e : query) {
        std::map<std::vector<RFactor>, long> next;
        for (const auto& [word, coef] : acc)
            for (const Term& t : pushforward(e, wrap)) {
                auto prod = multiply(word, t.factors);
                if (prod) next[*prod] += coef * t.coefficient;
            }
        acc.clear();
        for (auto& [w, c] : next)
            if (c != 0) acc.emplace(w, c);
    }
    std::vector<RWord> out;
    for (const auto& [w, c] : acc) out.push_back({c, w});
    return out;
}

std::string word_to_string(const RWord& w) {
    std::string s = std::to_string(w.coefficient);
    for (const RFactor& f : w.factors)
        s += " R[" + std::to_string(f.site.x1) + "," + std::to_string(f.site.x2) + "]^" + step_name(f.step);
    return s;
}

} // namespace snake
