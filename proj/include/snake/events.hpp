// Event queries and their expansion into words of step indicators.
#pragma once

#include "snake/lattice.hpp"

#include <string>
#include <vector>

namespace snake {

// Periods used to identify sites; a zero period means the axis does not wrap.
struct Wrap {
    int m1 = 0;
    int m2 = 0;
    Site reduce(Site x) const;
};

struct Event {
    Site site;
    Step step = Step::Fixed;
};

using EventQuery = std::vector<Event>;

struct RFactor {
    Site site;
    Step step = Step::Fixed;
    auto operator<=>(const RFactor&) const = default;
    bool operator==(const RFactor&) const = default;
};

struct RWord {
    long coefficient = 1;
    std::vector<RFactor> factors; // sorted, pairwise distinct sites
};

// Expands the product of shape-level indicators into signed words of
// configuration-level indicators, simplified pointwise and merged.
std::vector<RWord> expand_events(const EventQuery& query, const Wrap& wrap);

std::string word_to_string(const RWord& w);

} // namespace snake
