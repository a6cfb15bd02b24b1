// The acceptance battery: named suites of criteria, each a measured value against
// a fixed tolerance.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace snake::verify {

struct Criterion {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
    bool timing = false; // wall-clock bound; its measured value varies between runs
};

struct SuiteReport {
    std::string suite;
    std::vector<Criterion> criteria;
    bool pass() const;
};

const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

// Throws Precondition for an unknown suite.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

// measured <= tolerance
Criterion at_most(std::string name, double measured, double tolerance, std::string detail = {});

} // namespace snake::verify
