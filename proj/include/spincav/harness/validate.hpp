#pragma once

#include <string>
#include <vector>

namespace spincav::harness {

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

// Fast invariant suite behind the `validate` subcommand.
std::vector<Check> run_validation();

}  // namespace spincav::harness
