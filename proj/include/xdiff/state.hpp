#pragma once
#include <vector>

#include "xdiff/grid.hpp"

namespace xdiff {

// Time-stepper state: cell density u >= 0 and signal concentration v > 0.
struct State {
    double t = 0.0;
    Field u;
    Field v;
};

struct TrajectorySample {
    double t = 0.0;
    Field u;
    Field v;
};

using Trajectory = std::vector<TrajectorySample>;

}  // namespace xdiff
