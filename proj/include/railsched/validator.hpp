#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "railsched/instance.hpp"
#include "railsched/objective.hpp"

namespace railsched {

/// Lexicographic objective: (delay penalty units, route penalty units).
using Objective = std::pair<Seconds, Seconds>;

struct ExactQuality {
    Rational delay_minutes;
    Seconds route_penalty = 0;

    friend bool operator==(const ExactQuality&, const ExactQuality&) = default;
};

struct Solution {
    std::map<Symbol, std::vector<Symbol>> paths;
    std::map<TrainNode, Seconds> arrivals;  // defined exactly on path nodes
    std::optional<Objective> approx_quality;

    friend bool operator==(const Solution&, const Solution&) = default;
};

struct SolutionViolation {
    std::string condition;  // "1".."8" or "structure"
    std::string detail;
};

/// Checks the solution conditions edge by edge; empty means feasible.
std::vector<SolutionViolation> validate_solution(const Instance& inst, const Solution& sol);

/// Delay in minutes over the delay starts, and the route penalty.
ExactQuality exact_quality(const Instance& inst, const Solution& sol);

/// Threshold-weighted delay and route penalty.
Objective approx_quality(const Instance& inst, const ThresholdSet& thresholds, const Solution& sol);

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleResult {
    std::optional<Objective> objective;  // nullopt: infeasible
    std::optional<Solution> witness;
    std::uint64_t combinations = 0;
};

/// Exhaustive optimum over all paths and all orderings of conflicting
/// resource segments, scheduling each combination at its earliest times.
OracleResult brute_force_solve(const Instance& inst, const ThresholdSet& thresholds,
                               std::uint64_t budget = 1'000'000);

}  // namespace railsched
