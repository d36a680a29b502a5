#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "railsched/diff_logic.hpp"
#include "railsched/model.hpp"

namespace railsched {

struct SolverOptions {
    double time_limit = 0;      // seconds, 0 = unlimited
    std::uint64_t seed = 0;
    bool use_hints = true;
    bool restarts = true;
    int restart_base = 100;     // conflicts per Luby unit
    double activity_decay = 0.95;
    const std::atomic<bool>* stop = nullptr;
};

struct SearchStats {
    std::uint64_t choices = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t restarts = 0;
    std::uint64_t learned = 0;
    std::uint64_t models = 0;
    double seconds = 0;

    SearchStats& operator+=(const SearchStats& o);
};

enum class SolveStatus { Optimal, SatBound, Infeasible, Unknown };

std::string to_string(SolveStatus s);

struct ModelAssignment {
    std::vector<bool> values;  // per Boolean variable
    DiffModel schedule;        // minimal model of the active difference constraints
    std::vector<Seconds> costs;  // per objective layer
};

struct SearchOutcome {
    SolveStatus status = SolveStatus::Unknown;
    std::optional<ModelAssignment> best;
    SearchStats stats;
};

/// One satisfiability call without objective bounds.
SearchOutcome solve_once(const ConstraintModel& model, const SolverOptions& opts);

/// Model-guided lexicographic minimization over the model's layers.
SearchOutcome optimize(const ConstraintModel& model, const SolverOptions& opts);

}  // namespace railsched
