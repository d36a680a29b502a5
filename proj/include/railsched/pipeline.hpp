#pragma once

#include <optional>

#include "railsched/encode.hpp"
#include "railsched/search.hpp"
#include "railsched/validator.hpp"

namespace railsched {

struct PipelineOptions {
    EncodeOptions encode;
    std::optional<ThresholdScheme> scheme;  // nullopt: instance potlate facts
    SolverOptions solver;
    int portfolio = 1;
};

struct PipelineResult {
    SolveStatus status = SolveStatus::Unknown;
    std::optional<Solution> solution;
    std::optional<ExactQuality> exact;
    SearchStats stats;
    PreprocessStats preprocess;
    double encode_seconds = 0;  // preprocessing, thresholds and encoding
    double total_seconds = 0;
};

/// Reads paths from the Route literals and arrivals from the schedule.
Solution extract_solution(const PreprocessedInstance& pre, const ConstraintModel& model, const ModelAssignment& a);

/// Runs `opts.portfolio` seeded solvers on the same model; the first optimal result wins.
SearchOutcome run_portfolio(const ConstraintModel& model, const SolverOptions& opts, int workers);

PipelineResult solve_instance(const Instance& inst, const PipelineOptions& opts);

}  // namespace railsched
