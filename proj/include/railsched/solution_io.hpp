#pragma once

#include <string>

#include "railsched/pipeline.hpp"

namespace railsched {

class SolutionFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string solution_to_json(const PipelineResult& res);
std::string solution_to_facts(const PipelineResult& res);
std::string solution_to_text(const PipelineResult& res);

/// Reads `paths` and `arrivals` (and `approx_quality` when present).
Solution parse_solution_json(const std::string& text);

}  // namespace railsched
