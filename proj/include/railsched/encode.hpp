#pragma once

#include <stdexcept>
#include <string>

#include "railsched/model.hpp"
#include "railsched/objective.hpp"
#include "railsched/preprocess.hpp"

namespace railsched {

class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EncodeOptions {
    bool hs = false;   // sequence heuristic
    bool ol1 = false;  // same order over overlapping areas
    bool ol2 = false;  // statically decided orders
    bool ac = false;   // sequence transitivity

    /// Comma separated subset of hs,ol1,ol2,ac; unknown names throw.
    static EncodeOptions parse(const std::string& groups);
    std::string str() const;
};

/// Entry and exit nodes of a resource area within its train subgraph.
std::vector<Symbol> area_entries(const ResourceArea& area, const TrainLine& t);
std::vector<Symbol> area_exits(const ResourceArea& area, const TrainLine& t);

/// s = e' - e - (l - l'); positive prefers the first interval's train first.
Seconds sequence_score(Seconds e, Seconds l, Seconds e2, Seconds l2);

void encode_routing(const PreprocessedInstance& pre, ConstraintModel& model);
void encode_conflicts(const PreprocessedInstance& pre, ConstraintModel& model);
void encode_schedule(const PreprocessedInstance& pre, ConstraintModel& model);
void build_objective(const PreprocessedInstance& pre, const ThresholdSet& thresholds, ConstraintModel& model);
void encode_optional(const PreprocessedInstance& pre, const EncodeOptions& opts, ConstraintModel& model);
void encode_heuristic(const PreprocessedInstance& pre, bool hs, ConstraintModel& model);

ConstraintModel encode(const PreprocessedInstance& pre, const ThresholdSet& thresholds, const EncodeOptions& opts);

}  // namespace railsched
