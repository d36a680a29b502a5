#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "railsched/instance.hpp"

namespace railsched {

/// Per (train, node): thresholds sorted by `at`, with weights.
using ThresholdSet = std::map<TrainNode, std::vector<Threshold>>;

struct ThresholdScheme {
    enum class Kind { Binary, Linear };
    Kind kind = Kind::Binary;
    Seconds step = 0;  // Linear only

    static ThresholdScheme parse(const std::string& text);  // "binary" or "linear:<m>"
    std::string str() const;
};

/// Weights for an explicit threshold list: first u - d, then u - u_prev.
std::vector<Threshold> weigh_thresholds(Seconds d, const std::vector<Seconds>& points);

std::vector<Threshold> gen_binary(Seconds d, Seconds l);
std::vector<Threshold> gen_linear(Seconds d, Seconds l, Seconds m);

/// Delay start d(t,v) for every node that has one: stored values, else
/// derived from the smallest potlate fact; an instance without any
/// potlate facts uses d = e(v).
std::map<TrainNode, Seconds> delay_starts(const Instance& inst);

/// The thresholds used for optimization. Without a scheme the instance's
/// potlate facts are used (or binary generation when there are none).
ThresholdSet derive_thresholds(const Instance& inst, const std::optional<ThresholdScheme>& scheme);

/// Sum of weights of thresholds not above `arrival`.
Seconds threshold_penalty(const std::vector<Threshold>& list, Seconds arrival);

}  // namespace railsched
