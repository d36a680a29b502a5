#include "railsched/objective.hpp"

#include <charconv>
#include <stdexcept>

namespace railsched {

ThresholdScheme ThresholdScheme::parse(const std::string& text) {
    if (text == "binary") {
        return {};
    }
    const std::string prefix = "linear:";
    if (text.rfind(prefix, 0) == 0) {
        ThresholdScheme s;
        s.kind = Kind::Linear;
        const char* first = text.data() + prefix.size();
        const char* last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(first, last, s.step);
        if (ec != std::errc() || ptr != last || s.step < 1) {
            throw std::invalid_argument("invalid linear step in threshold scheme '" + text + "'");
        }
        return s;
    }
    throw std::invalid_argument("unknown threshold scheme '" + text + "' (expected binary or linear:<m>)");
}

std::string ThresholdScheme::str() const { return kind == Kind::Binary ? "binary" : "linear:" + std::to_string(step); }

std::vector<Threshold> weigh_thresholds(Seconds d, const std::vector<Seconds>& points) {
    std::vector<Threshold> out;
    Seconds prev = d;
    for (Seconds u : points) {
        if (u <= prev) {
            throw std::invalid_argument("thresholds must be strictly increasing and above the delay start");
        }
        out.push_back({u, u - prev});
        prev = u;
    }
    return out;
}

std::vector<Threshold> gen_binary(Seconds d, Seconds l) {
    if (d >= l) {
        return {};
    }
    return {{d + 1, 1}};
}

std::vector<Threshold> gen_linear(Seconds d, Seconds l, Seconds m) {
    if (m < 1) {
        throw std::invalid_argument("linear threshold step must be at least 1");
    }
    if (d >= l) {
        return {};
    }
    // an unbounded latest time gets a fixed number of steps
    constexpr std::size_t kUnboundedSteps = 64;
    std::vector<Seconds> points{d + 1};
    for (Seconds u = d + m; u <= l; u += m) {
        if (u > points.back()) {
            points.push_back(u);
        }
        if (l - u < m || (!is_finite(l) && points.size() > kUnboundedSteps)) break;
    }
    return weigh_thresholds(d, points);
}

std::map<TrainNode, Seconds> delay_starts(const Instance& inst) {
    std::map<TrainNode, Seconds> out;
    bool no_facts = inst.objective.thresholds.empty();
    for (const TrainLine& t : inst.trains) {
        for (const Symbol& v : t.nodes) {
            if (auto d = effective_delay_start(inst, t.id, v)) {
                out[{t.id, v}] = *d;
            } else if (no_facts) {
                out[{t.id, v}] = t.earliest.at(v);
            }
        }
    }
    return out;
}

ThresholdSet derive_thresholds(const Instance& inst, const std::optional<ThresholdScheme>& scheme) {
    if (!scheme && !inst.objective.thresholds.empty()) {
        return inst.objective.thresholds;
    }
    ThresholdScheme s = scheme.value_or(ThresholdScheme{});
    ThresholdSet out;
    for (const auto& [key, d] : delay_starts(inst)) {
        const TrainLine* t = inst.find_train(key.first);
        Seconds l = t->latest.at(key.second);
        auto list = s.kind == ThresholdScheme::Kind::Binary ? gen_binary(d, l) : gen_linear(d, l, s.step);
        if (!list.empty()) {
            out[key] = std::move(list);
        }
    }
    return out;
}

Seconds threshold_penalty(const std::vector<Threshold>& list, Seconds arrival) {
    Seconds sum = 0;
    for (const Threshold& th : list) {
        if (th.at <= arrival) sum += th.weight;
    }
    return sum;
}

}  // namespace railsched
