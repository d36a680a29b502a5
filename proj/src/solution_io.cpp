#include "railsched/solution_io.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace railsched {

namespace {

using nlohmann::ordered_json;

ordered_json stats_json(const PipelineResult& res) {
    ordered_json s;
    s["T"] = res.total_seconds;
    s["GT"] = res.encode_seconds;
    s["CH"] = res.stats.choices;
    s["CO"] = res.stats.conflicts;
    s["restarts"] = res.stats.restarts;
    s["learned"] = res.stats.learned;
    s["models"] = res.stats.models;
    return s;
}

}  // namespace

std::string solution_to_json(const PipelineResult& res) {
    ordered_json j;
    j["status"] = to_string(res.status);
    if (res.solution) {
        ordered_json paths = ordered_json::object(), arrivals = ordered_json::object();
        for (const auto& [t, p] : res.solution->paths) {
            auto& arr = paths[t.str()] = ordered_json::array();
            auto& times = arrivals[t.str()] = ordered_json::object();
            for (const Symbol& v : p) {
                arr.push_back(v.str());
                times[v.str()] = res.solution->arrivals.at({t, v});
            }
        }
        j["paths"] = std::move(paths);
        j["arrivals"] = std::move(arrivals);
        if (res.solution->approx_quality)
            j["approx_quality"] = {res.solution->approx_quality->first, res.solution->approx_quality->second};
    }
    if (res.exact) j["exact_quality"] = {res.exact->delay_minutes.str(), res.exact->route_penalty};
    j["stats"] = stats_json(res);
    return j.dump(2) + "\n";
}

std::string solution_to_facts(const PipelineResult& res) {
    std::ostringstream out;
    out << "% status " << to_string(res.status) << "\n";
    if (res.solution) {
        for (const auto& [t, p] : res.solution->paths) {
            for (std::size_t i = 0; i + 1 < p.size(); ++i)
                out << "route(" << t << ",(" << p[i] << "," << p[i + 1] << ")).\n";
            for (const Symbol& v : p) out << "arrival(" << t << "," << v << "," << res.solution->arrivals.at({t, v}) << ").\n";
        }
    }
    if (res.exact)
        out << "% exact quality (" << res.exact->delay_minutes.str() << "," << res.exact->route_penalty << ")\n";
    return out.str();
}

std::string solution_to_text(const PipelineResult& res) {
    std::ostringstream out;
    out << "status: " << to_string(res.status) << "\n";
    if (res.solution) {
        for (const auto& [t, p] : res.solution->paths) {
            out << t << ":";
            for (const Symbol& v : p) out << " " << v << "@" << res.solution->arrivals.at({t, v});
            out << "\n";
        }
        if (res.solution->approx_quality)
            out << "approx quality: (" << res.solution->approx_quality->first << ","
                << res.solution->approx_quality->second << ")\n";
    }
    if (res.exact) out << "exact quality: (" << res.exact->delay_minutes.str() << "," << res.exact->route_penalty << ")\n";
    out << "T=" << res.total_seconds << "s GT=" << res.encode_seconds << "s CH=" << res.stats.choices
        << " CO=" << res.stats.conflicts << "\n";
    return out.str();
}

Solution parse_solution_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SolutionFormatError(std::string("malformed solution JSON: ") + e.what());
    }
    auto node = [](const nlohmann::json& v) -> Symbol {
        if (v.is_string()) return Symbol(v.get<std::string>());
        if (v.is_number_integer()) return Symbol(v.get<std::int64_t>());
        throw SolutionFormatError("node names must be strings or integers");
    };
    Solution sol;
    try {
        if (!j.is_object() || !j.contains("paths") || !j.contains("arrivals"))
            throw SolutionFormatError("solution JSON needs 'paths' and 'arrivals'");
        for (const auto& [t, p] : j.at("paths").items()) {
            auto& path = sol.paths[Symbol(t)];
            for (const auto& v : p) path.push_back(node(v));
        }
        for (const auto& [t, m] : j.at("arrivals").items())
            for (const auto& [v, a] : m.items()) sol.arrivals[{Symbol(t), Symbol(v)}] = a.get<Seconds>();
        if (j.contains("approx_quality")) {
            const auto& q = j.at("approx_quality");
            sol.approx_quality = Objective{q.at(0).get<Seconds>(), q.at(1).get<Seconds>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw SolutionFormatError(std::string("malformed solution JSON: ") + e.what());
    }
    return sol;
}

}  // namespace railsched
