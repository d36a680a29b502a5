#include "railsched/graph.hpp"

#include <functional>

namespace railsched {

TrainGraph::TrainGraph(const TrainLine& t) : line(t) {
    for (const Symbol& v : t.nodes) {
        succ[v];
        pred[v];
    }
    // t.edges is sorted, so the adjacency lists come out sorted as well
    for (const Edge& e : t.edges) {
        succ[e.from].push_back(e.to);
        pred[e.to].push_back(e.from);
    }
}

std::optional<std::vector<Symbol>> TrainGraph::topological_order() const {
    std::map<Symbol, std::size_t> indeg;
    std::set<Symbol> ready;
    for (const auto& [v, ps] : pred) {
        indeg[v] = ps.size();
        if (ps.empty()) ready.insert(v);
    }
    std::vector<Symbol> order;
    while (!ready.empty()) {
        Symbol v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (const Symbol& w : succ.at(v)) {
            if (--indeg[w] == 0) ready.insert(w);
        }
    }
    if (order.size() != line.nodes.size()) {
        return std::nullopt;
    }
    return order;
}

std::map<Symbol, std::set<Symbol>> TrainGraph::reachability() const {
    std::map<Symbol, std::set<Symbol>> reach;
    auto order = topological_order();
    if (!order) {
        // cyclic graphs: plain search per node
        for (const Symbol& v : line.nodes) {
            std::set<Symbol>& r = reach[v];
            std::vector<Symbol> stack{v};
            while (!stack.empty()) {
                Symbol x = stack.back();
                stack.pop_back();
                if (!r.insert(x).second) continue;
                for (const Symbol& y : succ.at(x)) stack.push_back(y);
            }
        }
        return reach;
    }
    for (auto it = order->rbegin(); it != order->rend(); ++it) {
        std::set<Symbol>& r = reach[*it];
        r.insert(*it);
        for (const Symbol& w : succ.at(*it)) {
            const auto& rw = reach.at(w);
            r.insert(rw.begin(), rw.end());
        }
    }
    return reach;
}

std::map<Symbol, BigCount> TrainGraph::paths_from_starts() const {
    std::map<Symbol, BigCount> count;
    auto order = *topological_order();
    for (const Symbol& v : order) {
        BigCount c = pred.at(v).empty() ? 1 : 0;
        for (const Symbol& p : pred.at(v)) c += count.at(p);
        count[v] = c;
    }
    return count;
}

std::map<Symbol, BigCount> TrainGraph::paths_to_ends() const {
    std::map<Symbol, BigCount> count;
    auto order = *topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        BigCount c = succ.at(*it).empty() ? 1 : 0;
        for (const Symbol& s : succ.at(*it)) c += count.at(s);
        count[*it] = c;
    }
    return count;
}

std::vector<std::vector<Symbol>> TrainGraph::enumerate_paths(std::size_t limit) const {
    std::vector<std::vector<Symbol>> out;
    std::vector<Symbol> current;
    std::function<void(const Symbol&)> walk = [&](const Symbol& v) {
        if (out.size() >= limit) return;
        current.push_back(v);
        if (succ.at(v).empty()) {
            out.push_back(current);
        } else {
            for (const Symbol& w : succ.at(v)) walk(w);
        }
        current.pop_back();
    };
    for (const auto& [v, ps] : pred) {
        if (ps.empty()) walk(v);
    }
    return out;
}

}  // namespace railsched
