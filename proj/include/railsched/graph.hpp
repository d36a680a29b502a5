#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "railsched/instance.hpp"

namespace railsched {

using BigCount = boost::multiprecision::cpp_int;

/// Adjacency view of a train line's subgraph.
struct TrainGraph {
    explicit TrainGraph(const TrainLine& t);

    const TrainLine& line;
    std::map<Symbol, std::vector<Symbol>> succ;  // sorted
    std::map<Symbol, std::vector<Symbol>> pred;  // sorted

    /// Deterministic topological order, or nullopt when cyclic.
    std::optional<std::vector<Symbol>> topological_order() const;

    /// Reflexive reachability: reach.at(v) holds every node reachable from v.
    std::map<Symbol, std::set<Symbol>> reachability() const;

    /// Number of start->v paths and v->end paths. Requires acyclicity.
    std::map<Symbol, BigCount> paths_from_starts() const;
    std::map<Symbol, BigCount> paths_to_ends() const;

    /// All start->end paths in lexicographic order; stops after `limit` paths.
    std::vector<std::vector<Symbol>> enumerate_paths(std::size_t limit) const;
};

}  // namespace railsched
