#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "railsched/symbol.hpp"

namespace railsched {

/// Railway network: graph, travel times, resources and their blocked times.
struct Network {
    std::set<Symbol> nodes;
    std::set<Edge> edges;
    std::map<Edge, Seconds> travel_time;
    std::map<Symbol, std::set<Edge>> resources;
    std::map<Symbol, Seconds> blocked_time;

    friend bool operator==(const Network&, const Network&) = default;
};

/// A train line with its acyclic routing subgraph and time windows.
struct TrainLine {
    Symbol id;
    std::set<Symbol> nodes;
    std::set<Edge> edges;
    std::map<Symbol, Seconds> earliest;
    std::map<Symbol, Seconds> latest;  // kPosInf when unbounded
    std::map<Edge, Seconds> wait;
    std::set<Symbol> starts;
    std::set<Symbol> ends;

    friend bool operator==(const TrainLine&, const TrainLine&) = default;
};

/// Requires alpha <= A(other, other_node) - A(train, node) <= omega whenever
/// `train` routes over `edge` and `other` routes over `other_edge`.
struct Connection {
    Symbol id;
    Symbol train;
    Edge edge;
    Symbol other;
    Edge other_edge;
    Seconds alpha = 0;  // kNegInf allowed
    Seconds omega = 0;  // kPosInf allowed
    Symbol node;
    Symbol other_node;

    friend bool operator==(const Connection&, const Connection&) = default;
};

/// Two trains may share `resource` on the given edges while `connection` is in use.
struct CollisionFreePoint {
    Symbol connection;
    Symbol train;
    Edge edge;
    Symbol other;
    Edge other_edge;
    Symbol resource;

    friend bool operator==(const CollisionFreePoint&, const CollisionFreePoint&) = default;
    friend auto operator<=>(const CollisionFreePoint&, const CollisionFreePoint&) = default;
};

struct Threshold {
    Seconds at = 0;
    Seconds weight = 0;

    friend bool operator==(const Threshold&, const Threshold&) = default;
};

using TrainNode = std::pair<Symbol, Symbol>;

struct ObjectiveData {
    std::map<TrainNode, std::vector<Threshold>> thresholds;  // sorted by `at`
    std::map<Edge, Seconds> route_penalty;
    std::map<TrainNode, Seconds> delay_start;  // optional, see effective_delay_start

    friend bool operator==(const ObjectiveData&, const ObjectiveData&) = default;
};

/// Resource-area facts shipped with an instance (ra/e_ra/l_ra).
struct AreaFacts {
    std::set<Edge> edges;
    std::optional<Seconds> entry;
    std::optional<Seconds> exit;

    friend bool operator==(const AreaFacts&, const AreaFacts&) = default;
};

struct PrecomputedFacts {
    // key: (train, resource, area id)
    std::map<std::tuple<Symbol, Symbol, Symbol>, AreaFacts> areas;
    std::map<Symbol, std::set<Edge>> mandatory_edges;

    bool has_areas() const noexcept { return !areas.empty(); }
    bool has_mandatory_edges() const noexcept { return !mandatory_edges.empty(); }

    friend bool operator==(const PrecomputedFacts&, const PrecomputedFacts&) = default;
};

struct Instance {
    Network network;
    std::vector<TrainLine> trains;  // sorted by id
    std::vector<Connection> connections;
    std::vector<CollisionFreePoint> free_points;
    ObjectiveData objective;
    PrecomputedFacts precomputed;

    const TrainLine* find_train(const Symbol& id) const;
    int train_index(const Symbol& id) const;  // -1 if unknown

    friend bool operator==(const Instance&, const Instance&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, int column)
        : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, int line, int column) {
        if (line <= 0) {
            return what;
        }
        return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
    }
    int line_;
    int column_;
};

Instance parse_instance(std::string_view text);
Instance read_instance_file(const std::string& path);

struct ViolationReport {
    std::string invariant;
    std::string detail;
};

std::vector<ViolationReport> validate_instance(const Instance& inst);

std::string serialize_instance(const Instance& inst);

/// d(t,v): the stored value, or u_min - p_min of the smallest threshold.
std::optional<Seconds> effective_delay_start(const Instance& inst, const Symbol& train, const Symbol& node);

std::string format_time(Seconds s, bool upper);

}  // namespace railsched
