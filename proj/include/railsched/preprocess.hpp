#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "railsched/instance.hpp"

namespace railsched {

class PreprocessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ResourceArea {
    Symbol train;
    Symbol resource;
    Symbol area_id;
    std::set<Edge> edges;
    Seconds entry = 0;  // e_ra
    Seconds exit = 0;   // l_ra, may be kPosInf
};

struct HeightMap {
    std::map<Symbol, int> height;
    int var_count = 0;

    int operator[](const Symbol& v) const { return height.at(v); }
};

struct HeightBounds {
    std::vector<Seconds> min_earliest;  // per height
    std::vector<Seconds> max_latest;    // per height
    std::set<Symbol> residual;          // nodes with tighter own bounds
};

struct ExclusiveTimes {
    std::vector<bool> exclusive;      // index n: is (n, n+1) exclusively connected
    std::vector<Seconds> min_time;    // index n: min m(e)+w(e) over its edges
    std::map<Edge, Seconds> conditional;  // route-conditional edges with their time
};

/// Conflicting area pair over one resource; `a` and `b` index areas, a < b.
struct AreaConflict {
    int a = 0;
    int b = 0;
    Symbol resource;

    friend bool operator==(const AreaConflict&, const AreaConflict&) = default;
    friend auto operator<=>(const AreaConflict&, const AreaConflict&) = default;
};

/// Two areas of one train over different resources sharing edges.
struct AreaOverlap {
    int a = 0;
    int b = 0;
    std::set<Edge> shared;
};

/// Area `first` is always left before area `second` is entered (same resource).
struct DecidedPair {
    int first = 0;
    int second = 0;

    friend bool operator==(const DecidedPair&, const DecidedPair&) = default;
    friend auto operator<=>(const DecidedPair&, const DecidedPair&) = default;
};

struct TrainPre {
    HeightMap heights;
    HeightBounds bounds;
    ExclusiveTimes times;
    std::set<Edge> mandatory_edges;
    std::vector<bool> mandatory_height;     // every path visits this height
    std::vector<bool> mandatory_exclusive;  // every path takes an edge from n to n+1
};

struct PreprocessStats {
    std::size_t resources = 0;            // #r, before subsumption
    std::size_t subsumed = 0;             // #sr
    std::size_t incidences = 0;           // #rtl
    std::size_t areas = 0;                // #ra
    std::size_t edge_conflicts = 0;       // #ec
    std::size_t area_conflicts = 0;       // #rac
    std::size_t node_variables = 0;       // #vnn
    std::size_t height_variables = 0;     // #vhn
};

struct PreprocessedInstance {
    Instance original;
    Instance reduced;
    std::set<Symbol> removed;
    std::vector<ResourceArea> areas;
    std::map<std::pair<Symbol, Symbol>, std::vector<int>> coverage;  // (train, resource) -> areas
    std::vector<TrainPre> trains;  // parallel to reduced.trains
    std::vector<AreaConflict> conflicts;
    std::set<std::pair<int, int>> free_pairs;  // (a, b) with a < b
    std::vector<AreaOverlap> overlaps;
    std::vector<DecidedPair> decided;
    PreprocessStats stats;
    std::map<std::tuple<Symbol, Symbol, Edge>, int> edge_area;

    int area_of(const Symbol& train, const Symbol& resource, const Edge& e) const;  // -1 if none
};

std::pair<Instance, std::set<Symbol>> subsume_resources(const Instance& inst);

bool is_resource_area(const std::set<Edge>& edges, const std::set<Edge>& resource_edges, const TrainLine& t);

std::vector<ResourceArea> compute_coverage(const Instance& inst);

HeightMap compute_heights(const TrainLine& t);
HeightBounds compute_height_bounds(const TrainLine& t, const HeightMap& hm);
ExclusiveTimes compute_exclusive_times(const TrainLine& t, const HeightMap& hm, const std::map<Edge, Seconds>& travel);
std::set<Edge> compute_mandatory_edges(const TrainLine& t);

/// Area pairs exempted by collision-free points, as index pairs (a < b).
std::set<std::pair<int, int>> compute_free_pairs(const Instance& inst, const std::vector<ResourceArea>& areas);

std::vector<AreaConflict> detect_conflicts(const Instance& inst, const std::vector<ResourceArea>& areas,
                                           const std::set<std::pair<int, int>>& free_pairs);

/// Edge-level conflicts: pairs of train edges sharing a resource with
/// overlapping extended windows, not covered by a collision-free point.
std::size_t count_edge_conflicts(const Instance& inst);

void compute_overlaps_and_decided(PreprocessedInstance& pre);

PreprocessedInstance preprocess(const Instance& inst);

/// Fact dump of the computed ra/e_ra/l_ra/set facts.
std::string dump_preprocessed_facts(const PreprocessedInstance& pre);

}  // namespace railsched
