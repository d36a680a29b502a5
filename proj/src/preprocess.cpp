#include "railsched/preprocess.hpp"

#include <algorithm>
#include <sstream>

#include "railsched/graph.hpp"

namespace railsched {

namespace {

Seconds plus_blocked(Seconds l, Seconds b) { return l == kPosInf ? kPosInf : l + b; }

bool windows_overlap(Seconds e1, Seconds l1, Seconds e2, Seconds l2, Seconds b) {
    return e1 < plus_blocked(l2, b) && e2 < plus_blocked(l1, b);
}

bool is_ra(const std::set<Edge>& edges, const std::set<Edge>& resource_edges, const TrainLine& t,
           const std::map<Symbol, std::set<Symbol>>& reach) {
    if (edges.size() < 2) {
        return true;
    }
    // nodes reachable from some area edge target, nodes reaching some area edge source
    std::set<Symbol> after;
    for (const Edge& e : edges) {
        const auto& r = reach.at(e.to);
        after.insert(r.begin(), r.end());
    }
    std::set<Symbol> sources;
    for (const Edge& e : edges) sources.insert(e.from);
    for (const Edge& pq : t.edges) {
        if (resource_edges.contains(pq) || !after.contains(pq.from)) continue;
        const auto& r = reach.at(pq.to);
        for (const Symbol& s : sources) {
            if (r.contains(s)) return false;
        }
    }
    return true;
}

std::set<Edge> edges_on(const std::set<Edge>& resource_edges, const TrainLine& t) {
    std::set<Edge> out;
    for (const Edge& e : resource_edges) {
        if (t.edges.contains(e)) out.insert(e);
    }
    return out;
}

void fill_bounds(ResourceArea& a, const TrainLine& t) {
    a.entry = kPosInf;
    a.exit = kNegInf;
    for (const Edge& e : a.edges) {
        a.entry = std::min(a.entry, t.earliest.at(e.from));
        a.exit = std::max(a.exit, t.latest.at(e.to));
    }
}

}  // namespace

int PreprocessedInstance::area_of(const Symbol& train, const Symbol& resource, const Edge& e) const {
    auto it = edge_area.find({train, resource, e});
    return it == edge_area.end() ? -1 : it->second;
}

std::pair<Instance, std::set<Symbol>> subsume_resources(const Instance& inst) {
    std::set<Symbol> in_free;
    for (const CollisionFreePoint& p : inst.free_points) in_free.insert(p.resource);

    const auto& res = inst.network.resources;
    const auto& blocked = inst.network.blocked_time;
    std::set<Symbol> removed;
    for (const auto& [r1, a1] : res) {
        Seconds b1 = blocked.at(r1);
        for (const auto& [r2, a2] : res) {
            if (r1 == r2 || in_free.contains(r2)) continue;
            Seconds b2 = blocked.at(r2);
            if (b1 > b2 || !std::includes(a2.begin(), a2.end(), a1.begin(), a1.end())) continue;
            bool equal = a1 == a2 && b1 == b2;
            // among identical resources the smallest one not used by a free point stays
            if (!equal || in_free.contains(r1) || r2 < r1) {
                removed.insert(r1);
                break;
            }
        }
    }

    Instance out = inst;
    for (const Symbol& r : removed) {
        out.network.resources.erase(r);
        out.network.blocked_time.erase(r);
    }
    std::erase_if(out.free_points, [&](const CollisionFreePoint& p) { return removed.contains(p.resource); });
    std::erase_if(out.precomputed.areas, [&](const auto& kv) { return removed.contains(std::get<1>(kv.first)); });
    return {std::move(out), std::move(removed)};
}

bool is_resource_area(const std::set<Edge>& edges, const std::set<Edge>& resource_edges, const TrainLine& t) {
    return is_ra(edges, resource_edges, t, TrainGraph(t).reachability());
}

std::vector<ResourceArea> compute_coverage(const Instance& inst) {
    std::vector<ResourceArea> areas;
    if (inst.precomputed.has_areas()) {
        std::map<std::pair<Symbol, Symbol>, std::set<Edge>> covered;
        for (const auto& [key, facts] : inst.precomputed.areas) {
            const auto& [tid, r, a] = key;
            const TrainLine* t = inst.find_train(tid);
            auto res = inst.network.resources.find(r);
            if (!t || res == inst.network.resources.end()) {
                throw PreprocessError("resource area (" + tid.str() + "," + r.str() + "," + a.str() + ") references unknown entities");
            }
            ResourceArea area{tid, r, a, facts.edges, 0, 0};
            std::string who = "(" + tid.str() + "," + r.str() + "," + a.str() + ")";
            std::set<Edge>& cov = covered[{tid, r}];
            for (const Edge& e : area.edges) {
                if (!t->edges.contains(e) || !res->second.contains(e)) {
                    throw PreprocessError("resource area " + who + ": edge " + to_string(e) + " outside a(r) and L_t");
                }
                if (!cov.insert(e).second) {
                    throw PreprocessError("resource area " + who + ": areas not disjoint at edge " + to_string(e));
                }
            }
            if (!is_resource_area(area.edges, res->second, *t)) {
                throw PreprocessError("resource area " + who + ": isRA violated");
            }
            fill_bounds(area, *t);
            if (facts.entry && *facts.entry != area.entry) {
                throw PreprocessError("resource area " + who + ": e_ra differs from the minimal earliest entry");
            }
            if (facts.exit && *facts.exit != area.exit) {
                throw PreprocessError("resource area " + who + ": l_ra differs from the maximal latest exit");
            }
            areas.push_back(std::move(area));
        }
        for (const TrainLine& t : inst.trains) {
            for (const auto& [r, redges] : inst.network.resources) {
                std::set<Edge> need = edges_on(redges, t);
                auto it = covered.find({t.id, r});
                if (!need.empty() && (it == covered.end() || it->second != need)) {
                    throw PreprocessError("resource coverage of train " + t.id.str() + " over " + r.str() +
                                          " does not span a(r) and L_t");
                }
            }
        }
        return areas;
    }

    for (const TrainLine& t : inst.trains) {
        auto reach = TrainGraph(t).reachability();
        for (const auto& [r, redges] : inst.network.resources) {
            std::set<Edge> unused = edges_on(redges, t);
            int next_id = 0;
            while (!unused.empty()) {
                std::set<Edge> area{*unused.begin()};
                unused.erase(unused.begin());
                for (auto it = unused.begin(); it != unused.end();) {
                    std::set<Edge> grown = area;
                    grown.insert(*it);
                    if (is_ra(grown, redges, t, reach)) {
                        area = std::move(grown);
                        it = unused.erase(it);
                    } else {
                        ++it;
                    }
                }
                ResourceArea a{t.id, r, Symbol(std::int64_t{next_id++}), std::move(area), 0, 0};
                fill_bounds(a, t);
                areas.push_back(std::move(a));
            }
        }
    }
    return areas;
}

HeightMap compute_heights(const TrainLine& t) {
    TrainGraph g(t);
    auto order = g.topological_order();
    if (!order) {
        throw PreprocessError("train " + t.id.str() + " has a cyclic subgraph");
    }
    HeightMap hm;
    for (const Symbol& v : *order) {
        int h = 0;
        for (const Symbol& p : g.pred.at(v)) h = std::max(h, hm.height.at(p) + 1);
        hm.height[v] = h;
        hm.var_count = std::max(hm.var_count, h + 1);
    }
    return hm;
}

HeightBounds compute_height_bounds(const TrainLine& t, const HeightMap& hm) {
    HeightBounds hb;
    hb.min_earliest.assign(hm.var_count, kPosInf);
    hb.max_latest.assign(hm.var_count, kNegInf);
    for (const auto& [v, h] : hm.height) {
        hb.min_earliest[h] = std::min(hb.min_earliest[h], t.earliest.at(v));
        hb.max_latest[h] = std::max(hb.max_latest[h], t.latest.at(v));
    }
    for (const auto& [v, h] : hm.height) {
        if (t.earliest.at(v) > hb.min_earliest[h] || t.latest.at(v) < hb.max_latest[h]) {
            hb.residual.insert(v);
        }
    }
    return hb;
}

ExclusiveTimes compute_exclusive_times(const TrainLine& t, const HeightMap& hm, const std::map<Edge, Seconds>& travel) {
    ExclusiveTimes et;
    int pairs = std::max(0, hm.var_count - 1);
    et.exclusive.assign(pairs, true);
    et.min_time.assign(pairs, kPosInf);
    std::vector<bool> has_edge(pairs, false);
    auto time_of = [&](const Edge& e) { return t.wait.at(e) + travel.at(e); };
    for (const Edge& e : t.edges) {
        int hf = hm[e.from];
        has_edge[hf] = true;
        if (hm[e.to] != hf + 1) et.exclusive[hf] = false;
    }
    for (int n = 0; n < pairs; ++n) {
        if (!has_edge[n]) et.exclusive[n] = false;
    }
    for (const Edge& e : t.edges) {
        int hf = hm[e.from];
        if (et.exclusive[hf]) et.min_time[hf] = std::min(et.min_time[hf], time_of(e));
    }
    for (const Edge& e : t.edges) {
        int hf = hm[e.from];
        if (!et.exclusive[hf] || time_of(e) > et.min_time[hf]) et.conditional[e] = time_of(e);
    }
    return et;
}

std::set<Edge> compute_mandatory_edges(const TrainLine& t) {
    TrainGraph g(t);
    auto from = g.paths_from_starts();
    auto to = g.paths_to_ends();
    BigCount total = 0;
    for (const Symbol& s : t.starts) total += to.at(s);
    std::set<Edge> out;
    for (const Edge& e : t.edges) {
        if (from.at(e.from) * to.at(e.to) == total) out.insert(e);
    }
    return out;
}

std::set<std::pair<int, int>> compute_free_pairs(const Instance& inst, const std::vector<ResourceArea>& areas) {
    std::map<std::tuple<Symbol, Symbol, Edge>, int> index;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        for (const Edge& e : areas[i].edges) index[{areas[i].train, areas[i].resource, e}] = static_cast<int>(i);
    }
    std::set<std::pair<int, int>> out;
    for (const CollisionFreePoint& p : inst.free_points) {
        auto a = index.find({p.train, p.resource, p.edge});
        auto b = index.find({p.other, p.resource, p.other_edge});
        if (a == index.end() || b == index.end()) continue;
        out.insert(std::minmax(a->second, b->second));
    }
    return out;
}

std::vector<AreaConflict> detect_conflicts(const Instance& inst, const std::vector<ResourceArea>& areas,
                                           const std::set<std::pair<int, int>>& free_pairs) {
    std::vector<AreaConflict> out;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        for (std::size_t j = i + 1; j < areas.size(); ++j) {
            const ResourceArea& a = areas[i];
            const ResourceArea& b = areas[j];
            if (a.resource != b.resource || a.train == b.train) continue;
            Seconds blocked = inst.network.blocked_time.at(a.resource);
            if (!windows_overlap(a.entry, a.exit, b.entry, b.exit, blocked)) continue;
            if (free_pairs.contains({static_cast<int>(i), static_cast<int>(j)})) continue;
            out.push_back({static_cast<int>(i), static_cast<int>(j), a.resource});
        }
    }
    return out;
}

std::size_t count_edge_conflicts(const Instance& inst) {
    std::set<std::tuple<Symbol, Edge, Symbol, Edge, Symbol>> free;
    for (const CollisionFreePoint& p : inst.free_points) {
        free.insert({p.train, p.edge, p.other, p.other_edge, p.resource});
        free.insert({p.other, p.other_edge, p.train, p.edge, p.resource});
    }
    std::size_t count = 0;
    for (const auto& [r, redges] : inst.network.resources) {
        Seconds blocked = inst.network.blocked_time.at(r);
        for (std::size_t i = 0; i < inst.trains.size(); ++i) {
            const TrainLine& t = inst.trains[i];
            for (std::size_t j = i + 1; j < inst.trains.size(); ++j) {
                const TrainLine& u = inst.trains[j];
                for (const Edge& e1 : edges_on(redges, t)) {
                    for (const Edge& e2 : edges_on(redges, u)) {
                        if (free.contains({t.id, e1, u.id, e2, r})) continue;
                        if (windows_overlap(t.earliest.at(e1.from), t.latest.at(e1.to), u.earliest.at(e2.from),
                                            u.latest.at(e2.to), blocked)) {
                            ++count;
                        }
                    }
                }
            }
        }
    }
    return count;
}

void compute_overlaps_and_decided(PreprocessedInstance& pre) {
    pre.overlaps.clear();
    pre.decided.clear();
    const auto& areas = pre.areas;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        for (std::size_t j = i + 1; j < areas.size(); ++j) {
            const ResourceArea& a = areas[i];
            const ResourceArea& b = areas[j];
            if (a.train != b.train || a.resource == b.resource) continue;
            std::set<Edge> shared;
            std::set_intersection(a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end(),
                                  std::inserter(shared, shared.end()));
            if (!shared.empty()) {
                pre.overlaps.push_back({static_cast<int>(i), static_cast<int>(j), std::move(shared)});
            }
        }
    }
    const Instance& inst = pre.reduced;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        for (std::size_t j = 0; j < areas.size(); ++j) {
            const ResourceArea& a = areas[i];
            const ResourceArea& b = areas[j];
            if (a.train == b.train || a.resource != b.resource) continue;
            bool decided = a.exit < b.entry;
            if (!decided) {
                const TrainLine& t = *inst.find_train(a.train);
                const TrainLine& u = *inst.find_train(b.train);
                const auto& mt = pre.trains[inst.train_index(a.train)].mandatory_edges;
                const auto& mu = pre.trains[inst.train_index(b.train)].mandatory_edges;
                for (const Edge& e1 : a.edges) {
                    if (!mt.contains(e1)) continue;
                    for (const Edge& e2 : b.edges) {
                        if (mu.contains(e2) && t.latest.at(e1.to) < u.earliest.at(e2.from)) {
                            decided = true;
                            break;
                        }
                    }
                    if (decided) break;
                }
            }
            if (decided) {
                pre.decided.push_back({static_cast<int>(i), static_cast<int>(j)});
            }
        }
    }
}

PreprocessedInstance preprocess(const Instance& inst) {
    PreprocessedInstance pre;
    pre.original = inst;
    std::tie(pre.reduced, pre.removed) = subsume_resources(inst);
    const Instance& red = pre.reduced;

    for (const TrainLine& t : red.trains) {
        TrainPre tp;
        tp.heights = compute_heights(t);
        tp.bounds = compute_height_bounds(t, tp.heights);
        tp.times = compute_exclusive_times(t, tp.heights, red.network.travel_time);

        TrainGraph g(t);
        auto from = g.paths_from_starts();
        auto to = g.paths_to_ends();
        BigCount total = 0;
        for (const Symbol& s : t.starts) total += to.at(s);
        std::set<Edge> mandatory;
        std::vector<BigCount> through_height(tp.heights.var_count, 0);
        std::vector<BigCount> through_pair(std::max(0, tp.heights.var_count - 1), 0);
        for (const Symbol& v : t.nodes) through_height[tp.heights[v]] += from.at(v) * to.at(v);
        for (const Edge& e : t.edges) {
            BigCount c = from.at(e.from) * to.at(e.to);
            if (c == total) mandatory.insert(e);
            int h = tp.heights[e.from];
            if (h < static_cast<int>(through_pair.size()) && tp.times.exclusive[h]) through_pair[h] += c;
        }
        for (int h = 0; h < tp.heights.var_count; ++h) tp.mandatory_height.push_back(through_height[h] == total);
        for (std::size_t n = 0; n < through_pair.size(); ++n) {
            tp.mandatory_exclusive.push_back(tp.times.exclusive[n] && through_pair[n] == total);
        }

        auto given = red.precomputed.mandatory_edges.find(t.id);
        if (given != red.precomputed.mandatory_edges.end()) {
            for (const Edge& e : given->second) {
                if (!mandatory.contains(e)) {
                    throw PreprocessError("set fact for train " + t.id.str() + " names " + to_string(e) +
                                          ", which is not on every path");
                }
            }
            tp.mandatory_edges = given->second;
        } else {
            tp.mandatory_edges = std::move(mandatory);
        }
        pre.trains.push_back(std::move(tp));
    }

    pre.areas = compute_coverage(red);
    for (std::size_t i = 0; i < pre.areas.size(); ++i) {
        const ResourceArea& a = pre.areas[i];
        pre.coverage[{a.train, a.resource}].push_back(static_cast<int>(i));
        for (const Edge& e : a.edges) pre.edge_area[{a.train, a.resource, e}] = static_cast<int>(i);
    }
    pre.free_pairs = compute_free_pairs(red, pre.areas);
    pre.conflicts = detect_conflicts(red, pre.areas, pre.free_pairs);
    compute_overlaps_and_decided(pre);

    PreprocessStats& st = pre.stats;
    st.resources = inst.network.resources.size();
    st.subsumed = pre.removed.size();
    for (const TrainLine& t : red.trains) {
        for (const auto& [r, redges] : red.network.resources) st.incidences += edges_on(redges, t).size();
        st.node_variables += t.nodes.size();
    }
    for (const TrainPre& tp : pre.trains) st.height_variables += tp.heights.var_count;
    st.areas = pre.areas.size();
    st.edge_conflicts = count_edge_conflicts(red);
    st.area_conflicts = pre.conflicts.size();
    return pre;
}

std::string dump_preprocessed_facts(const PreprocessedInstance& pre) {
    std::ostringstream out;
    for (const ResourceArea& a : pre.areas) {
        for (const Edge& e : a.edges) {
            out << "ra(" << a.train << "," << a.resource << "," << a.area_id << "," << e << ").\n";
        }
    }
    for (const ResourceArea& a : pre.areas) {
        out << "e_ra(" << a.train << "," << a.resource << "," << a.area_id << "," << a.entry << ").\n";
        out << "l_ra(" << a.train << "," << a.resource << "," << a.area_id << "," << format_time(a.exit, true) << ").\n";
    }
    for (std::size_t i = 0; i < pre.trains.size(); ++i) {
        for (const Edge& e : pre.trains[i].mandatory_edges) {
            out << "set(" << pre.reduced.trains[i].id << "," << e << ").\n";
        }
    }
    return out.str();
}

}  // namespace railsched
