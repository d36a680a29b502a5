#include "railsched/validator.hpp"

#include <set>

#include "railsched/diff_logic.hpp"
#include "railsched/graph.hpp"

namespace railsched {

namespace {

std::string tn(const Symbol& t, const Symbol& v) { return "(" + t.str() + "," + v.str() + ")"; }

std::set<Edge> path_edges(const std::vector<Symbol>& p) {
    std::set<Edge> out;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) out.insert({p[i], p[i + 1]});
    return out;
}

bool connection_in_use(const Connection& c, const std::map<Symbol, std::set<Edge>>& used) {
    auto a = used.find(c.train);
    auto b = used.find(c.other);
    return a != used.end() && b != used.end() && a->second.count(c.edge) && b->second.count(c.other_edge);
}

class Waivers {
public:
    Waivers(const Instance& inst, const std::map<Symbol, std::set<Edge>>& used) {
        std::set<Symbol> active;
        for (const Connection& c : inst.connections)
            if (connection_in_use(c, used)) active.insert(c.id);
        for (const CollisionFreePoint& f : inst.free_points) {
            if (!active.count(f.connection)) continue;
            points_.insert({f.resource, f.train, f.edge, f.other, f.other_edge});
            points_.insert({f.resource, f.other, f.other_edge, f.train, f.edge});
        }
    }

    bool waived(const Symbol& r, const Symbol& t, const Edge& e, const Symbol& t2, const Edge& e2) const {
        return points_.count({r, t, e, t2, e2}) > 0;
    }

private:
    std::set<std::tuple<Symbol, Symbol, Edge, Symbol, Edge>> points_;
};

}  // namespace

std::vector<SolutionViolation> validate_solution(const Instance& inst, const Solution& sol) {
    std::vector<SolutionViolation> out;
    auto report = [&](std::string cond, std::string detail) { out.push_back({std::move(cond), std::move(detail)}); };

    for (const auto& [t, p] : sol.paths)
        if (!inst.find_train(t)) report("structure", "path for unknown train line " + t.str());
    for (const auto& [key, a] : sol.arrivals) {
        auto it = sol.paths.find(key.first);
        if (it == sol.paths.end() || std::find(it->second.begin(), it->second.end(), key.second) == it->second.end())
            report("structure", "arrival " + tn(key.first, key.second) + " defined off the path");
        if (a < 0) report("structure", "negative arrival " + tn(key.first, key.second));
    }

    std::map<Symbol, std::set<Edge>> used;
    auto arrival = [&](const Symbol& t, const Symbol& v) -> std::optional<Seconds> {
        auto it = sol.arrivals.find({t, v});
        if (it == sol.arrivals.end()) return std::nullopt;
        return it->second;
    };

    for (const TrainLine& t : inst.trains) {
        auto it = sol.paths.find(t.id);
        if (it == sol.paths.end() || it->second.empty()) {
            report("structure", "no path for train line " + t.id.str());
            continue;
        }
        const auto& p = it->second;
        used[t.id] = path_edges(p);
        TrainGraph g(t);
        for (const Symbol& v : p) {
            if (!t.nodes.count(v)) report("1", "node " + v.str() + " of " + t.id.str() + " not in its subgraph");
            if (!arrival(t.id, v)) report("structure", "arrival " + tn(t.id, v) + " undefined on the path");
        }
        for (std::size_t j = 0; j + 1 < p.size(); ++j)
            if (!t.edges.count({p[j], p[j + 1]}))
                report("2", "edge " + to_string(Edge{p[j], p[j + 1]}) + " not available to " + t.id.str());
        if (t.nodes.count(p.front()) && !g.pred.at(p.front()).empty())
            report("3", "path of " + t.id.str() + " starts at " + p.front().str() + " with incoming edges");
        if (t.nodes.count(p.back()) && !g.succ.at(p.back()).empty())
            report("3", "path of " + t.id.str() + " ends at " + p.back().str() + " with outgoing edges");

        for (const Symbol& v : p) {
            auto a = arrival(t.id, v);
            if (!a || !t.nodes.count(v)) continue;
            Seconds e = t.earliest.at(v), l = t.latest.at(v);
            if (*a < e)
                report("4", "A" + tn(t.id, v) + "=" + std::to_string(*a) + " < e=" + std::to_string(e));
            if (l != kPosInf && *a > l)
                report("5", "A" + tn(t.id, v) + "=" + std::to_string(*a) + " > l=" + std::to_string(l));
        }
        for (std::size_t j = 0; j + 1 < p.size(); ++j) {
            Edge e{p[j], p[j + 1]};
            auto a = arrival(t.id, e.from), b = arrival(t.id, e.to);
            if (!a || !b || !t.edges.count(e)) continue;
            Seconds need = inst.network.travel_time.at(e) + t.wait.at(e);
            if (*a + need > *b)
                report("6", t.id.str() + " on " + to_string(e) + ": " + std::to_string(*b) + " - " +
                                std::to_string(*a) + " < " + std::to_string(need));
        }
    }

    Waivers waivers(inst, used);
    for (const auto& [r, redges] : inst.network.resources) {
        Seconds b = inst.network.blocked_time.at(r);
        for (std::size_t i = 0; i < inst.trains.size(); ++i) {
            const Symbol& t = inst.trains[i].id;
            if (!used.count(t)) continue;
            for (std::size_t j = i + 1; j < inst.trains.size(); ++j) {
                const Symbol& t2 = inst.trains[j].id;
                if (!used.count(t2)) continue;
                for (const Edge& e : used[t]) {
                    if (!redges.count(e)) continue;
                    for (const Edge& e2 : used[t2]) {
                        if (!redges.count(e2) || waivers.waived(r, t, e, t2, e2)) continue;
                        auto v = arrival(t, e.from), v2 = arrival(t, e.to);
                        auto u = arrival(t2, e2.from), u2 = arrival(t2, e2.to);
                        if (!v || !v2 || !u || !u2) continue;
                        if (*v2 + b <= *u || *u2 + b <= *v) continue;
                        report("7", "resource " + r.str() + ": " + t.str() + " on " + to_string(e) + " [" +
                                        std::to_string(*v) + "," + std::to_string(*v2) + "] and " + t2.str() +
                                        " on " + to_string(e2) + " [" + std::to_string(*u) + "," +
                                        std::to_string(*u2) + "] with b=" + std::to_string(b));
                    }
                }
            }
        }
    }

    for (const Connection& c : inst.connections) {
        if (!connection_in_use(c, used)) continue;
        auto a = arrival(c.train, c.node), a2 = arrival(c.other, c.other_node);
        if (!a || !a2) {
            report("8", "connection " + c.id.str() + " refers to an undefined arrival");
            continue;
        }
        Seconds diff = *a2 - *a;
        if ((c.alpha != kNegInf && diff < c.alpha) || (c.omega != kPosInf && diff > c.omega))
            report("8", "connection " + c.id.str() + ": difference " + std::to_string(diff) + " outside [" +
                            format_time(c.alpha, false) + "," + format_time(c.omega, true) + "]");
    }
    return out;
}

ExactQuality exact_quality(const Instance& inst, const Solution& sol) {
    auto d = delay_starts(inst);
    Seconds delay = 0;
    for (const auto& [key, a] : sol.arrivals) {
        auto it = d.find(key);
        if (it != d.end() && a > it->second) delay += a - it->second;
    }
    Seconds rp = 0;
    for (const auto& [t, p] : sol.paths)
        for (const Edge& e : path_edges(p)) {
            auto it = inst.objective.route_penalty.find(e);
            if (it != inst.objective.route_penalty.end()) rp += it->second;
        }
    return {Rational::make(delay, 60), rp};
}

Objective approx_quality(const Instance& inst, const ThresholdSet& thresholds, const Solution& sol) {
    Seconds delay = 0;
    for (const auto& [key, a] : sol.arrivals) {
        auto it = thresholds.find(key);
        if (it != thresholds.end()) delay += threshold_penalty(it->second, a);
    }
    return {delay, exact_quality(inst, sol).route_penalty};
}

namespace {

struct Segment {
    int train;
    std::size_t first;  // path position of the entry node
    std::size_t last;   // path position of the exit node
};

struct OrderPair {
    Segment a;
    Segment b;
    Seconds blocked;
};

}  // namespace

OracleResult brute_force_solve(const Instance& inst, const ThresholdSet& thresholds, std::uint64_t budget) {
    OracleResult res;
    const std::size_t n = inst.trains.size();
    std::vector<std::vector<std::vector<Symbol>>> paths(n);
    for (std::size_t i = 0; i < n; ++i) {
        paths[i] = TrainGraph(inst.trains[i]).enumerate_paths(budget + 1);
        if (paths[i].size() > budget) throw BudgetExceeded("too many paths for " + inst.trains[i].id.str());
        if (paths[i].empty()) return res;
    }

    std::vector<std::size_t> choice(n, 0);
    for (;;) {
        std::map<Symbol, std::set<Edge>> used;
        std::vector<int> offset(n);
        int num_vars = 1;
        for (std::size_t i = 0; i < n; ++i) {
            used[inst.trains[i].id] = path_edges(paths[i][choice[i]]);
            offset[i] = num_vars;
            num_vars += static_cast<int>(paths[i][choice[i]].size());
        }
        auto var = [&](int train, std::size_t pos) { return offset[train] + static_cast<int>(pos); };

        std::vector<DiffConstraint> base;
        bool possible = true;
        for (std::size_t i = 0; i < n; ++i) {
            const TrainLine& t = inst.trains[i];
            const auto& p = paths[i][choice[i]];
            for (std::size_t k = 0; k < p.size(); ++k) {
                base.push_back({0, var(i, k), -t.earliest.at(p[k])});
                if (t.latest.at(p[k]) != kPosInf) base.push_back({var(i, k), 0, t.latest.at(p[k])});
            }
            for (std::size_t k = 0; k + 1 < p.size(); ++k) {
                Edge e{p[k], p[k + 1]};
                base.push_back({var(i, k), var(i, k + 1), -(inst.network.travel_time.at(e) + t.wait.at(e))});
            }
        }
        for (const Connection& c : inst.connections) {
            if (!connection_in_use(c, used)) continue;
            int ti = inst.train_index(c.train), oi = inst.train_index(c.other);
            const auto& p = paths[ti][choice[ti]];
            const auto& q = paths[oi][choice[oi]];
            auto pi = std::find(p.begin(), p.end(), c.node);
            auto qi = std::find(q.begin(), q.end(), c.other_node);
            if (pi == p.end() || qi == q.end()) {
                possible = false;
                break;
            }
            int x = var(ti, pi - p.begin()), y = var(oi, qi - q.begin());
            if (c.omega != kPosInf) base.push_back({y, x, c.omega});
            if (c.alpha != kNegInf) base.push_back({x, y, -c.alpha});
        }

        std::vector<OrderPair> pairs;
        if (possible) {
            Waivers waivers(inst, used);
            for (const auto& [r, redges] : inst.network.resources) {
                std::vector<Segment> segs;
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& p = paths[i][choice[i]];
                    std::size_t k = 0;
                    while (k + 1 < p.size()) {
                        if (!redges.count({p[k], p[k + 1]})) {
                            ++k;
                            continue;
                        }
                        std::size_t s = k;
                        while (k + 1 < p.size() && redges.count({p[k], p[k + 1]})) ++k;
                        segs.push_back({static_cast<int>(i), s, k});
                    }
                }
                for (std::size_t x = 0; x < segs.size(); ++x)
                    for (std::size_t y = x + 1; y < segs.size(); ++y) {
                        const Segment& a = segs[x];
                        const Segment& b = segs[y];
                        if (a.train == b.train) continue;
                        const auto& p = paths[a.train][choice[a.train]];
                        const auto& q = paths[b.train][choice[b.train]];
                        bool all_waived = true;
                        for (std::size_t i = a.first; i < a.last && all_waived; ++i)
                            for (std::size_t j = b.first; j < b.last && all_waived; ++j)
                                all_waived = waivers.waived(r, inst.trains[a.train].id, {p[i], p[i + 1]},
                                                            inst.trains[b.train].id, {q[j], q[j + 1]});
                        if (!all_waived) pairs.push_back({a, b, inst.network.blocked_time.at(r)});
                    }
            }
        }

        if (possible) {
            if (pairs.size() >= 63 || res.combinations + (std::uint64_t{1} << pairs.size()) > budget)
                throw BudgetExceeded("oracle budget of " + std::to_string(budget) + " combinations exceeded");
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
                ++res.combinations;
                std::vector<DiffConstraint> cons = base;
                for (std::size_t k = 0; k < pairs.size(); ++k) {
                    Segment first = pairs[k].a, second = pairs[k].b;
                    if (mask >> k & 1) std::swap(first, second);
                    // exit of `first` plus blocked time precedes entry of `second`
                    cons.push_back({var(first.train, first.last), var(second.train, second.first), -pairs[k].blocked});
                }
                auto model = bellman_ford_minimal(num_vars, cons);
                if (!model) continue;
                Solution sol;
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& p = paths[i][choice[i]];
                    sol.paths[inst.trains[i].id] = p;
                    for (std::size_t k = 0; k < p.size(); ++k)
                        sol.arrivals[{inst.trains[i].id, p[k]}] = model->value[var(i, k)];
                }
                Objective obj = approx_quality(inst, thresholds, sol);
                if (!res.objective || obj < *res.objective) {
                    sol.approx_quality = obj;
                    res.objective = obj;
                    res.witness = std::move(sol);
                }
            }
        }

        std::size_t i = 0;
        while (i < n && ++choice[i] == paths[i].size()) choice[i++] = 0;
        if (i == n) break;
    }
    return res;
}

}  // namespace railsched
