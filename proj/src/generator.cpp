#include "railsched/generator.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <tuple>

#include "railsched/graph.hpp"
#include "railsched/objective.hpp"
#include "railsched/preprocess.hpp"

namespace railsched {

namespace {

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

Symbol sym(int i) { return Symbol(static_cast<std::int64_t>(i)); }

TrainLine make_train(Rng& rng, int index, int nodes, bool open, Network& net) {
    TrainLine t;
    t.id = Symbol("t" + std::to_string(index + 1));
    int k = uniform(rng, 3, std::min(nodes, 6));
    std::vector<int> all(nodes);
    for (int i = 0; i < nodes; ++i) all[i] = i + 1;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> chosen(all.begin(), all.begin() + k);
    std::sort(chosen.begin(), chosen.end());
    if (chance(rng, 0.5)) std::reverse(chosen.begin(), chosen.end());

    for (int v : chosen) t.nodes.insert(sym(v));
    for (int i = 0; i + 1 < k; ++i) t.edges.insert({sym(chosen[i]), sym(chosen[i + 1])});
    int skips = uniform(rng, 0, 2);
    for (int s = 0; s < skips && k >= 3; ++s) {
        int i = uniform(rng, 0, k - 3);
        int j = uniform(rng, i + 2, k - 1);
        t.edges.insert({sym(chosen[i]), sym(chosen[j])});
    }
    // an alternative start node feeding the second node
    if (chance(rng, 0.3) && k < nodes) {
        std::vector<int> rest;
        for (int v = 1; v <= nodes; ++v)
            if (!t.nodes.count(sym(v))) rest.push_back(v);
        int s = pick(rng, rest);
        t.nodes.insert(sym(s));
        t.edges.insert({sym(s), sym(chosen[1])});
    }
    for (const Edge& e : t.edges) {
        net.edges.insert(e);
        net.nodes.insert(e.from);
        net.nodes.insert(e.to);
        if (!net.travel_time.count(e)) net.travel_time[e] = chance(rng, 0.5) ? 60 : 120;
        t.wait[e] = chance(rng, 0.25) ? 30 : 0;
    }

    TrainGraph g(t);
    for (const Symbol& v : t.nodes) {
        if (g.pred.at(v).empty()) t.starts.insert(v);
        if (g.succ.at(v).empty()) t.ends.insert(v);
    }
    // earliest times along the fastest routes from a common departure
    Seconds offset = 60 * uniform(rng, 0, 2);
    auto order = *g.topological_order();
    for (const Symbol& v : order) {
        Seconds e = kPosInf;
        if (t.starts.count(v)) e = offset;
        for (const Symbol& u : g.pred.at(v))
            e = std::min(e, t.earliest.at(u) + net.travel_time.at({u, v}) + t.wait.at({u, v}));
        t.earliest[v] = e;
    }
    for (const Symbol& v : order) {
        if (open || chance(rng, 0.2)) {
            t.latest[v] = kPosInf;
        } else {
            t.latest[v] = t.earliest[v] + 60 * uniform(rng, 2, 15);
        }
    }
    return t;
}

void add_objective(Rng& rng, Instance& inst) {
    std::vector<Edge> edges(inst.network.edges.begin(), inst.network.edges.end());
    int penalties = uniform(rng, 0, 2);
    for (int i = 0; i < penalties && !edges.empty(); ++i) inst.objective.route_penalty[pick(rng, edges)] = uniform(rng, 1, 2);

    bool linear = chance(rng, 0.5);
    Seconds step = 60 * uniform(rng, 1, 3);
    for (const TrainLine& t : inst.trains) {
        for (const Symbol& v : t.nodes) {
            if (!t.ends.count(v) && chance(rng, 0.5)) continue;
            Seconds e = t.earliest.at(v);
            Seconds l = t.latest.at(v);
            Seconds d = e + 60 * uniform(rng, 0, 1);
            if (is_finite(l)) d = std::min(d, l);
            Seconds cap = is_finite(l) ? l : e + 900;
            auto list = linear ? gen_linear(d, cap, step) : gen_binary(d, cap);
            if (!list.empty()) inst.objective.thresholds[{t.id, v}] = std::move(list);
        }
    }
}

// Adds adjacency closure and completes every touched pair of resource areas.
std::set<CollisionFreePoint> complete_free_points(const Instance& inst, std::set<CollisionFreePoint> f) {
    auto [reduced, removed] = subsume_resources(inst);
    auto areas = compute_coverage(reduced);
    std::map<std::tuple<Symbol, Symbol, Edge>, const ResourceArea*> area_of;
    for (const ResourceArea& a : areas)
        for (const Edge& e : a.edges) area_of[{a.train, a.resource, e}] = &a;
    for (bool changed = true; changed;) {
        changed = false;
        for (const CollisionFreePoint& p : std::set<CollisionFreePoint>(f)) {
            const auto& redges = inst.network.resources.at(p.resource);
            std::set<Edge> mine{p.edge}, theirs{p.other_edge};
            if (auto it = area_of.find({p.train, p.resource, p.edge}); it != area_of.end()) mine = it->second->edges;
            if (auto it = area_of.find({p.other, p.resource, p.other_edge}); it != area_of.end())
                theirs = it->second->edges;
            for (const Edge& e : inst.find_train(p.train)->edges)
                if (redges.count(e) && (e.to == p.edge.from || e.from == p.edge.to)) mine.insert(e);
            for (const Edge& e : inst.find_train(p.other)->edges)
                if (redges.count(e) && (e.to == p.other_edge.from || e.from == p.other_edge.to)) theirs.insert(e);
            for (const Edge& a : mine)
                for (const Edge& b : theirs)
                    changed |= f.insert({p.connection, p.train, a, p.other, b, p.resource}).second;
        }
    }
    return f;
}

void add_connection(Rng& rng, Instance& inst, int index) {
    if (inst.trains.size() < 2) return;
    int a = uniform(rng, 0, static_cast<int>(inst.trains.size()) - 1);
    int b = uniform(rng, 0, static_cast<int>(inst.trains.size()) - 2);
    if (b >= a) ++b;
    const TrainLine& t = inst.trains[a];
    const TrainLine& u = inst.trains[b];
    std::vector<Edge> te(t.edges.begin(), t.edges.end()), ue(u.edges.begin(), u.edges.end());
    Connection c;
    c.id = Symbol("c" + std::to_string(index + 1));
    c.train = t.id;
    c.other = u.id;
    c.edge = pick(rng, te);
    c.other_edge = pick(rng, ue);
    // prefer mandatory trigger edges sharing a resource
    auto tm = compute_mandatory_edges(t);
    auto um = compute_mandatory_edges(u);
    std::vector<std::pair<Edge, Edge>> shared;
    for (const auto& [r, redges] : inst.network.resources)
        for (const Edge& x : tm)
            for (const Edge& y : um)
                if (redges.count(x) && redges.count(y)) shared.push_back({x, y});
    if (!shared.empty() && chance(rng, 0.6)) std::tie(c.edge, c.other_edge) = pick(rng, shared);
    c.node = c.edge.to;
    c.other_node = c.other_edge.to;
    switch (uniform(rng, 0, 2)) {
        case 0: c.alpha = 60; c.omega = kPosInf; break;
        case 1: c.alpha = kNegInf; c.omega = 60 * uniform(rng, 0, 5); break;
        default: c.alpha = 0; c.omega = 60 * uniform(rng, 2, 10); break;
    }
    inst.connections.push_back(c);

    // collision-free points only between mandatory trigger edges sharing a resource
    if (!tm.count(c.edge) || !um.count(c.other_edge) || !chance(rng, 0.7)) return;
    for (const auto& [r, redges] : inst.network.resources) {
        if (!redges.count(c.edge) || !redges.count(c.other_edge)) continue;
        std::set<CollisionFreePoint> f{{c.id, t.id, c.edge, u.id, c.other_edge, r}};
        Instance trial = inst;
        auto full = complete_free_points(trial, f);
        trial.free_points.assign(full.begin(), full.end());
        std::sort(trial.free_points.begin(), trial.free_points.end());
        auto [reduced, removed] = subsume_resources(trial);
        if (removed.count(r)) continue;
        inst.free_points = trial.free_points;
        return;
    }
}

std::optional<Instance> attempt(Rng& rng, const GenParams& p) {
    Instance inst;
    for (int i = 0; i < p.trains; ++i) inst.trains.push_back(make_train(rng, i, p.nodes, p.open_windows, inst.network));
    std::sort(inst.trains.begin(), inst.trains.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    // one track resource per node pair, covering both directions
    for (const Edge& e : inst.network.edges) {
        auto [lo, hi] = std::minmax(e.from, e.to);
        Symbol r("r" + lo.str() + "_" + hi.str());
        inst.network.resources[r].insert(e);
        if (!inst.network.blocked_time.count(r)) inst.network.blocked_time[r] = chance(rng, 0.5) ? 30 : 60;
    }
    std::vector<Symbol> nodes(inst.network.nodes.begin(), inst.network.nodes.end());
    for (int j = 0; j < p.multi_resources && !nodes.empty(); ++j) {
        Symbol v = pick(rng, nodes);
        std::set<Edge> edges;
        for (const Edge& e : inst.network.edges)
            if (e.from == v || e.to == v) edges.insert(e);
        if (edges.size() < 2) continue;
        Symbol r("sw" + std::to_string(j + 1));
        inst.network.resources[r] = edges;
        inst.network.blocked_time[r] = chance(rng, 0.5) ? 30 : 60;
    }

    add_objective(rng, inst);
    for (int c = 0; c < p.connections; ++c)
        if (chance(rng, 0.6)) add_connection(rng, inst, c);
    if (!validate_instance(inst).empty()) return std::nullopt;
    return inst;
}

}  // namespace

Instance generate_instance(const GenParams& params) {
    if (params.trains < 1 || params.nodes < 3) throw std::invalid_argument("generator needs at least one train and three nodes");
    Rng rng(params.seed);
    for (int i = 0; i < 1000; ++i)
        if (auto inst = attempt(rng, params)) return *inst;
    throw std::runtime_error("could not generate a valid instance");
}

}  // namespace railsched
