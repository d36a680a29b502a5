#include "railsched/encode.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "railsched/graph.hpp"

namespace railsched {

namespace {

using Kind = VarTag::Kind;

std::string area_label(const ResourceArea& a) {
    return a.train.str() + "," + a.resource.str() + "," + a.area_id.str();
}

int train_of_area(const PreprocessedInstance& pre, int area) { return pre.reduced.train_index(pre.areas[area].train); }

int dl_var(const ConstraintModel& m, int train, int height) { return m.trains[train].dl_base + height; }

void add_clause(ConstraintModel& m, std::vector<Lit> lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 1; i < lits.size(); ++i) {
        if (lits[i] == negate(lits[i - 1])) return;  // tautology
    }
    m.clauses.push_back(std::move(lits));
}

void exactly_one(ConstraintModel& m, const std::vector<Lit>& lits, std::vector<Lit> condition = {}) {
    std::vector<Lit> alo = condition;
    alo.insert(alo.end(), lits.begin(), lits.end());
    add_clause(m, alo);
    for (std::size_t i = 0; i < lits.size(); ++i) {
        for (std::size_t j = i + 1; j < lits.size(); ++j) {
            add_clause(m, {negate(lits[i]), negate(lits[j])});
        }
    }
}

/// Literal equivalent to the conjunction; a single literal is returned as is.
Lit conjunction(ConstraintModel& m, const std::vector<Lit>& lits, const std::string& label) {
    if (lits.size() == 1) return lits.front();
    int v = m.new_var(Kind::Conjunction, label);
    std::vector<Lit> back{pos_lit(v)};
    for (Lit l : lits) {
        add_clause(m, {neg_lit(v), l});
        back.push_back(negate(l));
    }
    add_clause(m, back);
    return pos_lit(v);
}

Lit disjunction(ConstraintModel& m, const std::vector<Lit>& lits, const std::string& label) {
    if (lits.size() == 1) return lits.front();
    int v = m.new_var(Kind::Disjunction, label);
    std::vector<Lit> fwd{neg_lit(v)};
    for (Lit l : lits) {
        add_clause(m, {pos_lit(v), negate(l)});
        fwd.push_back(l);
    }
    add_clause(m, fwd);
    return pos_lit(v);
}

void attach(ConstraintModel& m, Lit guard, int u, int v, Seconds d) {
    int tag = static_cast<int>(m.cond_diffs.size());
    m.cond_diffs.push_back({guard, {u, v, d, tag}});
}

void fixed(ConstraintModel& m, int u, int v, Seconds d) { m.fixed_diffs.push_back({u, v, d, -1}); }

Lit route(const ConstraintModel& m, int train, const Edge& e) { return pos_lit(m.trains[train].route.at(e)); }
Lit visit(const ConstraintModel& m, int train, const Symbol& v) { return pos_lit(m.trains[train].visit.at(v)); }

int uses_var(const PreprocessedInstance& pre, ConstraintModel& m, int area) {
    auto it = m.uses.find(area);
    if (it != m.uses.end()) return it->second;
    const ResourceArea& a = pre.areas[area];
    int t = train_of_area(pre, area);
    std::vector<Lit> routes;
    for (const Edge& e : a.edges) routes.push_back(route(m, t, e));
    int v = m.new_var(Kind::Uses, "uses(" + area_label(a) + ")");
    std::vector<Lit> fwd{neg_lit(v)};
    for (Lit l : routes) {
        add_clause(m, {pos_lit(v), negate(l)});
        fwd.push_back(l);
    }
    add_clause(m, fwd);
    m.uses[area] = v;
    return v;
}

}  // namespace

EncodeOptions EncodeOptions::parse(const std::string& groups) {
    EncodeOptions o;
    std::stringstream in(groups);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item == "hs") {
            o.hs = true;
        } else if (item == "ol1") {
            o.ol1 = true;
        } else if (item == "ol2") {
            o.ol2 = true;
        } else if (item == "ac") {
            o.ac = true;
        } else if (!item.empty()) {
            throw std::invalid_argument("unknown option group '" + item + "' (expected hs, ol1, ol2, ac)");
        }
    }
    return o;
}

std::string EncodeOptions::str() const {
    std::string out;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += ',';
        out += name;
    };
    add(hs, "hs");
    add(ol1, "ol1");
    add(ol2, "ol2");
    add(ac, "ac");
    return out;
}

std::vector<Symbol> area_entries(const ResourceArea& area, const TrainLine& t) {
    TrainGraph g(t);
    std::set<Symbol> out;
    for (const Edge& e : area.edges) {
        const auto& preds = g.pred.at(e.from);
        bool from_outside = preds.empty() || std::any_of(preds.begin(), preds.end(), [&](const Symbol& y) {
                                return !area.edges.contains({y, e.from});
                            });
        if (from_outside) out.insert(e.from);
    }
    return {out.begin(), out.end()};
}

std::vector<Symbol> area_exits(const ResourceArea& area, const TrainLine& t) {
    TrainGraph g(t);
    std::set<Symbol> out;
    for (const Edge& e : area.edges) {
        const auto& succs = g.succ.at(e.to);
        bool to_outside = succs.empty() || std::any_of(succs.begin(), succs.end(), [&](const Symbol& x) {
                              return !area.edges.contains({e.to, x});
                          });
        if (to_outside) out.insert(e.to);
    }
    return {out.begin(), out.end()};
}

Seconds sequence_score(Seconds e, Seconds l, Seconds e2, Seconds l2) {
    // unbounded latest times count as a far horizon
    static constexpr Seconds kHorizon = Seconds{1} << 40;
    auto clamp = [](Seconds x) { return std::min(x, kHorizon); };
    return e2 - e - (clamp(l) - clamp(l2));
}

void encode_routing(const PreprocessedInstance& pre, ConstraintModel& m) {
    int dl_next = m.num_diff_vars;
    for (std::size_t i = 0; i < pre.reduced.trains.size(); ++i) {
        const TrainLine& t = pre.reduced.trains[i];
        const TrainPre& tp = pre.trains[i];
        TrainVars tv;
        tv.id = t.id;
        tv.dl_base = dl_next;
        dl_next += tp.heights.var_count;
        tv.height = tp.heights.height;
        for (const Symbol& v : t.nodes) {
            tv.visit[v] = m.new_var(Kind::Visit, "visit(" + t.id.str() + "," + v.str() + ")");
        }
        for (const Edge& e : t.edges) {
            tv.route[e] = m.new_var(Kind::Route, "route(" + t.id.str() + "," + to_string(e) + ")");
        }
        m.trains.push_back(std::move(tv));
        const TrainVars& vars = m.trains.back();

        TrainGraph g(t);
        std::vector<Lit> starts;
        for (const Symbol& s : t.starts) starts.push_back(pos_lit(vars.visit.at(s)));
        exactly_one(m, starts);
        for (const Symbol& v : t.nodes) {
            Lit vis = pos_lit(vars.visit.at(v));
            std::vector<Lit> out;
            for (const Symbol& x : g.succ.at(v)) out.push_back(pos_lit(vars.route.at({v, x})));
            if (!out.empty()) exactly_one(m, out, {negate(vis)});
            std::vector<Lit> in{negate(vis)};
            for (const Symbol& y : g.pred.at(v)) in.push_back(pos_lit(vars.route.at({y, v})));
            if (in.size() > 1) add_clause(m, in);
        }
        for (const Edge& e : t.edges) {
            Lit r = pos_lit(vars.route.at(e));
            add_clause(m, {negate(r), pos_lit(vars.visit.at(e.from))});
            add_clause(m, {negate(r), pos_lit(vars.visit.at(e.to))});
        }
    }
    m.num_diff_vars = dl_next;
}

void encode_conflicts(const PreprocessedInstance& pre, ConstraintModel& m) {
    std::set<int> involved;
    for (const AreaConflict& c : pre.conflicts) {
        involved.insert(c.a);
        involved.insert(c.b);
    }
    for (int a : involved) {
        const ResourceArea& area = pre.areas[a];
        int t = train_of_area(pre, a);
        const TrainLine& line = pre.reduced.trains[t];
        uses_var(pre, m, a);
        TrainGraph g(line);
        auto in_a = [&](const Symbol& v) {
            std::vector<Lit> out;
            for (const Symbol& y : g.pred.at(v)) {
                if (area.edges.contains({y, v})) out.push_back(route(m, t, {y, v}));
            }
            return out;
        };
        auto out_a = [&](const Symbol& v) {
            std::vector<Lit> out;
            for (const Symbol& x : g.succ.at(v)) {
                if (area.edges.contains({v, x})) out.push_back(route(m, t, {v, x}));
            }
            return out;
        };
        for (const Symbol& v : area_entries(area, line)) {
            int var = m.new_var(Kind::EnterRA, "enter(" + area_label(area) + "," + v.str() + ")");
            m.enter[{a, v}] = var;
            auto outs = out_a(v);
            auto ins = in_a(v);
            std::vector<Lit> some{neg_lit(var)};
            some.insert(some.end(), outs.begin(), outs.end());
            add_clause(m, some);
            for (Lit l : ins) add_clause(m, {neg_lit(var), negate(l)});
            for (Lit l : outs) {
                std::vector<Lit> c{negate(l), pos_lit(var)};
                c.insert(c.end(), ins.begin(), ins.end());
                add_clause(m, c);
            }
        }
        for (const Symbol& v : area_exits(area, line)) {
            int var = m.new_var(Kind::LeaveRA, "leave(" + area_label(area) + "," + v.str() + ")");
            m.leave[{a, v}] = var;
            auto outs = out_a(v);
            auto ins = in_a(v);
            std::vector<Lit> some{neg_lit(var)};
            some.insert(some.end(), ins.begin(), ins.end());
            add_clause(m, some);
            for (Lit l : outs) add_clause(m, {neg_lit(var), negate(l)});
            for (Lit l : ins) {
                std::vector<Lit> c{negate(l), pos_lit(var)};
                c.insert(c.end(), outs.begin(), outs.end());
                add_clause(m, c);
            }
        }
    }
    for (const AreaConflict& c : pre.conflicts) {
        const ResourceArea& a = pre.areas[c.a];
        const ResourceArea& b = pre.areas[c.b];
        int ab = m.new_var(Kind::Seq, "seq(" + area_label(a) + "<" + area_label(b) + ")");
        int ba = m.new_var(Kind::Seq, "seq(" + area_label(b) + "<" + area_label(a) + ")");
        m.seq[{c.a, c.b}] = ab;
        m.seq[{c.b, c.a}] = ba;
        Lit ua = pos_lit(m.uses.at(c.a));
        Lit ub = pos_lit(m.uses.at(c.b));
        add_clause(m, {negate(ua), negate(ub), pos_lit(ab), pos_lit(ba)});
        add_clause(m, {neg_lit(ab), neg_lit(ba)});
        for (int s : {ab, ba}) {
            add_clause(m, {neg_lit(s), ua});
            add_clause(m, {neg_lit(s), ub});
        }
    }
}

void encode_schedule(const PreprocessedInstance& pre, ConstraintModel& m) {
    const Instance& inst = pre.reduced;
    for (std::size_t i = 0; i < inst.trains.size(); ++i) {
        const TrainLine& t = inst.trains[i];
        const TrainPre& tp = pre.trains[i];
        int ti = static_cast<int>(i);
        for (int h = 0; h < tp.heights.var_count; ++h) {
            fixed(m, 0, dl_var(m, ti, h), -tp.bounds.min_earliest[h]);
            if (tp.mandatory_height[h] && is_finite(tp.bounds.max_latest[h])) {
                fixed(m, dl_var(m, ti, h), 0, tp.bounds.max_latest[h]);
            }
        }
        for (const Symbol& v : t.nodes) {
            int h = tp.heights[v];
            Lit vis = visit(m, ti, v);
            if (t.earliest.at(v) > tp.bounds.min_earliest[h]) {
                attach(m, vis, 0, dl_var(m, ti, h), -t.earliest.at(v));
            }
            Seconds l = t.latest.at(v);
            bool covered = tp.mandatory_height[h] && l >= tp.bounds.max_latest[h];
            if (is_finite(l) && !covered) {
                attach(m, vis, dl_var(m, ti, h), 0, l);
            }
        }
        for (std::size_t n = 0; n < tp.times.exclusive.size(); ++n) {
            if (!tp.times.exclusive[n]) continue;
            int hn = static_cast<int>(n);
            Seconds d = -tp.times.min_time[n];
            if (tp.mandatory_exclusive[n]) {
                fixed(m, dl_var(m, ti, hn), dl_var(m, ti, hn + 1), d);
                continue;
            }
            std::vector<Lit> routes;
            for (const Edge& e : t.edges) {
                if (tp.heights[e.from] == hn) routes.push_back(route(m, ti, e));
            }
            Lit g = disjunction(m, routes, "leaves(" + t.id.str() + ",h" + std::to_string(n) + ")");
            attach(m, g, dl_var(m, ti, hn), dl_var(m, ti, hn + 1), d);
        }
        for (const auto& [e, time] : tp.times.conditional) {
            attach(m, route(m, ti, e), dl_var(m, ti, tp.heights[e.from]), dl_var(m, ti, tp.heights[e.to]), -time);
        }
    }

    for (const AreaConflict& c : pre.conflicts) {
        for (auto [first, second] : {std::pair{c.a, c.b}, std::pair{c.b, c.a}}) {
            int s = m.seq.at({first, second});
            int t1 = train_of_area(pre, first);
            int t2 = train_of_area(pre, second);
            Seconds blocked = inst.network.blocked_time.at(c.resource);
            std::vector<std::pair<Symbol, int>> exits, entries;
            for (const auto& [key, var] : m.leave) {
                if (key.first == first) exits.emplace_back(key.second, var);
            }
            for (const auto& [key, var] : m.enter) {
                if (key.first == second) entries.emplace_back(key.second, var);
            }
            bool single = exits.size() == 1 && entries.size() == 1;
            for (const auto& [x, leave] : exits) {
                for (const auto& [y, enter] : entries) {
                    Lit g = single ? pos_lit(s)
                                   : conjunction(m, {pos_lit(s), pos_lit(leave), pos_lit(enter)},
                                                 m.vars[s].label + "@" + x.str() + "/" + y.str());
                    attach(m, g, dl_var(m, t1, m.trains[t1].height.at(x)), dl_var(m, t2, m.trains[t2].height.at(y)),
                           -blocked);
                }
            }
        }
    }

    for (const Connection& c : inst.connections) {
        int t1 = inst.train_index(c.train);
        int t2 = inst.train_index(c.other);
        const TrainVars& v1 = m.trains.at(t1);
        const TrainVars& v2 = m.trains.at(t2);
        if (!v1.route.contains(c.edge) || !v2.route.contains(c.other_edge)) {
            throw EncodingError("connection " + c.id.str() + " references an edge outside its train");
        }
        if ((c.node != c.edge.from && c.node != c.edge.to) ||
            (c.other_node != c.other_edge.from && c.other_node != c.other_edge.to)) {
            throw EncodingError("connection " + c.id.str() + " references a node that is not visited with its edge");
        }
        if (!is_finite(c.alpha) && !is_finite(c.omega)) continue;
        Lit g = conjunction(m, {route(m, t1, c.edge), route(m, t2, c.other_edge)}, "connection(" + c.id.str() + ")");
        int x = dl_var(m, t1, v1.height.at(c.node));
        int y = dl_var(m, t2, v2.height.at(c.other_node));
        if (is_finite(c.alpha)) attach(m, g, x, y, -c.alpha);
        if (is_finite(c.omega)) attach(m, g, y, x, c.omega);
    }
}

void build_objective(const PreprocessedInstance& pre, const ThresholdSet& thresholds, ConstraintModel& m) {
    const Instance& inst = pre.reduced;
    std::vector<WeightedLit> delay, penalty;
    for (std::size_t i = 0; i < inst.trains.size(); ++i) {
        const TrainLine& t = inst.trains[i];
        const TrainPre& tp = pre.trains[i];
        int ti = static_cast<int>(i);
        // merge per (height, threshold, weight)
        std::map<std::tuple<int, Seconds, Seconds>, int> index;
        std::map<Symbol, std::vector<int>> chain;  // node -> late vars in threshold order
        for (const Symbol& v : t.nodes) {
            auto it = thresholds.find({t.id, v});
            if (it == thresholds.end()) continue;
            int h = tp.heights[v];
            for (const Threshold& th : it->second) {
                if (th.at > t.latest.at(v)) {
                    throw EncodingError("threshold " + std::to_string(th.at) + " of train " + t.id.str() + " node " + v.str() +
                                        " exceeds its latest time");
                }
                auto key = std::tuple{h, th.at, th.weight};
                auto [pos, fresh] = index.emplace(key, static_cast<int>(m.late.size()));
                if (fresh) {
                    int var = m.new_var(Kind::Late, "late(" + t.id.str() + ",h" + std::to_string(h) + "," +
                                                        std::to_string(th.at) + "," + std::to_string(th.weight) + ")");
                    m.late.push_back({var, ti, h, th.at, th.weight, {}});
                }
                m.late[pos->second].nodes.push_back(v);
                chain[v].push_back(pos->second);
            }
        }
        std::set<int> own;
        for (const auto& [key, li] : index) own.insert(li);
        for (int li : own) {
            LateVar& lv = m.late[li];
            int dv = dl_var(m, ti, lv.height);
            std::vector<Lit> carriers;
            for (const Symbol& v : lv.nodes) carriers.push_back(visit(m, ti, v));
            std::vector<Lit> need{neg_lit(lv.var)};
            need.insert(need.end(), carriers.begin(), carriers.end());
            add_clause(m, need);
            attach(m, pos_lit(lv.var), 0, dv, -lv.at);

            std::size_t at_height = 0;
            for (const auto& [v, h] : tp.heights.height) at_height += h == lv.height;
            Lit guard;
            if (tp.mandatory_height[lv.height] && lv.nodes.size() == at_height) {
                guard = neg_lit(lv.var);
            } else {
                Lit visited = disjunction(m, carriers, m.vars[lv.var].label + "@visited");
                guard = conjunction(m, {neg_lit(lv.var), visited}, m.vars[lv.var].label + "@early");
            }
            attach(m, guard, dv, 0, lv.at - 1);
            delay.push_back({pos_lit(lv.var), lv.weight});
        }
        // downward chains: late at a threshold implies late at the previous one
        std::map<int, std::vector<std::pair<Symbol, int>>> previous;  // late -> (node, previous late or -1)
        for (const auto& [v, list] : chain) {
            for (std::size_t k = 0; k < list.size(); ++k) {
                previous[list[k]].emplace_back(v, k == 0 ? -1 : list[k - 1]);
            }
        }
        for (const auto& [li, preds] : previous) {
            int first = preds.front().second;
            bool shared = first >= 0 && std::all_of(preds.begin(), preds.end(), [&](const auto& p) { return p.second == first; });
            if (shared) {
                add_clause(m, {neg_lit(m.late[li].var), pos_lit(m.late[first].var)});
                continue;
            }
            for (const auto& [v, p] : preds) {
                if (p < 0) continue;
                add_clause(m, {neg_lit(m.late[li].var), negate(visit(m, ti, v)), pos_lit(m.late[p].var)});
            }
        }
        for (const Edge& e : t.edges) {
            auto rp = inst.objective.route_penalty.find(e);
            if (rp != inst.objective.route_penalty.end() && rp->second > 0) {
                penalty.push_back({route(m, ti, e), rp->second});
            }
        }
    }
    m.layers = {std::move(delay), std::move(penalty)};
}

void encode_optional(const PreprocessedInstance& pre, const EncodeOptions& opts, ConstraintModel& m) {
    const Instance& inst = pre.reduced;
    std::set<std::pair<int, int>> conflict_pairs;
    for (const AreaConflict& c : pre.conflicts) {
        conflict_pairs.insert({c.a, c.b});
        conflict_pairs.insert({c.b, c.a});
    }

    if (opts.ol2) {
        for (const DecidedPair& d : pre.decided) {
            auto it = m.seq.find({d.first, d.second});
            if (it == m.seq.end()) continue;
            add_clause(m, {neg_lit(m.uses.at(d.first)), neg_lit(m.uses.at(d.second)), pos_lit(it->second)});
        }
    }

    if (opts.ol1 || opts.ol2) {
        std::map<int, std::vector<std::pair<int, const std::set<Edge>*>>> partners;  // area -> (overlapping area, shared)
        for (const AreaOverlap& o : pre.overlaps) {
            partners[o.a].emplace_back(o.b, &o.shared);
            partners[o.b].emplace_back(o.a, &o.shared);
        }
        // premise: `first` before `second`, given by a literal or statically decided
        struct Premise {
            int first, second;
            std::optional<Lit> lit;
        };
        std::vector<Premise> premises;
        if (opts.ol1) {
            for (const auto& [key, var] : m.seq) premises.push_back({key.first, key.second, pos_lit(var)});
        }
        if (opts.ol2) {
            for (const DecidedPair& d : pre.decided) {
                if (!conflict_pairs.contains({d.first, d.second})) premises.push_back({d.first, d.second, std::nullopt});
            }
        }
        for (const Premise& p : premises) {
            auto pa = partners.find(p.first);
            auto pb = partners.find(p.second);
            if (pa == partners.end() || pb == partners.end()) continue;
            int t1 = train_of_area(pre, p.first);
            int t2 = train_of_area(pre, p.second);
            Seconds b1 = inst.network.blocked_time.at(pre.areas[p.first].resource);
            for (const auto& [a2, shared_a] : pa->second) {
                for (const auto& [b2, shared_b] : pb->second) {
                    if (pre.areas[a2].resource != pre.areas[b2].resource) continue;
                    auto s2 = m.seq.find({a2, b2});
                    if (s2 == m.seq.end()) continue;
                    Seconds b2_time = inst.network.blocked_time.at(pre.areas[a2].resource);
                    for (const Edge& x : *shared_a) {
                        for (const Edge& y : *shared_b) {
                            Seconds slack = inst.network.travel_time.at(x) + inst.network.travel_time.at(y) + b1 + b2_time;
                            if (slack <= 0) continue;
                            std::vector<Lit> c{negate(route(m, t1, x)), negate(route(m, t2, y)), pos_lit(s2->second)};
                            if (p.lit) c.push_back(negate(*p.lit));
                            add_clause(m, c);
                        }
                    }
                }
            }
        }
    }

    if (opts.ac) {
        std::map<int, std::vector<int>> after;  // area -> areas it may precede
        for (const auto& [key, var] : m.seq) after[key.first].push_back(key.second);
        for (const auto& [a1, mids] : after) {
            for (int a2 : mids) {
                auto next = after.find(a2);
                if (next == after.end()) continue;
                for (int a3 : next->second) {
                    if (a3 == a1 || pre.areas[a3].train == pre.areas[a1].train) continue;
                    if (pre.areas[a3].resource != pre.areas[a1].resource) continue;
                    auto s13 = m.seq.find({a1, a3});
                    if (s13 == m.seq.end()) continue;
                    add_clause(m, {neg_lit(m.seq.at({a1, a2})), neg_lit(m.seq.at({a2, a3})), pos_lit(s13->second)});
                }
            }
        }
    }
}

void encode_heuristic(const PreprocessedInstance& pre, bool hs, ConstraintModel& m) {
    if (!hs) return;
    for (const auto& [key, var] : m.seq) {
        const ResourceArea& a = pre.areas[key.first];
        const ResourceArea& b = pre.areas[key.second];
        Seconds s = sequence_score(a.entry, a.exit, b.entry, b.exit);
        if (s != 0) m.hints.push_back({var, s > 0});
    }
}

ConstraintModel encode(const PreprocessedInstance& pre, const ThresholdSet& thresholds, const EncodeOptions& opts) {
    ConstraintModel m;
    encode_routing(pre, m);
    encode_conflicts(pre, m);
    encode_schedule(pre, m);
    build_objective(pre, thresholds, m);
    encode_optional(pre, opts, m);
    encode_heuristic(pre, opts.hs, m);
    return m;
}

}  // namespace railsched
