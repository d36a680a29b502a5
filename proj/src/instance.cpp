#include "railsched/instance.hpp"

#include "railsched/graph.hpp"
#include "railsched/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace railsched {

const TrainLine* Instance::find_train(const Symbol& id) const {
    auto it = std::lower_bound(trains.begin(), trains.end(), id, [](const TrainLine& t, const Symbol& s) { return t.id < s; });
    return (it != trains.end() && it->id == id) ? &*it : nullptr;
}

int Instance::train_index(const Symbol& id) const {
    const TrainLine* t = find_train(id);
    return t ? static_cast<int>(t - trains.data()) : -1;
}

namespace {

struct Term {
    enum class Kind { Int, Func, Tuple, Inf, Sup };
    Kind kind = Kind::Int;
    std::int64_t value = 0;
    std::string name;
    std::vector<Term> args;
    int line = 0;
    int column = 0;

    std::string text() const {
        switch (kind) {
        case Kind::Int: return std::to_string(value);
        case Kind::Inf: return "#inf";
        case Kind::Sup: return "#sup";
        case Kind::Func:
        case Kind::Tuple: {
            std::string out = name;
            if (kind == Kind::Tuple || !args.empty()) {
                out += '(';
                for (std::size_t i = 0; i < args.size(); ++i) {
                    if (i) out += ',';
                    out += args[i].text();
                }
                out += ')';
            }
            return out;
        }
        }
        return {};
    }
};

struct Fact {
    std::string predicate;
    std::vector<Term> args;
    int line = 0;
    int column = 0;
};

class FactReader {
public:
    explicit FactReader(std::string_view text) : text_(text) {}

    std::vector<Fact> read_all() {
        std::vector<Fact> facts;
        skip_space();
        while (pos_ < text_.size()) {
            facts.push_back(read_fact());
            skip_space();
        }
        return facts;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, column_); }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void expect(char c) {
        skip_space();
        if (peek() != c) {
            fail(std::string("expected '") + c + "'" + (pos_ < text_.size() ? std::string(" but found '") + peek() + "'" : " but reached end of input"));
        }
        advance();
    }

    std::string read_identifier() {
        std::string out;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
                out += c;
                advance();
            } else {
                break;
            }
        }
        return out;
    }

    Fact read_fact() {
        Fact fact;
        fact.line = line_;
        fact.column = column_;
        if (!std::islower(static_cast<unsigned char>(peek()))) {
            fail("expected predicate name");
        }
        fact.predicate = read_identifier();
        skip_space();
        if (peek() == '(') {
            fact.args = read_args();
        }
        expect('.');
        return fact;
    }

    std::vector<Term> read_args() {
        expect('(');
        std::vector<Term> args;
        skip_space();
        if (peek() == ')') {
            advance();
            return args;
        }
        for (;;) {
            args.push_back(read_term());
            skip_space();
            if (peek() == ',') {
                advance();
                continue;
            }
            expect(')');
            return args;
        }
    }

    Term read_term() {
        skip_space();
        Term term;
        term.line = line_;
        term.column = column_;
        char c = peek();
        if (c == '(') {
            term.kind = Term::Kind::Tuple;
            term.args = read_args();
            return term;
        }
        if (c == '#') {
            advance();
            std::string word = read_identifier();
            if (word == "inf") {
                term.kind = Term::Kind::Inf;
            } else if (word == "sup") {
                term.kind = Term::Kind::Sup;
            } else {
                fail("unknown token '#" + word + "'");
            }
            return term;
        }
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
            bool negative = c == '-';
            if (negative) advance();
            if (!std::isdigit(static_cast<unsigned char>(peek()))) {
                fail("expected digit");
            }
            std::int64_t value = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                if (value > (std::numeric_limits<std::int64_t>::max() - 9) / 10) {
                    fail("integer out of range");
                }
                value = value * 10 + (peek() - '0');
                advance();
            }
            term.kind = Term::Kind::Int;
            term.value = negative ? -value : value;
            return term;
        }
        if (std::islower(static_cast<unsigned char>(c))) {
            term.kind = Term::Kind::Func;
            term.name = read_identifier();
            skip_space();
            if (peek() == '(') {
                term.args = read_args();
            }
            return term;
        }
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

[[noreturn]] void fail_at(const Term& t, const std::string& what) { throw ParseError(what, t.line, t.column); }
[[noreturn]] void fail_at(const Fact& f, const std::string& what) { throw ParseError(what, f.line, f.column); }

Symbol as_symbol(const Term& t) {
    if (t.kind == Term::Kind::Int || t.kind == Term::Kind::Func) {
        return Symbol(t.text());
    }
    fail_at(t, "expected a symbol but found '" + t.text() + "'");
}

Edge as_edge(const Term& t) {
    if (t.kind != Term::Kind::Tuple || t.args.size() != 2) {
        fail_at(t, "expected an edge pair (v,v') but found '" + t.text() + "'");
    }
    return {as_symbol(t.args[0]), as_symbol(t.args[1])};
}

Seconds as_seconds(const Term& t) {
    if (t.kind != Term::Kind::Int || t.value < 0) {
        fail_at(t, "expected a non-negative integer but found '" + t.text() + "'");
    }
    return t.value;
}

// Infinity tokens resolve by position: an upper bound is +inf, a lower bound -inf.
Seconds as_bound(const Term& t, bool upper) {
    if (t.kind == Term::Kind::Inf || t.kind == Term::Kind::Sup) {
        return upper ? kPosInf : kNegInf;
    }
    if (t.kind != Term::Kind::Int) {
        fail_at(t, "expected an integer, #inf or #sup but found '" + t.text() + "'");
    }
    return t.value;
}

struct Arity {
    std::string_view name;
    std::size_t arity;
};

constexpr Arity kPredicates[] = {
    {"tl", 1},       {"edge", 3},     {"m", 2},         {"w", 3},      {"e", 3},        {"l", 3},    {"start", 2},
    {"end", 2},      {"resource", 2}, {"b", 2},         {"connection", 9}, {"free", 6}, {"potlate", 4}, {"penalty", 2},
    {"ra", 4},       {"e_ra", 4},     {"l_ra", 4},      {"set", 2},
};

template <class Map, class Key, class Value>
void insert_unique(Map& map, const Key& key, const Value& value, const Fact& fact, const std::string& what) {
    auto [it, inserted] = map.emplace(key, value);
    if (!inserted && !(it->second == value)) {
        fail_at(fact, "conflicting " + what);
    }
}

}  // namespace

Instance parse_instance(std::string_view text) {
    std::vector<Fact> facts = FactReader(text).read_all();

    for (const Fact& f : facts) {
        auto it = std::find_if(std::begin(kPredicates), std::end(kPredicates), [&](const Arity& a) { return a.name == f.predicate; });
        if (it == std::end(kPredicates)) {
            fail_at(f, "unknown predicate '" + f.predicate + "/" + std::to_string(f.args.size()) + "'");
        }
        if (it->arity != f.args.size()) {
            fail_at(f, "predicate '" + f.predicate + "' expects " + std::to_string(it->arity) + " arguments, got " +
                           std::to_string(f.args.size()));
        }
    }

    Instance inst;
    std::map<Symbol, TrainLine> trains;
    auto train_of = [&](const Fact& f, const Term& t) -> TrainLine& {
        Symbol id = as_symbol(t);
        auto it = trains.find(id);
        if (it == trains.end()) {
            fail_at(f, "reference to unknown train '" + id.str() + "'");
        }
        return it->second;
    };
    auto by_pred = [&](std::string_view name, auto&& fn) {
        for (const Fact& f : facts) {
            if (f.predicate == name) fn(f);
        }
    };

    by_pred("tl", [&](const Fact& f) {
        Symbol id = as_symbol(f.args[0]);
        trains[id].id = id;
    });
    by_pred("edge", [&](const Fact& f) {
        TrainLine& t = train_of(f, f.args[0]);
        Edge e{as_symbol(f.args[1]), as_symbol(f.args[2])};
        t.edges.insert(e);
        t.nodes.insert(e.from);
        t.nodes.insert(e.to);
    });
    by_pred("m", [&](const Fact& f) {
        Edge e = as_edge(f.args[0]);
        insert_unique(inst.network.travel_time, e, as_seconds(f.args[1]), f, "travel time for " + to_string(e));
        inst.network.edges.insert(e);
        inst.network.nodes.insert(e.from);
        inst.network.nodes.insert(e.to);
    });
    by_pred("start", [&](const Fact& f) {
        TrainLine& t = train_of(f, f.args[0]);
        Symbol v = as_symbol(f.args[1]);
        t.starts.insert(v);
        t.nodes.insert(v);
    });
    by_pred("end", [&](const Fact& f) {
        TrainLine& t = train_of(f, f.args[0]);
        Symbol v = as_symbol(f.args[1]);
        t.ends.insert(v);
        t.nodes.insert(v);
    });
    auto node_of = [&](const TrainLine& t, const Term& term) {
        Symbol v = as_symbol(term);
        if (!t.nodes.contains(v)) {
            fail_at(term, "node '" + v.str() + "' is not part of train '" + t.id.str() + "'");
        }
        return v;
    };
    by_pred("e", [&](const Fact& f) {
        TrainLine& t = train_of(f, f.args[0]);
        insert_unique(t.earliest, node_of(t, f.args[1]), as_seconds(f.args[2]), f, "earliest time");
    });
    by_pred("l", [&](const Fact& f) {
        TrainLine& t = train_of(f, f.args[0]);
        Seconds l = as_bound(f.args[2], true);
        if (l == kNegInf || (is_finite(l) && l < 0)) {
            fail_at(f.args[2], "latest time must be non-negative");
        }
        insert_unique(t.latest, node_of(t, f.args[1]), l, f, "latest time");
    });
    by_pred("w", [&](const Fact& f) {
        TrainLine& t = train_of(f, f.args[0]);
        Edge e = as_edge(f.args[1]);
        if (!t.edges.contains(e)) {
            fail_at(f.args[1], "edge " + to_string(e) + " is not part of train '" + t.id.str() + "'");
        }
        insert_unique(t.wait, e, as_seconds(f.args[2]), f, "waiting time");
    });
    by_pred("resource", [&](const Fact& f) {
        Symbol r = as_symbol(f.args[0]);
        Edge e = as_edge(f.args[1]);
        if (!inst.network.edges.contains(e)) {
            fail_at(f.args[1], "resource '" + r.str() + "' on unknown edge " + to_string(e));
        }
        inst.network.resources[r].insert(e);
    });
    by_pred("b", [&](const Fact& f) {
        Symbol r = as_symbol(f.args[0]);
        if (!inst.network.resources.contains(r)) {
            fail_at(f, "blocked time for unknown resource '" + r.str() + "'");
        }
        insert_unique(inst.network.blocked_time, r, as_seconds(f.args[1]), f, "blocked time");
    });

    for (auto& [id, t] : trains) {
        if (t.nodes.empty()) {
            throw ParseError("train '" + id.str() + "' has no edges, start or end nodes", 0, 0);
        }
        for (const Edge& e : t.edges) {
            if (!inst.network.travel_time.contains(e)) {
                throw ParseError("edge " + to_string(e) + " of train '" + id.str() + "' has no travel time (m fact)", 0, 0);
            }
            if (!t.wait.contains(e)) {
                throw ParseError("edge " + to_string(e) + " of train '" + id.str() + "' has no waiting time (w fact)", 0, 0);
            }
        }
        std::map<Symbol, int> in_degree, out_degree;
        for (const Edge& e : t.edges) {
            ++out_degree[e.from];
            ++in_degree[e.to];
        }
        for (const Symbol& v : t.nodes) {
            if (!t.earliest.contains(v)) {
                throw ParseError("node '" + v.str() + "' of train '" + id.str() + "' has no earliest time (e fact)", 0, 0);
            }
            if (!t.latest.contains(v)) {
                throw ParseError("node '" + v.str() + "' of train '" + id.str() + "' has no latest time (l fact)", 0, 0);
            }
            bool is_start = in_degree[v] == 0;
            bool is_end = out_degree[v] == 0;
            if (t.starts.contains(v) != is_start) {
                throw ParseError("start declaration of node '" + v.str() + "' in train '" + id.str() +
                                     "' disagrees with its in-degree " + std::to_string(in_degree[v]),
                                 0, 0);
            }
            if (t.ends.contains(v) != is_end) {
                throw ParseError("end declaration of node '" + v.str() + "' in train '" + id.str() +
                                     "' disagrees with its out-degree " + std::to_string(out_degree[v]),
                                 0, 0);
            }
        }
        inst.network.nodes.insert(t.nodes.begin(), t.nodes.end());
    }
    for (const auto& [r, edges] : inst.network.resources) {
        if (!inst.network.blocked_time.contains(r)) {
            throw ParseError("resource '" + r.str() + "' has no blocked time (b fact)", 0, 0);
        }
    }
    for (const auto& [id, t] : trains) {
        inst.trains.push_back(t);
    }

    std::set<Symbol> connection_ids;
    by_pred("connection", [&](const Fact& f) {
        Connection c;
        c.id = as_symbol(f.args[0]);
        c.train = train_of(f, f.args[1]).id;
        c.edge = as_edge(f.args[2]);
        c.other = train_of(f, f.args[3]).id;
        c.other_edge = as_edge(f.args[4]);
        c.alpha = as_bound(f.args[5], false);
        c.omega = as_bound(f.args[6], true);
        c.node = as_symbol(f.args[7]);
        c.other_node = as_symbol(f.args[8]);
        if (!connection_ids.insert(c.id).second) {
            fail_at(f, "duplicate connection id '" + c.id.str() + "'");
        }
        inst.connections.push_back(std::move(c));
    });
    std::sort(inst.connections.begin(), inst.connections.end(), [](const Connection& a, const Connection& b) { return a.id < b.id; });
    by_pred("free", [&](const Fact& f) {
        CollisionFreePoint p;
        p.connection = as_symbol(f.args[0]);
        if (!connection_ids.contains(p.connection)) {
            fail_at(f, "collision-free point for unknown connection '" + p.connection.str() + "'");
        }
        p.train = train_of(f, f.args[1]).id;
        p.edge = as_edge(f.args[2]);
        p.other = train_of(f, f.args[3]).id;
        p.other_edge = as_edge(f.args[4]);
        p.resource = as_symbol(f.args[5]);
        if (!inst.network.resources.contains(p.resource)) {
            fail_at(f.args[5], "collision-free point on unknown resource '" + p.resource.str() + "'");
        }
        inst.free_points.push_back(std::move(p));
    });
    std::sort(inst.free_points.begin(), inst.free_points.end());
    inst.free_points.erase(std::unique(inst.free_points.begin(), inst.free_points.end()), inst.free_points.end());

    by_pred("potlate", [&](const Fact& f) {
        const TrainLine& t = train_of(f, f.args[0]);
        Symbol v = node_of(t, f.args[1]);
        inst.objective.thresholds[{t.id, v}].push_back({as_seconds(f.args[2]), as_seconds(f.args[3])});
    });
    for (auto& [key, list] : inst.objective.thresholds) {
        std::stable_sort(list.begin(), list.end(), [](const Threshold& a, const Threshold& b) { return a.at < b.at; });
    }
    by_pred("penalty", [&](const Fact& f) {
        Edge e = as_edge(f.args[0]);
        if (!inst.network.edges.contains(e)) {
            fail_at(f.args[0], "route penalty on unknown edge " + to_string(e));
        }
        insert_unique(inst.objective.route_penalty, e, as_seconds(f.args[1]), f, "route penalty");
    });

    auto area_key = [&](const Fact& f) {
        Symbol t = train_of(f, f.args[0]).id;
        Symbol r = as_symbol(f.args[1]);
        if (!inst.network.resources.contains(r)) {
            fail_at(f.args[1], "resource area over unknown resource '" + r.str() + "'");
        }
        return std::tuple{t, r, as_symbol(f.args[2])};
    };
    by_pred("ra", [&](const Fact& f) {
        auto key = area_key(f);
        inst.precomputed.areas[key].edges.insert(as_edge(f.args[3]));
    });
    by_pred("e_ra", [&](const Fact& f) {
        auto key = area_key(f);
        auto it = inst.precomputed.areas.find(key);
        if (it == inst.precomputed.areas.end()) {
            fail_at(f, "e_ra for an area without ra facts");
        }
        it->second.entry = as_seconds(f.args[3]);
    });
    by_pred("l_ra", [&](const Fact& f) {
        auto key = area_key(f);
        auto it = inst.precomputed.areas.find(key);
        if (it == inst.precomputed.areas.end()) {
            fail_at(f, "l_ra for an area without ra facts");
        }
        it->second.exit = as_bound(f.args[3], true);
    });
    by_pred("set", [&](const Fact& f) {
        const TrainLine& t = train_of(f, f.args[0]);
        Edge e = as_edge(f.args[1]);
        if (!t.edges.contains(e)) {
            fail_at(f.args[1], "mandatory edge " + to_string(e) + " is not part of train '" + t.id.str() + "'");
        }
        inst.precomputed.mandatory_edges[t.id].insert(e);
    });
    return inst;
}

Instance read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open instance file '" + path + "'", 0, 0);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_instance(buffer.str());
}

std::string format_time(Seconds s, bool upper) {
    if (s == kPosInf) {
        return upper ? "#sup" : "#inf";
    }
    if (s == kNegInf) {
        return "#inf";
    }
    return std::to_string(s);
}

std::string serialize_instance(const Instance& inst) {
    std::ostringstream out;
    auto edge_text = [](const Edge& e) { return to_string(e); };

    for (const TrainLine& t : inst.trains) {
        out << "tl(" << t.id << ").\n";
    }
    for (const TrainLine& t : inst.trains) {
        for (const Edge& e : t.edges) {
            out << "edge(" << t.id << "," << e.from << "," << e.to << ").\n";
        }
        for (const Edge& e : t.edges) {
            out << "w(" << t.id << "," << edge_text(e) << "," << t.wait.at(e) << ").\n";
        }
        for (const Symbol& v : t.nodes) {
            out << "e(" << t.id << "," << v << "," << t.earliest.at(v) << "). ";
            out << "l(" << t.id << "," << v << "," << format_time(t.latest.at(v), true) << ").\n";
        }
        for (const Symbol& v : t.starts) {
            out << "start(" << t.id << "," << v << ").\n";
        }
        for (const Symbol& v : t.ends) {
            out << "end(" << t.id << "," << v << ").\n";
        }
    }
    for (const auto& [e, m] : inst.network.travel_time) {
        out << "m(" << edge_text(e) << "," << m << ").\n";
    }
    for (const auto& [r, edges] : inst.network.resources) {
        for (const Edge& e : edges) {
            out << "resource(" << r << "," << edge_text(e) << ").\n";
        }
    }
    for (const auto& [r, b] : inst.network.blocked_time) {
        out << "b(" << r << "," << b << ").\n";
    }
    for (const Connection& c : inst.connections) {
        // The upper window bound uses the #inf spelling of the original fact files.
        out << "connection(" << c.id << "," << c.train << "," << edge_text(c.edge) << "," << c.other << "," << edge_text(c.other_edge)
            << "," << format_time(c.alpha, false) << "," << (c.omega == kPosInf ? "#inf" : format_time(c.omega, true)) << ","
            << c.node << "," << c.other_node << ").\n";
    }
    for (const CollisionFreePoint& p : inst.free_points) {
        out << "free(" << p.connection << "," << p.train << "," << edge_text(p.edge) << "," << p.other << "," << edge_text(p.other_edge)
            << "," << p.resource << ").\n";
    }
    for (const auto& [key, list] : inst.objective.thresholds) {
        for (const Threshold& th : list) {
            out << "potlate(" << key.first << "," << key.second << "," << th.at << "," << th.weight << ").\n";
        }
    }
    for (const auto& [e, p] : inst.objective.route_penalty) {
        out << "penalty(" << edge_text(e) << "," << p << ").\n";
    }
    for (const auto& [key, area] : inst.precomputed.areas) {
        const auto& [t, r, a] = key;
        for (const Edge& e : area.edges) {
            out << "ra(" << t << "," << r << "," << a << "," << edge_text(e) << ").\n";
        }
        if (area.entry) {
            out << "e_ra(" << t << "," << r << "," << a << "," << *area.entry << ").\n";
        }
        if (area.exit) {
            out << "l_ra(" << t << "," << r << "," << a << "," << format_time(*area.exit, true) << ").\n";
        }
    }
    for (const auto& [t, edges] : inst.precomputed.mandatory_edges) {
        for (const Edge& e : edges) {
            out << "set(" << t << "," << edge_text(e) << ").\n";
        }
    }
    return out.str();
}

std::optional<Seconds> effective_delay_start(const Instance& inst, const Symbol& train, const Symbol& node) {
    TrainNode key{train, node};
    if (auto it = inst.objective.delay_start.find(key); it != inst.objective.delay_start.end()) {
        return it->second;
    }
    if (auto it = inst.objective.thresholds.find(key); it != inst.objective.thresholds.end() && !it->second.empty()) {
        const Threshold& first = it->second.front();
        return first.at - first.weight;
    }
    return std::nullopt;
}

}  // namespace railsched

namespace railsched {

namespace {

class Reporter {
public:
    void add(std::string invariant, std::string detail) { out_.push_back({std::move(invariant), std::move(detail)}); }
    std::vector<ViolationReport> take() { return std::move(out_); }

private:
    std::vector<ViolationReport> out_;
};

std::string train_edge(const Symbol& t, const Edge& e) { return t.str() + " " + to_string(e); }

void validate_train(const Instance& inst, const TrainLine& t, Reporter& rep) {
    TrainGraph g(t);
    for (const Edge& e : t.edges) {
        if (!inst.network.edges.contains(e)) {
            rep.add("train edges are network edges", train_edge(t.id, e));
        }
        if (!t.nodes.contains(e.from) || !t.nodes.contains(e.to)) {
            rep.add("train edge endpoints are train nodes", train_edge(t.id, e));
        }
        auto w = t.wait.find(e);
        if (w == t.wait.end() || w->second < 0) {
            rep.add("waiting time defined and non-negative", train_edge(t.id, e));
        }
    }
    if (!g.topological_order()) {
        rep.add("train subgraph is acyclic", "train " + t.id.str());
    }
    std::set<Symbol> starts, ends;
    for (const Symbol& v : t.nodes) {
        if (g.pred.at(v).empty()) starts.insert(v);
        if (g.succ.at(v).empty()) ends.insert(v);
        auto e = t.earliest.find(v);
        auto l = t.latest.find(v);
        if (e == t.earliest.end() || l == t.latest.end()) {
            rep.add("time window defined", "train " + t.id.str() + " node " + v.str());
        } else if (e->second > l->second) {
            rep.add("e(v) <= l(v)", "train " + t.id.str() + " node " + v.str() + ": " + std::to_string(e->second) + " > " +
                                        format_time(l->second, true));
        }
    }
    if (starts != t.starts || starts.empty()) {
        rep.add("starts are exactly the in-degree 0 nodes", "train " + t.id.str());
    }
    if (ends != t.ends || ends.empty()) {
        rep.add("ends are exactly the out-degree 0 nodes", "train " + t.id.str());
    }
}

void validate_connection(const Instance& inst, const Connection& c, Reporter& rep) {
    std::string who = "connection " + c.id.str();
    const TrainLine* t = inst.find_train(c.train);
    const TrainLine* u = inst.find_train(c.other);
    if (!t || !u) {
        rep.add("connection trains exist", who);
        return;
    }
    if (c.train == c.other) {
        rep.add("connection joins two different trains", who);
    }
    if (!t->edges.contains(c.edge)) {
        rep.add("connection edge belongs to its train", who + ": " + train_edge(c.train, c.edge));
    }
    if (!u->edges.contains(c.other_edge)) {
        rep.add("connection edge belongs to its train", who + ": " + train_edge(c.other, c.other_edge));
    }
    if (c.node != c.edge.from && c.node != c.edge.to) {
        rep.add("connection node lies on its edge", who + ": node " + c.node.str());
    }
    if (c.other_node != c.other_edge.from && c.other_node != c.other_edge.to) {
        rep.add("connection node lies on its edge", who + ": node " + c.other_node.str());
    }
    if (c.alpha > c.omega) {
        rep.add("alpha <= omega", who);
    }
}

void validate_free_points(const Instance& inst, Reporter& rep) {
    std::set<CollisionFreePoint> all(inst.free_points.begin(), inst.free_points.end());
    for (const CollisionFreePoint& p : inst.free_points) {
        std::string who = "free point (" + p.connection.str() + "," + train_edge(p.train, p.edge) + "," +
                          train_edge(p.other, p.other_edge) + "," + p.resource.str() + ")";
        const TrainLine* t = inst.find_train(p.train);
        const TrainLine* u = inst.find_train(p.other);
        auto res = inst.network.resources.find(p.resource);
        if (!t || !u || res == inst.network.resources.end()) {
            rep.add("free point references resolve", who);
            continue;
        }
        const std::set<Edge>& a = res->second;
        if (!a.contains(p.edge) || !a.contains(p.other_edge)) {
            rep.add("free point edges carry its resource", who);
        }
        if (!t->edges.contains(p.edge) || !u->edges.contains(p.other_edge)) {
            rep.add("free point edges belong to the trains", who);
        }
        // closure: adjacent edges of the same resource must be listed too
        auto require = [&](const Edge& e1, const Edge& e2) {
            CollisionFreePoint q{p.connection, p.train, e1, p.other, e2, p.resource};
            if (!all.contains(q)) {
                rep.add("free points are closed under adjacent edges of the resource",
                        who + " requires " + to_string(e1) + "/" + to_string(e2));
            }
        };
        for (const Edge& e : t->edges) {
            if (a.contains(e) && e != p.edge && (e.to == p.edge.from || e.from == p.edge.to)) {
                require(e, p.other_edge);
            }
        }
        for (const Edge& e : u->edges) {
            if (a.contains(e) && e != p.other_edge && (e.to == p.other_edge.from || e.from == p.other_edge.to)) {
                require(p.edge, e);
            }
        }
    }
}

void validate_objective(const Instance& inst, Reporter& rep) {
    for (const auto& [key, list] : inst.objective.thresholds) {
        std::string who = "train " + key.first.str() + " node " + key.second.str();
        const TrainLine* t = inst.find_train(key.first);
        if (!t || !t->nodes.contains(key.second)) {
            rep.add("threshold references resolve", who);
            continue;
        }
        Seconds l = t->latest.at(key.second);
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i > 0 && list[i].at <= list[i - 1].at) {
                rep.add("thresholds strictly increasing", who + " at " + std::to_string(list[i].at));
            }
            if (list[i].at > l) {
                rep.add("thresholds not above l(v)", who + " at " + std::to_string(list[i].at));
            }
            if (list[i].weight < 1) {
                rep.add("threshold weights positive", who + " at " + std::to_string(list[i].at));
            }
        }
    }
    for (const auto& [key, d] : inst.objective.delay_start) {
        std::string who = "train " + key.first.str() + " node " + key.second.str();
        const TrainLine* t = inst.find_train(key.first);
        if (!t || !t->nodes.contains(key.second)) {
            rep.add("delay start references resolve", who);
            continue;
        }
        if (d < t->earliest.at(key.second) || d > t->latest.at(key.second)) {
            rep.add("e(v) <= d(t,v) <= l(v)", who);
        }
        auto it = inst.objective.thresholds.find(key);
        if (it != inst.objective.thresholds.end() && !it->second.empty() && d >= it->second.front().at) {
            rep.add("d(t,v) below the first threshold", who);
        }
    }
    for (const auto& [e, p] : inst.objective.route_penalty) {
        if (!inst.network.edges.contains(e)) {
            rep.add("route penalty on a network edge", to_string(e));
        }
    }
}

void validate_precomputed(const Instance& inst, Reporter& rep) {
    const PrecomputedFacts& pre = inst.precomputed;
    std::map<std::pair<Symbol, Symbol>, std::set<Edge>> covered;
    for (const auto& [key, area] : pre.areas) {
        const auto& [tid, r, a] = key;
        std::string who = "area (" + tid.str() + "," + r.str() + "," + a.str() + ")";
        const TrainLine* t = inst.find_train(tid);
        auto res = inst.network.resources.find(r);
        if (!t || res == inst.network.resources.end()) {
            rep.add("area references resolve", who);
            continue;
        }
        std::set<Edge>& cov = covered[{tid, r}];
        Seconds entry = kPosInf;
        Seconds exit = kNegInf;
        for (const Edge& e : area.edges) {
            if (!t->edges.contains(e) || !res->second.contains(e)) {
                rep.add("area edges lie in a(r) and L_t", who + " edge " + to_string(e));
                continue;
            }
            if (!cov.insert(e).second) {
                rep.add("areas of a coverage are disjoint", who + " edge " + to_string(e));
            }
            entry = std::min(entry, t->earliest.at(e.from));
            exit = std::max(exit, t->latest.at(e.to));
        }
        if (!is_resource_area(area.edges, res->second, *t)) {
            rep.add("area satisfies isRA", who);
        }
        if (area.entry && *area.entry != entry) {
            rep.add("e_ra is the minimal earliest entry", who + ": " + std::to_string(*area.entry) + " vs " + std::to_string(entry));
        }
        if (area.exit && *area.exit != exit) {
            rep.add("l_ra is the maximal latest exit", who + ": " + format_time(*area.exit, true) + " vs " + format_time(exit, true));
        }
    }
    if (pre.has_areas()) {
        for (const TrainLine& t : inst.trains) {
            for (const auto& [r, edges] : inst.network.resources) {
                std::set<Edge> need;
                for (const Edge& e : edges) {
                    if (t.edges.contains(e)) need.insert(e);
                }
                auto it = covered.find({t.id, r});
                if (!need.empty() && (it == covered.end() || it->second != need)) {
                    rep.add("coverage spans a(r) and L_t", "train " + t.id.str() + " resource " + r.str());
                }
            }
        }
    }
    for (const auto& [tid, edges] : pre.mandatory_edges) {
        const TrainLine* t = inst.find_train(tid);
        if (!t) {
            rep.add("mandatory edge references resolve", "train " + tid.str());
            continue;
        }
        if (!TrainGraph(*t).topological_order()) continue;
        std::set<Edge> truth = compute_mandatory_edges(*t);
        for (const Edge& e : edges) {
            if (!truth.contains(e)) {
                rep.add("set edges lie on every path", train_edge(tid, e));
            }
        }
    }
}

}  // namespace

std::vector<ViolationReport> validate_instance(const Instance& inst) {
    Reporter rep;
    const Network& n = inst.network;
    for (const Edge& e : n.edges) {
        if (!n.nodes.contains(e.from) || !n.nodes.contains(e.to)) {
            rep.add("edge endpoints are nodes", to_string(e));
        }
        auto m = n.travel_time.find(e);
        if (m == n.travel_time.end() || m->second < 0) {
            rep.add("travel time defined and non-negative", to_string(e));
        }
    }
    for (const auto& [r, edges] : n.resources) {
        for (const Edge& e : edges) {
            if (!n.edges.contains(e)) {
                rep.add("resource edges are network edges", r.str() + " " + to_string(e));
            }
        }
        auto b = n.blocked_time.find(r);
        if (b == n.blocked_time.end() || b->second < 0) {
            rep.add("blocked time defined and non-negative", r.str());
        }
    }
    for (const TrainLine& t : inst.trains) {
        validate_train(inst, t, rep);
    }
    for (const Connection& c : inst.connections) {
        validate_connection(inst, c, rep);
    }
    validate_free_points(inst, rep);
    validate_objective(inst, rep);
    validate_precomputed(inst, rep);
    return rep.take();
}

}  // namespace railsched
