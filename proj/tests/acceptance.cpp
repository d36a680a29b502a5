// Acceptance checks; prints one [PASS]/[FAIL] line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "railsched/diff_logic.hpp"
#include "railsched/generator.hpp"
#include "railsched/pipeline.hpp"

#ifndef RAILSCHED_FIXTURES
#define RAILSCHED_FIXTURES "tests/fixtures"
#endif

using namespace railsched;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

int failures = 0;

void report(const std::string& id, const std::string& what, const Verdict& v) {
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << id << " " << what;
    if (!v.detail.empty()) std::cout << " -- " << v.detail;
    std::cout << std::endl;
    if (!v.pass) ++failures;
}

std::string fixture(const std::string& name) { return std::string(RAILSCHED_FIXTURES) + "/" + name; }

std::vector<EncodeOptions> all_option_sets() {
    std::vector<EncodeOptions> out;
    for (int mask = 0; mask < 16; ++mask) {
        EncodeOptions o;
        o.hs = mask & 1;
        o.ol1 = mask & 2;
        o.ol2 = mask & 4;
        o.ac = mask & 8;
        out.push_back(o);
    }
    return out;
}

PipelineResult run(const Instance& inst, const EncodeOptions& enc, double limit = 60) {
    PipelineOptions o;
    o.encode = enc;
    o.solver.use_hints = enc.hs;
    o.solver.time_limit = limit;
    return solve_instance(inst, o);
}

Verdict criterion1() {
    Verdict v;
    Instance inst = read_instance_file(fixture("example.lp"));
    for (const EncodeOptions& o : all_option_sets()) {
        auto t0 = Clock::now();
        PipelineResult r = run(inst, o);
        double secs = since(t0);
        std::string tag = "[" + o.str() + "] ";
        if (r.status != SolveStatus::Optimal || !r.exact) {
            v.fail(tag + "status " + to_string(r.status));
            continue;
        }
        if (!(r.exact->delay_minutes == Rational{6, 1}) || r.exact->route_penalty != 0)
            v.fail(tag + "exact quality (" + r.exact->delay_minutes.str() + "," +
                   std::to_string(r.exact->route_penalty) + ")");
        if (!validate_solution(inst, *r.solution).empty()) v.fail(tag + "solution fails validation");
        if (secs >= 1.0) v.fail(tag + "took " + std::to_string(secs) + "s");
    }
    if (v.pass) v.detail = "16 option sets, exact (6,0), each < 1s";
    return v;
}

Verdict criterion2() {
    Verdict v;
    auto t0 = Clock::now();
    Instance inst = read_instance_file(fixture("example_full.lp"));
    PreprocessedInstance pre = preprocess(inst);
    std::set<Symbol> sw2_singletons, sw1_singletons;
    for (const char* r : {"r(8,10)", "r(9,10)", "r(10,7)", "r(10,11)", "r(10,12)"}) sw2_singletons.insert(Symbol(r));
    for (const char* r : {"r(1,3)", "r(2,3)", "r(3,5)", "r(4,3)", "r(3,6)"}) sw1_singletons.insert(Symbol(r));
    if (pre.removed != sw2_singletons) v.fail("subsumed set differs");
    for (const Symbol& r : sw1_singletons)
        if (!pre.reduced.network.resources.count(r)) v.fail("sw1 singleton " + r.str() + " removed");
    if (pre.stats.subsumed != 5) v.fail("#sr " + std::to_string(pre.stats.subsumed));
    if (pre.stats.area_conflicts != 5) v.fail("#rac " + std::to_string(pre.stats.area_conflicts));
    if (pre.stats.edge_conflicts != 15) v.fail("#ec " + std::to_string(pre.stats.edge_conflicts));
    int t1 = pre.reduced.train_index(Symbol("t1"));
    std::size_t nodes = pre.reduced.trains[t1].nodes.size();
    int heights = pre.trains[t1].heights.var_count;
    if (nodes != 8 || heights != 6)
        v.fail("t1 variables " + std::to_string(nodes) + " -> " + std::to_string(heights));

    // shipped area facts must agree
    PreprocessedInstance listed = preprocess(read_instance_file(fixture("example.lp")));
    if (listed.stats.area_conflicts != 5 || listed.stats.edge_conflicts != 15) v.fail("statistics with shipped areas differ");
    double secs = since(t0);
    if (secs >= 1.0) v.fail("took " + std::to_string(secs) + "s");
    if (v.pass) v.detail = "#sr=5 (sw2 singletons), #rac=5, #ec=15, t1 8->6";
    return v;
}

Verdict criterion3() {
    Verdict v;
    auto w = weigh_thresholds(5, {6, 10, 14});
    std::vector<Threshold> expect{{6, 1}, {10, 4}, {14, 4}};
    if (w != expect) v.fail("weights differ");
    if (threshold_penalty(w, 12) != 5) v.fail("penalty at 12 is " + std::to_string(threshold_penalty(w, 12)));
    if (gen_linear(0, 900, 180).size() != 6) v.fail("linear:180 over 900s does not give six thresholds");
    if (v.pass) v.detail = "(6,1),(10,4),(14,4); penalty(12)=5";
    return v;
}

Verdict criterion4() {
    Verdict v;
    // windows at node 3: t1 [300,600], t2 [180,540]
    Seconds s = sequence_score(300, 600, 180, 540);
    if (s != -180) v.fail("s = " + std::to_string(s));

    Instance inst = read_instance_file(fixture("example.lp"));
    PreprocessedInstance pre = preprocess(inst);
    ThresholdSet th = derive_thresholds(inst, std::nullopt);
    EncodeOptions o;
    o.hs = true;
    ConstraintModel m = encode(pre, th, o);
    int a1 = -1, a2 = -1;
    for (std::size_t i = 0; i < pre.areas.size(); ++i) {
        if (pre.areas[i].resource != Symbol("sw1")) continue;
        if (pre.areas[i].train == Symbol("t1")) a1 = static_cast<int>(i);
        if (pre.areas[i].train == Symbol("t2")) a2 = static_cast<int>(i);
    }
    // hint direction: t2's area before t1's
    bool t2_first = false, t1_first_off = false;
    for (const Hint& h : m.hints) {
        if (h.var == m.seq.at({a2, a1}) && h.positive) t2_first = true;
        if (h.var == m.seq.at({a1, a2}) && !h.positive) t1_first_off = true;
    }
    if (!t2_first || !t1_first_off) v.fail("hints do not prefer t2 before t1 at sw1");
    if (v.pass) v.detail = "s=-180, t2 first";
    return v;
}

struct OracleCase {
    std::uint64_t seed;
    Instance inst;
    OracleResult oracle;
};

std::vector<OracleCase> oracle_cases(std::size_t count) {
    std::vector<OracleCase> out;
    for (std::uint64_t seed = 1; out.size() < count && seed < 100000; ++seed) {
        std::mt19937_64 rng(seed * 7919);
        GenParams p;
        p.seed = seed;
        p.trains = std::uniform_int_distribution<int>(2, 3)(rng);
        p.nodes = std::uniform_int_distribution<int>(5, 8)(rng);
        p.multi_resources = std::uniform_int_distribution<int>(0, 2)(rng);
        p.connections = 1;
        Instance inst = generate_instance(p);
        try {
            OracleResult r = brute_force_solve(inst, derive_thresholds(inst, std::nullopt), 200'000);
            out.push_back({seed, std::move(inst), std::move(r)});
        } catch (const BudgetExceeded&) {
        }
    }
    return out;
}

std::string obj_str(const std::optional<Objective>& o) {
    if (!o) return "infeasible";
    return "(" + std::to_string(o->first) + "," + std::to_string(o->second) + ")";
}

std::optional<Objective> solver_objective(const PipelineResult& r) {
    if (r.status != SolveStatus::Optimal || !r.solution) return std::nullopt;
    return r.solution->approx_quality;
}

Verdict criterion5(const std::vector<OracleCase>& cases) {
    Verdict v;
    auto t0 = Clock::now();
    int feasible = 0, delayed = 0, routed = 0, connected = 0, freed = 0;
    std::uint64_t combinations = 0;
    for (const OracleCase& c : cases) {
        combinations += c.oracle.combinations;
        if (c.oracle.objective && c.oracle.objective->first > 0) ++delayed;
        if (c.oracle.objective && c.oracle.objective->second > 0) ++routed;
        if (!c.inst.connections.empty()) ++connected;
        if (!c.inst.free_points.empty()) ++freed;
        PipelineResult r = run(c.inst, EncodeOptions{});
        if (r.status != SolveStatus::Optimal && r.status != SolveStatus::Infeasible) {
            v.fail("seed " + std::to_string(c.seed) + ": status " + to_string(r.status));
            continue;
        }
        auto got = solver_objective(r);
        if (got != c.oracle.objective)
            v.fail("seed " + std::to_string(c.seed) + ": solver " + obj_str(got) + " oracle " + obj_str(c.oracle.objective));
        if (r.solution) {
            ++feasible;
            auto issues = validate_solution(c.inst, *r.solution);
            if (!issues.empty())
                v.fail("seed " + std::to_string(c.seed) + ": condition " + issues[0].condition + " " + issues[0].detail);
            Objective recomputed = approx_quality(c.inst, derive_thresholds(c.inst, std::nullopt), *r.solution);
            if (got && recomputed != *got) v.fail("seed " + std::to_string(c.seed) + ": schedule objective mismatch");
        }
    }
    double secs = since(t0);
    if (cases.size() < 100) v.fail("only " + std::to_string(cases.size()) + " in-budget instances");
    if (secs >= 300) v.fail("took " + std::to_string(secs) + "s");
    if (v.pass)
        v.detail = std::to_string(cases.size()) + " instances: " + std::to_string(feasible) + " feasible, " +
                   std::to_string(delayed) + " delayed, " + std::to_string(routed) + " route-penalized, " +
                   std::to_string(connected) + " with connections, " + std::to_string(freed) +
                   " with free points, " + std::to_string(combinations) + " oracle combinations, " +
                   std::to_string(secs) + "s";
    return v;
}

Verdict criterion6() {
    Verdict v;
    std::mt19937_64 rng(20240601);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    int consistent = 0;
    for (int round = 0; round < 10000 && v.pass; ++round) {
        int n = uni(2, 30);
        int k = uni(1, 120);
        DiffSystem dl;
        for (int x = 0; x < n; ++x) dl.ensure_var(x);
        std::vector<DiffConstraint> active;
        std::vector<std::pair<DiffSystem::Mark, std::size_t>> marks;
        for (int i = 0; i < k; ++i) {
            int op = uni(0, 9);
            if (op == 0) {
                marks.push_back({dl.checkpoint(), active.size()});
                continue;
            }
            if (op == 1 && !marks.empty()) {
                std::size_t depth = static_cast<std::size_t>(uni(0, static_cast<int>(marks.size()) - 1));
                dl.retract_to(marks[depth].first);
                active.resize(marks[depth].second);
                marks.resize(depth);
                continue;
            }
            DiffConstraint c{uni(0, n - 1), uni(0, n - 1), uni(-100, 100), i};
            std::vector<int> expl;
            bool ok = dl.assert_constraint(c, &expl);
            std::vector<DiffConstraint> with = active;
            with.push_back(c);
            bool oracle_ok = bellman_ford_minimal(n, with).has_value();
            if (ok != oracle_ok) {
                v.fail("round " + std::to_string(round) + ": verdict mismatch");
                break;
            }
            if (ok) {
                active = std::move(with);
                ++consistent;
            }
            auto expect = bellman_ford_minimal(n, active);
            DiffModel got = dl.minimal_model();
            for (int x = 0; x < n; ++x) {
                if (expect->bounded[x] != got.bounded[x] || (expect->bounded[x] && expect->value[x] != got.value[x])) {
                    v.fail("round " + std::to_string(round) + ": minimal model differs at x" + std::to_string(x));
                    break;
                }
            }
        }
    }
    if (v.pass) v.detail = "10000 systems, " + std::to_string(consistent) + " consistent assertions";
    return v;
}

Verdict criterion7(const std::vector<OracleCase>& cases) {
    Verdict v;
    for (const OracleCase& c : cases) {
        std::optional<std::optional<Objective>> base;
        for (int mask = 0; mask < 8; ++mask) {
            EncodeOptions o;
            o.ol1 = mask & 1;
            o.ol2 = mask & 2;
            o.ac = mask & 4;
            PipelineResult r = run(c.inst, o);
            auto got = solver_objective(r);
            if (!base) {
                base = got;
            } else if (*base != got) {
                v.fail("seed " + std::to_string(c.seed) + " [" + o.str() + "]: " + obj_str(got) + " vs " + obj_str(*base));
            }
        }
    }
    if (v.pass) v.detail = std::to_string(cases.size()) + " instances x 8 option sets";
    return v;
}

Verdict criterion8() {
    Verdict v;
    std::ostringstream summary;
    EncodeOptions on;
    on.hs = on.ol2 = on.ac = true;
    for (int trains = 2; trains <= 6; ++trains) {
        std::vector<double> ratios;
        for (std::uint64_t seed = 1; seed <= 15; ++seed) {
            GenParams p;
            p.trains = trains;
            p.nodes = 6 + trains;
            p.multi_resources = 2;
            p.connections = 1;
            p.seed = 1000 * trains + seed;
            Instance inst = generate_instance(p);
            PipelineResult a = run(inst, EncodeOptions{}, 20);
            PipelineResult b = run(inst, on, 20);
            if (a.status != SolveStatus::Optimal || b.status != SolveStatus::Optimal) continue;
            double ca = static_cast<double>(a.stats.choices) + 1;
            double cb = static_cast<double>(b.stats.choices) + 1;
            ratios.push_back(cb / ca);
        }
        if (ratios.empty()) {
            v.fail(std::to_string(trains) + " trains: no instance solved");
            continue;
        }
        std::sort(ratios.begin(), ratios.end());
        double median = ratios[ratios.size() / 2];
        if (ratios.size() % 2 == 0) median = (ratios[ratios.size() / 2 - 1] + median) / 2;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%d:%.2f ", trains, median);
        summary << buf;
        if (median > 2.0) v.fail(std::to_string(trains) + " trains: median choice ratio " + std::to_string(median));
    }
    v.detail = (v.pass ? "" : v.detail + "; ") + "median ratio per train count " + summary.str() + "(limit 2.0)";
    return v;
}

}  // namespace

int main() {
    report("C1", "example end-to-end, all option sets", criterion1());
    report("C2", "example preprocessing statistics", criterion2());
    report("C3", "linear threshold weights", criterion3());
    report("C4", "sequence heuristic score and direction", criterion4());
    auto cases = oracle_cases(100);
    report("C5", "solver equals brute-force oracle on generated instances", criterion5(cases));
    report("C6", "difference-logic engine vs from-scratch oracle", criterion6());
    report("C7", "ol1/ol2/ac never change the optimum", criterion7(cases));
    report("C8", "hs+ol2+ac choice counts vs defaults (median factor <= 2)", criterion8());
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
