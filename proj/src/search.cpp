#include "railsched/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace railsched {

SearchStats& SearchStats::operator+=(const SearchStats& o) {
    choices += o.choices;
    conflicts += o.conflicts;
    restarts += o.restarts;
    learned += o.learned;
    models += o.models;
    seconds += o.seconds;
    return *this;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::SatBound: return "sat_bound";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

enum class Result { Sat, Unsat, Interrupted };

// Luby sequence 1,1,2,1,1,2,4,...
double luby(double y, int x) {
    int size = 1, seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    return std::pow(y, seq);
}

class VarHeap {
public:
    explicit VarHeap(const std::vector<double>& act) : act_(act) {}

    bool empty() const { return heap_.empty(); }
    bool contains(int v) const { return v < static_cast<int>(pos_.size()) && pos_[v] >= 0; }

    void insert(int v) {
        if (v >= static_cast<int>(pos_.size())) pos_.resize(v + 1, -1);
        if (pos_[v] >= 0) return;
        pos_[v] = static_cast<int>(heap_.size());
        heap_.push_back(v);
        up(pos_[v]);
    }

    void increased(int v) {
        if (contains(v)) up(pos_[v]);
    }

    int pop() {
        int top = heap_.front();
        int last = heap_.back();
        heap_.pop_back();
        pos_[top] = -1;
        if (!heap_.empty()) {
            heap_[0] = last;
            pos_[last] = 0;
            down(0);
        }
        return top;
    }

private:
    bool better(int a, int b) const {
        if (act_[a] != act_[b]) return act_[a] > act_[b];
        return a < b;
    }
    void up(int i) {
        int v = heap_[i];
        while (i > 0) {
            int p = (i - 1) / 2;
            if (!better(v, heap_[p])) break;
            heap_[i] = heap_[p];
            pos_[heap_[i]] = i;
            i = p;
        }
        heap_[i] = v;
        pos_[v] = i;
    }
    void down(int i) {
        int v = heap_[i];
        int n = static_cast<int>(heap_.size());
        for (;;) {
            int c = 2 * i + 1;
            if (c >= n) break;
            if (c + 1 < n && better(heap_[c + 1], heap_[c])) ++c;
            if (!better(heap_[c], v)) break;
            heap_[i] = heap_[c];
            pos_[heap_[i]] = i;
            i = c;
        }
        heap_[i] = v;
        pos_[v] = i;
    }

    const std::vector<double>& act_;
    std::vector<int> heap_;
    std::vector<int> pos_;
};

struct Clause {
    std::vector<Lit> lits;
    bool learned = false;
    bool deleted = false;
    double activity = 0;
};

struct Pb {
    std::vector<WeightedLit> terms;  // sorted by weight, descending
    Seconds bound = 0;
    Seconds sum = 0;  // weight of processed true terms
};

// Reason encoding: >= 0 clause index, -1 none, <= -2 index into pb_reasons_.
constexpr int kNoReason = -1;

class Solver {
public:
    Solver(const ConstraintModel& m, const SolverOptions& opts, Clock::time_point start)
        : m_(m), opts_(opts), start_(start), heap_(activity_) {
        int n = m.num_vars();
        value_.assign(n, 0);
        level_.assign(n, 0);
        reason_.assign(n, kNoReason);
        phase_.assign(n, false);
        seen_.assign(n, 0);
        processed_.assign(n, 0);
        activity_.assign(n, 0.0);
        hint_.assign(n, 0);
        watches_.assign(2 * n, {});
        theory_.assign(2 * n, {});
        pb_occ_.assign(2 * n, {});

        // static initial order: routing, then sequencing, then auxiliaries, delay literals last
        for (int v = 0; v < n; ++v) activity_[v] = 1e-2 * kind_rank(m.vars[v].kind);
        std::mt19937_64 rng(opts.seed);
        if (opts.seed != 0) {
            std::uniform_real_distribution<double> dist(0.0, 1e-3);
            for (int v = 0; v < n; ++v) activity_[v] += dist(rng);
        }
        if (opts.use_hints)
            for (const Hint& h : m.hints) hint_[h.var] = h.positive ? 1 : -1;
        for (int v = 0; v < n; ++v) heap_.insert(v);

        for (int i = 0; i < m.num_diff_vars; ++i) dl_.ensure_var(i);
        for (const DiffConstraint& c : m.fixed_diffs) {
            DiffConstraint base = c;
            base.tag = -1;
            if (!dl_.assert_constraint(base)) {
                unsat_ = true;
                return;
            }
        }
        for (std::size_t i = 0; i < m.cond_diffs.size(); ++i) {
            dl_.ensure_var(m.cond_diffs[i].constraint.u);
            dl_.ensure_var(m.cond_diffs[i].constraint.v);
            theory_[m.cond_diffs[i].guard].push_back(static_cast<int>(i));
        }
        for (const auto& c : m.clauses) {
            if (!add_clause(c)) {
                unsat_ = true;
                return;
            }
        }
    }

    bool unsat() const { return unsat_; }
    const SearchStats& stats() const { return stats_; }

    // Adds sum(weight * lit) <= bound at decision level 0.
    bool add_pb(const std::vector<WeightedLit>& terms, Seconds bound) {
        if (unsat_) return false;
        Pb pb;
        for (const WeightedLit& t : terms)
            if (t.weight > 0) pb.terms.push_back(t);
        std::stable_sort(pb.terms.begin(), pb.terms.end(),
                         [](const WeightedLit& a, const WeightedLit& b) { return a.weight > b.weight; });
        pb.bound = bound;
        int idx = static_cast<int>(pbs_.size());
        // Count terms already processed at level 0.
        for (std::size_t j = 0; j < pb.terms.size(); ++j) {
            Lit l = pb.terms[j].lit;
            pb_occ_[l].push_back({idx, static_cast<int>(j)});
            if (counted(l)) pb.sum += pb.terms[j].weight;
        }
        pbs_.push_back(std::move(pb));
        if (pbs_[idx].sum > bound) return fail_root();
        if (!pb_propagate(idx) || propagate() >= 0 || pending_conflict_) return fail_root();
        return true;
    }

    bool tighten(int pb, Seconds bound) {
        if (unsat_) return false;
        cancel_until(0);
        pbs_[pb].bound = bound;
        if (pbs_[pb].sum > bound) return fail_root();
        if (!pb_propagate(pb) || propagate() >= 0 || pending_conflict_) return fail_root();
        return true;
    }

    Result solve() {
        if (unsat_) return Result::Unsat;
        cancel_until(0);
        int curr_restarts = 0;
        for (;;) {
            double budget = opts_.restarts ? luby(2, curr_restarts) * opts_.restart_base : -1;
            Result r = search(budget);
            if (r != Result::Interrupted || interrupted_) return r;
            ++curr_restarts;
            ++stats_.restarts;
        }
    }

    bool interrupted() const { return interrupted_; }

    ModelAssignment model() const {
        ModelAssignment out;
        out.values.resize(value_.size());
        for (std::size_t v = 0; v < value_.size(); ++v) out.values[v] = value_[v] > 0;
        out.schedule = dl_.minimal_model();
        for (const auto& layer : m_.layers) {
            Seconds s = 0;
            for (const WeightedLit& t : layer)
                if (lit_value(t.lit) > 0) s += t.weight;
            out.costs.push_back(s);
        }
        return out;
    }

    int pb_count() const { return static_cast<int>(pbs_.size()); }

private:
    int lit_value(Lit l) const {
        int v = value_[lit_var(l)];
        return lit_negative(l) ? -v : v;
    }

    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    bool fail_root() {
        unsat_ = true;
        return false;
    }

    bool add_clause(std::vector<Lit> lits) {
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        for (std::size_t i = 1; i < lits.size(); ++i)
            if (lits[i] == negate(lits[i - 1])) return true;  // tautology
        // drop literals false at level 0, skip satisfied clauses
        std::vector<Lit> kept;
        for (Lit l : lits) {
            int val = lit_value(l);
            if (val > 0) return true;
            if (val == 0) kept.push_back(l);
        }
        if (kept.empty()) return false;
        if (kept.size() == 1) {
            enqueue(kept[0], kNoReason);
            return propagate() < 0 && !pending_conflict_;
        }
        int idx = static_cast<int>(clauses_.size());
        clauses_.push_back({std::move(kept), false, false, 0});
        watches_[negate(clauses_[idx].lits[0])].push_back(idx);
        watches_[negate(clauses_[idx].lits[1])].push_back(idx);
        return true;
    }

    void enqueue(Lit l, int reason) {
        int v = lit_var(l);
        value_[v] = lit_negative(l) ? -1 : 1;
        level_[v] = decision_level();
        reason_[v] = reason;
        trail_.push_back(l);
    }

    void new_decision_level() {
        trail_lim_.push_back(trail_.size());
        pb_reason_lim_.push_back(pb_reasons_.size());
        dl_marks_.push_back(dl_.checkpoint());
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl) return;
        std::size_t stop = trail_lim_[lvl];
        for (std::size_t i = trail_.size(); i-- > stop;) {
            Lit l = trail_[i];
            int v = lit_var(l);
            if (i < qhead_)
                for (auto [pb, j] : pb_occ_[l]) pbs_[pb].sum -= pbs_[pb].terms[j].weight;
            phase_[v] = !lit_negative(l);
            processed_[v] = 0;
            value_[v] = 0;
            reason_[v] = kNoReason;
            heap_.insert(v);
        }
        trail_.resize(stop);
        qhead_ = std::min(qhead_, stop);
        pb_reasons_.resize(pb_reason_lim_[lvl]);
        dl_.retract_to(dl_marks_[lvl]);
        trail_lim_.resize(lvl);
        pb_reason_lim_.resize(lvl);
        dl_marks_.resize(lvl);
    }

    // Stores a conflict (all literals false) for analysis; returns false.
    bool set_conflict(std::vector<Lit> lits) {
        pending_conflict_ = true;
        conflict_lits_ = std::move(lits);
        return false;
    }

    bool pb_propagate(int idx) {
        Pb& pb = pbs_[idx];
        if (pb.sum > pb.bound) {
            std::vector<Lit> c;
            for (const WeightedLit& t : pb.terms)
                if (counted(t.lit)) c.push_back(negate(t.lit));
            return set_conflict(std::move(c));
        }
        Seconds slack = pb.bound - pb.sum;
        for (const WeightedLit& t : pb.terms) {
            if (t.weight <= slack) break;
            if (lit_value(t.lit) != 0) continue;
            std::vector<Lit> reason{negate(t.lit)};
            for (const WeightedLit& o : pb.terms)
                if (counted(o.lit)) reason.push_back(negate(o.lit));
            pb_reasons_.push_back(std::move(reason));
            enqueue(negate(t.lit), -2 - static_cast<int>(pb_reasons_.size() - 1));
        }
        return true;
    }

    // True literal already processed by propagation.
    bool counted(Lit l) const {
        if (lit_value(l) <= 0) return false;
        return processed_[lit_var(l)];
    }

    // Returns index of conflicting clause, -2 for a stored conflict, -1 if none.
    int propagate() {
        while (qhead_ < trail_.size()) {
            Lit p = trail_[qhead_++];
            processed_[lit_var(p)] = 1;

            for (auto [pb, j] : pb_occ_[p]) pbs_[pb].sum += pbs_[pb].terms[j].weight;
            for (auto [pb, j] : pb_occ_[p]) {
                (void)j;
                if (!pb_propagate(pb)) return -2;
            }

            for (int ci : theory_[p]) {
                const CondDiff& cd = m_.cond_diffs[ci];
                DiffConstraint c = cd.constraint;
                c.tag = ci;
                explanation_.clear();
                if (!dl_.assert_constraint(c, &explanation_)) {
                    std::vector<Lit> lits;
                    for (int tag : explanation_)
                        if (tag >= 0) lits.push_back(negate(m_.cond_diffs[tag].guard));
                    std::sort(lits.begin(), lits.end());
                    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
                    set_conflict(std::move(lits));
                    return -2;
                }
            }

            // clauses watching p's negation become candidates for propagation
            Lit falsified = negate(p);
            auto& ws = watches_[p];
            std::size_t i = 0, j = 0;
            while (i < ws.size()) {
                int ci = ws[i];
                Clause& c = clauses_[ci];
                if (c.deleted) {
                    ++i;
                    continue;
                }
                if (c.lits[0] == falsified) std::swap(c.lits[0], c.lits[1]);
                if (lit_value(c.lits[0]) > 0) {
                    ws[j++] = ws[i++];
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.lits.size(); ++k) {
                    if (lit_value(c.lits[k]) >= 0) {
                        std::swap(c.lits[1], c.lits[k]);
                        watches_[negate(c.lits[1])].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) {
                    ++i;
                    continue;
                }
                ws[j++] = ws[i++];
                if (lit_value(c.lits[0]) < 0) {
                    while (i < ws.size()) ws[j++] = ws[i++];
                    ws.resize(j);
                    return ci;
                }
                enqueue(c.lits[0], ci);
            }
            ws.resize(j);
        }
        return -1;
    }

    const std::vector<Lit>& reason_lits(int var) const {
        int r = reason_[var];
        if (r >= 0) return clauses_[r].lits;
        return pb_reasons_[-2 - r];
    }

    void bump(int v) {
        activity_[v] += var_inc_;
        if (activity_[v] > 1e100) {
            for (double& a : activity_) a *= 1e-100;
            var_inc_ *= 1e-100;
        }
        heap_.increased(v);
    }

    // First-UIP learning. Returns the learned clause with the asserting literal first.
    std::vector<Lit> analyze(const std::vector<Lit>& conflict, int& backjump) {
        std::vector<Lit> learned{0};
        int pending = 0;
        Lit p = -1;
        std::size_t idx = trail_.size();
        const std::vector<Lit>* reason = &conflict;
        std::vector<int> touched;
        for (;;) {
            for (Lit q : *reason) {
                if (p >= 0 && q == p) continue;
                int v = lit_var(q);
                if (seen_[v] || level_[v] == 0) continue;
                seen_[v] = 1;
                touched.push_back(v);
                bump(v);
                if (level_[v] == decision_level())
                    ++pending;
                else
                    learned.push_back(q);
            }
            do {
                --idx;
            } while (!seen_[lit_var(trail_[idx])]);
            p = trail_[idx];
            seen_[lit_var(p)] = 0;
            --pending;
            if (pending <= 0) break;
            reason = &reason_lits(lit_var(p));
        }
        learned[0] = negate(p);
        for (int v : touched) seen_[v] = 0;

        backjump = 0;
        if (learned.size() > 1) {
            std::size_t best = 1;
            for (std::size_t i = 2; i < learned.size(); ++i)
                if (level_[lit_var(learned[i])] > level_[lit_var(learned[best])]) best = i;
            std::swap(learned[1], learned[best]);
            backjump = level_[lit_var(learned[1])];
        }
        var_inc_ /= opts_.activity_decay;
        return learned;
    }

    bool should_stop() {
        if (opts_.stop && opts_.stop->load(std::memory_order_relaxed)) return true;
        if (opts_.time_limit > 0) {
            double el = std::chrono::duration<double>(Clock::now() - start_).count();
            if (el >= opts_.time_limit) return true;
        }
        return false;
    }

    int pick_branch() {
        while (!heap_.empty()) {
            int v = heap_.pop();
            if (value_[v] == 0) return v;
        }
        return -1;
    }

    static double kind_rank(VarTag::Kind k) {
        switch (k) {
            case VarTag::Kind::Visit:
            case VarTag::Kind::Route: return 4;
            case VarTag::Kind::Seq: return 3;
            case VarTag::Kind::Uses:
            case VarTag::Kind::EnterRA:
            case VarTag::Kind::LeaveRA: return 2;
            case VarTag::Kind::Conjunction:
            case VarTag::Kind::Disjunction: return 1;
            case VarTag::Kind::Late: return 0;
        }
        return 0;
    }

    // Trial assertion of the literal's own difference constraints.
    bool theory_consistent(Lit l) {
        if (theory_[l].empty()) return true;
        DiffSystem::Mark mark = dl_.checkpoint();
        bool ok = true;
        for (int ci : theory_[l]) {
            if (!dl_.assert_constraint(m_.cond_diffs[ci].constraint)) {
                ok = false;
                break;
            }
        }
        dl_.retract_to(mark);
        return ok;
    }

    void reduce_db() {
        std::vector<int> cand;
        for (std::size_t i = 0; i < clauses_.size(); ++i) {
            const Clause& c = clauses_[i];
            if (!c.learned || c.deleted || c.lits.size() <= 2) continue;
            int v = lit_var(c.lits[0]);
            if (reason_[v] == static_cast<int>(i) && value_[v] != 0) continue;
            cand.push_back(static_cast<int>(i));
        }
        std::sort(cand.begin(), cand.end(), [&](int a, int b) {
            if (clauses_[a].activity != clauses_[b].activity) return clauses_[a].activity < clauses_[b].activity;
            return a < b;
        });
        for (std::size_t i = 0; i < cand.size() / 2; ++i) {
            clauses_[cand[i]].deleted = true;
            clauses_[cand[i]].lits.clear();
            clauses_[cand[i]].lits.shrink_to_fit();
            --live_learned_;
        }
    }

    Result search(double budget) {
        std::uint64_t conflicts_here = 0;
        std::uint64_t ticks = 0;
        for (;;) {
            if ((++ticks & 63) == 0 && should_stop()) {
                interrupted_ = true;
                return Result::Interrupted;
            }
            pending_conflict_ = false;
            int confl = propagate();
            if (confl != -1) {
                ++stats_.conflicts;
                ++conflicts_here;
                std::vector<Lit> conflict =
                    confl >= 0 ? clauses_[confl].lits : std::move(conflict_lits_);
                if (confl >= 0) clauses_[confl].activity += 1;
                pending_conflict_ = false;
                if (decision_level() == 0) {
                    unsat_ = true;
                    return Result::Unsat;
                }
                // Theory and PB conflicts may sit entirely below the current level.
                int top = 0;
                for (Lit l : conflict) top = std::max(top, level_[lit_var(l)]);
                if (top == 0) {
                    unsat_ = true;
                    return Result::Unsat;
                }
                if (top < decision_level()) cancel_until(top);
                int backjump = 0;
                std::vector<Lit> learned = analyze(conflict, backjump);
                cancel_until(backjump);
                if (learned.size() == 1) {
                    enqueue(learned[0], kNoReason);
                } else {
                    int idx = static_cast<int>(clauses_.size());
                    clauses_.push_back({learned, true, false, static_cast<double>(stats_.conflicts)});
                    watches_[negate(learned[0])].push_back(idx);
                    watches_[negate(learned[1])].push_back(idx);
                    enqueue(learned[0], idx);
                    ++live_learned_;
                }
                ++stats_.learned;
                if (live_learned_ > max_learned_) {
                    reduce_db();
                    max_learned_ += max_learned_ / 10;
                }
                continue;
            }
            if (budget >= 0 && static_cast<double>(conflicts_here) >= budget) {
                cancel_until(0);
                return Result::Interrupted;
            }
            int v = pick_branch();
            if (v < 0) return Result::Sat;
            Lit choice = phase_[v] ? pos_lit(v) : neg_lit(v);
            if (hint_[v] != 0)
                choice = hint_[v] > 0 ? pos_lit(v) : neg_lit(v);
            else if (!theory_consistent(choice) && theory_consistent(negate(choice)))
                choice = negate(choice);
            ++stats_.choices;
            new_decision_level();
            enqueue(choice, kNoReason);
        }
    }

    const ConstraintModel& m_;
    SolverOptions opts_;
    Clock::time_point start_;

    std::vector<int> value_;  // +1 true, -1 false, 0 unassigned
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<bool> phase_;
    std::vector<char> seen_;
    std::vector<char> processed_;
    std::vector<double> activity_;
    std::vector<int> hint_;
    double var_inc_ = 1.0;
    VarHeap heap_;

    std::vector<Lit> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;

    std::vector<Clause> clauses_;
    std::vector<std::vector<int>> watches_;  // per literal p: clauses containing ~p
    std::size_t live_learned_ = 0;
    std::size_t max_learned_ = 4000;

    std::vector<std::vector<int>> theory_;  // per literal: cond_diff indices
    DiffSystem dl_;
    std::vector<DiffSystem::Mark> dl_marks_;
    std::vector<int> explanation_;

    std::vector<Pb> pbs_;
    std::vector<std::vector<std::pair<int, int>>> pb_occ_;
    std::vector<std::vector<Lit>> pb_reasons_;
    std::vector<std::size_t> pb_reason_lim_;

    bool pending_conflict_ = false;
    std::vector<Lit> conflict_lits_;
    bool unsat_ = false;
    bool interrupted_ = false;
    SearchStats stats_;
};

bool lex_less(const std::vector<Seconds>& a, const std::vector<Seconds>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

SearchOutcome solve_once(const ConstraintModel& model, const SolverOptions& opts) {
    auto start = Clock::now();
    SearchOutcome out;
    Solver s(model, opts, start);
    Result r = s.solve();
    out.stats = s.stats();
    if (r == Result::Sat) {
        out.best = s.model();
        out.status = SolveStatus::Optimal;
        ++out.stats.models;
    } else if (r == Result::Unsat) {
        out.status = SolveStatus::Infeasible;
    }
    out.stats.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

SearchOutcome optimize(const ConstraintModel& model, const SolverOptions& opts) {
    auto start = Clock::now();
    SearchOutcome out;
    const std::size_t layers = model.layers.size();
    bool timed_out = false;

    auto finish = [&](SolveStatus st) {
        out.status = st;
        out.stats.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        return out;
    };

    // Fixes layers [0, k) at the incumbent and minimizes layer k.
    for (std::size_t k = 0; k < std::max<std::size_t>(layers, 1); ++k) {
        if (out.best && k < layers && out.best->costs[k] == 0) continue;
        Solver s(model, opts, start);
        bool ok = !s.unsat();
        for (std::size_t i = 0; ok && i < k; ++i) ok = s.add_pb(model.layers[i], out.best->costs[i]);
        int bound_pb = -1;
        if (ok && k < layers) {
            Seconds initial = out.best ? out.best->costs[k] - 1 : std::numeric_limits<Seconds>::max() / 4;
            bound_pb = s.pb_count();
            ok = s.add_pb(model.layers[k], initial);
        }
        if (!ok) {
            out.stats += s.stats();
            if (!out.best) return finish(SolveStatus::Infeasible);
            continue;  // incumbent is optimal for layer k
        }
        for (;;) {
            Result r = s.solve();
            if (r == Result::Interrupted) {
                timed_out = true;
                break;
            }
            if (r == Result::Unsat) break;
            ModelAssignment a = s.model();
            ++out.stats.models;
            if (!out.best || lex_less(a.costs, out.best->costs)) out.best = std::move(a);
            if (k >= layers || out.best->costs[k] == 0) break;
            if (!s.tighten(bound_pb, out.best->costs[k] - 1)) break;
        }
        out.stats += s.stats();
        if (timed_out) break;
        if (!out.best) return finish(SolveStatus::Infeasible);
    }
    if (timed_out) return finish(out.best ? SolveStatus::SatBound : SolveStatus::Unknown);
    return finish(SolveStatus::Optimal);
}

}  // namespace railsched
