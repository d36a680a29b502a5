#include "railsched/pipeline.hpp"

#include <chrono>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace railsched {

Solution extract_solution(const PreprocessedInstance& pre, const ConstraintModel& model, const ModelAssignment& a) {
    Solution sol;
    for (std::size_t i = 0; i < pre.reduced.trains.size(); ++i) {
        const TrainLine& t = pre.reduced.trains[i];
        const TrainVars& tv = model.trains[i];
        std::optional<Symbol> cur;
        for (const Symbol& s : t.starts)
            if (a.values[tv.visit.at(s)]) {
                if (cur) throw std::logic_error("train line " + t.id.str() + " visits two start nodes");
                cur = s;
            }
        if (!cur) throw std::logic_error("train line " + t.id.str() + " has no start node");
        std::vector<Symbol> path{*cur};
        for (;;) {
            std::optional<Symbol> next;
            for (const auto& [e, var] : tv.route)
                if (e.from == *cur && a.values[var]) {
                    if (next) throw std::logic_error("train line " + t.id.str() + " branches at " + cur->str());
                    next = e.to;
                }
            if (!next) break;
            path.push_back(*next);
            cur = next;
            if (path.size() > t.nodes.size()) throw std::logic_error("route cycle for " + t.id.str());
        }
        for (const Symbol& v : path)
            sol.arrivals[{t.id, v}] = a.schedule.value.at(tv.dl_base + tv.height.at(v));
        sol.paths[t.id] = std::move(path);
    }
    Seconds delay = a.costs.size() > 0 ? a.costs[0] : 0;
    Seconds route = a.costs.size() > 1 ? a.costs[1] : 0;
    sol.approx_quality = Objective{delay, route};
    return sol;
}

SearchOutcome run_portfolio(const ConstraintModel& model, const SolverOptions& opts, int workers) {
    if (workers <= 1) return optimize(model, opts);
    std::atomic<bool> stop{false};
    std::mutex mu;
    std::optional<SearchOutcome> winner;
    std::vector<SearchOutcome> results(workers);
    std::vector<std::thread> threads;
    for (int i = 0; i < workers; ++i) {
        threads.emplace_back([&, i] {
            SolverOptions o = opts;
            o.seed = opts.seed + static_cast<std::uint64_t>(i);
            o.stop = &stop;
            SearchOutcome r = optimize(model, o);
            std::lock_guard<std::mutex> lock(mu);
            if (!winner && (r.status == SolveStatus::Optimal || r.status == SolveStatus::Infeasible)) {
                winner = r;
                stop = true;
            }
            results[i] = std::move(r);
        });
    }
    for (auto& th : threads) th.join();
    if (winner) return *winner;
    // Nobody finished: best incumbent across workers.
    SearchOutcome best = results[0];
    for (const SearchOutcome& r : results)
        if (r.best && (!best.best || r.best->costs < best.best->costs)) best = r;
    return best;
}

PipelineResult solve_instance(const Instance& inst, const PipelineOptions& opts) {
    using Clock = std::chrono::steady_clock;
    auto start = Clock::now();
    PipelineResult res;
    PreprocessedInstance pre = preprocess(inst);
    ThresholdSet thresholds = derive_thresholds(inst, opts.scheme);
    ConstraintModel model = encode(pre, thresholds, opts.encode);
    res.preprocess = pre.stats;
    res.encode_seconds = std::chrono::duration<double>(Clock::now() - start).count();

    SolverOptions so = opts.solver;
    if (so.time_limit > 0) so.time_limit = std::max(0.01, so.time_limit - res.encode_seconds);
    SearchOutcome out = run_portfolio(model, so, opts.portfolio);
    res.status = out.status;
    res.stats = out.stats;
    if (out.best) {
        res.solution = extract_solution(pre, model, *out.best);
        res.exact = exact_quality(inst, *res.solution);
    }
    res.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return res;
}

}  // namespace railsched
