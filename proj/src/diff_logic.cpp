#include "railsched/diff_logic.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>

namespace railsched {

Seconds checked_add(Seconds a, Seconds b) {
    Seconds out;
    if (__builtin_add_overflow(a, b, &out)) {
        throw std::overflow_error("difference constraint arithmetic overflow");
    }
    return out;
}

void DiffSystem::ensure_var(int x) {
    if (x < 0) {
        throw std::invalid_argument("negative difference variable");
    }
    if (x < num_vars()) {
        return;
    }
    std::size_t n = static_cast<std::size_t>(x) + 1;
    out_.resize(n);
    in_.resize(n);
    potential_.resize(n, 0);
    gamma_.resize(n, 0);
    pred_edge_.resize(n, -1);
    done_.resize(n, 0);
}

bool DiffSystem::assert_constraint(const DiffConstraint& c, std::vector<int>* explanation) {
    ensure_var(std::max(c.u, c.v));
    if (c.u == c.v) {
        if (c.d >= 0) {
            // trivially true; still tracked so retraction stays positional
            edges_.push_back(c);
            out_[c.v].push_back(static_cast<int>(edges_.size()) - 1);
            in_[c.u].push_back(static_cast<int>(edges_.size()) - 1);
            return true;
        }
        last_failed_ = c;
        if (explanation) {
            explanation->clear();
            if (c.tag >= 0) explanation->push_back(c.tag);
        }
        return false;
    }

    Seconds slack = checked_add(checked_add(potential_[c.v], c.d), -potential_[c.u]);
    if (slack < 0) {
        // Lower potentials starting at u until every reduced cost is non-negative.
        using Entry = std::pair<Seconds, int>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
        std::vector<int> touched;
        std::vector<std::pair<int, Seconds>> updates;
        gamma_[c.u] = slack;
        pred_edge_[c.u] = -1;
        touched.push_back(c.u);
        queue.emplace(slack, c.u);
        bool cycle = false;
        while (!queue.empty()) {
            auto [g, s] = queue.top();
            queue.pop();
            if (done_[s] || g != gamma_[s]) {
                continue;
            }
            if (s == c.v) {
                cycle = true;
                break;
            }
            done_[s] = 1;
            Seconds new_pot = checked_add(potential_[s], g);
            updates.emplace_back(s, new_pot);
            for (int ei : out_[s]) {
                const DiffConstraint& e = edges_[ei];
                int t = e.u;
                if (done_[t]) continue;
                Seconds cand = checked_add(checked_add(new_pot, e.d), -potential_[t]);
                if (cand < gamma_[t]) {
                    if (gamma_[t] == 0) touched.push_back(t);
                    gamma_[t] = cand;
                    pred_edge_[t] = ei;
                    queue.emplace(cand, t);
                }
            }
        }
        if (cycle) {
            last_failed_ = c;
            if (explanation) {
                explanation->clear();
                if (c.tag >= 0) explanation->push_back(c.tag);
                for (int x = c.v; x != c.u;) {
                    const DiffConstraint& e = edges_[pred_edge_[x]];
                    if (e.tag >= 0) explanation->push_back(e.tag);
                    x = e.v;
                }
            }
        } else {
            for (auto [x, p] : updates) {
                potential_[x] = p;
            }
        }
        for (int x : touched) {
            gamma_[x] = 0;
            pred_edge_[x] = -1;
            done_[x] = 0;
        }
        if (cycle) {
            return false;
        }
    }
    edges_.push_back(c);
    out_[c.v].push_back(static_cast<int>(edges_.size()) - 1);
    in_[c.u].push_back(static_cast<int>(edges_.size()) - 1);
    return true;
}

DiffSystem::Mark DiffSystem::checkpoint() {
    Mark m{edges_.size(), next_serial_++};
    marks_.push_back(m.serial);
    return m;
}

void DiffSystem::retract_to(const Mark& mark) {
    auto rit = std::find(marks_.rbegin(), marks_.rend(), mark.serial);
    if (rit == marks_.rend()) {
        throw std::logic_error("retract to a consumed or unknown checkpoint");
    }
    marks_.erase(std::prev(rit.base()), marks_.end());
    while (edges_.size() > mark.edges) {
        const DiffConstraint& e = edges_.back();
        out_[e.v].pop_back();
        in_[e.u].pop_back();
        edges_.pop_back();
    }
}

std::vector<Seconds> DiffSystem::feasible_assignment() const {
    std::vector<Seconds> out(potential_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = potential_[i] - potential_[0];
    }
    return out;
}

DiffModel DiffSystem::minimal_model() const {
    // x_min = -dist(x -> zero). Dijkstra from zero over reversed edges with
    // reduced costs d + p(v) - p(u) >= 0.
    const std::size_t n = potential_.size();
    std::vector<Seconds> dist(n, kPosInf);
    using Entry = std::pair<Seconds, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    dist[0] = 0;
    queue.emplace(0, 0);
    while (!queue.empty()) {
        auto [dd, x] = queue.top();
        queue.pop();
        if (dd != dist[x]) continue;
        for (int ei : in_[x]) {
            const DiffConstraint& e = edges_[ei];
            Seconds reduced = e.d + potential_[e.v] - potential_[e.u];
            Seconds cand = checked_add(dd, reduced);
            if (cand < dist[e.v]) {
                dist[e.v] = cand;
                queue.emplace(cand, e.v);
            }
        }
    }
    DiffModel model;
    model.value.assign(n, 0);
    model.bounded.assign(n, false);
    for (std::size_t x = 0; x < n; ++x) {
        if (dist[x] == kPosInf) continue;
        model.bounded[x] = true;
        model.value[x] = potential_[x] - potential_[0] - dist[x];
    }
    return model;
}

std::optional<DiffModel> bellman_ford_minimal(int num_vars, const std::vector<DiffConstraint>& constraints) {
    // dist[x] = shortest path x -> zero; relax edge v -> u (weight d) as dist[v] <= d + dist[u].
    std::vector<Seconds> dist(num_vars, kPosInf);
    dist[0] = 0;
    for (int round = 0; round <= num_vars; ++round) {
        bool changed = false;
        for (const DiffConstraint& c : constraints) {
            if (dist[c.u] == kPosInf) continue;
            Seconds cand = checked_add(dist[c.u], c.d);
            if (cand < dist[c.v]) {
                dist[c.v] = cand;
                changed = true;
            }
        }
        if (!changed) break;
        if (round == num_vars) return std::nullopt;
    }
    // Variables without a path to zero may still sit on a negative cycle.
    std::vector<Seconds> any(num_vars, 0);
    for (int round = 0; round <= num_vars; ++round) {
        bool changed = false;
        for (const DiffConstraint& c : constraints) {
            Seconds cand = checked_add(any[c.u], c.d);
            if (cand < any[c.v]) {
                any[c.v] = cand;
                changed = true;
            }
        }
        if (!changed) break;
        if (round == num_vars) return std::nullopt;
    }
    DiffModel model;
    model.value.assign(num_vars, 0);
    model.bounded.assign(num_vars, false);
    for (int x = 0; x < num_vars; ++x) {
        if (dist[x] == kPosInf) continue;
        model.bounded[x] = true;
        model.value[x] = -dist[x];
    }
    return model;
}

}  // namespace railsched
