#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "railsched/symbol.hpp"

namespace railsched {

/// u - v <= d over integer variables. Variable 0 is the zero variable.
struct DiffConstraint {
    int u = 0;
    int v = 0;
    Seconds d = 0;
    int tag = -1;  // negative tags never show up in explanations
};

struct DiffModel {
    std::vector<Seconds> value;
    std::vector<bool> bounded;  // false: no lower bound through the zero variable
};

/// Incremental difference-constraint system.
///
/// Keeps a potential function that satisfies every active constraint. A new
/// constraint that violates it is repaired by a Dijkstra pass over reduced
/// costs; reaching the tail of the new edge again means a negative cycle.
class DiffSystem {
public:
    struct Mark {
        std::size_t edges = 0;
        std::uint64_t serial = 0;
    };

    DiffSystem() { ensure_var(0); }

    int num_vars() const noexcept { return static_cast<int>(potential_.size()); }
    void ensure_var(int x);

    /// Returns true when consistent; otherwise fills `explanation` with the
    /// tags of the detected negative cycle and leaves the system unchanged.
    bool assert_constraint(const DiffConstraint& c, std::vector<int>* explanation = nullptr);

    Mark checkpoint();
    void retract_to(const Mark& mark);

    std::size_t active_count() const noexcept { return edges_.size(); }
    const std::vector<DiffConstraint>& active() const noexcept { return edges_; }
    const std::optional<DiffConstraint>& last_failed() const noexcept { return last_failed_; }

    /// A satisfying assignment (not necessarily minimal), zero variable at 0.
    std::vector<Seconds> feasible_assignment() const;

    /// Pointwise-minimal satisfying assignment with the zero variable at 0.
    DiffModel minimal_model() const;

private:
    std::vector<DiffConstraint> edges_;       // edge v -> u with weight d
    std::vector<std::vector<int>> out_;       // per v: indices into edges_
    std::vector<std::vector<int>> in_;        // per u: indices into edges_
    std::vector<Seconds> potential_;
    std::vector<std::uint64_t> marks_;        // serials of live marks
    std::uint64_t next_serial_ = 1;
    std::optional<DiffConstraint> last_failed_;

    // scratch for the repair pass
    std::vector<Seconds> gamma_;
    std::vector<int> pred_edge_;
    std::vector<char> done_;
};

/// From-scratch Bellman-Ford check, used by tests and the brute-force oracle.
/// Returns the minimal model (zero variable 0) or nullopt on a negative cycle.
std::optional<DiffModel> bellman_ford_minimal(int num_vars, const std::vector<DiffConstraint>& constraints);

Seconds checked_add(Seconds a, Seconds b);

}  // namespace railsched
