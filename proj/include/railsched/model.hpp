#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "railsched/diff_logic.hpp"
#include "railsched/symbol.hpp"

namespace railsched {

/// Literal encoding: 2*var for the positive, 2*var+1 for the negative literal.
using Lit = int;

constexpr Lit pos_lit(int var) noexcept { return 2 * var; }
constexpr Lit neg_lit(int var) noexcept { return 2 * var + 1; }
constexpr int lit_var(Lit l) noexcept { return l >> 1; }
constexpr bool lit_negative(Lit l) noexcept { return (l & 1) != 0; }
constexpr Lit negate(Lit l) noexcept { return l ^ 1; }

struct VarTag {
    enum class Kind { Visit, Route, EnterRA, LeaveRA, Seq, Late, Uses, Conjunction, Disjunction };
    Kind kind;
    std::string label;
};

/// A difference constraint that is enforced while `guard` is true.
struct CondDiff {
    Lit guard;
    DiffConstraint constraint;
};

struct WeightedLit {
    Lit lit;
    Seconds weight;
};

struct Hint {
    int var;
    bool positive;
};

struct TrainVars {
    Symbol id;
    int dl_base = 0;  // difference variable of height 0
    std::map<Symbol, int> visit;
    std::map<Edge, int> route;
    std::map<Symbol, int> height;
};

struct LateVar {
    int var;
    int train;
    int height;
    Seconds at;
    Seconds weight;
    std::vector<Symbol> nodes;
};

struct ConstraintModel {
    std::vector<VarTag> vars;
    std::vector<std::vector<Lit>> clauses;
    std::vector<DiffConstraint> fixed_diffs;  // enforced unconditionally
    std::vector<CondDiff> cond_diffs;
    std::vector<std::vector<WeightedLit>> layers;  // delay first, then route penalty
    std::vector<Hint> hints;
    int num_diff_vars = 1;  // difference variable 0 is zero

    std::vector<TrainVars> trains;
    std::map<std::pair<int, int>, int> seq;  // (area, area) -> var "first area before second"
    std::map<int, int> uses;                 // area -> var
    std::map<std::pair<int, Symbol>, int> enter;  // (area, node) -> var
    std::map<std::pair<int, Symbol>, int> leave;  // (area, node) -> var
    std::vector<LateVar> late;

    int num_vars() const noexcept { return static_cast<int>(vars.size()); }

    int new_var(VarTag::Kind kind, std::string label) {
        vars.push_back({kind, std::move(label)});
        return num_vars() - 1;
    }

    std::string describe(Lit l) const { return (lit_negative(l) ? "~" : "") + vars[lit_var(l)].label; }
};

}  // namespace railsched
