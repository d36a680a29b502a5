#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "railsched/generator.hpp"
#include "railsched/pipeline.hpp"
#include "railsched/solution_io.hpp"
#include "test_util.hpp"

using namespace railsched;

namespace {

Solution reference() {
    std::ifstream in(fixture_path("example_solution.json"));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_solution_json(ss.str());
}

bool has_condition(const std::vector<SolutionViolation>& v, const std::string& c, const std::string& needle = "") {
    for (const auto& x : v)
        if (x.condition == c && x.detail.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST(Validator, ReferenceSolutionIsFeasible) {
    Instance inst = load_fixture("example.lp");
    Solution sol = reference();
    EXPECT_TRUE(validate_solution(inst, sol).empty());
    ExactQuality q = exact_quality(inst, sol);
    EXPECT_EQ(q.delay_minutes, Rational::make(6, 1));
    EXPECT_EQ(q.route_penalty, 0);
    EXPECT_EQ(approx_quality(inst, derive_thresholds(inst, std::nullopt), sol), (Objective{3, 0}));
}

TEST(Validator, EarliestTimeViolation) {
    Instance inst = load_fixture("example.lp");
    Solution sol = reference();
    sol.arrivals[{S("t1"), S("2")}] = 200;
    EXPECT_TRUE(has_condition(validate_solution(inst, sol), "4"));
}

TEST(Validator, ConnectionViolationNamesResource) {
    Instance inst = load_fixture("example.lp");
    Solution sol = reference();
    sol.arrivals[{S("t3"), S("9")}] = 630;
    auto issues = validate_solution(inst, sol);
    EXPECT_TRUE(has_condition(issues, "7", "sw2"));
}

TEST(Validator, BrokenPathIsStructural) {
    Instance inst = load_fixture("example.lp");
    Solution sol = reference();
    sol.paths[S("t2")] = {S("10"), S("4"), S("3")};
    EXPECT_FALSE(validate_solution(inst, sol).empty());
    sol = reference();
    sol.arrivals.erase({S("t3"), S("6")});
    EXPECT_FALSE(validate_solution(inst, sol).empty());
}

TEST(Validator, RoutePenaltyCounted) {
    Instance inst = load_fixture("example.lp");
    Solution sol = reference();
    sol.paths[S("t1")] = {S("1"), S("3"), S("5"), S("8"), S("10"), S("11")};
    sol.arrivals.erase({S("t1"), S("2")});
    sol.arrivals[{S("t1"), S("1")}] = 300;
    EXPECT_EQ(exact_quality(inst, sol).route_penalty, 1);
}

TEST(Validator, OracleOnExample) {
    Instance inst = load_fixture("example.lp");
    OracleResult r = brute_force_solve(inst, derive_thresholds(inst, std::nullopt));
    ASSERT_TRUE(r.objective);
    EXPECT_EQ(*r.objective, (Objective{3, 0}));
    ASSERT_TRUE(r.witness);
    EXPECT_TRUE(validate_solution(inst, *r.witness).empty());
    EXPECT_GT(r.combinations, 0u);
}

TEST(Validator, OracleInfeasible) {
    Instance inst = load_fixture("infeasible.lp");
    EXPECT_FALSE(brute_force_solve(inst, derive_thresholds(inst, std::nullopt)).objective);
}

TEST(Validator, OracleBudget) {
    Instance inst = load_fixture("example.lp");
    EXPECT_THROW(brute_force_solve(inst, derive_thresholds(inst, std::nullopt), 1), BudgetExceeded);
}

TEST(Validator, ApproximationNeverExceedsExactDelay) {
    for (int seed = 1; seed <= 40; ++seed) {
        GenParams p;
        p.seed = seed;
        p.trains = 2;
        p.nodes = 6;
        Instance inst = generate_instance(p);
        PipelineResult res = solve_instance(inst, {});
        if (!res.solution) continue;
        Objective approx = approx_quality(inst, derive_thresholds(inst, std::nullopt), *res.solution);
        ExactQuality exact = exact_quality(inst, *res.solution);
        // weights sum the seconds between thresholds, the exact measure counts every second
        Rational approx_minutes = Rational::make(approx.first, 60);
        EXPECT_LE(approx_minutes.num * exact.delay_minutes.den, exact.delay_minutes.num * approx_minutes.den) << seed;
        EXPECT_EQ(approx.second, exact.route_penalty);
    }
}
