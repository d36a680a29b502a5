#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "railsched/generator.hpp"
#include "railsched/pipeline.hpp"
#include "railsched/solution_io.hpp"
#include "test_util.hpp"

using namespace railsched;

namespace {

PipelineResult solve_example() { return solve_instance(load_fixture("example.lp"), {}); }

}  // namespace

TEST(SolutionIo, JsonRoundTrip) {
    PipelineResult res = solve_example();
    std::string text = solution_to_json(res);
    auto j = nlohmann::json::parse(text);
    EXPECT_EQ(j["status"], "optimal");
    EXPECT_EQ(j["approx_quality"], nlohmann::json::array({3, 0}));
    EXPECT_EQ(j["exact_quality"][0], "6");
    EXPECT_TRUE(j["stats"].contains("CH"));
    Solution back = parse_solution_json(text);
    EXPECT_EQ(back.paths, res.solution->paths);
    EXPECT_EQ(back.arrivals, res.solution->arrivals);
}

TEST(SolutionIo, InfeasibleJsonHasNoPaths) {
    PipelineResult res = solve_instance(load_fixture("infeasible.lp"), {});
    auto j = nlohmann::json::parse(solution_to_json(res));
    EXPECT_EQ(j["status"], "infeasible");
    EXPECT_FALSE(j.contains("paths"));
}

TEST(SolutionIo, FactsAndText) {
    PipelineResult res = solve_example();
    std::string facts = solution_to_facts(res);
    EXPECT_NE(facts.find("route(t2,(10,7))."), std::string::npos) << facts;
    EXPECT_NE(facts.find("arrival(t2,10,0)."), std::string::npos) << facts;
    EXPECT_NE(solution_to_text(res).find("t3"), std::string::npos);
}

TEST(SolutionIo, MalformedJsonRejected) {
    EXPECT_THROW(parse_solution_json("{"), SolutionFormatError);
    EXPECT_THROW(parse_solution_json("[]"), SolutionFormatError);
    EXPECT_THROW(parse_solution_json(R"({"paths": {"t1": [1.5]}, "arrivals": {}})"), SolutionFormatError);
    EXPECT_EQ(parse_solution_json(R"({"paths": {"t1": [1, 2]}, "arrivals": {}})").paths.at(S("t1")),
              (std::vector<Symbol>{S("1"), S("2")}));
    EXPECT_THROW(parse_solution_json(R"({"paths": {"t1": ["1"]}, "arrivals": {"t1": {"1": "x"}}})"),
                 SolutionFormatError);
}

TEST(Generator, DeterministicAndValid) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        GenParams p;
        p.seed = seed;
        p.trains = 1 + static_cast<int>(seed % 4);
        p.connections = static_cast<int>(seed % 3);
        p.open_windows = seed % 5 == 0;
        Instance a = generate_instance(p);
        EXPECT_EQ(a, generate_instance(p));
        EXPECT_TRUE(validate_instance(a).empty()) << seed;
        EXPECT_EQ(static_cast<int>(a.trains.size()), p.trains);
        Instance again = parse_instance(serialize_instance(a));
        EXPECT_EQ(serialize_instance(again), serialize_instance(a));
    }
}

TEST(Generator, SeedsDiffer) {
    GenParams a, b;
    b.seed = 2;
    EXPECT_NE(serialize_instance(generate_instance(a)), serialize_instance(generate_instance(b)));
}
