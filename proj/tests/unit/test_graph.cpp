#include <gtest/gtest.h>

#include "railsched/generator.hpp"
#include "railsched/graph.hpp"
#include "test_util.hpp"

using namespace railsched;

TEST(Graph, ExamplePaths) {
    Instance inst = load_fixture("example.lp");
    TrainGraph g(*inst.find_train(S("t1")));
    auto paths = g.enumerate_paths(100);
    ASSERT_EQ(paths.size(), 4u);
    EXPECT_EQ(paths[0], (std::vector<Symbol>{S("1"), S("3"), S("5"), S("8"), S("10"), S("11")}));
    auto to = g.paths_to_ends();
    EXPECT_EQ(to.at(S("3")), 2);
    auto from = g.paths_from_starts();
    EXPECT_EQ(from.at(S("10")), 2);
    auto reach = g.reachability();
    EXPECT_TRUE(reach.at(S("3")).count(S("12")));
    EXPECT_TRUE(reach.at(S("3")).count(S("3")));
    EXPECT_FALSE(reach.at(S("12")).count(S("3")));
}

TEST(Graph, CountsMatchEnumeration) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        GenParams p;
        p.seed = seed;
        Instance inst = generate_instance(p);
        for (const TrainLine& t : inst.trains) {
            TrainGraph g(t);
            auto paths = g.enumerate_paths(100000);
            auto from = g.paths_from_starts();
            auto to = g.paths_to_ends();
            BigCount total = 0;
            for (const Symbol& s : t.starts) total += to.at(s);
            EXPECT_EQ(total, paths.size());
            for (const Symbol& v : t.nodes) {
                std::size_t through = 0;
                for (const auto& path : paths) through += std::count(path.begin(), path.end(), v);
                EXPECT_EQ(from.at(v) * to.at(v), through);
            }
        }
    }
}

TEST(Graph, TopologicalOrderDetectsCycles) {
    TrainLine t;
    t.nodes = {S("1"), S("2")};
    t.edges = {E(1, 2), E(2, 1)};
    EXPECT_FALSE(TrainGraph(t).topological_order().has_value());
    t.edges = {E(1, 2)};
    EXPECT_EQ(*TrainGraph(t).topological_order(), (std::vector<Symbol>{S("1"), S("2")}));
}
