#include <gtest/gtest.h>

#include "railsched/generator.hpp"
#include "railsched/graph.hpp"
#include "railsched/preprocess.hpp"
#include "test_util.hpp"

using namespace railsched;

namespace {

std::vector<Instance> generated(int count) {
    std::vector<Instance> out;
    for (int seed = 1; seed <= count; ++seed) {
        GenParams p;
        p.seed = seed;
        p.trains = 1 + seed % 3;
        p.nodes = 5 + seed % 4;
        out.push_back(generate_instance(p));
    }
    return out;
}

const ResourceArea& area(const PreprocessedInstance& pre, const char* train, const char* resource) {
    for (const ResourceArea& a : pre.areas)
        if (a.train == S(train) && a.resource == S(resource)) return a;
    throw std::runtime_error("no such area");
}

}  // namespace

TEST(Preprocess, SubsumptionOnFullNetwork) {
    Instance inst = load_fixture("example_full.lp");
    auto [reduced, removed] = subsume_resources(inst);
    EXPECT_EQ(removed, (std::set<Symbol>{S("r(8,10)"), S("r(9,10)"), S("r(10,7)"), S("r(10,11)"), S("r(10,12)")}));
    EXPECT_TRUE(reduced.network.resources.count(S("r(4,3)")));  // sw1 carries a free point
    EXPECT_TRUE(reduced.network.resources.count(S("sw2")));
    EXPECT_EQ(reduced.network.resources.size(), 10u);
}

TEST(Preprocess, EqualResourcesKeepOne) {
    Instance inst = parse_instance(R"(
tl(a). edge(a,1,2). m((1,2),60). w(a,(1,2),0).
e(a,1,0). l(a,1,10). e(a,2,60). l(a,2,100). start(a,1). end(a,2).
resource(x,(1,2)). resource(y,(1,2)). b(x,30). b(y,30).
)");
    auto [reduced, removed] = subsume_resources(inst);
    EXPECT_EQ(removed.size(), 1u);
    EXPECT_EQ(reduced.network.resources.size(), 1u);
}

TEST(Preprocess, LargerBlockedTimeIsNotSubsumed) {
    Instance inst = parse_instance(R"(
tl(a). edge(a,1,2). edge(a,2,3). m((1,2),60). m((2,3),60). w(a,(1,2),0). w(a,(2,3),0).
e(a,1,0). l(a,1,10). e(a,2,60). l(a,2,100). e(a,3,120). l(a,3,200). start(a,1). end(a,3).
resource(big,(1,2)). resource(big,(2,3)). resource(small,(1,2)). b(big,30). b(small,90).
)");
    EXPECT_TRUE(subsume_resources(inst).second.empty());
}

TEST(Preprocess, ExampleAreasAndBounds) {
    PreprocessedInstance pre = preprocess(load_fixture("example_full.lp"));
    EXPECT_EQ(pre.stats.resources, 15u);
    EXPECT_EQ(pre.stats.subsumed, 5u);
    EXPECT_EQ(pre.stats.incidences, 19u);
    EXPECT_EQ(pre.stats.areas, 14u);
    EXPECT_EQ(pre.stats.edge_conflicts, 15u);
    EXPECT_EQ(pre.stats.area_conflicts, 5u);
    const ResourceArea& t1sw1 = area(pre, "t1", "sw1");
    EXPECT_EQ(t1sw1.edges, (std::set<Edge>{E(1, 3), E(2, 3), E(3, 5)}));
    EXPECT_EQ(t1sw1.entry, 240);
    EXPECT_EQ(t1sw1.exit, 660);
    EXPECT_EQ(area(pre, "t3", "sw2").entry, 300);
    EXPECT_EQ(area(pre, "t2", "sw2").exit, 420);
    EXPECT_EQ(pre.free_pairs.size(), 1u);

    // the shipped area facts agree with the computation
    PreprocessedInstance listed = preprocess(load_fixture("example.lp"));
    ASSERT_EQ(listed.areas.size(), pre.areas.size());
    for (std::size_t i = 0; i < pre.areas.size(); ++i) {
        EXPECT_EQ(listed.areas[i].edges, pre.areas[i].edges);
        EXPECT_EQ(listed.areas[i].entry, pre.areas[i].entry);
        EXPECT_EQ(listed.areas[i].exit, pre.areas[i].exit);
    }
}

TEST(Preprocess, HeightsCompressVariables) {
    Instance inst = load_fixture("example.lp");
    const TrainLine& t1 = *inst.find_train(S("t1"));
    HeightMap hm = compute_heights(t1);
    EXPECT_EQ(hm.var_count, 6);
    EXPECT_EQ(hm[S("1")], 0);
    EXPECT_EQ(hm[S("2")], 0);
    EXPECT_EQ(hm[S("3")], 1);
    EXPECT_EQ(hm[S("10")], 4);
    EXPECT_EQ(hm[S("11")], 5);
    EXPECT_EQ(hm[S("12")], 5);

    HeightBounds hb = compute_height_bounds(t1, hm);
    EXPECT_EQ(hb.min_earliest[0], 240);
    EXPECT_EQ(hb.max_latest[5], 840);

    ExclusiveTimes ex = compute_exclusive_times(t1, hm, inst.network.travel_time);
    EXPECT_TRUE(ex.exclusive[0]);
    EXPECT_TRUE(ex.exclusive[4]);
    EXPECT_EQ(ex.min_time[2], 60);
}

TEST(Preprocess, HeightsRespectEdges) {
    for (const Instance& inst : generated(60)) {
        for (const TrainLine& t : inst.trains) {
            HeightMap hm = compute_heights(t);
            for (const Edge& e : t.edges) EXPECT_LT(hm[e.from], hm[e.to]);
            for (const Symbol& s : t.starts) EXPECT_EQ(hm[s], 0);
        }
    }
}

TEST(Preprocess, MandatoryEdgesMatchEnumeration) {
    Instance inst = load_fixture("example.lp");
    EXPECT_EQ(compute_mandatory_edges(*inst.find_train(S("t1"))), inst.precomputed.mandatory_edges.at(S("t1")));
    for (const Instance& g : generated(60)) {
        for (const TrainLine& t : g.trains) {
            auto paths = TrainGraph(t).enumerate_paths(1u << 20);
            std::set<Edge> every(t.edges.begin(), t.edges.end());
            for (const auto& p : paths) {
                std::set<Edge> on;
                for (std::size_t i = 0; i + 1 < p.size(); ++i) on.insert({p[i], p[i + 1]});
                std::set<Edge> keep;
                std::set_intersection(every.begin(), every.end(), on.begin(), on.end(), std::inserter(keep, keep.end()));
                every = keep;
            }
            EXPECT_EQ(compute_mandatory_edges(t), every);
        }
    }
}

TEST(Preprocess, CoverageIsAPartitionIntoAreas) {
    for (const Instance& inst : generated(60)) {
        auto [reduced, removed] = subsume_resources(inst);
        auto areas = compute_coverage(reduced);
        std::map<std::pair<Symbol, Symbol>, std::multiset<Edge>> seen;
        for (const ResourceArea& a : areas) {
            const TrainLine& t = *reduced.find_train(a.train);
            const auto& redges = reduced.network.resources.at(a.resource);
            EXPECT_TRUE(is_resource_area(a.edges, redges, t));
            for (const Edge& e : a.edges) seen[{a.train, a.resource}].insert(e);
            EXPECT_LE(a.entry, a.exit);
        }
        for (const TrainLine& t : reduced.trains)
            for (const auto& [r, redges] : reduced.network.resources) {
                std::multiset<Edge> expect;
                for (const Edge& e : t.edges)
                    if (redges.count(e)) expect.insert(e);
                EXPECT_EQ((seen[{t.id, r}]), expect);
            }
    }
}

TEST(Preprocess, ResourceAreaRejectsReentry) {
    TrainLine t;
    t.id = S("a");
    t.nodes = {S("1"), S("2"), S("3"), S("4")};
    t.edges = {E(1, 2), E(2, 3), E(3, 4)};
    std::set<Edge> res{E(1, 2), E(3, 4)};
    EXPECT_FALSE(is_resource_area(res, res, t));
    EXPECT_TRUE(is_resource_area({E(1, 2)}, res, t));
}

TEST(Preprocess, DecidedPairsFromWindows) {
    Instance inst = parse_instance(R"(
tl(a). tl(b).
edge(a,1,2). edge(a,2,3). edge(b,1,2). edge(b,2,3).
m((1,2),60). m((2,3),60).
w(a,(1,2),0). w(a,(2,3),0). w(b,(1,2),0). w(b,(2,3),0).
e(a,1,0). l(a,1,60). e(a,2,60). l(a,2,120). e(a,3,120). l(a,3,180).
e(b,1,200). l(b,1,500). e(b,2,260). l(b,2,560). e(b,3,320). l(b,3,620).
start(a,1). end(a,3). start(b,1). end(b,3).
resource(r,(1,2)). resource(r,(2,3)). b(r,60).
)");
    PreprocessedInstance pre = preprocess(inst);
    ASSERT_EQ(pre.areas.size(), 2u);
    ASSERT_EQ(pre.decided.size(), 1u);
    EXPECT_EQ(pre.areas[pre.decided[0].first].train, S("a"));
    EXPECT_EQ(pre.stats.area_conflicts, 1u);
    EXPECT_EQ(pre.stats.edge_conflicts, 1u);
}

TEST(Preprocess, FactDumpMentionsAreas) {
    PreprocessedInstance pre = preprocess(load_fixture("example_full.lp"));
    std::string dump = dump_preprocessed_facts(pre);
    EXPECT_NE(dump.find("ra(t1,sw1,"), std::string::npos);
    EXPECT_NE(dump.find("e_ra(t3,sw2,"), std::string::npos);
    EXPECT_NE(dump.find("set(t1,(3,5))."), std::string::npos);
}
