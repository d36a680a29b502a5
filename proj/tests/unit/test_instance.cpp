#include <gtest/gtest.h>

#include "railsched/generator.hpp"
#include "test_util.hpp"

using namespace railsched;

namespace {

const char* kSmall = R"(
tl(a).
edge(a,1,2). edge(a,2,3).
m((1,2),60). m((2,3),60).
w(a,(1,2),0). w(a,(2,3),0).
e(a,1,0). l(a,1,100). e(a,2,60). l(a,2,#sup). e(a,3,120). l(a,3,500).
start(a,1). end(a,3).
)";

std::string with(const std::string& extra) { return std::string(kSmall) + extra; }

}  // namespace

TEST(Instance, ParsesExample) {
    Instance inst = load_fixture("example.lp");
    ASSERT_EQ(inst.trains.size(), 3u);
    const TrainLine& t1 = *inst.find_train(S("t1"));
    EXPECT_EQ(t1.nodes.size(), 8u);
    EXPECT_EQ(t1.starts, (std::set<Symbol>{S("1"), S("2")}));
    EXPECT_EQ(t1.ends, (std::set<Symbol>{S("11"), S("12")}));
    EXPECT_EQ(t1.earliest.at(S("2")), 240);
    EXPECT_EQ(inst.network.travel_time.at(E(10, 12)), 60);
    ASSERT_EQ(inst.connections.size(), 3u);
    EXPECT_EQ(inst.connections[1].alpha, 60);
    EXPECT_EQ(inst.connections[1].omega, kPosInf);
    EXPECT_EQ(inst.free_points.size(), 1u);
    EXPECT_EQ(inst.objective.thresholds.at({S("t1"), S("1")}), (std::vector<Threshold>{{451, 1}}));
    EXPECT_EQ(inst.objective.route_penalty.at(E(1, 3)), 1);
    EXPECT_TRUE(inst.precomputed.has_areas());
    EXPECT_EQ(inst.precomputed.mandatory_edges.at(S("t1")).size(), 3u);
    EXPECT_TRUE(validate_instance(inst).empty());
}

TEST(Instance, InfinityResolvedByPosition) {
    Instance inst = parse_instance(with("tl(b). edge(b,1,2). w(b,(1,2),0). e(b,1,0). l(b,1,10). e(b,2,60). l(b,2,90)."
                                        "start(b,1). end(b,2). connection(c,a,(1,2),b,(1,2),#inf,#inf,1,1)."));
    EXPECT_EQ(inst.connections[0].alpha, kNegInf);
    EXPECT_EQ(inst.connections[0].omega, kPosInf);
    EXPECT_EQ(inst.find_train(S("a"))->latest.at(S("2")), kPosInf);
}

TEST(Instance, CommentsAreIgnored) {
    Instance inst = parse_instance(with("% tl(zzz).\npenalty((1,2),3). % trailing\n"));
    EXPECT_EQ(inst.trains.size(), 1u);
    EXPECT_EQ(inst.objective.route_penalty.at(E(1, 2)), 3);
}

TEST(Instance, ParseErrorsCarryPositions) {
    try {
        parse_instance(with("\nfoo(1)."));
        FAIL() << "unknown predicate accepted";
    } catch (const ParseError& e) {
        EXPECT_GT(e.line(), 0);
        EXPECT_GT(e.column(), 0);
        EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos);
    }
    EXPECT_THROW(parse_instance(with("e(zz,1,0).")), ParseError);          // unknown train
    EXPECT_THROW(parse_instance(with("m((1,2),90).")), ParseError);        // conflicting duplicate
    EXPECT_THROW(parse_instance(with("edge(a,3,4).")), ParseError);        // no travel time for (3,4)
    EXPECT_THROW(parse_instance(with("b(nowhere,10).")), ParseError);      // blocked time of unknown resource
    EXPECT_THROW(parse_instance(with("tl(a")), ParseError);                // syntax
    EXPECT_NO_THROW(parse_instance(with("m((1,2),60).")));                 // consistent duplicate
}

TEST(Instance, SerializeRoundTrips) {
    for (const char* name : {"example.lp", "example_full.lp", "infeasible.lp"}) {
        Instance inst = load_fixture(name);
        EXPECT_EQ(parse_instance(serialize_instance(inst)), inst) << name;
    }
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        GenParams p;
        p.seed = seed;
        Instance inst = generate_instance(p);
        std::string text = serialize_instance(inst);
        EXPECT_EQ(parse_instance(text), inst) << "seed " << seed;
        EXPECT_EQ(serialize_instance(parse_instance(text)), text);
    }
}

TEST(Instance, ValidationFlagsBrokenWindowsAndCycles) {
    EXPECT_TRUE(validate_instance(parse_instance(kSmall)).empty());
    Instance late = parse_instance(with(""));
    late.trains[0].latest[S("1")] = -5;
    EXPECT_FALSE(validate_instance(late).empty());

    Instance cyc = parse_instance(with("m((2,4),60). m((4,2),60). edge(a,2,4). edge(a,4,2). w(a,(2,4),0). w(a,(4,2),0). "
                                        "e(a,4,0). l(a,4,900)."));
    EXPECT_FALSE(validate_instance(cyc).empty());
    EXPECT_THROW(parse_instance(with("m((3,1),60). edge(a,3,1). w(a,(3,1),0).")), ParseError);
}

TEST(Instance, ValidationRequiresFreePointClosure) {
    Instance inst = load_fixture("example.lp");
    CollisionFreePoint extra = inst.free_points[0];
    extra.edge = E(7, 4);  // not on sw1
    inst.free_points.push_back(extra);
    EXPECT_FALSE(validate_instance(inst).empty());
}

TEST(Instance, DelayStartFromSmallestThreshold) {
    Instance inst = load_fixture("example.lp");
    EXPECT_EQ(effective_delay_start(inst, S("t1"), S("1")), 450);
    EXPECT_EQ(effective_delay_start(inst, S("t2"), S("10")), 240);
}
