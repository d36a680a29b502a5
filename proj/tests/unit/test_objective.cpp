#include <random>

#include <gtest/gtest.h>

#include "railsched/objective.hpp"
#include "test_util.hpp"

using namespace railsched;

TEST(Objective, BinaryScheme) {
    EXPECT_EQ(gen_binary(450, 840), (std::vector<Threshold>{{451, 1}}));
    EXPECT_TRUE(gen_binary(300, 300).empty());
    EXPECT_EQ(gen_binary(0, 1), (std::vector<Threshold>{{1, 1}}));
}

TEST(Objective, LinearScheme) {
    EXPECT_EQ(weigh_thresholds(5, {6, 10, 14}), (std::vector<Threshold>{{6, 1}, {10, 4}, {14, 4}}));
    auto six = gen_linear(100, 1000, 180);
    ASSERT_EQ(six.size(), 6u);
    EXPECT_EQ(six.front(), (Threshold{101, 1}));
    EXPECT_EQ(six.back(), (Threshold{1000, 180}));
    EXPECT_EQ(gen_linear(100, 200, 180), (std::vector<Threshold>{{101, 1}}));
    EXPECT_TRUE(gen_linear(7, 7, 60).empty());
    EXPECT_THROW(gen_linear(0, 10, 0), std::invalid_argument);
    EXPECT_THROW(weigh_thresholds(5, {5}), std::invalid_argument);
}

TEST(Objective, PenaltyBetweenThresholds) {
    auto w = weigh_thresholds(5, {6, 10, 14});
    EXPECT_EQ(threshold_penalty(w, 5), 0);
    EXPECT_EQ(threshold_penalty(w, 6), 1);
    EXPECT_EQ(threshold_penalty(w, 12), 5);
    EXPECT_EQ(threshold_penalty(w, 100), 9);
}

TEST(Objective, LinearLowerBoundProperty) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        Seconds d = rng() % 1000;
        Seconds l = d + rng() % 2000;
        Seconds m = 1 + rng() % 300;
        auto list = gen_linear(d, l, m);
        Seconds total = 0;
        Seconds prev = d;
        for (const Threshold& t : list) {
            EXPECT_GT(t.at, prev);
            EXPECT_LE(t.at, l);
            prev = t.at;
            total += t.weight;
        }
        if (!list.empty()) EXPECT_EQ(total, list.back().at - d);  // telescoping
        Seconds a = d - 50 + static_cast<Seconds>(rng() % (l - d + 100));
        Seconds pen = threshold_penalty(list, a);
        Seconds delay = std::max<Seconds>(a - d, 0);
        EXPECT_LE(pen, delay);
        if (a <= l && a > d) EXPECT_LT(delay - pen, m);
    }
}

TEST(Objective, SchemeParsing) {
    EXPECT_EQ(ThresholdScheme::parse("binary").kind, ThresholdScheme::Kind::Binary);
    auto lin = ThresholdScheme::parse("linear:180");
    EXPECT_EQ(lin.kind, ThresholdScheme::Kind::Linear);
    EXPECT_EQ(lin.step, 180);
    EXPECT_EQ(lin.str(), "linear:180");
    EXPECT_THROW(ThresholdScheme::parse("linear:0"), std::invalid_argument);
    EXPECT_THROW(ThresholdScheme::parse("linear:x"), std::invalid_argument);
    EXPECT_THROW(ThresholdScheme::parse("quadratic"), std::invalid_argument);
}

TEST(Objective, ThresholdsFromFactsOrScheme) {
    Instance inst = load_fixture("example.lp");
    ThresholdSet facts = derive_thresholds(inst, std::nullopt);
    EXPECT_EQ(facts.size(), inst.objective.thresholds.size());
    EXPECT_EQ(facts.at({S("t1"), S("11")}), (std::vector<Threshold>{{751, 1}}));

    ThresholdSet lin = derive_thresholds(inst, ThresholdScheme::parse("linear:60"));
    // d(t1,11) = 750, l = 840: 751, 810
    EXPECT_EQ(lin.at({S("t1"), S("11")}), (std::vector<Threshold>{{751, 1}, {810, 59}}));

    auto d = delay_starts(inst);
    EXPECT_EQ(d.at({S("t3"), S("12")}), 660);
}
