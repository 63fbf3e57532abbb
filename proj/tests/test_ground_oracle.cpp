#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mslift;

namespace {

GroundState ground(std::initializer_list<std::pair<GroundEntity, std::size_t>> entities) {
    GroundState s;
    for (const auto& [e, n] : entities) s.insert(e, n);
    return s;
}

const GroundEntity kA{{"T", std::string("A")}};

Action consume(const std::string& name, const std::string& mark) {
    return Action{name, 1.0, {Constraint::eq("T", std::string("A"))}, {Effect::set(0, "T", mark)}};
}

} // namespace

TEST(PredictGround, DeterministicAction) {
    GroundDistribution d{{ground({{kA, 2}}), 1.0}};
    const auto next = predict_ground(d, {consume("a", "x")});
    ASSERT_EQ(next.size(), 1u);
    EXPECT_EQ(next.begin()->first, ground({{GroundEntity{{"T", std::string("x")}}, 2}}));
    EXPECT_EQ(next.begin()->second, 1.0);
}

TEST(PredictGround, QuarterHalfQuarter) {
    GroundDistribution d{{ground({{kA, 2}}), 1.0}};
    const auto next = predict_ground(d, {consume("alpha", "a"), consume("beta", "b")});
    const GroundEntity ea{{"T", std::string("a")}}, eb{{"T", std::string("b")}};
    ASSERT_EQ(next.size(), 3u);
    EXPECT_NEAR(next.at(ground({{ea, 2}})), 0.25, 1e-15);
    EXPECT_NEAR(next.at(ground({{ea, 1}, {eb, 1}})), 0.5, 1e-15);
    EXPECT_NEAR(next.at(ground({{eb, 2}})), 0.25, 1e-15);
}

TEST(PredictGround, NoActionsIsIdentity) {
    GroundDistribution d{{ground({{kA, 2}}), 0.25}, {ground({{kA, 1}}), 0.75}};
    EXPECT_EQ(predict_ground(d, {}), d);
}

TEST(PredictGround, GaussianNoiseRefused) {
    GroundDistribution d{{ground({{GroundEntity{{"X", 1.0}}, 1}}), 1.0}};
    const Action move{"move", 1.0, {Constraint::has("X")}, {Effect::shift(0, "X", 1.0, 0.5)}};
    EXPECT_THROW(predict_ground(d, {move}), UnsupportedOperation);
}

TEST(UpdateGround, IdentityConfusionUnchanged) {
    GroundDistribution d{{ground({{kA, 2}}), 0.25}, {ground({{kA, 1}}), 0.75}};
    const CountReading flat{Constraint::has("T"), 1, {{1, 0.5}, {2, 0.5}}, 0.5};
    EXPECT_EQ(update_ground(d, flat), d);
}

TEST(UpdateGround, DeterministicIdentityRestricts) {
    const GroundEntity alice{{"N", std::string("Alice")}}, bob{{"N", std::string("Bob")}};
    GroundDistribution d{{ground({{alice, 1}}), 0.3}, {ground({{bob, 1}}), 0.7}};
    IdentityReading y;
    y.property = "N";
    y.value = std::string("Alice");
    const auto post = update_ground(d, y);
    ASSERT_EQ(post.size(), 1u);
    EXPECT_EQ(post.begin()->second, 1.0);
}

TEST(UpdateGround, BayesTable) {
    // Three states with 0, 1 and 2 entities in the region; noisy counter reports 1.
    const GroundEntity in{{"R", std::string("in")}}, out{{"R", std::string("out")}};
    GroundDistribution d{{ground({{out, 2}}), 0.5}, {ground({{in, 1}, {out, 1}}), 0.3}, {ground({{in, 2}}), 0.2}};
    const CountReading y{Constraint::eq("R", std::string("in")), 1, {{0, 0.1}, {1, 0.8}, {2, 0.3}}, 0.0};
    const auto post = update_ground(d, y);
    const double z = 0.5 * 0.1 + 0.3 * 0.8 + 0.2 * 0.3;
    EXPECT_NEAR(post.at(ground({{out, 2}})), 0.05 / z, 1e-15);
    EXPECT_NEAR(post.at(ground({{in, 1}, {out, 1}})), 0.24 / z, 1e-15);
    EXPECT_NEAR(post.at(ground({{in, 2}})), 0.06 / z, 1e-15);
}

TEST(UpdateGround, ImpossibleCarriesPrior) {
    GroundDistribution d{{ground({{kA, 2}}), 1.0}};
    try {
        update_ground(d, CountReading{Constraint::has("T"), 0, {}, 0.0});
        FAIL();
    } catch (const ImpossibleGroundObservation& e) {
        EXPECT_EQ(e.prior(), d);
    }
}

TEST(Compare, SelfExpansionAndPerturbation) {
    LiftedState l;
    l.context.emplace("n", make_urn({std::string("A"), std::string("B")}));
    l.structure.insert(EntityStructure{{"N", "n"}}, 2);
    l.context.emplace("m", make_urn({std::string("A"), std::string("B"), std::string("C")}));
    l.structure.insert(EntityStructure{{"M", "m"}});
    LiftedDistribution d;
    d.insert(l, 1.0);
    GroundDistribution g = mixture_ground(d);
    auto rep = compare(d, g);
    EXPECT_EQ(rep.max_deviation, 0.0);
    EXPECT_TRUE(rep.matches(1e-9));
    EXPECT_EQ(rep.lifted_support, rep.ground_support);

    g.begin()->second += 1e-3;
    rep = compare(d, g);
    EXPECT_NEAR(rep.max_deviation, 1e-3, 1e-15);
    EXPECT_FALSE(rep.matches(1e-9));

    g = mixture_ground(d);
    g[GroundState{}] = 0.5;
    rep = compare(d, g);
    EXPECT_EQ(rep.only_in_ground, 1u);
    EXPECT_FALSE(rep.matches(1e-9));
}

TEST(GroundCounts, FactorialNameAssociations) {
    const std::vector<Value> names{std::string("A"), std::string("B"), std::string("C"), std::string("D"),
                                   std::string("E")};
    for (std::size_t n = 1; n <= 5; ++n) {
        LiftedState l;
        l.context.emplace("n", make_urn(std::vector<Value>(names.begin(), names.begin() + static_cast<long>(n))));
        for (std::size_t i = 0; i < n; ++i) {
            l.context.emplace("r" + std::to_string(i), Dirac{static_cast<double>(i)});
            l.structure.insert(EntityStructure{{"N", "n"}, {"R", "r" + std::to_string(i)}});
        }
        std::size_t fact = 1;
        for (std::size_t k = 2; k <= n; ++k) fact *= k;
        EXPECT_EQ(ground_expand(l).size(), fact);
    }
}

TEST(LabeledEnumeration, CountsMatchLabeledOracle) {
    // Three labeled copies, two single-slot actions: 2^3 maximal sets.
    const GroundState s = ground({{kA, 3}});
    const std::vector<Action> acts{consume("alpha", "a"), consume("beta", "b")};
    const auto en = enumerate_labeled_compounds(s, acts);
    EXPECT_EQ(en.copies.size(), 3u);
    EXPECT_EQ(en.instances.size(), 6u);
    EXPECT_EQ(en.compounds.size(), 8u);
}
