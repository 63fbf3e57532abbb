#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "random_scenarios.hpp"

using namespace mslift;

namespace {

const Value A = std::string("A"), B = std::string("B"), C = std::string("C");

LiftedState two_entity_gaussian() {
    LiftedState l;
    l.context.emplace("N", make_urn({A, B}));
    l.context.emplace("L1", Gaussian{1.3, 2.0});
    l.context.emplace("L2", Gaussian{2.1, 1.0});
    l.structure.insert(EntityStructure{{"Name", "N"}, {"Loc", "L1"}});
    l.structure.insert(EntityStructure{{"Name", "N"}, {"Loc", "L2"}});
    return l;
}

// All-Dirac state with property T; counts per type value.
LiftedState typed(const std::map<std::string, std::size_t>& counts) {
    LiftedState l;
    for (const auto& [t, n] : counts) {
        l.context.emplace("t_" + t, Dirac{t});
        l.structure.insert(EntityStructure{{"T", "t_" + t}}, n);
    }
    return l;
}

Action consume(const std::string& name, double w, const std::string& mark = "") {
    Action a{name, w, {Constraint::eq("T", std::string("A"))}, {}};
    if (!mark.empty()) a.effects.push_back(Effect::set(0, "S", mark));
    return a;
}

std::map<std::string, double> by_action_counts(const std::vector<WeightedCompound>& ks, const std::vector<Action>& acts) {
    std::map<std::string, double> out;
    for (const auto& k : ks) {
        std::string key;
        for (const auto& [inst, n] : k.compound.instances) key += std::to_string(n) + acts[inst.action].name;
        out[key] += k.probability;
    }
    return out;
}

} // namespace

TEST(EvalConstraint, Examples) {
    Context ctx{{"d", Dirac{std::string("Alice")}}, {"u", make_urn({std::string("Alice"), std::string("Bob")})}};
    EXPECT_EQ(eval_constraint(Constraint::eq("N", std::string("Alice")), {{"N", "d"}}, ctx).truth, Truth::Sat);
    const Evaluation ev = eval_constraint(Constraint::eq("N", std::string("Alice")), {{"N", "u"}}, ctx);
    EXPECT_EQ(ev.truth, Truth::Indeterminate);
    EXPECT_EQ(ev.property, "N");
    EXPECT_EQ(ev.label, "u");
    EXPECT_EQ(eval_constraint(Constraint::eq("N", std::string("Carol")), {{"N", "u"}}, ctx).truth, Truth::Unsat);
    EXPECT_EQ(eval_constraint(Constraint::has("Loc"), {{"N", "u"}}, ctx).truth, Truth::Unsat);
    EXPECT_EQ(eval_constraint(Constraint::in("N", {std::string("Alice"), std::string("Bob")}), {{"N", "u"}}, ctx).truth,
              Truth::Sat);
    EXPECT_EQ(eval_constraint(Constraint::all({Constraint::has("N"), Constraint::eq("N", std::string("Bob"))}),
                              {{"N", "d"}}, ctx)
                  .truth,
              Truth::Unsat);
}

TEST(EvalConstraint, GaussianEqualityUnsupported) {
    Context ctx{{"g", Gaussian{0.0, 1.0}}};
    EXPECT_THROW(eval_constraint(Constraint::eq("Loc", 1.0), {{"Loc", "g"}}, ctx), UnsupportedOperation);
    EXPECT_EQ(eval_constraint(Constraint::has("Loc"), {{"Loc", "g"}}, ctx).truth, Truth::Sat);
}

TEST(SplitToDeterminacy, TwoEntityNameSplit) {
    const Action a{"greet", 1.0, {Constraint::eq("Name", A)}, {}};
    const auto branches = split_to_determinacy(two_entity_gaussian(), std::vector<Action>{a});
    ASSERT_EQ(branches.size(), 2u);
    std::set<double> located;
    for (const auto& [l, p] : branches) {
        EXPECT_DOUBLE_EQ(p, 0.5);
        for (const auto& [e, n] : l.structure) {
            const auto& name = l.context.at(e.at("Name"));
            ASSERT_TRUE(std::holds_alternative<Dirac>(name));
            if (std::get<Dirac>(name).value == A) located.insert(std::get<Gaussian>(l.context.at(e.at("Loc"))).mean);
        }
    }
    EXPECT_EQ(located, (std::set<double>{1.3, 2.1}));
}

TEST(SplitToDeterminacy, AllDiracUnchanged) {
    const LiftedState l = typed({{"A", 2}, {"B", 1}});
    const auto branches = split_to_determinacy(l, std::vector<Action>{consume("a", 1.0)});
    ASSERT_EQ(branches.size(), 1u);
    EXPECT_EQ(branches[0].first, canonicalize(l));
    EXPECT_EQ(branches[0].second, 1.0);
}

TEST(SplitToDeterminacy, ThreeWaySplit) {
    LiftedState l;
    l.context.emplace("n", make_urn({A, B, C}));
    l.structure.insert(EntityStructure{{"Name", "n"}});
    const auto branches = split_to_determinacy(l, {Constraint::eq("Name", B)});
    ASSERT_EQ(branches.size(), 3u);
    for (const auto& [s, p] : branches) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
}

TEST(SplitToDeterminacy, BudgetExceeded) {
    LiftedState l;
    l.context.emplace("n", make_urn({A, B, C}));
    l.structure.insert(EntityStructure{{"Name", "n"}}, 3);
    EXPECT_THROW(split_to_determinacy(l, {Constraint::eq("Name", B)}, EngineOptions{2, 100}), ResourceLimit);
}

TEST(SplitToDeterminacyProperty, PreservesGroundMixture) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        randomized::Generator gen(seed);
        const LiftedState l = gen.initial_state();
        const std::vector<Constraint> cs{Constraint::eq("N", std::string("A")), Constraint::in("R", {std::string("r0")})};
        const auto branches = split_to_determinacy(l, cs);
        double mass = 0.0;
        LiftedDistribution d;
        for (const auto& [b, p] : branches) {
            mass += p;
            d.insert(b, p);
            for (const auto& [e, n] : b.structure)
                for (const auto& c : cs) EXPECT_NE(eval_constraint(c, e, b.context).truth, Truth::Indeterminate);
        }
        EXPECT_NEAR(mass, 1.0, 1e-12);
        const auto before = ground_expand(l);
        const auto after = mixture_ground(d);
        ASSERT_EQ(before.size(), after.size());
        for (const auto& [s, p] : before) EXPECT_NEAR(after.at(s), p, 1e-12);
    }
}

TEST(EnumerateInstances, Examples) {
    const Action one{"go", 1.0, {Constraint::has("T")}, {}};
    EXPECT_EQ(enumerate_instances(typed({{"person", 2}}), one).size(), 1u);
    const Action two{"pair", 1.0, {Constraint::has("T"), Constraint::has("T")}, {}};
    EXPECT_EQ(enumerate_instances(typed({{"p", 1}, {"q", 1}}), two).size(), 2u);
    EXPECT_EQ(enumerate_instances(typed({{"p", 2}}), two).size(), 1u);
    const Action none{"none", 1.0, {Constraint::eq("T", std::string("zzz"))}, {}};
    EXPECT_TRUE(enumerate_instances(typed({{"p", 2}}), none).empty());
    const Action name{"name", 1.0, {Constraint::eq("Name", A)}, {}};
    EXPECT_THROW(enumerate_instances(two_entity_gaussian(), name), InvalidInput);
}

TEST(EnumerateAmca, SingleAction) {
    const std::vector<Action> acts{consume("alpha", 1.0)};
    const auto ks = enumerate_amca(typed({{"A", 2}}), acts);
    ASSERT_EQ(ks.size(), 1u);
    EXPECT_EQ(ks[0].compound.instances.size(), 2u);
    EXPECT_EQ(ks[0].probability, 1.0);
}

TEST(EnumerateAmca, TwoActionsQuarterHalfQuarter) {
    const std::vector<Action> acts{consume("alpha", 1.0), consume("beta", 1.0)};
    const auto p = by_action_counts(enumerate_amca(typed({{"A", 2}}), acts), acts);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_NEAR(p.at("2alpha"), 0.25, 1e-15);
    EXPECT_NEAR(p.at("1alpha1beta"), 0.5, 1e-15);
    EXPECT_NEAR(p.at("2beta"), 0.25, 1e-15);
}

TEST(EnumerateAmca, WeightedCase) {
    const std::vector<Action> acts{consume("alpha", 2.0), consume("beta", 1.0)};
    const auto ks = enumerate_amca(typed({{"A", 2}}), acts);
    const auto p = by_action_counts(ks, acts);
    EXPECT_NEAR(p.at("2alpha"), 4.0 / 9.0, 1e-15);
    EXPECT_NEAR(p.at("1alpha1beta"), 4.0 / 9.0, 1e-15);
    EXPECT_NEAR(p.at("2beta"), 1.0 / 9.0, 1e-15);
}

TEST(EnumerateAmca, NothingApplicableGivesEmptyCompound) {
    const std::vector<Action> acts{Action{"x", 1.0, {Constraint::eq("T", std::string("zzz"))}, {}}};
    const auto ks = enumerate_amca(typed({{"A", 2}}), acts);
    ASSERT_EQ(ks.size(), 1u);
    EXPECT_TRUE(ks[0].compound.instances.empty());
    EXPECT_EQ(ks[0].probability, 1.0);
    EXPECT_EQ(enumerate_amca(typed({{"A", 2}}), {}).size(), 1u);
}

TEST(EnumerateAmca, ZeroArityAtMostOnce) {
    const std::vector<Action> acts{Action{"tick", 1.0, {}, {}}, consume("alpha", 1.0)};
    const auto ks = enumerate_amca(typed({{"A", 2}}), acts);
    ASSERT_EQ(ks.size(), 1u);
    EXPECT_EQ(ks[0].compound.instances.size(), 3u);
    for (const auto& [inst, n] : ks[0].compound.instances) {
        if (inst.action == 0) {
            EXPECT_EQ(n, 1u);
        }
    }
}

TEST(EnumerateAmca, BudgetExceeded) {
    const std::vector<Action> acts{consume("alpha", 1.0), consume("beta", 1.0)};
    EXPECT_THROW(enumerate_amca(typed({{"A", 6}}), acts, EngineOptions{100, 3}), ResourceLimit);
}

TEST(EnumerateAmcaProperty, MatchesLabeledCopyLaw) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 400; ++i) {
        const auto inst = oracle::small_instance(rng);
        const auto ks = enumerate_amca(inst.state, inst.actions);
        const auto law = oracle::labeled_amca_law(inst.state, inst.actions);
        ASSERT_EQ(ks.size(), law.weight.size()) << to_string(inst.state);
        double sum = 0.0;
        for (const auto& k : ks) {
            const auto key = oracle::key_of(k.compound);
            ASSERT_TRUE(law.weight.count(key));
            const auto w = law.weight.at(key);
            EXPECT_EQ(k.weight, boost::rational_cast<double>(w));
            EXPECT_NEAR(k.probability, boost::rational_cast<double>(w / law.total), 1e-12);
            sum += k.probability;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(EnumerateAmcaProperty, MaximalAndEqualToNaiveEnumeration) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 400; ++i) {
        const auto inst = oracle::small_instance(rng);
        const auto ks = enumerate_amca(inst.state, inst.actions);
        std::set<oracle::CompoundKey> found;
        for (const auto& k : ks) {
            EXPECT_TRUE(oracle::is_maximal(inst.state, inst.actions, k.compound));
            EXPECT_TRUE(found.insert(oracle::key_of(k.compound)).second) << "duplicate compound";
        }
        auto naive = oracle::naive_type_amcas(inst.state, inst.actions);
        if (naive.empty()) naive.insert({});
        EXPECT_EQ(found, naive);
    }
}

TEST(ApplyCompound, IdentityEffect) {
    const LiftedState l = typed({{"A", 2}});
    const std::vector<Action> acts{consume("alpha", 1.0)};
    const auto ks = enumerate_amca(l, acts);
    EXPECT_EQ(apply_compound(ks[0].compound, l, acts), canonicalize(l));
}

TEST(ApplyCompound, GaussianShift) {
    LiftedState l;
    l.context.emplace("g", Gaussian{1.3, 2.0});
    l.structure.insert(EntityStructure{{"Loc", "g"}});
    const std::vector<Action> acts{Action{"move", 1.0, {Constraint::has("Loc")}, {Effect::shift(0, "Loc", 1.0, 0.5)}}};
    const auto ks = enumerate_amca(l, acts);
    const LiftedState out = apply_compound(ks[0].compound, l, acts);
    ASSERT_EQ(out.context.size(), 1u);
    const auto& g = std::get<Gaussian>(out.context.begin()->second);
    EXPECT_NEAR(g.mean, 2.3, 1e-12);
    EXPECT_NEAR(g.variance, 2.5, 1e-12);
}

TEST(ApplyCompound, RemoveKeepsReferencedLabelsOnly) {
    LiftedState l;
    l.context.emplace("a", Dirac{A});
    l.context.emplace("b", Dirac{B});
    l.structure.insert(EntityStructure{{"T", "a"}});
    l.structure.insert(EntityStructure{{"T", "b"}});
    const std::vector<Action> acts{Action{"leave", 1.0, {Constraint::eq("T", A)}, {Effect::remove(0)}}};
    const auto ks = enumerate_amca(l, acts);
    const LiftedState out = apply_compound(ks[0].compound, l, acts);
    EXPECT_EQ(out.structure.size(), 1u);
    ASSERT_EQ(out.context.size(), 1u);
    EXPECT_EQ(std::get<Dirac>(out.context.begin()->second).value, B);
}

TEST(ApplyCompound, AddUsesPrivateLabels) {
    EntityTemplate t{{{"T", "x"}, {"Name", "n"}}, {{"x", Dirac{A}}, {"n", make_urn({B, C})}}};
    const std::vector<Action> acts{Action{"spawn", 1.0, {}, {Effect::add(t)}}};
    const LiftedState l = typed({{"A", 1}});
    const auto ks = enumerate_amca(l, acts);
    ASSERT_EQ(ks.size(), 1u);
    const LiftedState out = apply_compound(ks[0].compound, l, acts);
    EXPECT_EQ(out.structure.size(), 2u);
    validate(out);
    EXPECT_EQ(ground_expand(out).size(), 2u);
}

TEST(ValidateAction, RejectsMalformedActions) {
    EXPECT_THROW(validate(Action{"w", 0.0, {Constraint::has("T")}, {}}), ModelError);
    EXPECT_THROW(validate(Action{"s", 1.0, {Constraint::has("T")}, {Effect::set(1, "T", A)}}), ModelError);
    EXPECT_THROW(validate(Action{"r", 1.0, {Constraint::has("T")}, {Effect::remove(0), Effect::set(0, "T", A)}}),
                 ModelError);
    EXPECT_THROW(validate(Action{"v", 1.0, {Constraint::has("T")}, {Effect::shift(0, "L", 1.0, -1.0)}}), ModelError);
    EntityTemplate bad{{{"T", "missing"}}, {}};
    EXPECT_THROW(validate(Action{"a", 1.0, {}, {Effect::add(bad)}}), ModelError);
    EXPECT_NO_THROW(validate(Action{"ok", 2.0, {Constraint::has("T")}, {Effect::set(0, "T", A)}}));
}

TEST(Predict, QuarterHalfQuarterSuccessors) {
    const std::vector<Action> acts{consume("alpha", 1.0, "a"), consume("beta", 1.0, "b")};
    LiftedDistribution d;
    d.insert(typed({{"A", 2}}), 1.0);
    const LiftedDistribution next = predict(d, acts);
    ASSERT_EQ(next.size(), 3u);
    std::multiset<double> weights;
    for (const auto& e : next) weights.insert(e.weight);
    EXPECT_NEAR(*weights.begin(), 0.25, 1e-15);
    EXPECT_NEAR(*weights.rbegin(), 0.5, 1e-15);
    EXPECT_NEAR(next.total_weight(), 1.0, 1e-15);
}

TEST(Predict, DeterministicSingleSuccessor) {
    const std::vector<Action> acts{consume("alpha", 1.0, "a")};
    LiftedDistribution d;
    d.insert(typed({{"A", 2}}), 1.0);
    const LiftedDistribution next = predict(d, acts);
    ASSERT_EQ(next.size(), 1u);
    EXPECT_EQ(next.entries()[0].weight, 1.0);
}

TEST(Predict, CoincidingSuccessorsMerge) {
    const std::vector<Action> acts{Action{"to_b", 1.0, {Constraint::has("T")}, {Effect::set(0, "T", B)}}};
    LiftedDistribution d;
    d.insert(typed({{"A", 1}}), 0.3);
    d.insert(typed({{"C", 1}}), 0.7);
    const LiftedDistribution next = predict(d, acts);
    ASSERT_EQ(next.size(), 1u);
    EXPECT_NEAR(next.entries()[0].weight, 1.0, 1e-15);
}

TEST(PredictProperty, CommutesWithGrounding) {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        randomized::Generator gen(seed + 5000);
        const Scenario sc = gen.scenario();
        const LiftedDistribution d = initial_distribution(sc);
        const LiftedDistribution next = predict(d, sc.actions);
        EXPECT_NEAR(next.total_weight(), 1.0, 1e-12);
        const auto report = compare(next, predict_ground(mixture_ground(d), sc.actions));
        EXPECT_TRUE(report.matches(1e-9)) << "seed " << seed << " deviation " << report.max_deviation;
    }
}
