#include <gtest/gtest.h>

#include <random>
#include <string>

#include "mslift/multiset.hpp"

using mslift::Multiset;
using MS = Multiset<std::string>;

namespace {

std::string show(const MS& m) {
    return to_string(m, [](const std::string& s) { return s; });
}

MS random_multiset(std::mt19937& rng) {
    MS m;
    std::uniform_int_distribution<int> n(0, 3);
    for (const char* e : {"a", "b", "c", "d"}) m.insert(e, static_cast<std::size_t>(n(rng)));
    return m;
}

} // namespace

TEST(Multiset, UnionAddsMultiplicities) {
    EXPECT_EQ(multiset_union(MS{{"a", 1}}, MS{{"a", 2}, {"b", 1}}), (MS{{"a", 3}, {"b", 1}}));
    EXPECT_EQ(multiset_union(MS{}, MS{{"x", 2}}), (MS{{"x", 2}}));
    EXPECT_EQ(multiset_union(MS{{"x", 1}}, MS{{"x", 1}}), (MS{{"x", 2}}));
}

TEST(Multiset, DifferenceSaturates) {
    EXPECT_EQ(multiset_difference(MS{{"a", 3}, {"b", 1}}, MS{{"a", 1}}), (MS{{"a", 2}, {"b", 1}}));
    const MS m{{"a", 2}, {"b", 5}};
    EXPECT_TRUE(multiset_difference(m, m).empty());
    EXPECT_EQ(multiset_difference(MS{{"a", 1}}, MS{{"b", 1}}), (MS{{"a", 1}}));
    EXPECT_EQ(multiset_difference(MS{{"a", 1}}, MS{{"a", 4}}), MS{});
}

TEST(Multiset, Subset) {
    EXPECT_TRUE(is_submultiset(MS{{"a", 1}}, MS{{"a", 2}, {"b", 1}}));
    EXPECT_TRUE(is_submultiset(MS{}, MS{{"a", 1}}));
    EXPECT_FALSE(is_submultiset(MS{{"a", 2}}, MS{{"a", 1}}));
}

TEST(Multiset, NoZeroEntriesAndSizeIsTotal) {
    MS m;
    m.insert("a", 0);
    EXPECT_EQ(m.distinct(), 0u);
    m.insert("a", 2);
    m.insert("b");
    EXPECT_EQ(m.size(), 3u);
    EXPECT_EQ(m.erase("a", 5), 2u);
    EXPECT_FALSE(m.contains("a"));
    EXPECT_EQ(m.distinct(), 1u);
    EXPECT_EQ(m.size(), 1u);
}

TEST(Multiset, OrderFreeEqualityAndCanonicalText) {
    MS a, b;
    a.insert("b");
    a.insert("a", 2);
    b.insert("a");
    b.insert("b");
    b.insert("a");
    EXPECT_EQ(a, b);
    EXPECT_EQ(show(a), "⦃2a, 1b⦄");
    EXPECT_EQ(show(MS{}), "⦃⦄");
}

TEST(MultisetProperty, AlgebraicLaws) {
    std::mt19937 rng(7);
    for (int i = 0; i < 500; ++i) {
        const MS a = random_multiset(rng), b = random_multiset(rng), c = random_multiset(rng);
        EXPECT_EQ(multiset_union(a, b), multiset_union(b, a));
        EXPECT_EQ(multiset_union(multiset_union(a, b), c), multiset_union(a, multiset_union(b, c)));
        EXPECT_EQ(multiset_difference(multiset_union(a, b), b), a);
        EXPECT_TRUE(is_submultiset(a, multiset_union(a, b)));
        EXPECT_EQ(multiset_union(a, b).size(), a.size() + b.size());
        for (const auto& [e, n] : a) EXPECT_GT(n, 0u);
    }
}

TEST(MultisetProperty, IterationIsSorted) {
    MS m{{"d", 1}, {"a", 2}, {"c", 1}, {"b", 3}};
    std::string prev;
    for (const auto& [e, n] : m) {
        EXPECT_LT(prev, e);
        prev = e;
    }
}
