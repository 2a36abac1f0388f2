#include <gtest/gtest.h>

#include <random>

#include "coneforce/facts.hpp"

using namespace coneforce;

namespace {

// Disperse iff no assignment of the indices to u parts gives every part a common point.
bool disperse_oracle(const std::vector<ClopenSet>& vs, std::size_t u) {
    const std::size_t n = vs.size();
    std::vector<std::size_t> a(n, 0);
    for (;;) {
        bool all_meet = true;
        for (std::size_t p = 0; p < u && all_meet; ++p) {
            std::vector<ClopenSet> part;
            for (std::size_t j = 0; j < n; ++j)
                if (a[j] == p) part.push_back(vs[j]);
            if (!part.empty() && !intersection_nonempty(part)) all_meet = false;
        }
        if (all_meet) return false;
        std::size_t j = 0;
        while (j < n && ++a[j] == u) a[j++] = 0;
        if (j == n) return true;
    }
}

std::vector<ClopenSet> three_disjoint() { return {ClopenSet{"0"}, ClopenSet{"10"}, ClopenSet{"11"}}; }

}  // namespace

TEST(Disperse, Examples) {
    EXPECT_TRUE(is_disperse(three_disjoint(), 2));
    EXPECT_FALSE(is_disperse({ClopenSet{"0"}, ClopenSet{"1"}}, 2));
    EXPECT_FALSE(is_disperse({ClopenSet{"0"}}, 1));
    EXPECT_TRUE(is_disperse({ClopenSet{}}, 3));
    EXPECT_THROW(is_disperse({}, 1), PreconditionViolation);
}

TEST(Disperse, MatchesOracleOnRandomSequences) {
    std::mt19937_64 rng(7);
    const auto pool = all_clopen_sets(2);
    for (int it = 0; it < 3000; ++it) {
        const std::size_t n = 1 + rng() % 5;
        std::vector<ClopenSet> vs;
        for (std::size_t j = 0; j < n; ++j) vs.push_back(pool[rng() % pool.size()]);
        const std::size_t u = 1 + rng() % 4;
        ASSERT_EQ(is_disperse(vs, u), disperse_oracle(vs, u)) << detail::show(vs) << " u=" << u;
    }
}

TEST(Supporter, Examples) {
    EXPECT_TRUE(is_supporter(Supporter{3, {{ElementSet{0}}}}, 1, 3));
    std::vector<ElementSet> pairs{ElementSet{0, 1}, ElementSet{0, 2}, ElementSet{1, 2}};
    EXPECT_TRUE(is_supporter(Supporter{3, {pairs, pairs}}, 2, 3));
    EXPECT_FALSE(is_supporter(Supporter{3, {{}, {}}}, 2, 3));
    EXPECT_THROW(is_supporter(Supporter{3, {{}}}, 2, 3), ShapeError);
}

TEST(Supporter, FromDisperseThreeDisjoint) {
    const auto s = supporter_from_disperse(three_disjoint(), {1, 1});
    ASSERT_EQ(s.u(), 2u);
    const std::vector<ElementSet> want{ElementSet{0, 1}, ElementSet{0, 1, 2}, ElementSet{0, 2}, ElementSet{1, 2}};
    EXPECT_EQ(s.families[0], want);
    EXPECT_EQ(s.families[1], want);
    EXPECT_TRUE(is_supporter(s, 2, 3));
    const auto m = minimal_supporter(s);
    EXPECT_EQ(m.output_parts(), 6u);
    EXPECT_TRUE(is_supporter(m, 2, 3));
}

TEST(Supporter, SingleBoundContainsFullIndexSet) {
    const auto s = supporter_from_disperse(three_disjoint(), {2});
    ASSERT_EQ(s.u(), 1u);
    EXPECT_EQ(s.families[0], (std::vector<ElementSet>{ElementSet{0, 1, 2}}));
}

TEST(Supporter, RejectsNonDisperse) {
    EXPECT_THROW(supporter_from_disperse({ClopenSet{"0"}, ClopenSet{"1"}}, {1, 1}), PreconditionViolation);
    EXPECT_THROW(supporter_from_disperse(three_disjoint(), {0, 2}), PreconditionViolation);
}

TEST(Cross, IdentityForSingleIndex) {
    OrderedPartition x(ElementSet{0, 1, 2}, {ElementSet{0}, ElementSet{1, 2}});
    const auto y = cross_partitions({x}, Supporter{1, {{ElementSet{0}}, {ElementSet{0}}}});
    EXPECT_EQ(y.parts(), x.parts());
}

TEST(Cross, StepOneRecipeGivesSixParts) {
    const auto k = minimal_supporter(supporter_from_disperse(three_disjoint(), {1, 1}));
    const ElementSet w = ElementSet::below(8);
    std::vector<OrderedPartition> xs{OrderedPartition(w, {ElementSet{0, 1, 2, 3}, ElementSet{4, 5, 6, 7}}),
                                     OrderedPartition(w, {ElementSet{0, 1, 4, 5}, ElementSet{2, 3, 6, 7}}),
                                     OrderedPartition(w, {ElementSet{0, 2, 4, 6}, ElementSet{1, 3, 5, 7}})};
    const auto y = cross_partitions(xs, k);
    EXPECT_EQ(y.size(), 6u);
    EXPECT_TRUE(y.covers_ground());
    EXPECT_EQ(y.part(0), (ElementSet{0, 1}));
}

TEST(Cross, NonSupporterMayMissElements) {
    const ElementSet w{0, 1};
    std::vector<OrderedPartition> xs{OrderedPartition(w, {ElementSet{0}, ElementSet{1}}),
                                     OrderedPartition(w, {ElementSet{0, 1}, ElementSet{}})};
    const Supporter k{2, {{ElementSet{0, 1}}, {ElementSet{0, 1}}}};
    const auto y = cross_partitions(xs, k);
    EXPECT_EQ(y.parts(), (std::vector<ElementSet>{ElementSet{0}, ElementSet{}}));
    EXPECT_FALSE(y.covers_ground());
    EXPECT_FALSE(is_supporter(k, 2, 2));
}

TEST(Cross, ShapeErrors) {
    OrderedPartition x(ElementSet{0}, {ElementSet{0}, ElementSet{}});
    EXPECT_THROW(cross_partitions({x}, Supporter{2, {{}, {}}}), ShapeError);
    EXPECT_THROW(cross_partitions({x}, Supporter{1, {{}}}), ShapeError);
    EXPECT_THROW(OrderedPartition(ElementSet{0}, {ElementSet{1}}), ShapeError);
}

TEST(FactSuites, TinyBoundsPass) {
    const auto b = tiny_bounds();
    const auto r1 = verify_fac1(b);
    EXPECT_TRUE(r1.pass()) << (r1.failures.empty() ? "" : r1.failures.front());
    EXPECT_GT(r1.cases, 0u);
    const auto r5 = verify_fac5(b);
    EXPECT_TRUE(r5.pass());
    EXPECT_GT(r5.cases, 0u);
}

TEST(FactSuites, MutantIsCaught) {
    const auto r = verify_fac1(tiny_bounds(), mutant_supporter_builder);
    EXPECT_FALSE(r.pass());
    ASSERT_FALSE(r.failures.empty());
    EXPECT_NE(r.failures.front().find("not a supporter"), std::string::npos);
}

TEST(FactSuites, BoundsParsing) {
    auto b = parse_bounds("n=1");
    EXPECT_EQ(b.fac1_n, 1u);
    EXPECT_EQ(b.fac5_u, 1u);
    const auto r = verify_fac1(b);
    EXPECT_TRUE(r.pass());
    EXPECT_LT(r.cases, verify_fac1(tiny_bounds()).cases + 100000);
    EXPECT_THROW(parse_bounds("bogus"), FormatError);
    EXPECT_THROW(parse_bounds("fac1_n=x"), FormatError);
    EXPECT_THROW(check_bounds(parse_bounds("fac1_n=9")), RangeError);
    try {
        check_bounds(parse_bounds("fac5_u=5"));
        FAIL();
    } catch (const RangeError& e) {
        EXPECT_NE(std::string(e.what()).find("estimated cost"), std::string::npos);
    }
}

TEST(FactSuites, CompositionsHaveBoundedSum) {
    const auto c = detail::compositions(4);
    EXPECT_EQ(c.size(), 15u);
    for (const auto& e : c) EXPECT_LE(std::accumulate(e.begin(), e.end(), std::size_t{0}), 4u);
}
