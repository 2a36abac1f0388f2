#include <gtest/gtest.h>

#include <random>

#include "coneforce/facts.hpp"
#include "coneforce/partition_tree.hpp"

using namespace coneforce;

namespace {

ToyFunctional random_table(std::mt19937_64& rng, std::size_t g) {
    std::vector<TableEntry> es;
    for (std::size_t i = rng() % 3; i-- > 0;) {
        BinaryString p;
        for (std::size_t j = rng() % (g + 1); j-- > 0;) p.push_back(rng() & 1u);
        Output o;
        if (rng() % 4 == 0)
            o = Output::big_output();
        else
            for (std::size_t j = rng() % 3; j-- > 0;) {
                BinaryString s;
                for (int b = 0; b < 2; ++b) s.push_back(rng() & 1u);
                o.strings.push_back(s);
            }
        es.push_back({p, rng() % 3, o});
    }
    try {
        return ToyFunctional(1, es);
    } catch (const TableError&) {
        return ToyFunctional::trivial(1);
    }
}

BinaryString random_rho(std::mt19937_64& rng) {
    BinaryString r;
    for (std::size_t j = rng() % 3; j-- > 0;) r.push_back(rng() & 1u);
    return r;
}

}  // namespace

TEST(PartitionTree, TrivialAndFull) {
    const auto t = PartitionTree::trivial(3);
    EXPECT_EQ(t.to_fintree().paths(), std::vector<BinaryString>{BinaryString("111")});
    EXPECT_EQ(PartitionTree::full(2, 2).to_fintree(), FinTree::full(4));
    EXPECT_FALSE(t.empty());
    EXPECT_THROW(PartitionTree::trivial(0), RangeError);
    EXPECT_THROW(PartitionTree::trivial(65), RangeError);
    EXPECT_THROW(PartitionTree::full(2, 17), RangeError);
}

TEST(PartitionTree, RestrictedAndCleared) {
    const auto t = PartitionTree::full(3, 2);
    const auto r = t.restricted(t.require(0, ElementSet{1}));
    for (const auto& p : r.to_fintree().paths()) EXPECT_TRUE(decode_partition(p, 2).part(0).contains(1));
    EXPECT_EQ(r.to_fintree().paths().size(), 32u);
    const auto c = t.cleared(1, ElementSet{0, 2});
    EXPECT_EQ(c.possible_elements(1), ElementSet{1});
    EXPECT_EQ(c.possible_elements(0), (ElementSet{0, 1, 2}));
    EXPECT_EQ(c.maximal_part_sets(0), std::vector<ElementSet>{(ElementSet{0, 1, 2})});
}

TEST(PartitionTree, SplitMatchesExplicitTV) {
    std::mt19937_64 rng(17);
    const auto clopens = all_clopen_sets(2);
    for (int it = 0; it < 300; ++it) {
        const std::size_t k = 1 + rng() % 2;
        const std::size_t g = 2 + rng() % (k == 1 ? 3 : 2);
        std::vector<FunctionalPair> psis;
        std::vector<std::pair<BinaryString, BinaryString>> rhos;
        std::vector<std::vector<ElementSet>> trig;
        const auto& v = clopens[rng() % clopens.size()];
        for (std::size_t i = 0; i < k; ++i) {
            psis.push_back({random_table(rng, g), random_table(rng, g)});
            rhos.emplace_back(random_rho(rng), random_rho(rng));
            trig.push_back(abandonment_triggers(psis[i].left, 1, rhos[i].first, v, g));
            trig.push_back(abandonment_triggers(psis[i].right, 1, rhos[i].second, v, g));
        }
        const auto base = PartitionTree::full(g, k);
        const auto fact = base.split(trig).to_fintree();
        const auto expl = build_T_V(base.to_fintree(), psis, rhos, v);
        ASSERT_EQ(fact.paths(), expl.paths()) << "it=" << it << " k=" << k << " g=" << g;
    }
}

TEST(PartitionTree, IteratedSplitStillMatches) {
    std::mt19937_64 rng(23);
    const auto clopens = all_clopen_sets(1);
    for (int it = 0; it < 60; ++it) {
        const std::size_t g = 3;
        auto fact = PartitionTree::trivial(g);
        auto expl = fact.to_fintree();
        for (std::size_t round = 0; round < 2; ++round) {
            const std::size_t k = fact.parts();
            std::vector<FunctionalPair> psis;
            std::vector<std::pair<BinaryString, BinaryString>> rhos;
            std::vector<std::vector<ElementSet>> trig;
            const auto& v = clopens[rng() % clopens.size()];
            for (std::size_t i = 0; i < k; ++i) {
                psis.push_back({random_table(rng, g), random_table(rng, g)});
                rhos.emplace_back(random_rho(rng), random_rho(rng));
                trig.push_back(abandonment_triggers(psis[i].left, 1, rhos[i].first, v, g));
                trig.push_back(abandonment_triggers(psis[i].right, 1, rhos[i].second, v, g));
            }
            fact = fact.split(trig);
            expl = build_T_V(expl, psis, rhos, v);
            ASSERT_EQ(fact.to_fintree().paths(), expl.paths()) << "it=" << it << " round=" << round;
            ASSERT_EQ(fact.empty(), expl.paths().empty());
        }
    }
}

TEST(PartitionTree, CrossMatchesExplicit) {
    std::mt19937_64 rng(29);
    const auto three = supporter_from_disperse({ClopenSet{"0"}, ClopenSet{"10"}, ClopenSet{"11"}}, {1, 1});
    const auto k = minimal_supporter(three);
    const auto clopens = all_clopen_sets(1);
    for (int it = 0; it < 40; ++it) {
        const std::size_t g = 2;
        std::vector<PartitionTree> fact;
        std::vector<FinTree> expl;
        for (std::size_t p = 0; p < 3; ++p) {
            const auto& v = clopens[rng() % clopens.size()];
            FunctionalPair psi{random_table(rng, g), random_table(rng, g)};
            const std::vector<std::vector<ElementSet>> trig{abandonment_triggers(psi.left, 1, {}, v, g),
                                                            abandonment_triggers(psi.right, 1, {}, v, g)};
            fact.push_back(PartitionTree::trivial(g).split(trig));
            expl.push_back(build_T_V(PartitionTree::trivial(g).to_fintree(), {psi}, {{{}, {}}}, v));
        }
        const auto got = PartitionTree::cross(fact, k).to_fintree();
        const auto want = cross_trees(expl, k);
        ASSERT_EQ(got.paths(), want.paths()) << "it=" << it;
    }
}

TEST(PartitionTree, CrossOfCoveringTreesIsPartitionTree) {
    const auto k = minimal_supporter(supporter_from_disperse({ClopenSet{"0"}, ClopenSet{"10"}, ClopenSet{"11"}}, {1, 1}));
    // every element on the left, the right, or both
    std::vector<PartitionTree> src(3, PartitionTree::trivial(2).split({{}, {}}));
    ASSERT_TRUE(is_partition_tree(src[0].to_fintree(), 2, ElementSet{0, 1}));
    const auto t = PartitionTree::cross(src, k);
    EXPECT_EQ(t.parts(), 6u);
    EXPECT_TRUE(is_partition_tree(t.to_fintree(), 6, ElementSet{0, 1}));
}

TEST(PartitionTree, Errors) {
    const auto t = PartitionTree::full(2, 1);
    EXPECT_THROW(t.split({{}}), ShapeError);
    EXPECT_TRUE(t.split({{ElementSet{}}, {}}).empty());
    EXPECT_THROW(PartitionTree::cross({t}, Supporter{2, {{}, {}}}), ShapeError);
    EXPECT_THROW(PartitionTree::full(20, 1).to_fintree(1000), ResourceError);
    TreeLimits tiny;
    tiny.max_cubes = 0;
    const auto k = minimal_supporter(supporter_from_disperse({ClopenSet{"0"}, ClopenSet{"10"}, ClopenSet{"11"}}, {1, 1}));
    EXPECT_THROW(PartitionTree::cross(std::vector<PartitionTree>(3, PartitionTree::full(2, 2)), k, tiny), ResourceError);
}
