#include <gtest/gtest.h>

#include <random>

#include "coneforce/fintree.hpp"

using namespace coneforce;

namespace {

std::set<BinaryString> strs(std::initializer_list<const char*> xs) {
    std::set<BinaryString> s;
    for (auto x : xs) s.emplace(x);
    return s;
}

FinTree random_tree(std::mt19937_64& rng, std::size_t depth, std::size_t paths) {
    std::vector<BinaryString> ps;
    for (std::size_t i = 0; i < paths; ++i) {
        BinaryString s;
        for (std::size_t j = 0; j < depth; ++j) s.push_back(rng() & 1u);
        ps.push_back(s);
    }
    return FinTree::from_paths(ps, depth);
}

}  // namespace

TEST(FinTree, Prune) {
    EXPECT_EQ(FinTree::prune(FinTree::full(3).nodes(), 3), FinTree::full(3));
    EXPECT_TRUE(FinTree::prune(strs({"", "0", "1"}), 2).empty());
    EXPECT_EQ(FinTree::prune(strs({"", "0", "00", "1"}), 2).nodes(), strs({"", "0", "00"}));
    EXPECT_THROW(FinTree::prune(strs({"", "000"}), 2), StructureError);
}

TEST(FinTree, Levels) {
    EXPECT_EQ(FinTree::full(3).level(2).size(), 4u);
    EXPECT_EQ(FinTree::from_paths({BinaryString("000")}, 3).level(2), std::vector<BinaryString>{BinaryString("00")});
    EXPECT_TRUE(FinTree::prune({}, 3).level(1).empty());
    EXPECT_THROW(FinTree::full(2).level(3), RangeError);
    EXPECT_EQ(FinTree::full(2).paths().size(), 4u);
    EXPECT_EQ(FinTree::from_paths({BinaryString("11")}, 2).paths(), std::vector<BinaryString>{BinaryString("11")});
}

TEST(Homogeneity, Examples) {
    EXPECT_TRUE(is_homogeneous(FinTree::full(3)));
    EXPECT_TRUE(is_homogeneous(FinTree::from_paths({BinaryString("0000")}, 4)));
    EXPECT_FALSE(is_homogeneous(FinTree::prune(strs({"", "0", "1", "00", "11"}), 2)));
    EXPECT_FALSE(is_homogeneous_literal(FinTree::prune(strs({"", "0", "1", "00", "11"}), 2)));
    EXPECT_TRUE(is_homogeneous(FinTree::level_choice({{0, 2}, {1}, {0, 1, 3}}, 2)));
}

TEST(Homogeneity, FastMatchesLiteral) {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 400; ++it) {
        const std::size_t d = 1 + rng() % 5;
        const auto t = random_tree(rng, d, 1 + rng() % 6);
        ASSERT_EQ(is_homogeneous(t), is_homogeneous_literal(t));
    }
    for (int it = 0; it < 200; ++it) {
        std::vector<std::vector<unsigned>> allowed;
        const std::size_t d = 1 + rng() % 3;
        for (std::size_t c = 0; c < d; ++c) {
            std::vector<unsigned> syms;
            for (unsigned s = 0; s < 4; ++s)
                if (rng() & 1u) syms.push_back(s);
            if (syms.empty()) syms.push_back(static_cast<unsigned>(rng() % 4));
            allowed.push_back(syms);
        }
        const auto t = FinTree::level_choice(allowed, 2);
        ASSERT_TRUE(is_homogeneous(t));
        ASSERT_TRUE(is_homogeneous_literal(t));
        ASSERT_EQ(coordinate_choices(t), allowed);
    }
}

TEST(PartitionTreeCheck, Examples) {
    // all interleavings of (X1, X2) with X1 ∪ X2 ⊇ {0,1}
    std::vector<BinaryString> paths;
    for (unsigned a = 1; a < 4; ++a)
        for (unsigned b = 1; b < 4; ++b) {
            std::vector<ElementSet> parts(2);
            if (a & 1u) parts[0].insert(0);
            if (a & 2u) parts[1].insert(0);
            if (b & 1u) parts[0].insert(1);
            if (b & 2u) parts[1].insert(1);
            paths.push_back(encode_partition(parts, 2));
        }
    const auto t = FinTree::from_paths(paths, 4);
    EXPECT_TRUE(is_partition_tree(t, 2, ElementSet{0, 1}));
    const auto bad = FinTree::from_paths({encode_partition({ElementSet{0}, ElementSet{}}, 2)}, 4);
    EXPECT_FALSE(is_partition_tree(bad, 2, ElementSet{0, 1}));
    EXPECT_TRUE(is_partition_tree(FinTree::from_paths({BinaryString("110")}, 3), 1, ElementSet{0, 1}));
    EXPECT_FALSE(is_partition_tree(FinTree::from_paths({BinaryString("110")}, 3), 1, ElementSet{2}));
}

TEST(PartitionTreeCheck, EncodeDecodeRoundTrip) {
    const std::vector<ElementSet> parts{ElementSet{0, 3}, ElementSet{1}, ElementSet{2, 3}};
    const auto code = encode_partition(parts, 4);
    EXPECT_EQ(code.size(), 12u);
    EXPECT_EQ(decode_partition(code, 3).parts(), parts);
}
