#include <gtest/gtest.h>

#include <random>

#include "coneforce/facts.hpp"
#include "coneforce/functional.hpp"

using namespace coneforce;

namespace {

Output out(std::initializer_list<const char*> xs) {
    Output o;
    for (auto x : xs) o.strings.emplace_back(x);
    return o;
}

ToyFunctional random_table(std::mt19937_64& rng, std::size_t bound, std::size_t max_use, std::size_t max_n) {
    std::vector<TableEntry> es;
    const std::size_t m = rng() % 4;
    for (std::size_t i = 0; i < m; ++i) {
        BinaryString p;
        const std::size_t len = rng() % (max_use + 1);
        for (std::size_t j = 0; j < len; ++j) p.push_back(rng() & 1u);
        Output o;
        if (rng() % 5 == 0)
            o = Output::big_output();
        else
            for (std::size_t j = rng() % 3; j-- > 0;) {
                BinaryString s;
                for (int b = 0; b < 2; ++b) s.push_back(rng() & 1u);
                o.strings.push_back(s);
            }
        es.push_back({p, rng() % (max_n + 1), o});
    }
    try {
        return ToyFunctional(bound, es);
    } catch (const TableError&) {
        return ToyFunctional::trivial(bound);
    }
}

}  // namespace

TEST(ToyFunctional, Evaluate) {
    EXPECT_FALSE(ToyFunctional::trivial(1).evaluate(BinaryString("0101"), 0).has_value());
    ToyFunctional f(1, {{BinaryString(""), 0, out({"0"})}});
    EXPECT_EQ(*f.evaluate(BinaryString("111"), 0), out({"0"}));
    ToyFunctional g(1, {{BinaryString("1"), 0, out({"0"})}});
    EXPECT_FALSE(g.evaluate(BinaryString("0000"), 0).has_value());
    EXPECT_THROW(ToyFunctional(1, {{BinaryString("1"), 0, out({"0"})}, {BinaryString("10"), 0, out({"1"})}}),
                 TableError);
}

TEST(Abandon, Examples) {
    const ClopenSet v{"0"};
    EXPECT_FALSE(abandons_on_set(ToyFunctional::trivial(1), BinaryString(), v, ElementSet{0, 1, 2}, 4));
    ToyFunctional off(1, {{BinaryString(""), 1, out({"1"})}});
    EXPECT_TRUE(abandons_on_set(off, BinaryString(), v, ElementSet{}, 4));
    ToyFunctional big(1, {{BinaryString("01"), 0, out({"00", "01"})}});
    EXPECT_TRUE(abandons_on_set(big, BinaryString(), v, ElementSet{1}, 4));
    EXPECT_FALSE(abandons_on_set(big, BinaryString(), v, ElementSet{0, 2}, 4));
    EXPECT_FALSE(abandons_on_set(big, BinaryString("1"), v, ElementSet{1}, 4));
    EXPECT_THROW(abandons_on_set(big, BinaryString(), v, ElementSet{5}, 4), RangeError);
}

TEST(Abandon, TriggersMatchBruteForce) {
    std::mt19937_64 rng(11);
    const auto clopens = all_clopen_sets(2);
    for (int it = 0; it < 1500; ++it) {
        const std::size_t bound = 1 + rng() % 2;
        const auto f = random_table(rng, bound, 4, 4);
        const auto& v = clopens[rng() % clopens.size()];
        BinaryString rho;
        for (std::size_t j = rng() % 3; j-- > 0;) rho.push_back(rng() & 1u);
        const auto trig = abandonment_triggers(f, bound, rho, v, 5);
        for (std::uint64_t y = 0; y < 32; ++y)
            ASSERT_EQ(triggered(trig, ElementSet(y)), abandons_on_set(f, rho, v, ElementSet(y), 5))
                << detail::show(f) << " rho=" << rho.str() << " V=" << detail::show(v) << " Y=" << y;
    }
}

TEST(PairWitness, Examples) {
    const ClopenSet v{"0"};
    FunctionalPair never{ToyFunctional::trivial(1), ToyFunctional::trivial(1)};
    auto w = pair_nonabandon_witness(never, {}, {}, v, ElementSet{0, 1, 2}, 4);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->first, (ElementSet{0, 1, 2}));
    EXPECT_EQ(w->second, ElementSet{});

    FunctionalPair always{ToyFunctional(1, {{BinaryString(""), 0, out({"1"})}}), ToyFunctional::trivial(1)};
    EXPECT_FALSE(pair_nonabandon_witness(always, {}, {}, v, ElementSet{0, 1}, 4));

    // left abandons exactly on sets containing element 1
    FunctionalPair on_a{ToyFunctional(1, {{BinaryString("01"), 0, out({"1"})}}), ToyFunctional::trivial(1)};
    w = pair_nonabandon_witness(on_a, {}, {}, v, ElementSet{0, 1, 2}, 4);
    ASSERT_TRUE(w);
    EXPECT_FALSE(w->first.contains(1));
    EXPECT_EQ(w->first | w->second, (ElementSet{0, 1, 2}));
    EXPECT_FALSE(w->first.intersects(w->second));
    EXPECT_EQ(w->second, ElementSet{1});
}

TEST(PairWitness, NoneIffEveryPartitionAbandons) {
    std::mt19937_64 rng(5);
    const auto clopens = all_clopen_sets(1);
    for (int it = 0; it < 500; ++it) {
        FunctionalPair p{random_table(rng, 1, 3, 3), random_table(rng, 1, 3, 3)};
        const auto& v = clopens[rng() % clopens.size()];
        const ElementSet x(rng() % 16);
        const auto w = pair_nonabandon_witness(p, {}, {}, v, x, 4);
        bool exists = false;
        for (std::uint64_t a = 0; a < 16; ++a) {
            const ElementSet x1 = ElementSet(a) & x;
            for (std::uint64_t b = 0; b < 16; ++b) {
                const ElementSet x2 = ElementSet(b) & x;
                if ((x1 | x2) == x && !abandons_on_set(p.left, {}, v, x1, 4) && !abandons_on_set(p.right, {}, v, x2, 4))
                    exists = true;
            }
        }
        ASSERT_EQ(w.has_value(), exists);
    }
}

TEST(BuildTV, NeverHaltingGivesAllSplittings) {
    const auto t = FinTree::full(2);
    const auto tv = build_T_V(t, {FunctionalPair{}}, {{{}, {}}}, ClopenSet{"0"});
    // each member lands on the left, the right, or both sides
    std::size_t manual = 0;
    for (const auto& p : t.paths()) {
        std::size_t c = 1;
        for (std::size_t i = 0; i < p.size(); ++i) c *= p[i] ? 3 : 1;
        manual += c;
    }
    EXPECT_EQ(tv.paths().size(), manual);
}

TEST(BuildTV, BlocksOffTargetCoordinate) {
    const auto t = FinTree::from_paths({BinaryString("111")}, 3);
    FunctionalPair p{ToyFunctional(1, {{BinaryString("1"), 0, out({"1"})}}), ToyFunctional::trivial(1)};
    const auto tv = build_T_V(t, {p}, {{{}, {}}}, ClopenSet{"0"});
    for (const auto& path : tv.paths()) {
        const auto parts = decode_partition(path, 2).parts();
        EXPECT_FALSE(parts[0].contains(0));
        EXPECT_EQ(parts[0] | parts[1], (ElementSet{0, 1, 2}));
    }
    EXPECT_EQ(tv.paths().size(), 9u);
}

TEST(FunctionalFacts, TinyBoundsPass) {
    const auto r = verify_functional_facts(tiny_bounds());
    for (const auto* x : {&r.fac2, &r.fac3, &r.fac4, &r.fac9}) {
        EXPECT_TRUE(x->pass()) << x->suite << ": " << (x->failures.empty() ? "" : x->failures.front());
        EXPECT_GT(x->cases, 0u) << x->suite;
    }
}
