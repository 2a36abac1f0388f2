#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "clopen.hpp"
#include "fintree.hpp"
#include "partition.hpp"

namespace coneforce {

// Halting output of a functional; `big` stands for an output larger than any bound.
struct Output {
    std::vector<BinaryString> strings;
    bool big = false;

    static Output big_output() { return Output{{}, true}; }
    bool operator==(const Output&) const = default;
};

struct TableEntry {
    BinaryString prefix;
    std::size_t input = 0;
    Output output;
};

// Use-bounded functional given by a finite table; anything not covered diverges.
class ToyFunctional {
public:
    ToyFunctional() = default;
    ToyFunctional(std::size_t bound, std::vector<TableEntry> entries) : bound_(bound), entries_(std::move(entries)) {
        for (auto& e : entries_) {
            std::sort(e.output.strings.begin(), e.output.strings.end(), shortlex_less);
            e.output.strings.erase(std::unique(e.output.strings.begin(), e.output.strings.end()),
                                   e.output.strings.end());
        }
        for (std::size_t a = 0; a < entries_.size(); ++a)
            for (std::size_t b = a + 1; b < entries_.size(); ++b) {
                const auto& x = entries_[a];
                const auto& y = entries_[b];
                if (x.input == y.input && is_compatible(x.prefix, y.prefix) && !(x.output == y.output))
                    throw TableError("inconsistent table: prefixes " + x.prefix.str() + " and " + y.prefix.str() +
                                     " at input " + std::to_string(x.input) + " disagree");
            }
    }
    static ToyFunctional trivial(std::size_t bound) { return ToyFunctional(bound, {}); }

    std::size_t bound() const { return bound_; }
    const std::vector<TableEntry>& entries() const { return entries_; }
    std::size_t use() const {
        std::size_t u = 0;
        for (const auto& e : entries_) u = std::max(u, e.prefix.size());
        return u;
    }
    ToyFunctional with_bound(std::size_t b) const {
        ToyFunctional f = *this;
        f.bound_ = b;
        return f;
    }

    std::optional<Output> evaluate(const BinaryString& oracle, std::size_t n) const {
        const TableEntry* hit = nullptr;
        for (const auto& e : entries_)
            if (e.input == n && e.prefix.is_prefix_of(oracle)) {
                if (hit && !(hit->output == e.output)) throw TableError("inconsistent table at evaluation");
                hit = &e;
            }
        if (!hit) return std::nullopt;
        return hit->output;
    }

private:
    std::size_t bound_ = 1;
    std::vector<TableEntry> entries_;
};

struct FunctionalPair {
    ToyFunctional left;
    ToyFunctional right;
};

// [D] ∩ [V] = ∅ or |D| > bound.
inline bool output_is_bad(const Output& d, const ClopenSet& v, std::size_t bound) {
    if (d.big || d.strings.size() > bound) return true;
    for (const auto& s : d.strings)
        if (v.meets(s)) return false;
    return true;
}

// Z/ρ as a finite oracle string of length max(d, |ρ|).
inline BinaryString oracle_string(ElementSet z, const BinaryString& rho, std::size_t horizon) {
    return overwrite(BinaryString::characteristic(z, std::max(horizon, rho.size())), rho);
}

// Exhaustive over Z ⊆ y and n ≤ d.
inline bool abandons_on_set(const ToyFunctional& f, const BinaryString& rho, const ClopenSet& v, ElementSet y,
                            std::size_t horizon) {
    if (!y.subset_of(ElementSet::below(horizon))) throw RangeError("abandons_on_set: set exceeds horizon");
    const std::uint64_t all = y.bits();
    std::uint64_t z = 0;
    do {
        const auto oracle = oracle_string(ElementSet(z), rho, horizon);
        for (std::size_t n = 0; n <= horizon; ++n) {
            auto d = f.evaluate(oracle, n);
            if (d && output_is_bad(*d, v, f.bound())) return true;
        }
        z = (z - all) & all;
    } while (z != 0);
    return false;
}

inline void keep_minimal_sets(std::vector<ElementSet>& sets) {
    std::sort(sets.begin(), sets.end(), [](ElementSet a, ElementSet b) {
        return a.size() != b.size() ? a.size() < b.size() : sorted_list_less(a, b);
    });
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    std::vector<ElementSet> out;
    for (auto s : sets)
        if (std::none_of(out.begin(), out.end(), [&](ElementSet o) { return o.subset_of(s); })) out.push_back(s);
    sets = std::move(out);
}

// Minimal sets S such that the functional abandons v on exactly the Y ⊇ some S.
// Each bad entry compatible with ρ contributes the 1-positions of its prefix beyond ρ.
inline std::vector<ElementSet> abandonment_triggers(const ToyFunctional& f, std::size_t bound, const BinaryString& rho,
                                                    const ClopenSet& v, std::size_t horizon) {
    const std::size_t len = std::max(horizon, rho.size());
    std::vector<ElementSet> out;
    for (const auto& e : f.entries()) {
        if (e.input > horizon || e.prefix.size() > len) continue;
        if (!output_is_bad(e.output, v, bound)) continue;
        if (!is_compatible(e.prefix, rho)) continue;
        ElementSet s;
        for (std::size_t t = rho.size(); t < e.prefix.size(); ++t)
            if (e.prefix[t]) s.insert(t);
        out.push_back(s);
    }
    keep_minimal_sets(out);
    return out;
}

inline bool triggered(const std::vector<ElementSet>& triggers, ElementSet y) {
    return std::any_of(triggers.begin(), triggers.end(), [&](ElementSet s) { return s.subset_of(y); });
}

// Disjoint 2-partitions of x in lexicographic assignment order (ascending elements, side 1 first).
inline std::optional<std::pair<ElementSet, ElementSet>> pair_nonabandon_witness(const FunctionalPair& p,
                                                                                const BinaryString& rho_l,
                                                                                const BinaryString& rho_r,
                                                                                const ClopenSet& v, ElementSet x,
                                                                                std::size_t horizon) {
    const auto elems = x.to_vector();
    const std::size_t m = elems.size();
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << m); ++code) {
        ElementSet x1, x2;
        for (std::size_t j = 0; j < m; ++j) {
            if ((code >> (m - 1 - j)) & 1u)
                x2.insert(elems[j]);
            else
                x1.insert(elems[j]);
        }
        if (!abandons_on_set(p.left, rho_l, v, x1, horizon) && !abandons_on_set(p.right, rho_r, v, x2, horizon))
            return std::make_pair(x1, x2);
    }
    return std::nullopt;
}

// Explicit T_V on an interleaved k-partition tree: every path is split part by part into
// (X_il, X_ir) with X_il ∪ X_ir = X_i, keeping splits on which neither side abandons v.
inline FinTree build_T_V(const FinTree& t, const std::vector<FunctionalPair>& psis,
                         const std::vector<std::pair<BinaryString, BinaryString>>& rhos, const ClopenSet& v) {
    const std::size_t k = psis.size();
    if (k == 0 || rhos.size() != k) throw ShapeError("build_T_V: arity mismatch");
    if (t.depth() % k != 0) throw ShapeError("build_T_V: depth is not a multiple of k");
    const std::size_t horizon = t.depth() / k;
    std::vector<BinaryString> out;
    for (const auto& path : t.paths()) {
        const auto parts = decode_partition(path, k).parts();
        std::vector<std::vector<std::pair<ElementSet, ElementSet>>> options(k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto elems = parts[i].to_vector();
            std::vector<std::size_t> choice(elems.size(), 0);
            for (;;) {
                ElementSet l, r;
                for (std::size_t j = 0; j < elems.size(); ++j) {
                    if (choice[j] != 1) l.insert(elems[j]);
                    if (choice[j] != 0) r.insert(elems[j]);
                }
                if (!abandons_on_set(psis[i].left, rhos[i].first, v, l, horizon) &&
                    !abandons_on_set(psis[i].right, rhos[i].second, v, r, horizon))
                    options[i].emplace_back(l, r);
                std::size_t j = 0;
                while (j < elems.size() && ++choice[j] == 3) choice[j++] = 0;
                if (j == elems.size()) break;
            }
        }
        std::vector<std::size_t> pick(k, 0);
        if (std::any_of(options.begin(), options.end(), [](const auto& o) { return o.empty(); })) continue;
        for (;;) {
            std::vector<ElementSet> split;
            for (std::size_t i = 0; i < k; ++i) {
                split.push_back(options[i][pick[i]].first);
                split.push_back(options[i][pick[i]].second);
            }
            out.push_back(encode_partition(split, horizon));
            std::size_t i = 0;
            while (i < k && ++pick[i] == options[i].size()) pick[i++] = 0;
            if (i == k) break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return FinTree::from_paths(out, 2 * t.depth());
}

// Explicit Cross of u-partition trees along a supporter.
inline FinTree cross_trees(const std::vector<FinTree>& trees, const Supporter& k) {
    if (trees.size() != k.n || trees.empty()) throw ShapeError("cross_trees: tree count differs from supporter n");
    const std::size_t u = k.u();
    const std::size_t depth = trees.front().depth();
    for (const auto& t : trees)
        if (t.depth() != depth) throw ShapeError("cross_trees: depths differ");
    if (depth % u != 0) throw ShapeError("cross_trees: depth is not a multiple of u");
    const std::size_t horizon = depth / u;
    std::vector<std::vector<BinaryString>> paths;
    for (const auto& t : trees) {
        paths.push_back(t.paths());
        if (paths.back().empty()) return FinTree::from_paths({}, horizon * k.output_parts());
    }
    std::vector<BinaryString> out;
    std::vector<std::size_t> pick(trees.size(), 0);
    for (;;) {
        std::vector<OrderedPartition> xs;
        for (std::size_t p = 0; p < trees.size(); ++p) xs.push_back(decode_partition(paths[p][pick[p]], u));
        out.push_back(encode_partition(cross_partitions(xs, k).parts(), horizon));
        std::size_t p = 0;
        while (p < trees.size() && ++pick[p] == paths[p].size()) pick[p++] = 0;
        if (p == trees.size()) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return FinTree::from_paths(out, horizon * k.output_parts());
}

}  // namespace coneforce
