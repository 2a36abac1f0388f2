#pragma once

#include <map>
#include <set>
#include <vector>

#include "binary_string.hpp"
#include "partition.hpp"

namespace coneforce {

// Pruned finite subtree of 2^{≤d}. Trees of bounded branching are block-encoded with
// `width` bits per coordinate (MSB first).
class FinTree {
public:
    FinTree() = default;

    static FinTree prune(const std::set<BinaryString>& raw, std::size_t depth, std::size_t width = 1) {
        for (const auto& s : raw) {
            if (s.size() > depth) throw StructureError("node " + s.str() + " is deeper than the tree");
            if (!s.empty() && !raw.count(s.prefix(s.size() - 1)))
                throw StructureError("node set is not prefix-closed at " + s.str());
        }
        FinTree t(depth, width);
        for (const auto& s : raw)
            if (s.size() == depth)
                for (std::size_t n = 0; n <= depth; ++n) t.nodes_.insert(s.prefix(n));
        return t;
    }

    static FinTree from_paths(const std::vector<BinaryString>& paths, std::size_t depth, std::size_t width = 1) {
        FinTree t(depth, width);
        for (const auto& p : paths) {
            if (p.size() != depth) throw StructureError("path " + p.str() + " has the wrong length");
            for (std::size_t n = 0; n <= depth; ++n) t.nodes_.insert(p.prefix(n));
        }
        return t;
    }

    static FinTree full(std::size_t depth) {
        std::set<BinaryString> raw;
        for (std::size_t n = 0; n <= depth; ++n)
            for (auto& s : all_strings(n)) raw.insert(std::move(s));
        return prune(raw, depth);
    }

    // Level-choice tree: coordinate c may take any symbol listed in allowed[c].
    static FinTree level_choice(const std::vector<std::vector<unsigned>>& allowed, std::size_t width = 1) {
        if (width == 0 || width > 8) throw RangeError("level_choice: unsupported block width");
        std::vector<BinaryString> frontier{BinaryString{}};
        for (const auto& syms : allowed) {
            std::vector<BinaryString> next;
            for (const auto& f : frontier)
                for (auto sym : syms) {
                    if (sym >= (1u << width)) throw RangeError("level_choice: symbol exceeds block width");
                    BinaryString s = f;
                    for (std::size_t b = 0; b < width; ++b) s.push_back((sym >> (width - 1 - b)) & 1u);
                    next.push_back(std::move(s));
                }
            frontier = std::move(next);
        }
        return from_paths(frontier, allowed.size() * width, width);
    }

    std::size_t depth() const { return depth_; }
    std::size_t width() const { return width_; }
    bool empty() const { return nodes_.empty(); }
    bool contains(const BinaryString& s) const { return nodes_.count(s) > 0; }
    const std::set<BinaryString>& nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }

    std::vector<BinaryString> level(std::size_t n) const {
        if (n > depth_) throw RangeError("level " + std::to_string(n) + " exceeds depth " + std::to_string(depth_));
        std::vector<BinaryString> out;
        for (const auto& s : nodes_)
            if (s.size() == n) out.push_back(s);
        return out;
    }
    std::vector<BinaryString> paths() const { return level(depth_); }

    bool operator==(const FinTree&) const = default;

private:
    FinTree(std::size_t depth, std::size_t width) : depth_(depth), width_(width) {}
    std::size_t depth_ = 0;
    std::size_t width_ = 1;
    std::set<BinaryString> nodes_;
};

// Literal reading of the definition: for block-aligned lengths m ≤ |ρ| ≤ d and all
// ρ₁,ρ₂ ∈ level(t,m), overwrite(ρ,ρ₁) ∈ t ⇔ overwrite(ρ,ρ₂) ∈ t. Exponential; kept for small trees.
inline bool is_homogeneous_literal(const FinTree& t) {
    const std::size_t w = t.width();
    for (std::size_t m = 0; m <= t.depth(); m += w) {
        const auto lvl = t.level(m);
        for (std::size_t len = m; len <= t.depth(); len += w)
            for (const auto& rho : all_strings(len)) {
                bool first = true, expect = false;
                for (const auto& r1 : lvl) {
                    const bool in = t.contains(overwrite(rho, r1));
                    if (first) {
                        expect = in;
                        first = false;
                    } else if (in != expect) {
                        return false;
                    }
                }
            }
    }
    return true;
}

// overwrite(ρ,ρ₁) = ρ₁·τ, so the condition says all nodes of one block-aligned level carry
// identical subtrees. Subtrees are compared through bottom-up canonical ids.
inline bool is_homogeneous(const FinTree& t) {
    if (t.empty()) return true;
    const std::size_t w = t.width();
    std::map<BinaryString, std::size_t> id;
    std::map<std::vector<std::size_t>, std::size_t> canon;
    for (std::size_t n = t.depth() + 1; n-- > 0;) {
        std::set<std::size_t> ids_at_level;
        for (const auto& s : t.level(n)) {
            std::vector<std::size_t> key;
            for (bool b : {false, true}) {
                auto c = s.appended(b);
                auto it = id.find(c);
                key.push_back(it == id.end() ? 0 : it->second + 1);
            }
            auto [it, inserted] = canon.emplace(key, canon.size());
            id[s] = it->second;
            ids_at_level.insert(it->second);
        }
        if (n % w == 0 && ids_at_level.size() > 1) return false;
    }
    return true;
}

// Per-coordinate symbol sets read off a tree (union over nodes).
inline std::vector<std::vector<unsigned>> coordinate_choices(const FinTree& t) {
    const std::size_t w = t.width();
    std::vector<std::vector<unsigned>> out(t.depth() / w);
    for (std::size_t c = 0; c < out.size(); ++c) {
        std::set<unsigned> syms;
        for (const auto& s : t.level((c + 1) * w)) {
            unsigned v = 0;
            for (std::size_t b = 0; b < w; ++b) v = (v << 1) | (s[c * w + b] ? 1u : 0u);
            syms.insert(v);
        }
        out[c].assign(syms.begin(), syms.end());
    }
    return out;
}

inline std::vector<BinaryString> decode_parts(const BinaryString& path, std::size_t k) {
    std::vector<BinaryString> parts;
    for (std::size_t i = 0; i < k; ++i) parts.push_back(project(path, k, i));
    return parts;
}

inline OrderedPartition decode_partition(const BinaryString& path, std::size_t k) {
    const std::size_t horizon = path.size() / k;
    std::vector<ElementSet> parts;
    for (auto& p : decode_parts(path, k)) parts.push_back(p.prefix(horizon).ones_set());
    return OrderedPartition(ElementSet::below(horizon), std::move(parts));
}

inline BinaryString encode_partition(const std::vector<ElementSet>& parts, std::size_t horizon) {
    std::vector<BinaryString> comps;
    for (auto p : parts) comps.push_back(BinaryString::characteristic(p, horizon));
    return interleave(comps);
}

inline bool is_partition_tree(const FinTree& t, std::size_t k, ElementSet w) {
    if (k == 0) throw ShapeError("is_partition_tree: k must be positive");
    const std::size_t horizon = t.depth() / k;
    const ElementSet need = w & ElementSet::below(horizon);
    for (const auto& x : t.paths()) {
        ElementSet covered;
        for (std::size_t i = 0; i < k; ++i) covered |= project(x, k, i).prefix(horizon).ones_set();
        if (!need.subset_of(covered)) return false;
    }
    return true;
}

}  // namespace coneforce
