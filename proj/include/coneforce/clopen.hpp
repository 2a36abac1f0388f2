#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "binary_string.hpp"

namespace coneforce {

// Finite antichain of binary strings, read as the open set [V] of its cylinders.
class ClopenSet {
public:
    ClopenSet() = default;
    explicit ClopenSet(std::vector<BinaryString> generators) : gens_(std::move(generators)) {
        std::sort(gens_.begin(), gens_.end(), shortlex_less);
        gens_.erase(std::unique(gens_.begin(), gens_.end()), gens_.end());
        for (std::size_t a = 0; a < gens_.size(); ++a)
            for (std::size_t b = a + 1; b < gens_.size(); ++b)
                if (is_compatible(gens_[a], gens_[b]))
                    throw StructureError("clopen generators " + gens_[a].str() + " and " + gens_[b].str() +
                                         " are comparable");
    }
    ClopenSet(std::initializer_list<const char*> literals) {
        std::vector<BinaryString> g;
        for (auto l : literals) g.emplace_back(l);
        *this = ClopenSet(std::move(g));
    }

    const std::vector<BinaryString>& generators() const { return gens_; }
    bool empty() const { return gens_.empty(); }
    std::size_t height() const {
        std::size_t h = 0;
        for (const auto& g : gens_) h = std::max(h, g.size());
        return h;
    }
    // [s] ∩ [V] ≠ ∅
    bool meets(const BinaryString& s) const {
        return std::any_of(gens_.begin(), gens_.end(), [&](const BinaryString& g) { return is_compatible(g, s); });
    }

    bool operator==(const ClopenSet&) const = default;

private:
    std::vector<BinaryString> gens_;
};

// Canonical order: height, then generator lists compared in shortlex.
inline bool clopen_less(const ClopenSet& a, const ClopenSet& b) {
    if (a.height() != b.height()) return a.height() < b.height();
    return std::lexicographical_compare(a.generators().begin(), a.generators().end(), b.generators().begin(),
                                        b.generators().end(), shortlex_less);
}

// Set of length-h strings covered by a clopen set, as a bitmask of 2^h bits.
class CylinderMask {
public:
    CylinderMask() = default;
    CylinderMask(std::size_t h, bool full) : h_(h), words_(word_count(h), full ? ~std::uint64_t{0} : 0) {
        trim();
    }
    static CylinderMask of(const ClopenSet& v, std::size_t h) {
        if (v.height() > h) throw RangeError("cylinder height below clopen height");
        CylinderMask m(h, false);
        for (const auto& g : v.generators()) {
            std::uint64_t base = 0;
            for (std::size_t i = 0; i < g.size(); ++i) base = (base << 1) | (g[i] ? 1u : 0u);
            const std::size_t free = h - g.size();
            const std::uint64_t lo = base << free;
            const std::uint64_t hi = lo + (std::uint64_t{1} << free);
            for (std::uint64_t x = lo; x < hi; ++x) m.words_[x >> 6] |= std::uint64_t{1} << (x & 63);
        }
        return m;
    }
    bool empty() const {
        return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
    }
    CylinderMask& operator&=(const CylinderMask& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    bool intersects(const CylinderMask& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

private:
    static std::size_t word_count(std::size_t h) {
        if (h > 24) throw RangeError("cylinder mask height too large");
        return ((std::size_t{1} << h) + 63) / 64;
    }
    void trim() {
        const std::size_t bits = std::size_t{1} << h_;
        if (bits < 64 && !words_.empty()) words_[0] &= (std::uint64_t{1} << bits) - 1;
    }
    std::size_t h_ = 0;
    std::vector<std::uint64_t> words_;
};

inline std::size_t max_height(const std::vector<ClopenSet>& vs) {
    std::size_t h = 0;
    for (const auto& v : vs) h = std::max(h, v.height());
    return h;
}

inline bool intersection_nonempty(const std::vector<ClopenSet>& vs) {
    const std::size_t h = max_height(vs);
    CylinderMask m(h, true);
    for (const auto& v : vs) m &= CylinderMask::of(v, h);
    return !m.empty();
}

namespace detail {
inline void antichains_below(const BinaryString& node, std::size_t h, std::vector<std::vector<BinaryString>>& out) {
    // Antichains inside the cone of node: empty, {node}, or a union of antichains of both children.
    std::vector<std::vector<BinaryString>> result{{}, {node}};
    if (node.size() < h) {
        std::vector<std::vector<BinaryString>> left, right;
        antichains_below(node.appended(false), h, left);
        antichains_below(node.appended(true), h, right);
        for (const auto& l : left)
            for (const auto& r : right) {
                if (l.empty() && r.empty()) continue;
                auto u = l;
                u.insert(u.end(), r.begin(), r.end());
                result.push_back(std::move(u));
            }
    }
    out = std::move(result);
}
}  // namespace detail

// Every clopen set with generators of length ≤ h, in canonical order.
inline std::vector<ClopenSet> all_clopen_sets(std::size_t h) {
    if (h > 3) throw RangeError("all_clopen_sets: height above 3 is not enumerable");
    std::vector<std::vector<BinaryString>> raw;
    detail::antichains_below(BinaryString{}, h, raw);
    std::vector<ClopenSet> out;
    out.reserve(raw.size());
    for (auto& g : raw) out.emplace_back(std::move(g));
    std::sort(out.begin(), out.end(), clopen_less);
    return out;
}

}  // namespace coneforce
