#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <numeric>
#include <vector>

#include "clopen.hpp"
#include "element_set.hpp"

namespace coneforce {

// Ordered list of parts inside a ground set; parts may overlap or be empty.
class OrderedPartition {
public:
    OrderedPartition() = default;
    OrderedPartition(ElementSet ground, std::vector<ElementSet> parts) : ground_(ground), parts_(std::move(parts)) {
        for (auto p : parts_)
            if (!p.subset_of(ground_)) throw ShapeError("partition part leaves the ground set");
    }

    ElementSet ground() const { return ground_; }
    const std::vector<ElementSet>& parts() const { return parts_; }
    std::size_t size() const { return parts_.size(); }
    ElementSet part(std::size_t i) const { return parts_.at(i); }
    ElementSet covered() const {
        ElementSet u;
        for (auto p : parts_) u |= p;
        return u;
    }
    bool covers_ground() const { return covered() == ground_; }

    bool operator==(const OrderedPartition&) const = default;

private:
    ElementSet ground_;
    std::vector<ElementSet> parts_;
};

// u families of index sets over {0..n-1}.
struct Supporter {
    std::size_t n = 0;
    std::vector<std::vector<ElementSet>> families;

    std::size_t u() const { return families.size(); }
    std::size_t output_parts() const {
        std::size_t c = 0;
        for (const auto& f : families) c += f.size();
        return c;
    }
    bool operator==(const Supporter&) const = default;
};

inline void canonicalize_family(std::vector<ElementSet>& fam) {
    std::sort(fam.begin(), fam.end(), sorted_list_less);
    fam.erase(std::unique(fam.begin(), fam.end()), fam.end());
}

// Nerve of a sequence: face(K) is true iff the sets indexed by K have a common point.
using NerveOracle = std::function<bool(ElementSet)>;

// Searches for a u-partition of {0..n-1} whose parts are all faces; disperse iff none exists.
// Parts are filled in order of first use, which covers every partition up to reordering.
inline bool is_disperse_nerve(std::size_t n, std::size_t u, const NerveOracle& face) {
    std::vector<ElementSet> parts;
    parts.reserve(u);
    std::function<bool(std::size_t)> place = [&](std::size_t j) -> bool {
        if (j == n) return true;
        for (auto& p : parts) {
            ElementSet q = p;
            q.insert(j);
            if (face(q)) {
                ElementSet saved = p;
                p = q;
                if (place(j + 1)) return true;
                p = saved;
            }
        }
        if (parts.size() < u && face(ElementSet{j})) {
            parts.push_back(ElementSet{j});
            if (place(j + 1)) return true;
            parts.pop_back();
        }
        return false;
    };
    return !place(0);
}

inline NerveOracle nerve_of(const std::vector<ClopenSet>& vs) {
    const std::size_t h = max_height(vs);
    auto masks = std::make_shared<std::vector<CylinderMask>>();
    for (const auto& v : vs) masks->push_back(CylinderMask::of(v, h));
    return [masks, h](ElementSet k) {
        CylinderMask m(h, true);
        for (auto j : k.to_vector()) m &= (*masks)[j];
        return !m.empty();
    };
}

inline bool is_disperse(const std::vector<ClopenSet>& vs, std::size_t u) {
    if (vs.empty()) throw PreconditionViolation("is_disperse: empty sequence");
    if (u == 0) throw PreconditionViolation("is_disperse: u must be positive");
    return is_disperse_nerve(vs.size(), u, nerve_of(vs));
}

// Exhaustive over all u^n assignments of indices to parts.
inline bool is_supporter(const Supporter& k, std::size_t u, std::size_t n) {
    if (k.families.size() != u) throw ShapeError("is_supporter: family count differs from u");
    if (u == 0) return false;
    std::vector<std::size_t> assign(n, 0);
    std::vector<ElementSet> parts(u);
    for (;;) {
        std::fill(parts.begin(), parts.end(), ElementSet{});
        for (std::size_t j = 0; j < n; ++j) parts[assign[j]].insert(j);
        bool hit = false;
        for (std::size_t i = 0; i < u && !hit; ++i)
            for (auto kk : k.families[i])
                if (kk.subset_of(parts[i])) {
                    hit = true;
                    break;
                }
        if (!hit) return false;
        std::size_t j = 0;
        while (j < n && ++assign[j] == u) assign[j++] = 0;
        if (j == n) return true;
    }
}

// All nonempty K ⊆ {0..n-1} whose subsequence is e-disperse, in canonical order.
inline std::vector<ElementSet> disperse_subfamily(std::size_t n, std::size_t e, const NerveOracle& face) {
    std::vector<ElementSet> fam;
    for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); ++bits) {
        const auto idx = ElementSet(bits).to_vector();
        auto sub = [&](ElementSet k) {
            ElementSet mapped;
            for (auto t : k.to_vector()) mapped.insert(idx[t]);
            return face(mapped);
        };
        if (is_disperse_nerve(idx.size(), e, sub)) fam.push_back(ElementSet(bits));
    }
    canonicalize_family(fam);
    return fam;
}

inline Supporter supporter_from_nerve(std::size_t n, const std::vector<std::size_t>& e, const NerveOracle& face) {
    const std::size_t kprime = std::accumulate(e.begin(), e.end(), std::size_t{0});
    for (auto ei : e)
        if (ei == 0) throw PreconditionViolation("supporter_from_disperse: bounds must be positive");
    if (!is_disperse_nerve(n, kprime, face))
        throw PreconditionViolation("supporter_from_disperse: sequence is not " + std::to_string(kprime) + "-disperse");
    Supporter s;
    s.n = n;
    for (auto ei : e) s.families.push_back(disperse_subfamily(n, ei, face));
    return s;
}

inline Supporter supporter_from_disperse(const std::vector<ClopenSet>& vs, const std::vector<std::size_t>& e) {
    if (vs.empty()) throw PreconditionViolation("supporter_from_disperse: empty sequence");
    if (vs.size() > 20) throw RangeError("supporter_from_disperse: sequence too long");
    return supporter_from_nerve(vs.size(), e, nerve_of(vs));
}

// Inclusion-minimal members of a family, canonical order kept.
inline std::vector<ElementSet> minimal_members(const std::vector<ElementSet>& fam) {
    std::vector<ElementSet> out;
    for (auto k : fam) {
        bool minimal = true;
        for (auto o : fam)
            if (o != k && o.subset_of(k)) {
                minimal = false;
                break;
            }
        if (minimal) out.push_back(k);
    }
    return out;
}

inline Supporter minimal_supporter(const Supporter& s) {
    Supporter r;
    r.n = s.n;
    for (const auto& f : s.families) r.families.push_back(minimal_members(f));
    return r;
}

// Y_K = ⋂_{p∈K} part_i(X^(p)) for each i and K ∈ 𝒦_i, ordered by (i, K).
inline OrderedPartition cross_partitions(const std::vector<OrderedPartition>& xs, const Supporter& k) {
    if (xs.size() != k.n) throw ShapeError("cross_partitions: number of partitions differs from supporter n");
    if (xs.empty()) throw ShapeError("cross_partitions: no partitions");
    const ElementSet ground = xs.front().ground();
    for (const auto& x : xs) {
        if (x.ground() != ground) throw ShapeError("cross_partitions: ground sets differ");
        if (x.size() != k.u()) throw ShapeError("cross_partitions: partition arity differs from supporter u");
    }
    std::vector<ElementSet> parts;
    parts.reserve(k.output_parts());
    for (std::size_t i = 0; i < k.u(); ++i)
        for (auto kk : k.families[i]) {
            ElementSet y = ground;
            for (std::uint64_t b = kk.bits(); b; b &= b - 1) {
                const auto p = static_cast<std::size_t>(std::countr_zero(b));
                if (p >= xs.size()) throw ShapeError("cross_partitions: supporter index out of range");
                y &= xs[p].part(i);
            }
            parts.push_back(y);
        }
    return OrderedPartition(ground, std::move(parts));
}

}  // namespace coneforce
