#pragma once

#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "fintree.hpp"

namespace coneforce {

// h on a contiguous range [lo, hi]; values(n) are strings of length n·width.
class StrongEnumeration {
public:
    StrongEnumeration() = default;
    StrongEnumeration(std::size_t bound, std::size_t lo, std::size_t hi,
                      std::map<std::size_t, std::vector<BinaryString>> values, std::size_t width = 1)
        : bound_(bound), lo_(lo), hi_(hi), width_(width), values_(std::move(values)) {
        if (lo_ > hi_) throw RangeError("enumeration range is empty");
        for (std::size_t n = lo_; n <= hi_; ++n) {
            auto& d = values_[n];
            for (const auto& s : d)
                if (s.size() != n * width_)
                    throw ShapeError("enumerated string " + s.str() + " at n=" + std::to_string(n) + " has wrong length");
            std::sort(d.begin(), d.end());
            d.erase(std::unique(d.begin(), d.end()), d.end());
        }
        for (const auto& [n, d] : values_)
            if (n < lo_ || n > hi_) throw RangeError("enumeration value outside its range");
    }

    std::size_t bound() const { return bound_; }
    std::size_t lo() const { return lo_; }
    std::size_t hi() const { return hi_; }
    std::size_t width() const { return width_; }
    const std::vector<BinaryString>& values(std::size_t n) const {
        auto it = values_.find(n);
        if (it == values_.end()) throw RangeError("n outside enumeration range");
        return it->second;
    }
    const std::map<std::size_t, std::vector<BinaryString>>& all_values() const { return values_; }

private:
    std::size_t bound_ = 1, lo_ = 0, hi_ = 0, width_ = 1;
    std::map<std::size_t, std::vector<BinaryString>> values_;
};

inline bool check_strong_enum(const StrongEnumeration& h, const FinTree& q, std::size_t lo, std::size_t hi) {
    const std::size_t w = h.width();
    if (lo > hi || lo < h.lo() || hi > h.hi()) throw RangeError("check range not inside the enumeration range");
    if (hi * w > q.depth()) throw RangeError("check range exceeds the tree depth");
    for (std::size_t n = lo; n <= hi; ++n) {
        const auto& d = h.values(n);
        if (d.size() > h.bound()) return false;
        if (std::none_of(d.begin(), d.end(), [&](const BinaryString& s) { return q.contains(s); })) return false;
    }
    return true;
}

// Stage t holds a downward-closed family of string sets per length n, stored by its
// generating (maximal) members.
struct EnumerationStage {
    std::map<std::size_t, std::vector<std::set<BinaryString>>> generators;

    bool contains(std::size_t n, const std::set<BinaryString>& w) const {
        auto it = generators.find(n);
        if (it == generators.end()) return false;
        for (const auto& g : it->second)
            if (std::includes(g.begin(), g.end(), w.begin(), w.end())) return true;
        return false;
    }
};

class EnumerationStages {
public:
    EnumerationStages() = default;
    explicit EnumerationStages(std::vector<EnumerationStage> stages) : stages_(std::move(stages)) {
        for (std::size_t t = 0; t < stages_.size(); ++t)
            for (const auto& [n, gens] : stages_[t].generators)
                for (const auto& g : gens) {
                    for (const auto& s : g)
                        if (s.size() != n) throw ShapeError("stage member has strings of the wrong length");
                    if (t + 1 < stages_.size() && !stages_[t + 1].contains(n, g))
                        throw StructureError("stages are not monotone at stage " + std::to_string(t));
                }
    }
    const std::vector<EnumerationStage>& stages() const { return stages_; }
    std::size_t size() const { return stages_.size(); }

private:
    std::vector<EnumerationStage> stages_;
};

struct ExtractResult {
    std::size_t stage = 0;
    std::vector<BinaryString> hitting;  // ρ_1..ρ_m defining the partition
    std::vector<BinaryString> values;   // leftmost string of each nonempty part's intersection
};

// A k'-partition of 𝒲 = {W ⊆ 2^n : W ∉ E_t} with nonempty part intersections exists iff some
// H with |H| ≤ k' meets every W ∈ 𝒲, i.e. 2^n ∖ H ∈ E_t. Part i collects the W containing ρ_i
// but no earlier ρ.
inline ExtractResult extract_enum_detailed(const EnumerationStages& e, std::size_t kprime, std::size_t n,
                                           std::size_t budget) {
    if (n > 12) throw RangeError("extract_enum: level too long");
    const auto level = all_strings(n);
    const std::set<BinaryString> full(level.begin(), level.end());
    auto without = [&](const std::vector<BinaryString>& h) {
        auto w = full;
        for (const auto& s : h) w.erase(s);
        return w;
    };
    const std::size_t stages = std::min(budget, e.size());
    for (std::size_t t = 0; t < stages; ++t) {
        const auto& st = e.stages()[t];
        std::optional<std::vector<BinaryString>> found;
        if (st.contains(n, full)) found = std::vector<BinaryString>{};
        for (std::size_t m = 1; m <= kprime && m <= level.size() && !found; ++m) {
            std::vector<std::size_t> idx(m);
            for (std::size_t i = 0; i < m; ++i) idx[i] = i;
            for (;;) {
                std::vector<BinaryString> h;
                for (auto i : idx) h.push_back(level[i]);
                if (st.contains(n, without(h))) {
                    found = h;
                    break;
                }
                std::size_t i = m;
                while (i > 0 && idx[i - 1] == level.size() - m + i - 1) --i;
                if (i == 0) break;
                ++idx[i - 1];
                for (std::size_t j = i; j < m; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
        if (!found) continue;
        ExtractResult r;
        r.stage = t;
        r.hitting = *found;
        for (std::size_t i = 0; i < found->size(); ++i) {
            std::vector<BinaryString> earlier(found->begin(), found->begin() + static_cast<std::ptrdiff_t>(i));
            if (st.contains(n, without(earlier))) continue;  // part i is empty
            std::optional<BinaryString> best = (*found)[i];
            for (const auto& sigma : level) {
                if (sigma >= *best) break;
                if (std::find(earlier.begin(), earlier.end(), sigma) != earlier.end()) continue;
                auto h = earlier;
                h.push_back(sigma);
                if (st.contains(n, without(h))) {
                    best = sigma;
                    break;
                }
            }
            r.values.push_back(*best);
        }
        return r;
    }
    throw BudgetError("extract_enum: no qualifying " + std::to_string(kprime) + "-partition at level " +
                      std::to_string(n) + " within " + std::to_string(stages) + " stages");
}

inline std::vector<BinaryString> extract_enum(const EnumerationStages& e, std::size_t kprime, std::size_t n,
                                              std::size_t budget = static_cast<std::size_t>(-1)) {
    return extract_enum_detailed(e, kprime, n, budget).values;
}

using ReductionResult = std::variant<BinaryString, StrongEnumeration>;

inline ReductionResult reduce_enum_homogeneous(const FinTree& t, const StrongEnumeration& h) {
    const std::size_t w = h.width();
    if (t.width() != w) throw ContractError("reduce_enum_homogeneous: width mismatch");
    if (t.empty()) throw ContractError("reduce_enum_homogeneous: tree is empty");
    if (!is_homogeneous(t)) throw ContractError("reduce_enum_homogeneous: tree is not homogeneous");
    if (h.hi() * w > t.depth() || !check_strong_enum(h, t, h.lo(), h.hi()))
        throw ContractError("reduce_enum_homogeneous: not a valid strong enumeration of the tree");

    std::optional<std::size_t> last_off;
    for (std::size_t n = h.lo(); n <= h.hi(); ++n)
        for (const auto& s : h.values(n))
            if (!t.contains(s)) last_off = n;

    if (last_off) {
        const std::size_t k = h.bound();
        std::map<std::size_t, std::vector<BinaryString>> g;
        for (std::size_t n = h.lo(); n <= h.hi(); ++n) {
            std::optional<std::size_t> m;
            for (std::size_t j = n; j <= *last_off && !m; ++j)
                for (const auto& s : h.values(j))
                    if (!t.contains(s)) {
                        m = j;
                        break;
                    }
            std::vector<BinaryString> d;
            if (m) {
                const auto& src = h.values(*m);
                std::optional<BinaryString> sigma;
                for (const auto& s : src)
                    if (!t.contains(s)) {
                        sigma = s;
                        break;
                    }
                for (const auto& s : src)
                    if (s != *sigma) d.push_back(s.prefix(n * w));
            } else {
                d = h.values(n);
                if (d.size() >= k) d.pop_back();
            }
            g[n] = std::move(d);
        }
        return StrongEnumeration(k - 1, h.lo(), h.hi(), std::move(g), w);
    }

    BinaryString path;
    for (std::size_t c = 0; c < h.hi(); ++c) {
        const auto& d = h.values(std::max(h.lo(), c + 1));
        path = path.concat(d.front().slice(c * w, w));
    }
    return path;
}

struct PathExtraction {
    BinaryString path;
    std::size_t reductions = 0;
};

inline PathExtraction extract_path_iterated(const FinTree& t, StrongEnumeration h) {
    PathExtraction r;
    for (;;) {
        auto step = reduce_enum_homogeneous(t, h);
        if (auto* p = std::get_if<BinaryString>(&step)) {
            r.path = *p;
            return r;
        }
        h = std::get<StrongEnumeration>(step);
        ++r.reductions;
    }
}

// Finite prefix-free machine: program ↦ output.
class ToyPrefixMachine {
public:
    ToyPrefixMachine() = default;
    explicit ToyPrefixMachine(std::map<BinaryString, BinaryString> programs) : programs_(std::move(programs)) {
        for (auto a = programs_.begin(); a != programs_.end(); ++a)
            for (auto b = std::next(a); b != programs_.end(); ++b)
                if (is_compatible(a->first, b->first))
                    throw StructureError("machine domain is not prefix-free: " + a->first.str() + ", " + b->first.str());
    }
    const std::map<BinaryString, BinaryString>& programs() const { return programs_; }

    std::optional<std::size_t> complexity(const BinaryString& s) const {
        std::optional<std::size_t> best;
        for (const auto& [p, out] : programs_)
            if (out == s && (!best || p.size() < *best)) best = p.size();
        return best;
    }

    std::vector<BinaryString> incompressible_level(std::size_t c, std::size_t n) const {
        std::vector<BinaryString> out;
        for (auto& s : all_strings(n))
            if (!compressible(s, c)) out.push_back(std::move(s));
        return out;
    }

    std::size_t compressible_count(std::size_t c, std::size_t n) const {
        std::size_t count = 0;
        for (const auto& s : all_strings(n))
            if (compressible(s, c)) ++count;
        return count;
    }

    // Kraft sum as numerator over 2^scale, scale = longest program length.
    std::pair<std::uint64_t, std::size_t> kraft_sum() const {
        std::size_t scale = 0;
        for (const auto& [p, out] : programs_) scale = std::max(scale, p.size());
        if (scale > 62) throw RangeError("kraft_sum: program too long");
        std::uint64_t num = 0;
        for (const auto& [p, out] : programs_) num += std::uint64_t{1} << (scale - p.size());
        return {num, scale};
    }
    bool kraft_holds() const {
        auto [num, scale] = kraft_sum();
        return num <= (std::uint64_t{1} << scale);
    }

private:
    // K(ρ) < n − c
    bool compressible(const BinaryString& s, std::size_t c) const {
        auto k = complexity(s);
        return k && *k + c < s.size();
    }
    std::map<BinaryString, BinaryString> programs_;
};

}  // namespace coneforce
