#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "fintree.hpp"
#include "partition.hpp"

namespace coneforce {

// Requirements on one column of a path: bits of `one` must be set, bits of `zero` clear.
struct ColumnFilter {
    std::uint64_t one = 0;
    std::uint64_t zero = 0;
};
using PathFilter = std::vector<ColumnFilter>;

struct TreeLimits {
    std::size_t max_unit_patterns = std::size_t{1} << 20;
    std::size_t max_cubes = std::size_t{1} << 16;
};

// Ordered k-partition tree over the ground {0..N-1}, stored column by column.
//
// At each element the admissible columns (part bits plus hidden copies) form a union of
// cubes; a cube is a product of units and a unit lists its admissible bit patterns.
// A path picks one admissible column per element. Nogoods couple elements: each is a set
// of (element, hidden slot) literals that may not all be set on one path.
class PartitionTree {
public:
    struct Label {
        bool hidden = false;
        std::uint32_t id = 0;
        bool operator==(const Label&) const = default;
    };
    struct Unit {
        std::vector<Label> bits;
        std::vector<std::uint64_t> patterns;
    };
    struct Cube {
        std::vector<Unit> units;
    };
    struct Literal {
        std::uint32_t element = 0;
        std::uint32_t slot = 0;
        auto operator<=>(const Literal&) const = default;
    };
    using Nogood = std::vector<Literal>;

    PartitionTree() = default;

    // One part holding every element.
    static PartitionTree trivial(std::size_t ground) {
        if (ground == 0 || ground > 64) throw RangeError("partition tree ground must be in 1..64");
        PartitionTree t;
        t.ground_ = ground;
        t.parts_ = 1;
        t.columns_.assign(ground, {Cube{{Unit{{Label{false, 0}}, {1}}}}});
        return t;
    }

    // Every column admissible for k parts (the full k-splitting tree), for tests.
    static PartitionTree full(std::size_t ground, std::size_t k) {
        if (k == 0 || k > 16) throw RangeError("full partition tree: k out of range");
        PartitionTree t;
        t.ground_ = ground;
        t.parts_ = k;
        Unit u;
        for (std::uint32_t i = 0; i < k; ++i) u.bits.push_back({false, i});
        for (std::uint64_t p = 0; p < (std::uint64_t{1} << k); ++p) u.patterns.push_back(p);
        t.columns_.assign(ground, {Cube{{u}}});
        return t;
    }

    std::size_t ground() const { return ground_; }
    std::size_t parts() const { return parts_; }
    const std::vector<Nogood>& nogoods() const { return nogoods_; }
    std::size_t slot_count() const { return slots_; }
    const std::vector<Cube>& column(std::size_t x) const { return columns_.at(x); }
    bool known_empty() const { return dead_; }

    std::size_t state_count() const {
        std::size_t c = 0;
        for (const auto& col : columns_)
            for (const auto& cube : col)
                for (const auto& u : cube.units) c += u.patterns.size();
        return c;
    }

    PathFilter no_filter() const { return PathFilter(ground_); }

    bool empty() const { return !exists_path(no_filter()); }

    bool exists_path(const PathFilter& f) const {
        if (dead_) return false;
        std::vector<std::vector<const Cube*>> live(ground_);
        std::vector<std::vector<std::vector<std::uint64_t>>> local(ground_);
        for (std::size_t x = 0; x < ground_; ++x) {
            for (const auto& cube : columns_[x])
                if (cube_admits(cube, f[x])) live[x].push_back(&cube);
            if (live[x].empty()) return false;
        }
        if (nogoods_.empty()) return true;
        return solve_nogoods(live, f);
    }

    // Drops every column violating the filter.
    PartitionTree restricted(const PathFilter& f) const {
        PartitionTree t = *this;
        for (std::size_t x = 0; x < ground_; ++x) {
            if (f[x].one == 0 && f[x].zero == 0) continue;
            std::vector<Cube> kept;
            for (const auto& cube : columns_[x]) {
                Cube c = cube;
                bool alive = true;
                for (auto& u : c.units) {
                    auto [one, zero] = local_masks(u, f[x]);
                    std::erase_if(u.patterns, [&](std::uint64_t p) { return (p & one) != one || (p & zero) != 0; });
                    if (u.patterns.empty()) alive = false;
                }
                if (alive) kept.push_back(std::move(c));
            }
            if (kept.empty()) t.dead_ = true;
            t.columns_[x] = std::move(kept);
        }
        return t;
    }

    // Removes the given elements from part p on every path.
    PartitionTree cleared(std::size_t p, ElementSet xs) const {
        PartitionTree t = *this;
        for (auto x : xs.to_vector()) {
            if (x >= ground_) continue;
            for (auto& cube : t.columns_[x])
                for (auto& u : cube.units)
                    for (std::size_t b = 0; b < u.bits.size(); ++b)
                        if (!u.bits[b].hidden && u.bits[b].id == p) {
                            for (auto& pat : u.patterns) pat &= ~(std::uint64_t{1} << b);
                            normalize(u.patterns);
                        }
        }
        return t;
    }

    // Splits every part i into rows 2i (left) and 2i+1 (right) with row_2i ∪ row_2i+1 = part_i,
    // excluding paths on which some row contains one of its trigger sets.
    PartitionTree split(const std::vector<std::vector<ElementSet>>& triggers, const TreeLimits& lim = TreeLimits{}) const {
        if (triggers.size() != 2 * parts_) throw ShapeError("split: need one trigger list per row");
        if (2 * parts_ > 64) throw ResourceError("split: more than 64 parts");
        PartitionTree t;
        t.ground_ = ground_;
        t.parts_ = 2 * parts_;
        t.slots_ = slots_;
        t.nogoods_ = nogoods_;
        t.dead_ = dead_;
        std::vector<std::optional<std::uint32_t>> row_slot(2 * parts_);
        std::vector<std::uint64_t> zero_rows(ground_, 0);
        std::vector<std::vector<std::uint32_t>> copied_rows(ground_);
        for (std::size_t r = 0; r < triggers.size(); ++r)
            for (auto s : triggers[r]) {
                if (s.empty()) t.dead_ = true;
                else if (s.size() == 1)
                    zero_rows[s.min()] |= std::uint64_t{1} << r;
                else {
                    if (!row_slot[r]) row_slot[r] = t.slots_++;
                    Nogood ng;
                    for (auto x : s.to_vector()) {
                        if (x >= ground_) throw RangeError("split: trigger outside the ground set");
                        ng.push_back({static_cast<std::uint32_t>(x), *row_slot[r]});
                        auto& cr = copied_rows[x];
                        if (std::find(cr.begin(), cr.end(), r) == cr.end()) cr.push_back(static_cast<std::uint32_t>(r));
                    }
                    t.nogoods_.push_back(std::move(ng));
                }
            }
        t.columns_.resize(ground_);
        for (std::size_t x = 0; x < ground_; ++x) {
            for (const auto& cube : columns_[x]) {
                Cube nc;
                bool alive = true;
                for (const auto& u : cube.units) {
                    Unit nu = split_unit(u, zero_rows[x], copied_rows[x], row_slot, lim);
                    if (nu.patterns.empty()) alive = false;
                    nc.units.push_back(std::move(nu));
                }
                if (alive) t.columns_[x].push_back(std::move(nc));
            }
            if (t.columns_[x].empty()) t.dead_ = true;
        }
        return t;
    }

    // Cross of source trees along a supporter: new part (i, K) is ⋂_{p∈K} part_i(X^(p)).
    static PartitionTree cross(const std::vector<PartitionTree>& sources, const Supporter& k, const TreeLimits& lim = TreeLimits{}) {
        if (sources.size() != k.n || sources.empty()) throw ShapeError("cross: source count differs from supporter n");
        const std::size_t ground = sources.front().ground_;
        for (const auto& s : sources)
            if (s.ground_ != ground || s.parts_ != k.u()) throw ShapeError("cross: sources disagree with the supporter");
        struct NewPart {
            std::uint32_t row;
            ElementSet members;
        };
        std::vector<NewPart> parts;
        for (std::size_t i = 0; i < k.u(); ++i)
            for (auto kk : k.families[i]) parts.push_back({static_cast<std::uint32_t>(i), kk});
        if (parts.size() > 64) throw ResourceError("cross: more than 64 parts");

        PartitionTree t;
        t.ground_ = ground;
        t.parts_ = parts.size();
        std::vector<std::uint32_t> offset(sources.size(), 0);
        for (std::size_t p = 0; p < sources.size(); ++p) {
            offset[p] = t.slots_;
            t.slots_ += sources[p].slots_;
            if (sources[p].dead_) t.dead_ = true;
            for (const auto& ng : sources[p].nogoods_) {
                Nogood m = ng;
                for (auto& l : m) l.slot += offset[p];
                t.nogoods_.push_back(std::move(m));
            }
        }
        std::set<Literal> referenced;
        for (const auto& ng : t.nogoods_)
            for (auto l : ng) referenced.insert(l);

        t.columns_.resize(ground);
        for (std::size_t x = 0; x < ground; ++x) {
            std::vector<std::size_t> pick(sources.size(), 0);
            bool any_empty = false;
            for (const auto& s : sources)
                if (s.columns_[x].empty()) any_empty = true;
            if (any_empty) {
                t.dead_ = true;
                continue;
            }
            for (;;) {
                std::vector<const Cube*> chosen;
                for (std::size_t p = 0; p < sources.size(); ++p) chosen.push_back(&sources[p].columns_[x][pick[p]]);
                cross_cubes(chosen, offset, parts, referenced, static_cast<std::uint32_t>(x), lim, t.columns_[x]);
                if (t.columns_[x].size() > lim.max_cubes) throw ResourceError("cross: too many cubes at one element");
                std::size_t p = 0;
                while (p < sources.size() && ++pick[p] == sources[p].columns_[x].size()) pick[p++] = 0;
                if (p == sources.size()) break;
            }
            if (t.columns_[x].empty()) t.dead_ = true;
        }
        return t;
    }

    // Every admissible (part mask, hidden assignment) column at x.
    struct FullColumn {
        std::uint64_t parts = 0;
        std::map<std::uint32_t, bool> hidden;
        auto operator<=>(const FullColumn&) const = default;
    };
    std::vector<FullColumn> full_columns(std::size_t x) const {
        std::set<FullColumn> out;
        for (const auto& cube : columns_[x]) {
            std::vector<FullColumn> acc{FullColumn{}};
            for (const auto& u : cube.units) {
                std::vector<FullColumn> next;
                for (const auto& a : acc)
                    for (auto pat : u.patterns) {
                        FullColumn c = a;
                        for (std::size_t b = 0; b < u.bits.size(); ++b) {
                            const bool v = (pat >> b) & 1u;
                            if (u.bits[b].hidden)
                                c.hidden[u.bits[b].id] = v;
                            else if (v)
                                c.parts |= std::uint64_t{1} << u.bits[b].id;
                        }
                        next.push_back(std::move(c));
                    }
                acc = std::move(next);
            }
            out.insert(acc.begin(), acc.end());
        }
        return {out.begin(), out.end()};
    }

    // All paths as per-element part masks (small trees only).
    std::vector<std::vector<std::uint64_t>> enumerate_paths(std::size_t limit = 1000000) const {
        std::vector<std::vector<std::uint64_t>> out;
        if (dead_) return out;
        std::vector<std::vector<FullColumn>> cols(ground_);
        for (std::size_t x = 0; x < ground_; ++x) cols[x] = full_columns(x);
        std::vector<const FullColumn*> chosen(ground_);
        std::set<std::vector<std::uint64_t>> seen;
        std::function<void(std::size_t)> rec = [&](std::size_t x) {
            if (x == ground_) {
                for (const auto& ng : nogoods_) {
                    bool all = true;
                    for (auto l : ng) {
                        auto it = chosen[l.element]->hidden.find(l.slot);
                        if (it == chosen[l.element]->hidden.end() || !it->second) {
                            all = false;
                            break;
                        }
                    }
                    if (all) return;
                }
                std::vector<std::uint64_t> p(ground_);
                for (std::size_t y = 0; y < ground_; ++y) p[y] = chosen[y]->parts;
                if (seen.insert(p).second) {
                    if (seen.size() > limit) throw ResourceError("enumerate_paths: too many paths");
                    out.push_back(std::move(p));
                }
                return;
            }
            for (const auto& c : cols[x]) {
                chosen[x] = &c;
                rec(x + 1);
            }
        };
        rec(0);
        std::sort(out.begin(), out.end());
        return out;
    }

    // Interleaved explicit tree of depth k·N (small trees only).
    FinTree to_fintree(std::size_t limit = 200000) const {
        std::vector<BinaryString> paths;
        for (const auto& p : enumerate_paths(limit)) {
            std::vector<ElementSet> parts(parts_);
            for (std::size_t x = 0; x < ground_; ++x)
                for (std::size_t i = 0; i < parts_; ++i)
                    if ((p[x] >> i) & 1u) parts[i].insert(x);
            paths.push_back(encode_partition(parts, ground_));
        }
        std::sort(paths.begin(), paths.end());
        return FinTree::from_paths(paths, parts_ * ground_);
    }

    PathFilter require(std::size_t part, ElementSet xs) const {
        PathFilter f(ground_);
        for (auto x : xs.to_vector())
            if (x < ground_) f[x].one |= std::uint64_t{1} << part;
        return f;
    }

    // Some path has x in the part, for each x separately.
    ElementSet possible_elements(std::size_t part) const {
        ElementSet s;
        for (std::size_t x = 0; x < ground_; ++x)
            if (exists_path(require(part, ElementSet{x}))) s.insert(x);
        return s;
    }

    // Maximal sets part(X) over paths X; exact.
    std::vector<ElementSet> maximal_part_sets(std::size_t part) const {
        if (dead_ || empty()) return {};
        if (nogoods_.empty()) return {possible_elements(part)};
        std::vector<ElementSet> found;
        PathFilter f(ground_);
        const std::uint64_t bit = std::uint64_t{1} << part;
        std::function<void(std::size_t, ElementSet)> rec = [&](std::size_t x, ElementSet acc) {
            if (x == ground_) {
                found.push_back(acc);
                return;
            }
            f[x].one |= bit;
            if (exists_path(f)) {
                ElementSet a = acc;
                a.insert(x);
                rec(x + 1, a);
            }
            f[x].one &= ~bit;
            f[x].zero |= bit;
            if (exists_path(f)) rec(x + 1, acc);
            f[x].zero &= ~bit;
        };
        rec(0, ElementSet{});
        std::vector<ElementSet> out;
        for (auto s : found)
            if (std::none_of(found.begin(), found.end(), [&](ElementSet o) { return o != s && s.subset_of(o); }))
                out.push_back(s);
        return out;
    }

private:
    static void normalize(std::vector<std::uint64_t>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    static std::pair<std::uint64_t, std::uint64_t> local_masks(const Unit& u, const ColumnFilter& f) {
        std::uint64_t one = 0, zero = 0;
        if (f.one == 0 && f.zero == 0) return {0, 0};
        for (std::size_t b = 0; b < u.bits.size(); ++b) {
            if (u.bits[b].hidden) continue;
            const std::uint64_t pb = std::uint64_t{1} << u.bits[b].id;
            if (f.one & pb) one |= std::uint64_t{1} << b;
            if (f.zero & pb) zero |= std::uint64_t{1} << b;
        }
        return {one, zero};
    }

    static bool unit_admits(const Unit& u, std::uint64_t one, std::uint64_t zero) {
        return std::any_of(u.patterns.begin(), u.patterns.end(),
                           [&](std::uint64_t p) { return (p & one) == one && (p & zero) == 0; });
    }

    static bool cube_admits(const Cube& c, const ColumnFilter& f) {
        for (const auto& u : c.units) {
            auto [one, zero] = local_masks(u, f);
            if (!unit_admits(u, one, zero)) return false;
        }
        return true;
    }

    bool solve_nogoods(const std::vector<std::vector<const Cube*>>& live, const PathFilter& f) const {
        // Relevant slots per element, and each element's achievable signatures over them.
        std::map<std::uint32_t, std::vector<std::uint32_t>> slots_at;
        for (const auto& ng : nogoods_)
            for (auto l : ng) {
                auto& v = slots_at[l.element];
                if (std::find(v.begin(), v.end(), l.slot) == v.end()) v.push_back(l.slot);
            }
        std::vector<std::uint32_t> vars;
        std::map<std::uint32_t, std::size_t> var_of;
        std::vector<std::vector<std::uint64_t>> domain;
        for (auto& [x, slots] : slots_at) {
            std::set<std::uint64_t> sigs;
            for (const Cube* cube : live[x]) {
                std::set<std::uint64_t> acc{0};
                for (const auto& u : cube->units) {
                    std::vector<std::pair<std::size_t, std::size_t>> pos;  // (bit in unit, index in slots)
                    for (std::size_t b = 0; b < u.bits.size(); ++b)
                        if (u.bits[b].hidden)
                            for (std::size_t s = 0; s < slots.size(); ++s)
                                if (slots[s] == u.bits[b].id) pos.emplace_back(b, s);
                    if (pos.empty()) continue;
                    auto [one, zero] = local_masks(u, f[x]);
                    std::set<std::uint64_t> proj;
                    for (auto p : u.patterns) {
                        if ((p & one) != one || (p & zero) != 0) continue;
                        std::uint64_t sig = 0;
                        for (auto [b, s] : pos)
                            if ((p >> b) & 1u) sig |= std::uint64_t{1} << s;
                        proj.insert(sig);
                    }
                    std::set<std::uint64_t> next;
                    for (auto a : acc)
                        for (auto q : proj) next.insert(a | q);
                    acc = std::move(next);
                }
                sigs.insert(acc.begin(), acc.end());
            }
            var_of[x] = vars.size();
            vars.push_back(x);
            std::vector<std::uint64_t> d(sigs.begin(), sigs.end());
            std::stable_sort(d.begin(), d.end(), [](std::uint64_t a, std::uint64_t b) {
                return std::popcount(a) < std::popcount(b);
            });
            domain.push_back(std::move(d));
        }
        struct Lit {
            std::size_t var;
            std::uint64_t mask;
        };
        std::vector<std::vector<std::vector<Lit>>> checks(vars.size());
        for (const auto& ng : nogoods_) {
            std::vector<Lit> lits;
            std::size_t last = 0;
            for (auto l : ng) {
                const std::size_t v = var_of.at(l.element);
                const auto& slots = slots_at.at(l.element);
                const std::size_t s = static_cast<std::size_t>(std::find(slots.begin(), slots.end(), l.slot) - slots.begin());
                lits.push_back({v, std::uint64_t{1} << s});
                last = std::max(last, v);
            }
            checks[last].push_back(std::move(lits));
        }
        std::vector<std::uint64_t> val(vars.size(), 0);
        std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
            if (i == vars.size()) return true;
            for (auto sig : domain[i]) {
                val[i] = sig;
                bool ok = true;
                for (const auto& lits : checks[i]) {
                    if (std::all_of(lits.begin(), lits.end(), [&](const Lit& l) { return (val[l.var] & l.mask) != 0; })) {
                        ok = false;
                        break;
                    }
                }
                if (ok && rec(i + 1)) return true;
            }
            return false;
        };
        return rec(0);
    }

    Unit split_unit(const Unit& u, std::uint64_t zero_rows, const std::vector<std::uint32_t>& copied_rows,
                    const std::vector<std::optional<std::uint32_t>>& row_slot, const TreeLimits& lim) const {
        Unit nu;
        // For each old bit: its new bit positions (two for a part, one for a hidden slot).
        struct Source {
            bool hidden;
            std::size_t left, right;  // new positions
            std::optional<std::size_t> copy_left, copy_right;
        };
        std::vector<Source> src;
        for (const auto& lab : u.bits) {
            if (lab.hidden) {
                src.push_back({true, nu.bits.size(), 0, {}, {}});
                nu.bits.push_back(lab);
                continue;
            }
            Source s{false, nu.bits.size(), nu.bits.size() + 1, {}, {}};
            nu.bits.push_back({false, 2 * lab.id});
            nu.bits.push_back({false, 2 * lab.id + 1});
            src.push_back(s);
        }
        for (auto& s : src) {
            if (s.hidden) continue;
            const std::uint32_t lrow = nu.bits[s.left].id, rrow = nu.bits[s.right].id;
            for (auto r : copied_rows) {
                if (r == lrow) {
                    s.copy_left = nu.bits.size();
                    nu.bits.push_back({true, *row_slot[r]});
                }
                if (r == rrow) {
                    s.copy_right = nu.bits.size();
                    nu.bits.push_back({true, *row_slot[r]});
                }
            }
        }
        if (nu.bits.size() > 64) throw ResourceError("split: unit wider than 64 bits");
        for (auto pat : u.patterns) {
            std::vector<std::uint64_t> acc{0};
            for (std::size_t b = 0; b < src.size(); ++b) {
                const auto& s = src[b];
                const bool v = (pat >> b) & 1u;
                if (s.hidden) {
                    if (v)
                        for (auto& a : acc) a |= std::uint64_t{1} << s.left;
                    continue;
                }
                if (!v) continue;
                const std::uint32_t lrow = nu.bits[s.left].id, rrow = nu.bits[s.right].id;
                std::vector<std::uint64_t> opts;
                for (int c = 0; c < 3; ++c) {
                    const bool l = c != 1, r = c != 0;
                    if (l && ((zero_rows >> lrow) & 1u)) continue;
                    if (r && ((zero_rows >> rrow) & 1u)) continue;
                    std::uint64_t o = 0;
                    if (l) {
                        o |= std::uint64_t{1} << s.left;
                        if (s.copy_left) o |= std::uint64_t{1} << *s.copy_left;
                    }
                    if (r) {
                        o |= std::uint64_t{1} << s.right;
                        if (s.copy_right) o |= std::uint64_t{1} << *s.copy_right;
                    }
                    opts.push_back(o);
                }
                std::vector<std::uint64_t> next;
                for (auto a : acc)
                    for (auto o : opts) next.push_back(a | o);
                acc = std::move(next);
                if (acc.size() > lim.max_unit_patterns) throw ResourceError("split: unit has too many patterns");
            }
            nu.patterns.insert(nu.patterns.end(), acc.begin(), acc.end());
            if (nu.patterns.size() > lim.max_unit_patterns) throw ResourceError("split: unit has too many patterns");
        }
        normalize(nu.patterns);
        return nu;
    }

    template <class NewPart>
    static void cross_cubes(const std::vector<const Cube*>& chosen, const std::vector<std::uint32_t>& offset,
                            const std::vector<NewPart>& parts, const std::set<Literal>& referenced, std::uint32_t x,
                            const TreeLimits& lim, std::vector<Cube>& out) {
        // Flatten source units; locate rows.
        struct Ref {
            std::size_t source, unit;
        };
        std::vector<Ref> units;
        std::vector<std::vector<std::size_t>> first_unit(chosen.size());
        std::map<std::pair<std::size_t, std::uint32_t>, std::pair<std::size_t, std::size_t>> row_at;  // (src,row) -> (unit, bit)
        for (std::size_t p = 0; p < chosen.size(); ++p)
            for (std::size_t ui = 0; ui < chosen[p]->units.size(); ++ui) {
                const auto& u = chosen[p]->units[ui];
                for (std::size_t b = 0; b < u.bits.size(); ++b)
                    if (!u.bits[b].hidden) row_at[{p, u.bits[b].id}] = {units.size(), b};
                units.push_back({p, ui});
            }
        std::vector<std::size_t> parent(units.size());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
            return parent[a] == a ? a : parent[a] = find(parent[a]);
        };
        std::vector<std::vector<std::size_t>> part_units(parts.size());
        for (std::size_t q = 0; q < parts.size(); ++q) {
            for (auto p : parts[q].members.to_vector()) part_units[q].push_back(row_at.at({p, parts[q].row}).first);
            for (std::size_t j = 1; j < part_units[q].size(); ++j)
                parent[find(part_units[q][j])] = find(part_units[q][0]);
        }
        // Components that matter: those with new parts or referenced hidden slots.
        std::map<std::size_t, std::vector<std::size_t>> comp_parts;  // root -> new part indices
        std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> comp_hidden;  // root -> (unit,bit)
        std::vector<std::size_t> constant_parts;
        for (std::size_t q = 0; q < parts.size(); ++q) {
            if (part_units[q].empty())
                constant_parts.push_back(q);
            else
                comp_parts[find(part_units[q][0])].push_back(q);
        }
        for (std::size_t ui = 0; ui < units.size(); ++ui) {
            const auto& u = chosen[units[ui].source]->units[units[ui].unit];
            for (std::size_t b = 0; b < u.bits.size(); ++b)
                if (u.bits[b].hidden &&
                    referenced.count(Literal{x, u.bits[b].id + offset[units[ui].source]}))
                    comp_hidden[find(ui)].emplace_back(ui, b);
        }
        std::set<std::size_t> roots;
        for (auto& [r, v] : comp_parts) roots.insert(r);
        for (auto& [r, v] : comp_hidden) roots.insert(r);

        Cube base;
        std::vector<Unit> exploded;  // merged units, expanded into single-bit cubes below
        for (auto q : constant_parts) base.units.push_back(Unit{{Label{false, static_cast<std::uint32_t>(q)}}, {1}});
        for (auto root : roots) {
            std::vector<std::size_t> members;
            for (std::size_t ui = 0; ui < units.size(); ++ui)
                if (find(ui) == root) members.push_back(ui);
            Unit nu;
            const auto& qs = comp_parts[root];
            const auto& hs = comp_hidden[root];
            for (auto q : qs) nu.bits.push_back({false, static_cast<std::uint32_t>(q)});
            for (auto [ui, b] : hs) {
                const auto& u = chosen[units[ui].source]->units[units[ui].unit];
                nu.bits.push_back({true, u.bits[b].id + offset[units[ui].source]});
            }
            if (nu.bits.size() > 64) throw ResourceError("cross: unit wider than 64 bits");
            std::vector<std::size_t> member_pos(units.size(), 0);
            for (std::size_t m = 0; m < members.size(); ++m) member_pos[members[m]] = m;
            std::vector<std::size_t> pick(members.size(), 0);
            std::size_t combos = 0;
            for (;;) {
                auto bit = [&](std::size_t ui, std::size_t b) {
                    const auto& u = chosen[units[ui].source]->units[units[ui].unit];
                    return ((u.patterns[pick[member_pos[ui]]] >> b) & 1u) != 0;
                };
                std::uint64_t pat = 0;
                std::size_t pos = 0;
                for (auto q : qs) {
                    bool v = true;
                    for (auto p : parts[q].members.to_vector()) {
                        auto [ui, b] = row_at.at({p, parts[q].row});
                        v = v && bit(ui, b);
                    }
                    if (v) pat |= std::uint64_t{1} << pos;
                    ++pos;
                }
                for (auto [ui, b] : hs) {
                    if (bit(ui, b)) pat |= std::uint64_t{1} << pos;
                    ++pos;
                }
                nu.patterns.push_back(pat);
                if (++combos > lim.max_unit_patterns) throw ResourceError("cross: merged unit too large");
                std::size_t m = 0;
                while (m < members.size()) {
                    const auto& u = chosen[units[members[m]].source]->units[units[members[m]].unit];
                    if (++pick[m] < u.patterns.size()) break;
                    pick[m++] = 0;
                }
                if (m == members.size()) break;
            }
            normalize(nu.patterns);
            if (members.size() > 1)
                exploded.push_back(std::move(nu));
            else
                base.units.push_back(std::move(nu));
        }
        std::vector<Cube> cubes{base};
        for (const auto& u : exploded) {
            std::vector<Cube> next;
            for (const auto& c : cubes)
                for (auto pat : u.patterns) {
                    Cube nc = c;
                    for (std::size_t b = 0; b < u.bits.size(); ++b)
                        nc.units.push_back(Unit{{u.bits[b]}, {(pat >> b) & 1u}});
                    next.push_back(std::move(nc));
                }
            cubes = std::move(next);
            if (cubes.size() > lim.max_cubes) throw ResourceError("cross: too many cubes at one element");
        }
        for (auto& c : cubes) out.push_back(std::move(c));
    }

    std::size_t ground_ = 0;
    std::size_t parts_ = 0;
    std::uint32_t slots_ = 0;
    bool dead_ = false;
    std::vector<std::vector<Cube>> columns_;
    std::vector<Nogood> nogoods_;
};

}  // namespace coneforce
