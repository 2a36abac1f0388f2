#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "partition_tree.hpp"
#include "scenario.hpp"

namespace coneforce {

// Mathias conditions -----------------------------------------------------------

struct MathiasCondition {
    BinaryString stem;
    ElementSet reservoir;
};

inline bool mathias_extends(const MathiasCondition& c2, const MathiasCondition& c1) {
    return c1.stem.is_strict_prefix_of(c2.stem) &&
           (c2.reservoir | c2.stem.ones_set()).subset_of(c1.reservoir | c1.stem.ones_set());
}

inline bool satisfies(const BinaryString& g, const MathiasCondition& c) {
    return c.stem.is_strict_prefix_of(g) && g.ones_set().subset_of(c.stem.ones_set() | c.reservoir);
}

// Tree forcing conditions ------------------------------------------------------

enum class Side { left = 0, right = 1 };
inline const char* side_name(Side s) { return s == Side::left ? "l" : "r"; }
inline Side side_of_row(std::size_t row) { return row % 2 == 0 ? Side::left : Side::right; }

struct StemPair {
    BinaryString left, right;
    const BinaryString& operator[](Side s) const { return s == Side::left ? left : right; }
    BinaryString& operator[](Side s) { return s == Side::left ? left : right; }
    std::size_t horizon() const { return std::max(left.size(), right.size()); }
    bool operator==(const StemPair&) const = default;
};

// Progress counters per tag; tags never touched sit at (1, 1).
using Counters = std::map<int, std::array<std::size_t, 2>>;

inline std::size_t counter(const Counters& c, int tag, Side s) {
    auto it = c.find(tag);
    return it == c.end() ? 1 : it->second[static_cast<int>(s)];
}
inline void bump(Counters& c, int tag, Side s) {
    auto it = c.find(tag);
    if (it == c.end()) it = c.emplace(tag, std::array<std::size_t, 2>{1, 1}).first;
    ++it->second[static_cast<int>(s)];
}

struct ForcingCondition {
    std::vector<StemPair> stems;
    PartitionTree tree;
    ElementSet deficit;

    std::size_t parts() const { return stems.size(); }
};

struct PartNode {
    std::size_t parent = 0;
    int side = -1;  // child side, -1 at the root
    ElementSet members;
    Counters counters;
    StemPair stems;
    bool fading_l = false, fading_r = false;
};

struct ConstructionTree {
    std::vector<std::vector<PartNode>> levels;
};

struct ForcingState {
    ForcingCondition cond;
    std::vector<Counters> progress;
    ConstructionTree ctree;
    std::size_t step = 0;
    bool stuck = false;
};

struct Environment {
    std::size_t depth = 12;
    std::size_t steps = 3;
    PeriodicSet a;
    FinTree q;
    FunctionalRegistry functionals;
    std::vector<int> schedule;
    Budgets budgets;
    TreeLimits limits;
    std::vector<json>* trace = nullptr;

    static Environment from(const Scenario& s) {
        Environment e;
        e.depth = s.depth;
        e.steps = s.steps;
        e.a = s.a;
        e.q = s.q;
        e.functionals = s.functionals;
        e.schedule = s.schedule;
        e.budgets = s.budgets;
        return e;
    }
    ElementSet side_set(Side s) const {
        const ElementSet a_set = a.below(depth);
        return s == Side::left ? a_set : ElementSet::below(depth) - a_set;
    }
    void emit(json record) const {
        if (trace) trace->push_back(std::move(record));
    }
};

// [σ] meets [Q] iff σ cut to Q's depth is a node of Q.
inline bool meets_tree(const FinTree& q, const BinaryString& s) { return q.contains(s.prefix(q.depth())); }

inline bool output_bad_for_tree(const Output& d, const FinTree& q, std::size_t bound) {
    if (d.big || d.strings.size() > bound) return true;
    return std::none_of(d.strings.begin(), d.strings.end(), [&](const BinaryString& s) { return meets_tree(q, s); });
}

inline json elements_json(ElementSet s) {
    json a = json::array();
    for (auto x : s.to_vector()) a.push_back(x + 1);
    return a;
}

inline json counters_json(const Counters& c) {
    json o = json::object();
    for (const auto& [tag, v] : c) o[std::to_string(tag)] = {v[0], v[1]};
    return o;
}

inline ForcingState initial_state(const Environment& env) {
    ForcingState st;
    st.cond.stems = {StemPair{}};
    st.cond.tree = PartitionTree::trivial(env.depth);
    st.progress = {Counters{}};
    PartNode root;
    root.members = ElementSet{};
    st.ctree.levels.push_back({root});
    return st;
}

// Queries ----------------------------------------------------------------------

inline bool fading(const ForcingCondition& c, std::size_t part, Side side, const Environment& env) {
    for (auto x : env.side_set(side).to_vector())
        if (c.tree.exists_path(c.tree.require(part, ElementSet{x}))) return false;
    return true;
}

struct Fac7Witness {
    std::size_t part;
    std::size_t in_a, in_complement;
};

inline std::optional<Fac7Witness> check_fac7(const PartitionTree& t, const Environment& env) {
    const auto a = env.side_set(Side::left).to_vector();
    const auto b = env.side_set(Side::right).to_vector();
    for (std::size_t i = 0; i < t.parts(); ++i) {
        const auto poss = t.possible_elements(i);
        for (auto x : a) {
            if (!poss.contains(x)) continue;
            for (auto y : b)
                if (poss.contains(y) && t.exists_path(t.require(i, ElementSet{x, y}))) return Fac7Witness{i, x, y};
        }
    }
    return std::nullopt;
}

// Explicit form on an interleaved tree: a part and path meeting both A and its complement.
inline std::optional<std::pair<std::size_t, BinaryString>> check_fac7(const FinTree& t, std::size_t k,
                                                                      const PeriodicSet& a) {
    const std::size_t horizon = t.depth() / k;
    const ElementSet as = a.below(horizon);
    const ElementSet bs = ElementSet::below(horizon) - as;
    for (std::size_t i = 0; i < k; ++i)
        for (const auto& x : t.paths()) {
            const auto part = project(x, k, i).prefix(horizon).ones_set();
            if (part.intersects(as) && part.intersects(bs)) return std::make_pair(i, x);
        }
    return std::nullopt;
}

// c2 extends c1 along pmap: stems extend (reflexively) and every part set of c2, with its
// stem, sits inside the parent part of one c1 path together with the parent's stem.
inline bool cond_extends(const ForcingCondition& c2, const ForcingCondition& c1, const std::vector<std::size_t>& pmap) {
    if (pmap.size() != c2.parts()) return false;
    for (std::size_t i = 0; i < c2.parts(); ++i) {
        const std::size_t p = pmap[i];
        if (p >= c1.parts()) return false;
        for (Side s : {Side::left, Side::right})
            if (!c1.stems[p][s].is_prefix_of(c2.stems[i][s])) return false;
    }
    if (c2.tree.empty()) return true;
    for (std::size_t i = 0; i < c2.parts(); ++i) {
        const std::size_t p = pmap[i];
        const auto sets = c2.tree.maximal_part_sets(i);
        for (Side s : {Side::left, Side::right})
            for (auto m : sets) {
                const ElementSet need = (c2.stems[i][s].ones_set() | m) - c1.stems[p][s].ones_set();
                if (!need.subset_of(ElementSet::below(c1.tree.ground()))) return false;
                if (!c1.tree.exists_path(c1.tree.require(p, need))) return false;
            }
    }
    return true;
}

struct ConditionVerdicts {
    bool nonempty = false, covers = false, avoids_horizon = false, stems_in_sides = false;
    json to_json() const {
        return {{"cond1_nonempty", nonempty}, {"cond2_covers", covers}, {"cond3_avoids_horizon", avoids_horizon},
                {"cond4_stems", stems_in_sides}};
    }
    bool all() const { return nonempty && covers && avoids_horizon && stems_in_sides; }
};

inline ConditionVerdicts check_conditions(const ForcingCondition& c, const Environment& env) {
    ConditionVerdicts v;
    const auto& t = c.tree;
    v.nonempty = t.parts() == c.parts() && !t.empty();
    v.covers = true;
    const std::uint64_t all_parts = t.parts() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << t.parts()) - 1;
    for (std::size_t x = 0; x < t.ground() && v.covers; ++x) {
        if (c.deficit.contains(x)) continue;
        PathFilter f(t.ground());
        f[x].zero = all_parts;
        if (t.exists_path(f)) v.covers = false;
    }
    v.avoids_horizon = true;
    for (std::size_t i = 0; i < c.parts() && v.avoids_horizon; ++i)
        for (std::size_t x = 0; x < std::min(c.stems[i].horizon(), t.ground()); ++x)
            if (t.exists_path(t.require(i, ElementSet{x}))) {
                v.avoids_horizon = false;
                break;
            }
    v.stems_in_sides = true;
    for (const auto& sp : c.stems) {
        for (auto x : sp.left.ones_set().to_vector())
            if (!env.a.contains(x)) v.stems_in_sides = false;
        for (auto x : sp.right.ones_set().to_vector())
            if (env.a.contains(x)) v.stems_in_sides = false;
    }
    return v;
}

// Sets stem (part, side) and keeps the tree inside it: paths must carry the fresh stem
// elements in the part, then the part is cleared below the new stem horizon.
inline void commit_stem(ForcingCondition& c, std::size_t part, Side side, const BinaryString& rho) {
    const ElementSet fresh = rho.ones_set() - c.stems[part][side].ones_set();
    c.tree = c.tree.restricted(c.tree.require(part, fresh));
    c.stems[part][side] = rho;
    const ElementSet below = ElementSet::below(std::min(c.stems[part].horizon(), c.tree.ground()));
    c.tree = c.tree.cleared(part, below);
    c.deficit |= below;
}

// P-Operation ------------------------------------------------------------------

inline bool p_operation(ForcingState& st, std::size_t part, Side side, const Environment& env) {
    auto& c = st.cond;
    const BinaryString before = c.stems[part][side];
    const ElementSet allowed = env.side_set(side);
    std::optional<std::size_t> chosen;
    for (std::size_t x = before.size(); x < env.depth; ++x) {
        if (!allowed.contains(x)) continue;
        if (c.tree.exists_path(c.tree.require(part, ElementSet{x}))) {
            chosen = x;
            break;
        }
    }
    json rec{{"record", "op"}, {"op", "P"}, {"step", st.step}, {"part", part + 1}, {"side", side_name(side)},
             {"stem_before", before.str()}};
    if (chosen) {
        BinaryString rho = before.concat(BinaryString::zeros(*chosen - before.size())).appended(true);
        commit_stem(c, part, side, rho);
        rec["outcome"] = "succeeded";
        rec["element"] = *chosen + 1;
    } else {
        rec["outcome"] = "failed";
    }
    rec["stem_after"] = c.stems[part][side].str();
    rec["parts"] = c.parts();
    rec["tree_states"] = c.tree.state_count();
    env.emit(std::move(rec));
    return chosen.has_value();
}

// R-i-Operation ----------------------------------------------------------------

struct CaseICandidate {
    std::size_t part = 0;
    Side side = Side::left;
    BinaryString rho;
    TableEntry entry;
};

// The least stem through a bad entry: ρ_is, then the entry's prefix beyond ρ_is, then
// zeros up to a strict extension. Extra ones only shrink the admissible set.
inline std::optional<BinaryString> least_stem_for_entry(const BinaryString& stem, const BinaryString& prefix,
                                                        std::size_t depth) {
    if (!is_compatible(stem, prefix)) return std::nullopt;
    BinaryString rho = stem.size() >= prefix.size() ? stem : prefix;
    const std::size_t len = std::max(prefix.size(), stem.size() + 1);
    if (len > depth) return std::nullopt;
    rho = rho.concat(BinaryString::zeros(len - rho.size()));
    return rho;
}

inline bool stem_admissible(const ForcingCondition& c, std::size_t part, Side side, const BinaryString& rho,
                            const Environment& env) {
    if (!rho.ones_set().subset_of(env.side_set(side))) return false;
    const ElementSet fresh = rho.ones_set() - c.stems[part][side].ones_set();
    return c.tree.exists_path(c.tree.require(part, fresh));
}

inline std::optional<CaseICandidate> find_case_i(const ForcingState& st, int tag, const Environment& env,
                                                 bool& budget_hit) {
    const auto& c = st.cond;
    std::size_t examined = 0;
    budget_hit = false;
    for (std::size_t i = 0; i < c.parts(); ++i)
        for (Side side : {Side::left, Side::right}) {
            const std::size_t e = counter(st.progress[i], tag, side);
            const auto f = env.functionals.get(tag, e);
            std::optional<CaseICandidate> best;
            for (const auto& entry : f.entries()) {
                if (++examined > env.budgets.ri_stems) {
                    budget_hit = true;
                    return std::nullopt;
                }
                if (entry.input > env.depth || !output_bad_for_tree(entry.output, env.q, e)) continue;
                auto rho = least_stem_for_entry(c.stems[i][side], entry.prefix, env.depth);
                if (!rho || !stem_admissible(c, i, side, *rho, env)) continue;
                if (!best || shortlex_less(*rho, best->rho)) best = CaseICandidate{i, side, *rho, entry};
            }
            if (best) return best;
        }
    return std::nullopt;
}

// Literal search over all strict extensions in shortlex order; a test oracle for find_case_i.
inline std::optional<CaseICandidate> find_case_i_exhaustive(const ForcingState& st, int tag, const Environment& env) {
    const auto& c = st.cond;
    for (std::size_t i = 0; i < c.parts(); ++i)
        for (Side side : {Side::left, Side::right}) {
            const auto& stem = c.stems[i][side];
            const std::size_t e = counter(st.progress[i], tag, side);
            const auto f = env.functionals.get(tag, e);
            for (std::size_t len = stem.size() + 1; len <= env.depth; ++len)
                for (const auto& tail : all_strings(len - stem.size())) {
                    const BinaryString rho = stem.concat(tail);
                    if (!stem_admissible(c, i, side, rho, env)) continue;
                    for (std::size_t n = 0; n <= env.depth; ++n) {
                        auto d = f.evaluate(rho, n);
                        if (d && output_bad_for_tree(*d, env.q, e)) return CaseICandidate{i, side, rho, {}};
                    }
                }
        }
    return std::nullopt;
}

enum class RiOutcome { case_i, no_case_i, budget_exhausted };

inline RiOutcome r_i_operation(ForcingState& st, int tag, const Environment& env) {
    bool budget_hit = false;
    auto cand = find_case_i(st, tag, env, budget_hit);
    json rec{{"record", "op"}, {"op", "R-i"}, {"step", st.step}, {"tag", tag}};
    if (!cand) {
        rec["outcome"] = budget_hit ? "budget_exhausted" : "no_case_i";
        rec["parts"] = st.cond.parts();
        rec["tree_states"] = st.cond.tree.state_count();
        env.emit(std::move(rec));
        return budget_hit ? RiOutcome::budget_exhausted : RiOutcome::no_case_i;
    }
    rec["outcome"] = "case_i";
    rec["part"] = cand->part + 1;
    rec["side"] = side_name(cand->side);
    rec["stem_before"] = st.cond.stems[cand->part][cand->side].str();
    rec["entry"] = {{"prefix", cand->entry.prefix.str()}, {"n", cand->entry.input}};
    commit_stem(st.cond, cand->part, cand->side, cand->rho);
    bump(st.progress[cand->part], tag, cand->side);
    rec["stem_after"] = cand->rho.str();
    rec["counters"] = counters_json(st.progress[cand->part]);
    rec["parts"] = st.cond.parts();
    rec["tree_states"] = st.cond.tree.state_count();
    env.emit(std::move(rec));
    return RiOutcome::case_i;
}

// R-ii-Operation ---------------------------------------------------------------

inline const std::vector<ClopenSet>& clopen_catalogue(std::size_t h) {
    static std::map<std::size_t, std::vector<ClopenSet>> cache;
    auto it = cache.find(h);
    if (it == cache.end()) it = cache.emplace(h, all_clopen_sets(h)).first;
    return it->second;
}

inline json clopen_json(const ClopenSet& v) {
    json a = json::array();
    for (const auto& g : v.generators()) a.push_back(g.str());
    return a;
}

// Abandonment triggers of every row of the split tree for the clopen set v.
inline std::vector<std::vector<ElementSet>> split_triggers(const ForcingState& st, int tag, const ClopenSet& v,
                                                           const Environment& env) {
    std::vector<std::vector<ElementSet>> out;
    for (std::size_t i = 0; i < st.cond.parts(); ++i)
        for (Side side : {Side::left, Side::right}) {
            const std::size_t e = counter(st.progress[i], tag, side);
            out.push_back(abandonment_triggers(env.functionals.get(tag, e), e, st.cond.stems[i][side], v, env.depth));
        }
    return out;
}

struct RiiResult {
    bool found = false;
    std::vector<ClopenSet> sequence;
    Supporter supporter;
    std::size_t candidates = 0;
    bool budget_hit = false;
};

inline RiiResult search_disperse_sequence(const ForcingState& st, int tag, const Environment& env,
                                          std::map<std::size_t, PartitionTree>& tv_cache) {
    RiiResult r;
    std::size_t kprime = 0;
    for (std::size_t i = 0; i < st.cond.parts(); ++i)
        kprime += counter(st.progress[i], tag, Side::left) + counter(st.progress[i], tag, Side::right);
    const std::size_t hmax = env.budgets.rii_height;
    const auto& cat = clopen_catalogue(hmax);
    std::vector<std::size_t> end_of_height(hmax + 1, 0);
    for (std::size_t h = 0; h <= hmax; ++h)
        end_of_height[h] = static_cast<std::size_t>(
            std::find_if(cat.begin(), cat.end(), [&](const ClopenSet& v) { return v.height() > h; }) - cat.begin());
    std::map<std::size_t, bool> usable;
    auto tv_nonempty = [&](std::size_t idx) {
        auto it = usable.find(idx);
        if (it != usable.end()) return it->second;
        auto t = st.cond.tree.split(split_triggers(st, tag, cat[idx], env), env.limits);
        const bool ok = !t.empty();
        if (ok) tv_cache.emplace(idx, std::move(t));
        usable[idx] = ok;
        return ok;
    };
    for (std::size_t n = 1; n <= env.budgets.rii_max_count; ++n)
        for (std::size_t h = 0; h <= hmax; ++h) {
            const std::size_t end = end_of_height[h];
            const std::size_t start = h == 0 ? 0 : end_of_height[h - 1];
            if (end < n || end == start) continue;
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            for (;;) {
                if (idx.back() >= start) {
                    if (++r.candidates > env.budgets.rii_candidates) {
                        r.budget_hit = true;
                        return r;
                    }
                    bool ok = true;
                    for (auto i : idx)
                        if (!tv_nonempty(i)) {
                            ok = false;
                            break;
                        }
                    if (ok) {
                        std::vector<ClopenSet> vs;
                        for (auto i : idx) vs.push_back(cat[i]);
                        const auto face = nerve_of(vs);
                        if (is_disperse_nerve(n, kprime, face)) {
                            r.found = true;
                            r.sequence = vs;
                            r.supporter.n = n;
                            for (std::size_t row = 0; row < 2 * st.cond.parts(); ++row) {
                                const std::size_t e = counter(st.progress[row / 2], tag, side_of_row(row));
                                r.supporter.families.push_back(minimal_members(disperse_subfamily(n, e, face)));
                            }
                            std::vector<PartitionTree> sources;
                            for (auto i : idx) sources.push_back(tv_cache.at(i));
                            tv_cache.clear();
                            for (std::size_t p = 0; p < n; ++p) tv_cache.emplace(p, std::move(sources[p]));
                            return r;
                        }
                    }
                }
                std::size_t i = n;
                while (i > 0 && idx[i - 1] == end - n + i - 1) --i;
                if (i == 0) break;
                ++idx[i - 1];
                for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    return r;
}

struct ChildLink {
    std::size_t parent;
    Side side;
    ElementSet members;
};

inline bool r_ii_operation(ForcingState& st, int tag, const Environment& env, std::vector<ChildLink>& links) {
    std::map<std::size_t, PartitionTree> tv;
    auto r = search_disperse_sequence(st, tag, env, tv);
    json rec{{"record", "op"}, {"op", "R-ii"}, {"step", st.step}, {"tag", tag}, {"parts_before", st.cond.parts()},
             {"candidates_examined", r.candidates}};
    std::size_t kprime = 0;
    for (std::size_t i = 0; i < st.cond.parts(); ++i)
        kprime += counter(st.progress[i], tag, Side::left) + counter(st.progress[i], tag, Side::right);
    rec["k_prime"] = kprime;
    if (!r.found) {
        rec["outcome"] = "stuck";
        rec["budget_exhausted"] = r.budget_hit;
        rec["height_bound"] = env.budgets.rii_height;
        env.emit(std::move(rec));
        return false;
    }
    std::vector<PartitionTree> sources;
    for (std::size_t p = 0; p < r.sequence.size(); ++p) sources.push_back(std::move(tv.at(p)));
    const std::size_t u = r.supporter.u();
    double cost = 1;
    for (std::size_t p = 0; p < r.supporter.n; ++p) cost *= static_cast<double>(u);
    if (cost <= 1e7) rec["supporter_checked"] = is_supporter(r.supporter, u, r.supporter.n);
    ForcingCondition next;
    next.deficit = st.cond.deficit;
    next.tree = PartitionTree::cross(sources, r.supporter, env.limits);
    std::vector<Counters> progress;
    links.clear();
    json children = json::array();
    for (std::size_t row = 0; row < u; ++row)
        for (auto kk : r.supporter.families[row]) {
            const std::size_t parent = row / 2;
            const Side side = side_of_row(row);
            next.stems.push_back(st.cond.stems[parent]);
            Counters c = st.progress[parent];
            bump(c, tag, side);
            progress.push_back(std::move(c));
            links.push_back({parent, side, kk});
            children.push_back({{"part", links.size()}, {"parent", parent + 1}, {"side", side_name(side)},
                                {"K", elements_json(kk)}});
        }
    json seq = json::array();
    for (const auto& v : r.sequence) seq.push_back(clopen_json(v));
    rec["outcome"] = "case_ii";
    rec["sequence"] = seq;
    rec["children"] = children;
    st.cond = std::move(next);
    st.progress = std::move(progress);
    rec["parts_after"] = st.cond.parts();
    rec["tree_states"] = st.cond.tree.state_count();
    env.emit(std::move(rec));
    return true;
}

// Step loop --------------------------------------------------------------------

inline json part_nodes_json(const std::vector<PartNode>& level) {
    json a = json::array();
    for (std::size_t i = 0; i < level.size(); ++i) {
        const auto& n = level[i];
        a.push_back({{"part", i + 1},
                     {"parent", n.side < 0 ? json(nullptr) : json(n.parent + 1)},
                     {"side", n.side < 0 ? json(nullptr) : json(n.side == 0 ? "l" : "r")},
                     {"K", elements_json(n.members)},
                     {"stem_l", n.stems.left.str()},
                     {"stem_r", n.stems.right.str()},
                     {"counters", counters_json(n.counters)},
                     {"fading_l", n.fading_l},
                     {"fading_r", n.fading_r}});
    }
    return a;
}

inline void annotate_level(ForcingState& st, const Environment& env, std::vector<PartNode>& level) {
    for (std::size_t i = 0; i < level.size(); ++i) {
        level[i].stems = st.cond.stems[i];
        level[i].counters = st.progress[i];
        level[i].fading_l = fading(st.cond, i, Side::left, env);
        level[i].fading_r = fading(st.cond, i, Side::right, env);
    }
}

struct StepChecks {
    bool chain = true, progress = true, hereditary_fading = true, fac6 = true;
    ConditionVerdicts conditions;
    bool all() const { return chain && progress && hereditary_fading && fac6 && conditions.all(); }
};

// Runs step st.step+1; returns false once the construction is stuck or out of steps.
inline bool step(ForcingState& st, const Environment& env) {
    if (st.stuck || st.step >= env.steps) return false;
    ++st.step;
    const int tag = env.schedule.at(st.step - 1);
    const ForcingCondition before = st.cond;
    const std::vector<Counters> progress_before = st.progress;

    const std::size_t halting = env.functionals.halting_entries(tag);
    const std::size_t fac6_bound = (halting + 1) * 2 * st.cond.parts();
    std::size_t loops = 0;
    RiOutcome ri;
    do {
        if (loops >= env.budgets.ri_loop) {
            env.emit({{"record", "failure"}, {"step", st.step}, {"op", "R-i"}, {"reason", "R-i loop budget exceeded"}});
            throw BudgetError("step " + std::to_string(st.step) + ": R-i loop exceeded its budget");
        }
        ri = r_i_operation(st, tag, env);
        ++loops;
    } while (ri == RiOutcome::case_i);
    const std::size_t fired = loops - 1;

    std::vector<ChildLink> links;
    if (!r_ii_operation(st, tag, env, links)) {
        st.stuck = true;
        env.emit({{"record", "stuck"}, {"step", st.step}, {"op", "R-ii"}, {"tag", tag}});
        return false;
    }
    for (std::size_t i = 0; i < links.size(); ++i) p_operation(st, i, links[i].side, env);

    std::vector<PartNode> level(links.size());
    for (std::size_t i = 0; i < links.size(); ++i) {
        level[i].parent = links[i].parent;
        level[i].side = static_cast<int>(links[i].side);
        level[i].members = links[i].members;
    }
    annotate_level(st, env, level);

    StepChecks ck;
    std::vector<std::size_t> pmap;
    for (const auto& l : links) pmap.push_back(l.parent);
    ck.chain = cond_extends(st.cond, before, pmap);
    const auto& prev_level = st.ctree.levels.back();
    for (std::size_t i = 0; i < level.size(); ++i) {
        const auto& par = progress_before[level[i].parent];
        const auto& mine = level[i].counters;
        std::set<int> tags;
        for (const auto& [t, v] : par) tags.insert(t);
        for (const auto& [t, v] : mine) tags.insert(t);
        for (int t : tags)
            for (Side s : {Side::left, Side::right})
                if (counter(mine, t, s) < counter(par, t, s)) ck.progress = false;
        if (counter(mine, tag, Side::left) <= counter(par, tag, Side::left) &&
            counter(mine, tag, Side::right) <= counter(par, tag, Side::right))
            ck.progress = false;
        const auto& pn = prev_level[level[i].parent];
        if ((pn.fading_l && !level[i].fading_l) || (pn.fading_r && !level[i].fading_r)) ck.hereditary_fading = false;
    }
    ck.fac6 = fired < fac6_bound;
    ck.conditions = check_conditions(st.cond, env);
    st.ctree.levels.push_back(level);

    const auto f7 = check_fac7(st.cond.tree, env);
    json fac7 = f7 ? json{{"found", true}, {"part", f7->part + 1}, {"in_A", f7->in_a + 1},
                          {"in_complement", f7->in_complement + 1}}
                   : json{{"found", false}, {"note", "A is decodable from the tree at this depth"}};
    json checks = ck.conditions.to_json();
    checks["chain"] = ck.chain;
    checks["progress"] = ck.progress;
    checks["hereditary_fading"] = ck.hereditary_fading;
    checks["fac6"] = ck.fac6;
    env.emit({{"record", "step"},
              {"step", st.step},
              {"tag", tag},
              {"ri_fired", fired},
              {"fac6_bound", fac6_bound},
              {"checks", checks},
              {"fac7", fac7},
              {"deficit", elements_json(st.cond.deficit)},
              {"tree_states", st.cond.tree.state_count()},
              {"parts", part_nodes_json(level)}});
    return true;
}

struct Branch {
    Side side = Side::left;
    std::vector<std::size_t> parts;  // part index per level, root first
    BinaryString g_prefix;
};

// Deepest root branch whose nodes are all non-fading on one side; lexicographically least
// among the deepest, left side preferred on ties.
inline std::optional<Branch> deepest_branch(const ConstructionTree& ct) {
    std::optional<Branch> best;
    for (Side side : {Side::left, Side::right}) {
        auto alive = [&](const PartNode& n) { return side == Side::left ? !n.fading_l : !n.fading_r; };
        std::vector<std::vector<std::size_t>> chains;  // per node at current level: chain or empty
        std::vector<std::optional<std::vector<std::size_t>>> cur;
        for (std::size_t i = 0; i < ct.levels[0].size(); ++i)
            cur.push_back(alive(ct.levels[0][i]) ? std::optional(std::vector<std::size_t>{i}) : std::nullopt);
        std::optional<std::vector<std::size_t>> deepest;
        for (std::size_t lv = 0;; ++lv) {
            for (const auto& c : cur)
                if (c && (!deepest || c->size() > deepest->size() || (c->size() == deepest->size() && *c < *deepest)))
                    deepest = c;
            if (lv + 1 >= ct.levels.size()) break;
            std::vector<std::optional<std::vector<std::size_t>>> next;
            for (std::size_t i = 0; i < ct.levels[lv + 1].size(); ++i) {
                const auto& n = ct.levels[lv + 1][i];
                if (alive(n) && cur[n.parent]) {
                    auto c = *cur[n.parent];
                    c.push_back(i);
                    next.push_back(c);
                } else {
                    next.push_back(std::nullopt);
                }
            }
            cur = std::move(next);
        }
        if (deepest && (!best || deepest->size() > best->parts.size())) {
            Branch b;
            b.side = side;
            b.parts = *deepest;
            const auto& last = ct.levels[deepest->size() - 1][deepest->back()];
            b.g_prefix = last.stems[side];
            best = b;
        }
    }
    return best;
}

struct RunResult {
    ForcingState state;
    std::vector<json> trace;
    std::string status;
    std::optional<Branch> branch;
    bool checks_passed = true;
    std::string error;
};

inline json scenario_header(const Scenario& s) {
    return {{"record", "scenario"},
            {"name", s.name},
            {"depth", s.depth},
            {"steps", s.steps},
            {"seed", s.seed},
            {"A", {{"prefix", s.a.prefix.str()}, {"cycle", s.a.cycle.str()}}},
            {"Q", s.q_spec},
            {"schedule", s.schedule},
            {"budgets",
             {{"ri_loop", s.budgets.ri_loop},
              {"ri_stems", s.budgets.ri_stems},
              {"rii_height", s.budgets.rii_height},
              {"rii_candidates", s.budgets.rii_candidates},
              {"rii_max_count", s.budgets.rii_max_count}}}};
}

inline RunResult run_scenario(const Scenario& s) {
    RunResult r;
    Environment env = Environment::from(s);
    env.trace = &r.trace;
    env.emit(scenario_header(s));
    r.state = initial_state(env);
    annotate_level(r.state, env, r.state.ctree.levels[0]);
    env.emit({{"record", "step"}, {"step", 0}, {"parts", part_nodes_json(r.state.ctree.levels[0])}});
    try {
        while (step(r.state, env)) {
            const auto& rec = r.trace.back();
            for (auto& [k, v] : rec.at("checks").items())
                if (!v.get<bool>()) r.checks_passed = false;
        }
        r.status = r.state.stuck ? "stuck" : "ok";
    } catch (const Error& e) {
        r.status = "error";
        r.error = e.what();
        r.checks_passed = false;
    }
    r.branch = deepest_branch(r.state.ctree);
    json summary{{"record", "summary"}, {"status", r.status}, {"steps_completed", r.state.step - (r.state.stuck ? 1 : 0)}};
    if (!r.error.empty()) summary["error"] = r.error;
    if (r.branch)
        summary["branch"] = {{"side", side_name(r.branch->side)},
                             {"parts", [&] {
                                  json a = json::array();
                                  for (auto p : r.branch->parts) a.push_back(p + 1);
                                  return a;
                              }()},
                             {"g_prefix", r.branch->g_prefix.str()}};
    r.trace.push_back(summary);
    return r;
}

inline std::string trace_text(const std::vector<json>& trace) {
    std::string out;
    for (const auto& rec : trace) {
        out += rec.dump();
        out += '\n';
    }
    return out;
}

}  // namespace coneforce
