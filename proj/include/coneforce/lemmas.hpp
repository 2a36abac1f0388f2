#pragma once

#include <random>
#include <set>

#include "enumeration.hpp"
#include "facts.hpp"

namespace coneforce {

namespace detail {

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline BinaryString block(unsigned sym, std::size_t w) {
    BinaryString s;
    for (std::size_t b = 0; b < w; ++b) s.push_back((sym >> (w - 1 - b)) & 1u);
    return s;
}

// Membership in a level-choice tree, read block by block.
inline bool on_level_choice(const std::vector<std::vector<unsigned>>& allowed, const BinaryString& s, std::size_t w) {
    if (s.size() % w != 0 || s.size() / w > allowed.size()) return false;
    for (std::size_t c = 0; c < s.size() / w; ++c) {
        unsigned sym = 0;
        for (std::size_t b = 0; b < w; ++b) sym = (sym << 1) | (s[c * w + b] ? 1u : 0u);
        if (std::find(allowed[c].begin(), allowed[c].end(), sym) == allowed[c].end()) return false;
    }
    return true;
}

inline std::vector<unsigned> choice_set(unsigned mask) {
    std::vector<unsigned> out;
    for (unsigned s = 0; s < 3; ++s)
        if ((mask >> s) & 1u) out.push_back(s);
    return out;
}

inline void lem2_instance(const std::vector<std::vector<unsigned>>& allowed, std::size_t k, std::mt19937_64& rng,
                          Report& r) {
    constexpr std::size_t w = 2;
    const std::size_t d = allowed.size();
    const FinTree t = FinTree::level_choice(allowed, w);
    const std::size_t lo = pick(rng, 0, 1);
    std::map<std::size_t, std::vector<BinaryString>> vals;
    for (std::size_t n = lo; n <= d; ++n) {
        std::vector<BinaryString> dn;
        BinaryString on;
        for (std::size_t c = 0; c < n; ++c) on = on.concat(block(allowed[c][pick(rng, 0, allowed[c].size() - 1)], w));
        dn.push_back(on);
        const std::size_t extra = pick(rng, 0, k - 1);
        for (std::size_t e = 0; e < extra; ++e) {
            BinaryString s;
            for (std::size_t c = 0; c < n; ++c) s = s.concat(block(static_cast<unsigned>(pick(rng, 0, 3)), w));
            dn.push_back(s);
        }
        vals[n] = dn;
    }
    ++r.cases;
    const StrongEnumeration h(k, lo, d, vals, w);
    std::string what = "k=" + std::to_string(k) + " choices=";
    for (const auto& a : allowed) {
        what += "[";
        for (auto s : a) what += std::to_string(s);
        what += "]";
    }
    try {
        const auto res = extract_path_iterated(t, h);
        if (res.reductions + 1 > k) r.fail("too many reductions (" + std::to_string(res.reductions) + ") " + what);
        if (res.path.size() != d * w || !on_level_choice(allowed, res.path, w))
            r.fail("result " + show_string(res.path) + " is not a depth-d node " + what);
    } catch (const Error& e) {
        r.fail(std::string("error ") + e.what() + " " + what);
    }
}

}  // namespace detail

// Seeded instances per k, plus every level-choice tree of depth ≤ exhaustive_depth.
inline Report verify_lem2(std::uint64_t seed, std::size_t per_k = 1000, std::size_t max_k = 3,
                          std::size_t max_depth = 8, std::size_t exhaustive_depth = 3, std::size_t per_tree = 4) {
    detail::Stopwatch sw;
    Report r;
    r.suite = "lem2";
    std::mt19937_64 rng(seed);
    for (std::size_t k = 1; k <= max_k; ++k) {
        for (std::size_t i = 0; i < per_k; ++i) {
            const std::size_t d = detail::pick(rng, 1, max_depth);
            std::vector<std::vector<unsigned>> allowed;
            for (std::size_t c = 0; c < d; ++c)
                allowed.push_back(detail::choice_set(static_cast<unsigned>(detail::pick(rng, 1, 7))));
            detail::lem2_instance(allowed, k, rng, r);
        }
        for (std::size_t d = 1; d <= exhaustive_depth; ++d) {
            std::vector<unsigned> code(d, 1);
            for (;;) {
                std::vector<std::vector<unsigned>> allowed;
                for (auto m : code) allowed.push_back(detail::choice_set(m));
                for (std::size_t j = 0; j < per_tree; ++j) detail::lem2_instance(allowed, k, rng, r);
                std::size_t c = 0;
                while (c < d && ++code[c] == 8) code[c++] = 1;
                if (c == d) break;
            }
        }
    }
    r.seconds = sw.seconds();
    return r;
}

// Stage families built so that some stage holds 2^n∖H with |H| ≤ k' meeting Q_n, and no
// member ever contains Q_n.
inline Report verify_fac8(std::uint64_t seed, std::size_t instances = 500, std::size_t max_depth = 6,
                          std::size_t max_kprime = 3) {
    detail::Stopwatch sw;
    Report r;
    r.suite = "fac8";
    std::mt19937_64 rng(seed);
    for (std::size_t inst = 0; inst < instances; ++inst) {
        const std::size_t depth = detail::pick(rng, 1, max_depth);
        const std::size_t kprime = detail::pick(rng, 1, max_kprime);
        const std::size_t npaths = detail::pick(rng, 1, 4);
        std::set<BinaryString> paths;
        for (std::size_t p = 0; p < npaths; ++p) {
            BinaryString s;
            for (std::size_t i = 0; i < depth; ++i) s.push_back(detail::pick(rng, 0, 1) == 1);
            paths.insert(s);
        }
        auto q_level = [&](std::size_t n) {
            std::set<BinaryString> out;
            for (const auto& p : paths) out.insert(p.prefix(n));
            return out;
        };
        const std::size_t nstages = detail::pick(rng, 1, 4);
        std::vector<EnumerationStage> stages(nstages);
        for (std::size_t n = 0; n <= depth; ++n) {
            const auto lvl = all_strings(n);
            const auto qn = q_level(n);
            std::set<BinaryString> h{*std::next(qn.begin(), static_cast<std::ptrdiff_t>(detail::pick(rng, 0, qn.size() - 1)))};
            const std::size_t hsize = detail::pick(rng, 1, std::min(kprime, lvl.size()));
            while (h.size() < hsize) h.insert(lvl[detail::pick(rng, 0, lvl.size() - 1)]);
            std::vector<std::set<BinaryString>> gens;
            std::set<BinaryString> main;
            for (const auto& s : lvl)
                if (!h.count(s)) main.insert(s);
            gens.push_back(main);
            const std::size_t noise = detail::pick(rng, 0, 3);
            for (std::size_t j = 0; j < noise; ++j) {
                std::set<BinaryString> w;
                for (const auto& s : lvl)
                    if (detail::pick(rng, 0, 1)) w.insert(s);
                if (std::includes(w.begin(), w.end(), qn.begin(), qn.end())) w.erase(*qn.begin());
                gens.push_back(w);
            }
            stages.back().generators[n] = gens;
            for (std::size_t t = nstages - 1; t-- > 0;) {
                std::vector<std::set<BinaryString>> sub;
                for (const auto& g : stages[t + 1].generators[n]) {
                    if (detail::pick(rng, 0, 2) == 0) continue;
                    std::set<BinaryString> w;
                    for (const auto& s : g)
                        if (detail::pick(rng, 0, 3) != 0) w.insert(s);
                    sub.push_back(w);
                }
                stages[t].generators[n] = sub;
            }
        }
        const EnumerationStages e(stages);
        for (std::size_t n = 0; n <= depth; ++n) {
            ++r.cases;
            const auto qn = q_level(n);
            const std::string what = "instance " + std::to_string(inst) + " n=" + std::to_string(n) +
                                     " k'=" + std::to_string(kprime);
            try {
                const auto out = extract_enum(e, kprime, n, nstages);
                if (out.size() > kprime) r.fail("too many strings at " + what);
                if (std::none_of(out.begin(), out.end(), [&](const BinaryString& s) { return qn.count(s) > 0; }))
                    r.fail("output misses Q_n at " + what);
            } catch (const Error& ex) {
                r.fail(std::string("error ") + ex.what() + " at " + what);
            }
        }
    }
    r.seconds = sw.seconds();
    return r;
}

// Random prefix-free machines; the count of compressible strings is checked against the
// counting bound and against a direct count over the program list.
inline Report verify_lem1(std::uint64_t seed, std::size_t machines = 1000, std::size_t max_programs = 16,
                          std::size_t max_len = 6, std::size_t max_n = 8, std::size_t max_c = 4) {
    detail::Stopwatch sw;
    Report r;
    r.suite = "lem1";
    std::mt19937_64 rng(seed);
    for (std::size_t m = 0; m < machines; ++m) {
        const std::size_t want = detail::pick(rng, 0, max_programs);
        std::map<BinaryString, BinaryString> progs;
        for (std::size_t attempt = 0; attempt < 200 && progs.size() < want; ++attempt) {
            BinaryString p;
            const std::size_t len = detail::pick(rng, 1, max_len);
            for (std::size_t i = 0; i < len; ++i) p.push_back(detail::pick(rng, 0, 1) == 1);
            if (std::any_of(progs.begin(), progs.end(), [&](const auto& kv) { return is_compatible(kv.first, p); }))
                continue;
            BinaryString out;
            const std::size_t olen = detail::pick(rng, 0, max_n);
            for (std::size_t i = 0; i < olen; ++i) out.push_back(detail::pick(rng, 0, 1) == 1);
            progs[p] = out;
        }
        const ToyPrefixMachine u(progs);
        ++r.cases;
        long double kraft = 0;
        for (const auto& [p, o] : progs) kraft += std::ldexp(1.0L, -static_cast<int>(p.size()));
        if (!u.kraft_holds() || kraft > 1.0L) r.fail("Kraft sum exceeds 1 for machine " + std::to_string(m));
        for (std::size_t n = 0; n <= max_n; ++n)
            for (std::size_t c = 0; c <= max_c; ++c) {
                ++r.cases;
                std::set<BinaryString> direct;
                for (const auto& [p, o] : progs)
                    if (o.size() == n && p.size() + c < n) direct.insert(o);
                const std::size_t count = u.compressible_count(c, n);
                const std::size_t bound = n > c ? (std::size_t{1} << (n - c)) - 1 : 0;
                if (count != direct.size())
                    r.fail("compressible count disagrees with the program list: machine " + std::to_string(m) +
                           " n=" + std::to_string(n) + " c=" + std::to_string(c));
                if (count > bound)
                    r.fail("counting bound violated: machine " + std::to_string(m) + " n=" + std::to_string(n) +
                           " c=" + std::to_string(c));
                if (u.incompressible_level(c, n).size() + count != (std::size_t{1} << n))
                    r.fail("incompressible level size mismatch: machine " + std::to_string(m));
            }
    }
    r.seconds = sw.seconds();
    return r;
}

}  // namespace coneforce
