#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "enumeration.hpp"
#include "functional.hpp"
#include "partition.hpp"

namespace coneforce {

struct Report {
    std::string suite;
    std::uint64_t cases = 0;
    std::uint64_t failure_count = 0;
    std::vector<std::string> failures;  // first few counterexamples, smallest first
    double seconds = 0;

    bool pass() const { return failure_count == 0; }
    void fail(std::string what) {
        if (failures.size() < 8) failures.push_back(std::move(what));
        ++failure_count;
    }
};

struct FactBounds {
    // fac1
    std::size_t fac1_n = 5;
    std::size_t fac1_height = 3;
    std::size_t fac1_esum = 4;
    std::size_t fac1_literal_n = 3;
    std::size_t fac1_literal_height = 2;
    // fac5
    std::size_t fac5_n = 3;
    std::size_t fac5_u = 3;
    std::size_t fac5_member = 3;
    // fac2/fac3/fac4/fac9
    std::size_t ground = 5;
    std::size_t use = 3;
    std::size_t rho = 2;
    std::size_t sigma = 4;
    std::size_t members = 4;
    std::size_t height = 2;
    std::size_t bound = 2;
};

struct BoundsMaxima {
    static constexpr std::size_t fac1_n = 5, fac1_height = 3, fac1_esum = 4, fac1_literal_n = 3, fac1_literal_height = 2;
    static constexpr std::size_t fac5_n = 3, fac5_u = 3, fac5_member = 3;
    static constexpr std::size_t ground = 5, use = 3, rho = 2, sigma = 4, members = 4, height = 2, bound = 2;
};

inline FactBounds tiny_bounds() {
    FactBounds b;
    b.fac1_n = 2;
    b.fac1_height = 2;
    b.fac1_esum = 2;
    b.fac1_literal_n = 2;
    b.fac1_literal_height = 1;
    b.fac5_n = 2;
    b.fac5_u = 2;
    b.fac5_member = 2;
    b.ground = 3;
    b.use = 2;
    b.rho = 1;
    b.sigma = 2;
    b.members = 2;
    b.height = 1;
    b.bound = 1;
    return b;
}

// Rough count of elementary operations, used to refuse oversized requests.
inline double estimate_cost(const FactBounds& b) {
    const double antichains = std::pow(2.0, std::pow(2.0, static_cast<double>(b.fac1_n)) * 0.6);
    const double fac1 = antichains * std::pow(2.0, static_cast<double>(b.fac1_esum)) *
                        std::pow(static_cast<double>(b.fac1_esum), static_cast<double>(b.fac1_n));
    const double fams = std::pow(2.0, std::pow(2.0, static_cast<double>(b.fac5_n)));
    const double fac5 = std::pow(fams, static_cast<double>(b.fac5_u)) *
                        std::pow(std::pow(2.0, static_cast<double>(b.fac5_u)), static_cast<double>(b.fac5_n));
    const double tables = std::pow(2.0, static_cast<double>(b.use + 1)) * 100.0;
    const double clopens = b.height >= 2 ? 26.0 : 5.0;
    const double fac3 = tables * clopens * std::pow(2.0, static_cast<double>(b.sigma + 1)) *
                        std::pow(3.0, static_cast<double>(b.ground)) * static_cast<double>(b.ground);
    const double fac2 = tables * std::pow(clopens, static_cast<double>(b.members));
    return fac1 + fac5 + fac3 + fac2;
}

inline void check_bounds(const FactBounds& b) {
    using M = BoundsMaxima;
    std::vector<std::pair<const char*, std::pair<std::size_t, std::size_t>>> items = {
        {"fac1_n", {b.fac1_n, M::fac1_n}},
        {"fac1_height", {b.fac1_height, M::fac1_height}},
        {"fac1_esum", {b.fac1_esum, M::fac1_esum}},
        {"fac1_literal_n", {b.fac1_literal_n, M::fac1_literal_n}},
        {"fac1_literal_height", {b.fac1_literal_height, M::fac1_literal_height}},
        {"fac5_n", {b.fac5_n, M::fac5_n}},
        {"fac5_u", {b.fac5_u, M::fac5_u}},
        {"fac5_member", {b.fac5_member, M::fac5_member}},
        {"ground", {b.ground, M::ground}},
        {"use", {b.use, M::use}},
        {"rho", {b.rho, M::rho}},
        {"sigma", {b.sigma, M::sigma}},
        {"members", {b.members, M::members}},
        {"height", {b.height, M::height}},
        {"bound", {b.bound, M::bound}},
    };
    for (const auto& [name, vm] : items)
        if (vm.first > vm.second) {
            std::ostringstream os;
            os << "bounds refused: " << name << "=" << vm.first << " exceeds the maximum " << vm.second
               << " (estimated cost " << std::scientific << estimate_cost(b) << " operations)";
            throw RangeError(os.str());
        }
    if (b.ground > 5 || b.sigma >= b.ground + 1) throw RangeError("bounds refused: sigma must stay below the ground size");
}

// "default", "tiny", or a comma list of key=value overrides on top of a preset.
// The key n sets every size parameter at once.
inline FactBounds parse_bounds(const std::string& spec) {
    FactBounds b;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item == "default" || item == "full") continue;
        if (item == "tiny") {
            b = tiny_bounds();
            continue;
        }
        auto eq = item.find('=');
        if (eq == std::string::npos) throw FormatError("unknown bounds preset: " + item);
        const std::string key = item.substr(0, eq);
        std::size_t v = 0;
        try {
            v = static_cast<std::size_t>(std::stoul(item.substr(eq + 1)));
        } catch (const std::exception&) {
            throw FormatError("bad bounds value: " + item);
        }
        std::map<std::string, std::size_t*> fields = {
            {"fac1_n", &b.fac1_n},         {"fac1_height", &b.fac1_height}, {"fac1_esum", &b.fac1_esum},
            {"fac1_literal_n", &b.fac1_literal_n}, {"fac1_literal_height", &b.fac1_literal_height},
            {"fac5_n", &b.fac5_n},         {"fac5_u", &b.fac5_u},           {"fac5_member", &b.fac5_member},
            {"ground", &b.ground},         {"use", &b.use},                 {"rho", &b.rho},
            {"sigma", &b.sigma},           {"members", &b.members},         {"height", &b.height},
            {"bound", &b.bound}};
        if (key == "n") {
            b.fac1_n = b.fac1_literal_n = b.fac5_n = b.fac5_u = b.members = v;
            b.fac5_member = std::min(b.fac5_member, v);
            continue;
        }
        auto it = fields.find(key);
        if (it == fields.end()) throw FormatError("unknown bounds key: " + key);
        *it->second = v;
    }
    return b;
}

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline std::string show(const ClopenSet& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.generators().size(); ++i) {
        if (i) s += ",";
        s += v.generators()[i].empty() ? "ε" : v.generators()[i].str();
    }
    return s + "}";
}

inline std::string show(const std::vector<ClopenSet>& vs) {
    std::string s = "[";
    for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? " " : "") + show(vs[i]);
    return s + "]";
}

inline std::string show(ElementSet k, std::size_t offset = 1) {
    std::string s = "{";
    bool first = true;
    for (auto x : k.to_vector()) {
        s += (first ? "" : ",") + std::to_string(x + offset);
        first = false;
    }
    return s + "}";
}

inline std::string show(const std::vector<std::size_t>& e) {
    std::string s = "(";
    for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
    return s + ")";
}

inline std::string show(const Supporter& k) {
    std::string s = "(";
    for (std::size_t i = 0; i < k.families.size(); ++i) {
        s += i ? "; " : "";
        for (std::size_t j = 0; j < k.families[i].size(); ++j) s += (j ? " " : "") + show(k.families[i][j]);
    }
    return s + ")";
}

inline std::string show(const ToyFunctional& f) {
    std::string s = "bound " + std::to_string(f.bound()) + " [";
    for (std::size_t i = 0; i < f.entries().size(); ++i) {
        const auto& e = f.entries()[i];
        s += (i ? "; " : "") + std::string(e.prefix.empty() ? "ε" : e.prefix.str()) + "," + std::to_string(e.input) + "↦";
        if (e.output.big)
            s += "BIG";
        else {
            s += "{";
            for (std::size_t j = 0; j < e.output.strings.size(); ++j) s += (j ? "," : "") + e.output.strings[j].str();
            s += "}";
        }
    }
    return s + "]";
}

inline std::string show_string(const BinaryString& s) { return s.empty() ? "ε" : s.str(); }

// All positive vectors with sum ≤ s, shorter first.
inline std::vector<std::vector<std::size_t>> compositions(std::size_t s) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t left) {
        if (!cur.empty()) out.push_back(cur);
        for (std::size_t x = 1; x <= left; ++x) {
            cur.push_back(x);
            rec(left - x);
            cur.pop_back();
        }
    };
    rec(s);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    return out;
}

// Whether some assignment of indices to u parts gives every part a common point.
inline bool has_face_partition(std::size_t n, std::size_t u, const std::vector<char>& face) {
    std::vector<std::size_t> assign(n, 0);
    std::vector<std::uint64_t> parts(u);
    for (;;) {
        std::fill(parts.begin(), parts.end(), 0);
        for (std::size_t j = 0; j < n; ++j) parts[assign[j]] |= std::uint64_t{1} << j;
        bool ok = true;
        for (auto p : parts)
            if (!face[p]) {
                ok = false;
                break;
            }
        if (ok) return true;
        std::size_t j = 0;
        while (j < n && ++assign[j] == u) assign[j++] = 0;
        if (j == n) return false;
    }
}

inline std::vector<char> face_table(const std::vector<ClopenSet>& vs) {
    const std::size_t n = vs.size();
    std::vector<char> face(std::size_t{1} << n, 0);
    for (std::uint64_t k = 0; k < face.size(); ++k) {
        std::vector<ClopenSet> sub;
        for (std::size_t j = 0; j < n; ++j)
            if ((k >> j) & 1u) sub.push_back(vs[j]);
        face[k] = sub.empty() || intersection_nonempty(sub);
    }
    return face;
}

}  // namespace detail

// Builds a supporter from a sequence of clopen sets and bounds e.
using SupporterBuilder = std::function<Supporter(const std::vector<ClopenSet>&, const std::vector<std::size_t>&)>;

inline Supporter default_supporter_builder(const std::vector<ClopenSet>& vs, const std::vector<std::size_t>& e) {
    return supporter_from_disperse(vs, e);
}

// Deliberately wrong: filters K by (eᵢ+1)-dispersal.
inline Supporter mutant_supporter_builder(const std::vector<ClopenSet>& vs, const std::vector<std::size_t>& e) {
    const auto face = nerve_of(vs);
    const std::size_t kprime = std::accumulate(e.begin(), e.end(), std::size_t{0});
    if (!is_disperse_nerve(vs.size(), kprime, face)) throw PreconditionViolation("mutant: not disperse");
    Supporter s;
    s.n = vs.size();
    for (auto ei : e) s.families.push_back(disperse_subfamily(vs.size(), ei + 1, face));
    return s;
}

namespace detail {

// One sequence, all e-vectors.
inline void fac1_case(const std::vector<ClopenSet>& vs, const std::vector<std::vector<std::size_t>>& evecs,
                      const SupporterBuilder& build, Report& r) {
    const std::size_t n = vs.size();
    const auto face = face_table(vs);
    std::map<std::size_t, bool> disperse;
    for (const auto& e : evecs) {
        const std::size_t kprime = std::accumulate(e.begin(), e.end(), std::size_t{0});
        auto it = disperse.find(kprime);
        if (it == disperse.end()) {
            const bool d = !has_face_partition(n, kprime, face);
            it = disperse.emplace(kprime, d).first;
            ++r.cases;
            if (is_disperse(vs, kprime) != d)
                r.fail("is_disperse disagrees with brute force: V=" + show(vs) + " u=" + std::to_string(kprime));
        }
        ++r.cases;
        if (it->second) {
            Supporter s;
            try {
                s = build(vs, e);
            } catch (const Error& ex) {
                r.fail("builder rejected a disperse input: V=" + show(vs) + " e=" + show(e) + ": " + ex.what());
                continue;
            }
            if (s.u() != e.size() || !is_supporter(s, e.size(), n))
                r.fail("not a supporter: V=" + show(vs) + " e=" + show(e) + " K=" + show(s));
        } else {
            try {
                (void)build(vs, e);
                r.fail("builder accepted a non-disperse input: V=" + show(vs) + " e=" + show(e));
            } catch (const PreconditionViolation&) {
            }
        }
    }
}

}  // namespace detail

// Every sequence of n ≤ fac1_n clopen sets of height ≤ fac1_height is handled through its nerve,
// realized by cylinders of the maximal faces; small sequences are also enumerated literally.
inline Report verify_fac1(const FactBounds& b, const SupporterBuilder& build = default_supporter_builder) {
    detail::Stopwatch sw;
    Report r;
    r.suite = "fac1";
    const auto evecs = detail::compositions(b.fac1_esum);
    const std::size_t points = std::size_t{1} << b.fac1_height;
    for (std::size_t n = 1; n <= b.fac1_n; ++n) {
        const std::uint64_t subsets = std::uint64_t{1} << n;
        std::vector<std::uint64_t> chosen;
        std::function<void(std::uint64_t)> rec = [&](std::uint64_t next) {
            std::vector<ClopenSet> vs(n);
            {
                std::vector<std::vector<BinaryString>> gens(n);
                for (std::size_t t = 0; t < chosen.size(); ++t) {
                    BinaryString s;
                    for (std::size_t bit = 0; bit < b.fac1_height; ++bit)
                        s.push_back((t >> (b.fac1_height - 1 - bit)) & 1u);
                    for (std::size_t j = 0; j < n; ++j)
                        if ((chosen[t] >> j) & 1u) gens[j].push_back(s);
                }
                for (std::size_t j = 0; j < n; ++j) vs[j] = ClopenSet(gens[j]);
            }
            detail::fac1_case(vs, evecs, build, r);
            if (chosen.size() == points) return;
            for (std::uint64_t f = next; f < subsets; ++f) {
                bool ok = true;
                for (auto c : chosen)
                    if ((c & f) == c || (c & f) == f) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                chosen.push_back(f);
                rec(f + 1);
                chosen.pop_back();
            }
        };
        rec(1);
    }
    const auto pool = all_clopen_sets(b.fac1_literal_height);
    for (std::size_t n = 1; n <= b.fac1_literal_n; ++n) {
        std::vector<std::size_t> idx(n, 0);
        for (;;) {
            std::vector<ClopenSet> vs;
            for (auto i : idx) vs.push_back(pool[i]);
            detail::fac1_case(vs, evecs, build, r);
            std::size_t j = n;
            while (j > 0 && idx[j - 1] + 1 == pool.size()) --j;
            if (j == 0) break;
            ++idx[j - 1];
            for (std::size_t t = j; t < n; ++t) idx[t] = idx[j - 1];
        }
    }
    r.seconds = sw.seconds();
    return r;
}

// Every tuple of partitions is covered iff every element pattern is covered, so each supporter is
// crossed against grounds realizing all patterns (each element lies in a nonempty set of parts
// of every partition).
inline Report verify_fac5(const FactBounds& b) {
    detail::Stopwatch sw;
    Report r;
    r.suite = "fac5";
    for (std::size_t n = 1; n <= b.fac5_n; ++n)
        for (std::size_t u = 1; u <= b.fac5_u; ++u) {
            std::vector<ElementSet> members;
            for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k)
                if (ElementSet(k).size() <= b.fac5_member) members.push_back(ElementSet(k));
            const std::uint64_t nfam = std::uint64_t{1} << members.size();

            std::vector<std::vector<std::uint64_t>> patterns;  // pattern[p] = parts of partition p
            const std::uint64_t choices = (std::uint64_t{1} << u) - 1;
            std::vector<std::uint64_t> pat(n, 1);
            for (;;) {
                patterns.push_back(pat);
                std::size_t j = 0;
                while (j < n && ++pat[j] > choices) pat[j++] = 1;
                if (j == n) break;
            }
            std::vector<std::vector<OrderedPartition>> chunks;
            for (std::size_t start = 0; start < patterns.size(); start += ElementSet::capacity) {
                const std::size_t len = std::min(ElementSet::capacity, patterns.size() - start);
                const ElementSet ground = ElementSet::below(len);
                std::vector<OrderedPartition> xs;
                for (std::size_t p = 0; p < n; ++p) {
                    std::vector<ElementSet> parts(u);
                    for (std::size_t x = 0; x < len; ++x)
                        for (std::size_t i = 0; i < u; ++i)
                            if ((patterns[start + x][p] >> i) & 1u) parts[i].insert(x);
                    xs.emplace_back(ground, std::move(parts));
                }
                chunks.push_back(std::move(xs));
            }

            Supporter s;
            s.n = n;
            s.families.assign(u, {});
            std::vector<std::uint64_t> code(u, 0);
            for (;;) {
                for (std::size_t i = 0; i < u; ++i) {
                    s.families[i].clear();
                    for (std::size_t m = 0; m < members.size(); ++m)
                        if ((code[i] >> m) & 1u) s.families[i].push_back(members[m]);
                }
                ++r.cases;
                if (is_supporter(s, u, n)) {
                    for (std::size_t c = 0; c < chunks.size(); ++c) {
                        const auto y = cross_partitions(chunks[c], s);
                        if (y.size() != s.output_parts()) {
                            r.fail("cross produced the wrong number of parts for K=" + detail::show(s));
                            break;
                        }
                        if (!y.covers_ground()) {
                            const auto x = (y.ground() - y.covered()).min();
                            const auto& pt = patterns[c * ElementSet::capacity + x];
                            std::string w = "W={1}, parts containing the element per partition:";
                            for (auto q : pt) w += " " + detail::show(ElementSet(q));
                            r.fail("cross misses an element: n=" + std::to_string(n) + " u=" + std::to_string(u) +
                                   " K=" + detail::show(s) + " " + w);
                            break;
                        }
                    }
                }
                std::size_t j = 0;
                while (j < u && ++code[j] == nfam) code[j++] = 0;
                if (j == u) break;
            }
        }
    r.seconds = sw.seconds();
    return r;
}

namespace detail {

inline std::vector<BinaryString> strings_up_to(std::size_t len) {
    std::vector<BinaryString> out;
    for (std::size_t l = 0; l <= len; ++l)
        for (auto& s : all_strings(l)) out.push_back(std::move(s));
    return out;
}

inline std::vector<Output> output_catalogue() {
    const auto lvl = all_strings(3);
    std::vector<Output> out;
    for (std::uint64_t m = 0; m < 256; ++m)
        if (std::popcount(m) <= 3) {
            Output o;
            for (std::size_t i = 0; i < 8; ++i)
                if ((m >> i) & 1u) o.strings.push_back(lvl[i]);
            out.push_back(o);
        }
    out.push_back(Output::big_output());
    return out;
}

inline std::vector<Output> output_representatives() {
    auto mk = [](std::vector<const char*> xs) {
        Output o;
        for (auto x : xs) o.strings.emplace_back(x);
        return o;
    };
    return {mk({}), mk({"000"}), mk({"011", "100"}), mk({"000", "111"}), mk({"010", "101", "110"}),
            Output::big_output()};
}

// Bit Y of the result is set iff f abandons v on Y relative to rho.
inline std::uint64_t abandon_mask(const ToyFunctional& f, const BinaryString& rho, const ClopenSet& v,
                                  std::size_t ground) {
    std::uint64_t m = 0;
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << ground); ++y)
        if (abandons_on_set(f, rho, v, ElementSet(y), ground)) m |= std::uint64_t{1} << y;
    return m;
}

}  // namespace detail

struct FunctionalReports {
    Report fac2, fac3, fac4, fac9;
};

inline FunctionalReports verify_functional_facts(const FactBounds& b) {
    detail::Stopwatch sw;
    FunctionalReports out;
    out.fac2.suite = "fac2";
    out.fac3.suite = "fac3";
    out.fac4.suite = "fac4";
    out.fac9.suite = "fac9";
    const std::size_t g = b.ground;
    const std::uint64_t ys = std::uint64_t{1} << g;
    if (ys > 32) throw RangeError("ground too large for abandonment masks");
    const std::uint64_t all_ys = (std::uint64_t{1} << ys) - 1;
    const auto prefixes = detail::strings_up_to(b.use);
    const auto clopens = all_clopen_sets(b.height);
    const auto outputs = detail::output_catalogue();
    const auto reps = detail::output_representatives();
    const std::size_t in1 = std::min<std::size_t>(3, g), in2 = std::min<std::size_t>(4, g);

    std::vector<ToyFunctional> singles, pairs;
    for (std::size_t bound = 1; bound <= b.bound; ++bound) {
        for (const auto& p : prefixes)
            for (const auto& d : outputs) singles.emplace_back(bound, std::vector<TableEntry>{{p, in1, d}});
        for (const auto& p1 : prefixes)
            for (const auto& p2 : prefixes)
                for (const auto& d1 : reps)
                    for (const auto& d2 : reps)
                        try {
                            pairs.emplace_back(bound, std::vector<TableEntry>{{p1, in1, d1}, {p2, in2, d2}});
                        } catch (const TableError&) {
                        }
    }
    std::vector<ClopenSet> few_clopens;
    for (std::size_t i = 0; i < clopens.size(); i += std::max<std::size_t>(1, clopens.size() / 5))
        few_clopens.push_back(clopens[i]);

    const auto sigmas = detail::strings_up_to(b.sigma);
    auto monotone_checks = [&](const std::vector<ToyFunctional>& fs, const std::vector<ClopenSet>& vs) {
        for (const auto& f : fs)
            for (const auto& v : vs) {
                std::map<BinaryString, std::uint64_t> masks;
                for (const auto& s : sigmas) masks[s] = detail::abandon_mask(f, s, v, g);
                for (const auto& [rho, m] : masks) {
                    if (rho.size() > b.rho) continue;
                    for (std::uint64_t y = 0; y < ys; ++y) {
                        ++out.fac3.cases;
                        if (!((m >> y) & 1u)) continue;
                        for (std::size_t x = 0; x < g; ++x) {
                            const std::uint64_t y2 = y | (std::uint64_t{1} << x);
                            if (!((m >> y2) & 1u))
                                out.fac3.fail("abandons on Y=" + detail::show(ElementSet(y), 0) + " but not on Y'=" +
                                              detail::show(ElementSet(y2), 0) + " for " + detail::show(f) +
                                              " rho=" + detail::show_string(rho) + " V=" + detail::show(v));
                        }
                    }
                    for (const auto& [sigma, ms] : masks) {
                        if (!rho.is_strict_prefix_of(sigma)) continue;
                        ElementSet fresh;
                        for (std::size_t t = rho.size(); t < sigma.size(); ++t)
                            if (sigma[t]) fresh.insert(t);
                        for (std::uint64_t y = 0; y < ys; ++y) {
                            if (((m >> y) & 1u) || !fresh.subset_of(ElementSet(y))) continue;
                            ++out.fac9.cases;
                            if ((ms >> y) & 1u)
                                out.fac9.fail("extension " + detail::show_string(sigma) + " of rho=" +
                                              detail::show_string(rho) + " abandons on Y=" +
                                              detail::show(ElementSet(y), 0) + " for " + detail::show(f) +
                                              " V=" + detail::show(v));
                        }
                    }
                }
            }
    };
    monotone_checks(singles, clopens);
    monotone_checks(pairs, few_clopens);

    // Blocking. An output can only make Ψ^Y a strong e-enumeration at n if it has ≤ e strings,
    // all longer than the heights, meeting every V; such an output must be unreachable from
    // every Y below a common non-abandoning set.
    std::vector<std::vector<std::size_t>> families;
    for (std::size_t m = 1; m <= b.members; ++m) {
        std::vector<std::size_t> idx(m, 0);
        for (;;) {
            families.push_back(idx);
            std::size_t j = m;
            while (j > 0 && idx[j - 1] + 1 == clopens.size()) --j;
            if (j == 0) break;
            ++idx[j - 1];
            for (std::size_t t = j; t < m; ++t) idx[t] = idx[j - 1];
        }
    }
    const auto lvl3 = all_strings(3);
    std::vector<std::uint64_t> meet_mask(clopens.size(), 0);
    for (std::size_t c = 0; c < clopens.size(); ++c)
        for (std::size_t i = 0; i < lvl3.size(); ++i)
            if (clopens[c].meets(lvl3[i])) meet_mask[c] |= std::uint64_t{1} << i;
    std::map<std::size_t, std::vector<const std::vector<std::size_t>*>> disperse_by_e;
    for (std::size_t e = 1; e <= b.bound; ++e)
        for (const auto& fam : families) {
            std::vector<ClopenSet> vs;
            for (auto i : fam) vs.push_back(clopens[i]);
            if (is_disperse(vs, e)) disperse_by_e[e].push_back(&fam);
        }
    auto down_closure = [&](std::uint64_t m) {
        std::uint64_t d = 0;
        for (std::uint64_t x = 0; x < ys; ++x)
            if ((m >> x) & 1u)
                for (std::uint64_t y = x;; y = (y - 1) & x) {
                    d |= std::uint64_t{1} << y;
                    if (y == 0) break;
                }
        return d;
    };
    const std::vector<BinaryString> rhos = {BinaryString{}, BinaryString("0"), BinaryString("1")};
    auto blocking = [&](const std::vector<ToyFunctional>& fs, std::size_t nrho) {
        for (const auto& f : fs) {
            const std::size_t e = f.bound();
            for (std::size_t ri = 0; ri < nrho && ri < rhos.size(); ++ri) {
                const auto& rho = rhos[ri];
                if (rho.size() > b.rho) continue;
                // reachable outputs and the Y producing them
                std::vector<std::pair<Output, std::uint64_t>> reach;
                for (std::uint64_t y = 0; y < ys; ++y) {
                    const auto oracle = oracle_string(ElementSet(y), rho, g);
                    for (std::size_t n = 0; n <= g; ++n) {
                        auto d = f.evaluate(oracle, n);
                        if (!d) continue;
                        auto it = std::find_if(reach.begin(), reach.end(), [&](const auto& p) { return p.first == *d; });
                        if (it == reach.end())
                            reach.emplace_back(*d, std::uint64_t{1} << y);
                        else
                            it->second |= std::uint64_t{1} << y;
                    }
                }
                for (const auto& [d, ymask] : reach) {
                    const bool small = !d.big && d.strings.size() <= e;
                    std::uint64_t dmask = 0;
                    bool long_enough = true;
                    for (const auto& s : d.strings) {
                        if (s.size() != 3) long_enough = false;
                        auto pos = std::find(lvl3.begin(), lvl3.end(), s);
                        if (pos != lvl3.end()) dmask |= std::uint64_t{1} << (pos - lvl3.begin());
                    }
                    for (const auto* fam : disperse_by_e[e]) {
                        out.fac2.cases++;
                        out.fac4.cases++;
                        if (!small || !long_enough) continue;
                        bool meets_all = true;
                        for (auto c : *fam)
                            if (!(meet_mask[c] & dmask)) {
                                meets_all = false;
                                break;
                            }
                        if (!meets_all) continue;
                        std::uint64_t common = ~std::uint64_t{0}, down4 = ~std::uint64_t{0};
                        for (auto c : *fam) {
                            const std::uint64_t non = ~detail::abandon_mask(f, rho, clopens[c], g) & all_ys;
                            common &= non;
                            down4 &= down_closure(non);
                        }
                        std::vector<ClopenSet> vs;
                        for (auto c : *fam) vs.push_back(clopens[c]);
                        const std::string where = " for " + detail::show(f) + " rho=" + detail::show_string(rho) +
                                                  " V=" + detail::show(vs);
                        if (ymask & down_closure(common))
                            out.fac2.fail("a set below a common non-abandoning X yields a strong enumeration" + where);
                        if (ymask & down4)
                            out.fac4.fail("a set below the non-abandoning X^(i) yields a strong enumeration" + where);
                    }
                }
            }
        }
    };
    blocking(singles, rhos.size());
    blocking(pairs, 1);
    const double t = sw.seconds();
    out.fac2.seconds = out.fac3.seconds = out.fac4.seconds = out.fac9.seconds = t;
    return out;
}

}  // namespace coneforce
