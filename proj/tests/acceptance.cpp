// Acceptance run: one line per criterion, nonzero exit if any criterion fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "coneforce/facts.hpp"
#include "coneforce/forcing.hpp"
#include "coneforce/lemmas.hpp"
#include "coneforce/trace.hpp"

using namespace coneforce;

namespace {

constexpr double kFac1Seconds = 120;
constexpr double kFac5Seconds = 60;
constexpr double kFunctionalSeconds = 300;
constexpr double kScenarioSeconds = 600;
constexpr std::uint64_t kSeed = 20240601;

struct Line {
    int criterion;
    bool pass;
    std::string detail;
};

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_time(double s) {
    std::ostringstream o;
    o.precision(2);
    o << std::fixed << s << "s";
    return o.str();
}

std::string first_failure(const Report& r) { return r.failures.empty() ? "" : " first: " + r.failures.front(); }

Line suite_line(int c, const Report& r, double seconds, double limit) {
    // limit 0: no time limit
    const bool ok = r.pass() && r.cases > 0 && (limit <= 0 || seconds <= limit);
    return {c, ok,
            r.suite + " cases=" + std::to_string(r.cases) + " failures=" + std::to_string(r.failure_count) +
                " time=" + fmt_time(seconds) + (limit > 0 ? " limit=" + fmt_time(limit) : "") + first_failure(r)};
}

Line criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = verify_functional_facts(FactBounds{});
    const double s = since(t0);
    bool ok = s <= kFunctionalSeconds;
    std::string d;
    for (const auto* x : {&r.fac2, &r.fac3, &r.fac4, &r.fac9}) {
        ok = ok && x->pass() && x->cases > 0;
        d += x->suite + " cases=" + std::to_string(x->cases) + " failures=" + std::to_string(x->failure_count) +
             first_failure(*x) + "; ";
    }
    return {3, ok, d + "time=" + fmt_time(s) + " limit=" + fmt_time(kFunctionalSeconds)};
}

Line criterion4(const std::string& dir) {
    auto s = load_scenario(dir + "/step1.json");
    std::vector<json> trace;
    auto env = Environment::from(s);
    env.trace = &trace;
    auto st = initial_state(env);
    std::vector<ChildLink> links;
    if (!r_ii_operation(st, 1, env, links)) return {4, false, "first R-ii is stuck"};
    const auto& rec = trace.back();
    std::vector<ClopenSet> seq;
    for (const auto& v : rec.at("sequence")) {
        std::vector<BinaryString> g;
        for (const auto& x : v) g.emplace_back(x.get<std::string>());
        seq.emplace_back(g);
    }
    bool disjoint = seq.size() == 3;
    for (std::size_t a = 0; a < seq.size(); ++a)
        for (std::size_t b = a + 1; b < seq.size(); ++b)
            if (intersection_nonempty({seq[a], seq[b]})) disjoint = false;
    const bool e11 = rec.at("k_prime") == 2;
    const bool six = st.cond.parts() == 6;
    const auto cv = check_conditions(st.cond, env);
    const bool factored_ok = cv.nonempty && cv.covers;

    // explicit check at a depth small enough to list every path
    auto small_json = s.source;
    small_json["depth"] = 3;
    auto small_env = Environment::from(scenario_from_json(small_json));
    auto small = initial_state(small_env);
    std::vector<ChildLink> small_links;
    bool explicit_ok = r_ii_operation(small, 1, small_env, small_links) && small.cond.parts() == 6;
    std::size_t paths = 0;
    if (explicit_ok) {
        const auto t = small.cond.tree.to_fintree(1000000);
        paths = t.paths().size();
        explicit_ok = paths > 0 && is_partition_tree(t, 6, ElementSet::below(3));
    }
    std::string d = "parts=" + std::to_string(st.cond.parts()) + " sequence=" + detail::show(seq) +
                    " pairwise_disjoint=" + (disjoint ? "yes" : "no") + " e=(1,1)=" + (e11 ? "yes" : "no") +
                    " tree(depth 12) nonempty+covers=" + (factored_ok ? "yes" : "no") +
                    " is_partition_tree(depth 3, " + std::to_string(paths) + " paths)=" + (explicit_ok ? "yes" : "no");
    return {4, disjoint && e11 && six && factored_ok && explicit_ok, d};
}

std::pair<Line, Line> criteria8and9(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    bool ok8 = files.size() >= 3, ok9 = !files.empty();
    bool has_trivial = false, has_case_i_once = false;
    std::string d8, d9;
    for (const auto& f : files) {
        const auto s = load_scenario(f);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r1 = run_scenario(s);
        const double secs = since(t0);
        const auto r2 = run_scenario(s);
        const auto text = trace_text(r1.trace);
        const bool same = text == trace_text(r2.trace);
        const auto v = verify_trace(parse_trace(text));
        const bool steps_ok = s.steps == 3 && s.depth == 12 && r1.status == "ok" && r1.state.step == 3;
        const bool ok = same && v.all_hold() && v.consistent() && steps_ok && secs <= kScenarioSeconds;
        ok8 = ok8 && ok;
        if (s.functionals.tables().empty()) has_trivial = true;
        std::size_t fired_total = 0, steps_over = 0;
        for (const auto& rec : r1.trace)
            if (rec.value("record", "") == "step" && rec.contains("ri_fired")) {
                fired_total += rec.at("ri_fired").get<std::size_t>();
                if (rec.at("ri_fired").get<std::size_t>() >= rec.at("fac6_bound").get<std::size_t>()) ++steps_over;
            }
        if (s.name == "case_i_once" && fired_total == 1) has_case_i_once = true;
        ok9 = ok9 && steps_over == 0 && r1.status == "ok";
        d8 += s.name + "(" + r1.status + ", " + fmt_time(secs) + ", identical=" + (same ? "yes" : "no") +
              ", invariants=" + (v.all_hold() && v.consistent() ? "hold" : "FAIL") + ") ";
        d9 += s.name + "(R-i fired " + std::to_string(fired_total) + ", steps over bound " + std::to_string(steps_over) + ") ";
    }
    ok8 = ok8 && has_trivial && has_case_i_once;
    return {{8, ok8, d8 + "limit=" + fmt_time(kScenarioSeconds) + " per scenario"}, {9, ok9, d9}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance run"};
    std::string dir = "scenarios";
    app.add_option("--scenarios", dir, "directory of scenario files");
    CLI11_PARSE(app, argc, argv);

    std::vector<Line> lines;
    auto report = [&](Line l) {
        std::cout << "criterion " << l.criterion << ": " << (l.pass ? "PASS" : "FAIL") << "  " << l.detail << std::endl;
        lines.push_back(std::move(l));
    };
    auto guarded = [&](int c, auto&& fn) {
        try {
            report(fn());
        } catch (const std::exception& e) {
            report({c, false, std::string("error: ") + e.what()});
        }
    };

    guarded(1, [] {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = verify_fac1(FactBounds{});
        return suite_line(1, r, since(t0), kFac1Seconds);
    });
    guarded(2, [] {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = verify_fac5(FactBounds{});
        return suite_line(2, r, since(t0), kFac5Seconds);
    });
    guarded(3, [] { return criterion3(); });
    guarded(4, [&] { return criterion4(dir); });
    guarded(5, [] {
        const auto r = verify_lem2(kSeed);
        return suite_line(5, r, r.seconds, 0);
    });
    guarded(6, [] {
        const auto r = verify_fac8(kSeed);
        return suite_line(6, r, r.seconds, 0);
    });
    guarded(7, [] {
        const auto r = verify_lem1(kSeed);
        return suite_line(7, r, r.seconds, 0);
    });
    try {
        auto [l8, l9] = criteria8and9(dir);
        report(l8);
        report(l9);
    } catch (const std::exception& e) {
        report({8, false, std::string("error: ") + e.what()});
        report({9, false, std::string("error: ") + e.what()});
    }
    const bool all = std::all_of(lines.begin(), lines.end(), [](const Line& l) { return l.pass; });
    std::cout << (all ? "all criteria passed" : "some criteria failed") << std::endl;
    return all ? 0 : 1;
}
