#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "coneforce/forcing.hpp"
#include "coneforce/lemmas.hpp"
#include "coneforce/trace.hpp"

using namespace coneforce;

namespace {

struct SimOptions {
    std::string config;
    std::optional<std::size_t> depth, steps, budget_ri, height_bound;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void print_report(const Report& r) {
    std::cout << r.suite << ": " << (r.pass() ? "PASS" : "FAIL") << " cases=" << r.cases
              << " failures=" << r.failure_count << " time=" << r.seconds << "s\n";
    for (const auto& f : r.failures) std::cout << "  counterexample: " << f << "\n";
}

int cmd_verify_facts(const std::string& bounds_spec, std::uint64_t seed, bool lemmas, bool mutant) {
    FactBounds b = parse_bounds(bounds_spec);
    check_bounds(b);
    std::vector<Report> reports;
    reports.push_back(verify_fac1(b, mutant ? SupporterBuilder(mutant_supporter_builder)
                                            : SupporterBuilder(default_supporter_builder)));
    reports.push_back(verify_fac5(b));
    auto fr = verify_functional_facts(b);
    for (auto* r : {&fr.fac2, &fr.fac3, &fr.fac4, &fr.fac9}) reports.push_back(*r);
    if (lemmas) {
        const bool small = bounds_spec.find("tiny") != std::string::npos;
        reports.push_back(verify_lem2(seed, small ? 50 : 1000));
        reports.push_back(verify_fac8(seed, small ? 25 : 500));
        reports.push_back(verify_lem1(seed, small ? 50 : 1000));
    }
    std::sort(reports.begin(), reports.end(), [](const Report& a, const Report& c) { return a.suite < c.suite; });
    bool ok = true;
    for (const auto& r : reports) {
        print_report(r);
        ok = ok && r.pass();
    }
    std::cout << (ok ? "all suites passed" : "some suites failed") << "\n";
    return ok ? 0 : 1;
}

json patched_config(const SimOptions& o) {
    json j = read_json_file(o.config);
    if (o.depth) j["depth"] = *o.depth;
    if (o.steps) j["steps"] = *o.steps;
    if (o.seed) j["seed"] = *o.seed;
    if (o.budget_ri) j["budgets"]["ri_loop"] = *o.budget_ri;
    if (o.height_bound) j["budgets"]["rii_height"] = *o.height_bound;
    return j;
}

int cmd_sim(const SimOptions& o) {
    const Scenario s = scenario_from_json(patched_config(o));
    const RunResult r = run_scenario(s);
    const std::string text = trace_text(r.trace);
    if (!o.out.empty()) {
        std::ofstream out(o.out, std::ios::binary);
        if (!out) throw FormatError("cannot write " + o.out);
        out << text;
    }
    const TraceVerdicts v = verify_trace(parse_trace(text));
    std::cout << "scenario: " << s.name << "\n";
    std::cout << "status: " << r.status << "\n";
    if (r.status == "stuck") {
        for (const auto& rec : r.trace)
            if (rec.value("record", "") == "stuck")
                std::cout << "stuck: step " << rec.at("step") << " operation " << rec.at("op").get<std::string>()
                          << " tag " << rec.at("tag") << "\n";
    }
    if (!r.error.empty()) std::cout << "error: step " << r.state.step << ": " << r.error << "\n";
    std::cout << "steps completed: " << r.trace.back().at("steps_completed") << "\n";
    std::cout << "parts: " << r.state.cond.parts() << "\n";
    for (const auto& rec : r.trace)
        if (rec.value("record", "") == "step" && rec.at("step").get<std::size_t>() > 0) {
            std::cout << "step " << rec.at("step") << ": parts=" << rec.at("parts").size()
                      << " ri_fired=" << rec.at("ri_fired") << " fac6_bound=" << rec.at("fac6_bound");
            bool all = true;
            for (const auto& [k, val] : rec.at("checks").items()) all = all && val.get<bool>();
            std::cout << " checks=" << (all ? "pass" : "FAIL") << "\n";
        }
    if (r.branch) {
        std::cout << "deepest branch: side " << side_name(r.branch->side) << " parts";
        for (auto p : r.branch->parts) std::cout << " " << p + 1;
        std::cout << "\nG prefix: " << (r.branch->g_prefix.empty() ? "ε" : r.branch->g_prefix.str()) << "\n";
    }
    std::cout << "trace verification: " << (v.all_hold() ? "pass" : "FAIL")
              << " (recorded and recomputed verdicts " << (v.consistent() ? "agree" : "DISAGREE") << ")\n";
    for (const auto& p : v.problems) std::cout << "  " << p << "\n";
    return r.status == "ok" && r.checks_passed && v.all_hold() && v.consistent() ? 0 : 1;
}

std::set<BinaryString> string_set(const json& j) {
    std::set<BinaryString> out;
    for (const auto& s : j) out.emplace(s.get<std::string>());
    return out;
}

// {"kprime": k, "levels": [n...], "budget": t, "Q": tree?, "stages": [{"<n>": [[...], ...]}, ...]}
int cmd_extract_enum(const std::string& path) {
    const json j = read_json_file(path);
    std::vector<EnumerationStage> stages;
    for (const auto& st : j.at("stages")) {
        EnumerationStage e;
        for (const auto& [n, gens] : st.items())
            for (const auto& g : gens) e.generators[std::stoul(n)].push_back(string_set(g));
        stages.push_back(e);
    }
    const EnumerationStages e(stages);
    const auto kprime = j.at("kprime").get<std::size_t>();
    const auto budget = j.value("budget", e.size());
    std::optional<FinTree> q;
    if (j.contains("Q")) q = tree_from_json(j.at("Q"), 0);
    bool ok = true;
    for (const auto& nj : j.at("levels")) {
        const auto n = nj.get<std::size_t>();
        const auto r = extract_enum_detailed(e, kprime, n, budget);
        std::cout << "n=" << n << " stage=" << r.stage << " values:";
        for (const auto& s : r.values) std::cout << " " << (s.empty() ? "ε" : s.str());
        const bool size_ok = r.values.size() <= kprime;
        std::cout << " size<=k': " << (size_ok ? "yes" : "NO");
        ok = ok && size_ok;
        if (q) {
            const bool meets =
                std::any_of(r.values.begin(), r.values.end(), [&](const BinaryString& s) { return q->contains(s); });
            std::cout << " meets Q_n: " << (meets ? "yes" : "NO");
            ok = ok && meets;
        }
        std::cout << "\n";
    }
    return ok ? 0 : 1;
}

// {"tree": tree, "enumeration": {"bound": k, "lo": a, "hi": b, "width": w, "values": {"<n>": [...]}}}
int cmd_extract_path(const std::string& path) {
    const json j = read_json_file(path);
    const FinTree t = tree_from_json(j.at("tree"), 0);
    const auto& ej = j.at("enumeration");
    std::map<std::size_t, std::vector<BinaryString>> vals;
    for (const auto& [n, ss] : ej.at("values").items())
        for (const auto& s : ss) vals[std::stoul(n)].emplace_back(s.get<std::string>());
    const StrongEnumeration h(ej.at("bound").get<std::size_t>(), ej.at("lo").get<std::size_t>(),
                              ej.at("hi").get<std::size_t>(), vals, ej.value("width", std::size_t{1}));
    const auto r = extract_path_iterated(t, h);
    const bool member = r.path.size() == h.hi() * h.width() && t.contains(r.path);
    std::cout << "path: " << (r.path.empty() ? "ε" : r.path.str()) << "\n";
    std::cout << "reductions: " << r.reductions << "\n";
    std::cout << "membership: " << (member ? "verified" : "FAILED") << "\n";
    return member && r.reductions + 1 <= h.bound() ? 0 : 1;
}

// {"programs": [[program, output], ...]}
int cmd_machine(const std::string& path, std::size_t n, std::size_t c) {
    const json j = read_json_file(path);
    const auto m = machine_from_json(j.at("programs"));
    const auto level = m.incompressible_level(c, n);
    const auto count = m.compressible_count(c, n);
    const std::size_t bound = n > c ? (std::size_t{1} << (n - c)) - 1 : 0;
    const auto [num, scale] = m.kraft_sum();
    std::cout << "n=" << n << " c=" << c << "\n";
    std::cout << "compressible: " << count << " (bound " << bound << ")\n";
    std::cout << "incompressible: " << level.size() << "\n";
    for (const auto& s : level) std::cout << "  " << (s.empty() ? "ε" : s.str()) << "\n";
    std::cout << "kraft sum: " << num << "/2^" << scale << (m.kraft_holds() ? " <= 1" : " > 1") << "\n";
    return count <= bound && m.kraft_holds() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coneforce: finite tree-forcing construction and fact verification"};
    app.require_subcommand(1);

    std::string bounds = "default";
    std::uint64_t facts_seed = 1;
    bool lemmas = false, mutant = false;
    auto* vf = app.add_subcommand("verify-facts", "run the exhaustive fact suites");
    vf->add_option("--bounds", bounds, "preset (default, tiny) or key=value list, e.g. n=1");
    vf->add_option("--seed", facts_seed, "seed for the sampled lemma suites");
    vf->add_flag("--lemmas", lemmas, "also run the seeded lemma suites");
    vf->add_flag("--inject-mutant", mutant, "")->group("");

    SimOptions so;
    auto* sim = app.add_subcommand("sim", "run a scenario and write its trace");
    sim->add_option("--config", so.config, "scenario JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--depth", so.depth, "element horizon N");
    sim->add_option("--steps", so.steps, "number of steps S");
    sim->add_option("--budget-ri", so.budget_ri, "R-i loop budget per step");
    sim->add_option("--height-bound", so.height_bound, "R-ii clopen height bound");
    sim->add_option("--seed", so.seed, "scenario seed");
    sim->add_option("--out", so.out, "trace output path");

    std::string enum_config;
    auto* ee = app.add_subcommand("extract-enum", "extract a strong k'-enumeration from enumeration stages");
    ee->add_option("--config", enum_config, "task JSON")->required()->check(CLI::ExistingFile);

    std::string path_config;
    auto* ep = app.add_subcommand("extract-path", "reduce a strong enumeration of a homogeneous tree to a path");
    ep->add_option("--config", path_config, "task JSON")->required()->check(CLI::ExistingFile);

    std::string machine_config;
    std::size_t mn = 8, mc = 0;
    auto* mach = app.add_subcommand("machine", "incompressible level of a toy prefix-free machine");
    mach->add_option("--config", machine_config, "machine JSON")->required()->check(CLI::ExistingFile);
    mach->add_option("--n", mn, "string length");
    mach->add_option("--c", mc, "compression constant");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*vf) return cmd_verify_facts(bounds, facts_seed, lemmas, mutant);
        if (*sim) return cmd_sim(so);
        if (*ee) return cmd_extract_enum(enum_config);
        if (*ep) return cmd_extract_path(path_config);
        if (*mach) return cmd_machine(machine_config, mn, mc);
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const ContractError& e) {
        std::cerr << "contract error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "malformed input: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
