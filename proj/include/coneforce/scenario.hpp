#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "enumeration.hpp"
#include "functional.hpp"

namespace coneforce {

using json = nlohmann::json;

// Eventually periodic bit predicate: prefix, then cycle repeated forever.
struct PeriodicSet {
    BinaryString prefix;
    BinaryString cycle{"1"};

    bool contains(std::size_t x) const {
        if (x < prefix.size()) return prefix[x];
        if (cycle.empty()) return false;
        return cycle[(x - prefix.size()) % cycle.size()];
    }
    ElementSet below(std::size_t n) const {
        ElementSet s;
        for (std::size_t x = 0; x < n; ++x)
            if (contains(x)) s.insert(x);
        return s;
    }
};

// Tables per (tag j, index e); index e doubles as the output bound. Missing tables never halt.
class FunctionalRegistry {
public:
    void add(int tag, std::size_t index, ToyFunctional f) { tables_[{tag, index}] = f.with_bound(index); }
    ToyFunctional get(int tag, std::size_t index) const {
        auto it = tables_.find({tag, index});
        return it == tables_.end() ? ToyFunctional::trivial(index) : it->second;
    }
    std::size_t halting_entries(int tag) const {
        std::size_t c = 0;
        for (const auto& [key, f] : tables_)
            if (key.first == tag) c += f.entries().size();
        return c;
    }
    const std::map<std::pair<int, std::size_t>, ToyFunctional>& tables() const { return tables_; }

private:
    std::map<std::pair<int, std::size_t>, ToyFunctional> tables_;
};

struct Budgets {
    std::size_t ri_loop = 1000;
    std::size_t ri_stems = 1000000;
    std::size_t rii_height = 2;
    std::size_t rii_candidates = 2000000;
    std::size_t rii_max_count = 4;
};

struct Scenario {
    std::string name;
    std::size_t depth = 12;
    std::size_t steps = 3;
    std::uint64_t seed = 0;
    PeriodicSet a;
    FinTree q;
    json q_spec;
    FunctionalRegistry functionals;
    std::vector<int> schedule;
    Budgets budgets;
    json source;

    void validate() const {
        if (depth < 2 || depth > 64) throw FormatError("scenario depth must be in 2..64");
        if (schedule.size() < steps) throw FormatError("schedule does not cover the configured steps");
        if (budgets.ri_loop == 0 || budgets.ri_stems == 0 || budgets.rii_candidates == 0 ||
            budgets.rii_max_count == 0)
            throw FormatError("budgets must be positive");
        if (budgets.rii_height > 3) throw FormatError("R-ii height bound above 3 is not supported");
        if (q.empty()) throw FormatError("target tree Q is empty");
    }
};

// Text forms -----------------------------------------------------------------

inline Output output_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() != "BIG") throw FormatError("output must be a string list or \"BIG\"");
        return Output::big_output();
    }
    Output o;
    for (const auto& s : j) o.strings.emplace_back(s.get<std::string>());
    return o;
}

inline json output_to_json(const Output& o) {
    if (o.big) return "BIG";
    json a = json::array();
    for (const auto& s : o.strings) a.push_back(s.str());
    return a;
}

inline ToyFunctional functional_from_json(const json& j, std::size_t default_bound = 1) {
    std::vector<TableEntry> entries;
    for (const auto& e : j.at("entries"))
        entries.push_back({BinaryString(e.at("prefix").get<std::string>()), e.at("n").get<std::size_t>(),
                           output_from_json(e.at("out"))});
    return ToyFunctional(j.value("bound", default_bound), std::move(entries));
}

inline json functional_to_json(const ToyFunctional& f) {
    json entries = json::array();
    for (const auto& e : f.entries())
        entries.push_back({{"prefix", e.prefix.str()}, {"n", e.input}, {"out", output_to_json(e.output)}});
    return {{"bound", f.bound()}, {"entries", entries}};
}

inline json tree_to_json(const FinTree& t) {
    json nodes = json::array();
    for (const auto& s : t.nodes()) nodes.push_back(s.str());
    return {{"depth", t.depth()}, {"width", t.width()}, {"nodes", nodes}};
}

inline ToyPrefixMachine machine_from_json(const json& j) {
    std::map<BinaryString, BinaryString> progs;
    for (const auto& p : j) {
        BinaryString prog(p.at(0).get<std::string>());
        if (progs.count(prog)) throw FormatError("duplicate program " + prog.str());
        progs[prog] = BinaryString(p.at(1).get<std::string>());
    }
    return ToyPrefixMachine(std::move(progs));
}

// Q: {"kind": "full"|"explicit"|"level_choice"|"incompressible", ...}
inline FinTree tree_from_json(const json& j, std::size_t default_depth) {
    const std::string kind = j.value("kind", "explicit");
    if (kind == "full") return FinTree::full(j.value("depth", default_depth));
    if (kind == "explicit") {
        std::set<BinaryString> raw;
        for (const auto& s : j.at("nodes")) raw.emplace(s.get<std::string>());
        return FinTree::prune(raw, j.at("depth").get<std::size_t>(), j.value("width", std::size_t{1}));
    }
    if (kind == "level_choice") {
        std::vector<std::vector<unsigned>> levels;
        for (const auto& l : j.at("levels")) levels.push_back(l.get<std::vector<unsigned>>());
        return FinTree::level_choice(levels, j.value("width", std::size_t{1}));
    }
    if (kind == "incompressible") {
        const auto m = machine_from_json(j.at("programs"));
        const std::size_t d = j.value("depth", default_depth);
        if (d > 20) throw FormatError("incompressible tree depth too large");
        return FinTree::from_paths(m.incompressible_level(j.at("c").get<std::size_t>(), d), d);
    }
    throw FormatError("unknown tree kind '" + kind + "'");
}

inline Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.source = j;
    s.name = j.value("name", "unnamed");
    s.depth = j.value("depth", std::size_t{12});
    s.steps = j.value("steps", std::size_t{3});
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("A")) {
        s.a.prefix = BinaryString(j["A"].value("prefix", ""));
        s.a.cycle = BinaryString(j["A"].value("cycle", "1"));
    }
    s.q_spec = j.value("Q", json{{"kind", "full"}});
    s.q = tree_from_json(s.q_spec, s.depth);
    if (j.contains("functionals"))
        for (const auto& f : j["functionals"]) {
            const auto index = f.at("index").get<std::size_t>();
            if (index == 0) throw FormatError("functional index must be positive");
            s.functionals.add(f.at("tag").get<int>(), index, functional_from_json(f, index));
        }
    s.schedule = j.value("schedule", std::vector<int>{});
    if (s.schedule.empty())
        for (std::size_t i = 0; i < s.steps; ++i) s.schedule.push_back(1);
    if (j.contains("budgets")) {
        const auto& b = j["budgets"];
        s.budgets.ri_loop = b.value("ri_loop", s.budgets.ri_loop);
        s.budgets.ri_stems = b.value("ri_stems", s.budgets.ri_stems);
        s.budgets.rii_height = b.value("rii_height", s.budgets.rii_height);
        s.budgets.rii_candidates = b.value("rii_candidates", s.budgets.rii_candidates);
        s.budgets.rii_max_count = b.value("rii_max_count", s.budgets.rii_max_count);
    }
    s.validate();
    return s;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

inline Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json_file(path)); }

}  // namespace coneforce
