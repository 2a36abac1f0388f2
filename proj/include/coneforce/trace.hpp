#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace coneforce {

// Verdicts read back from a trace next to verdicts recomputed from its records alone.
struct TraceVerdicts {
    std::map<std::size_t, std::map<std::string, bool>> recorded;
    std::map<std::size_t, std::map<std::string, bool>> recomputed;
    std::vector<std::string> problems;
    std::string status;

    bool all_hold() const {
        if (!problems.empty()) return false;
        for (const auto* m : {&recorded, &recomputed})
            for (const auto& [s, checks] : *m)
                for (const auto& [name, v] : checks)
                    if (!v) return false;
        return true;
    }
    // Checks computed both ways must agree.
    bool consistent() const {
        static const std::map<std::string, std::string> same = {{"progress", "progress"},
                                                                {"hereditary_fading", "hereditary_fading"},
                                                                {"fac6", "fac6"},
                                                                {"cond4_stems", "cond4_stems"}};
        for (const auto& [s, rec] : recorded) {
            auto it = recomputed.find(s);
            if (it == recomputed.end()) return false;
            for (const auto& [a, b] : same) {
                auto x = rec.find(a);
                auto y = it->second.find(b);
                if (x == rec.end() || y == it->second.end() || x->second != y->second) return false;
            }
        }
        return true;
    }
};

namespace detail {

inline std::size_t trace_counter(const json& counters, int tag, int side) {
    auto it = counters.find(std::to_string(tag));
    if (it == counters.end()) return 1;
    return it->at(side).get<std::size_t>();
}

inline bool ones_inside(const std::string& stem, const PeriodicSet& a, bool in_a) {
    for (std::size_t x = 0; x < stem.size(); ++x)
        if (stem[x] == '1' && a.contains(x) != in_a) return false;
    return true;
}

inline bool starts_with(const std::string& s, const std::string& p) { return s.compare(0, p.size(), p) == 0; }

}  // namespace detail

inline TraceVerdicts verify_trace(const std::vector<json>& records) {
    TraceVerdicts v;
    if (records.empty() || records.front().value("record", "") != "scenario") {
        v.problems.push_back("trace does not start with a scenario record");
        return v;
    }
    const auto& head = records.front();
    PeriodicSet a;
    a.prefix = BinaryString(head.at("A").at("prefix").get<std::string>());
    a.cycle = BinaryString(head.at("A").at("cycle").get<std::string>());

    json prev_parts;
    std::size_t fired = 0;
    for (std::size_t li = 1; li < records.size(); ++li) {
        const auto& r = records[li];
        const std::string kind = r.value("record", "");
        if (kind == "op") {
            const std::string op = r.at("op").get<std::string>();
            if ((op == "R-i" && r.at("outcome") == "case_i") || (op == "P" && r.at("outcome") == "succeeded")) {
                const auto before = r.at("stem_before").get<std::string>();
                const auto after = r.at("stem_after").get<std::string>();
                const bool left = r.at("side") == "l";
                if (!detail::starts_with(after, before) || after.size() <= before.size())
                    v.problems.push_back("line " + std::to_string(li + 1) + ": stem does not strictly extend");
                if (!detail::ones_inside(after, a, left))
                    v.problems.push_back("line " + std::to_string(li + 1) + ": stem leaves its side set");
            }
            if (op == "R-i" && r.at("outcome") == "case_i") ++fired;
        } else if (kind == "step") {
            const auto s = r.at("step").get<std::size_t>();
            const auto& parts = r.at("parts");
            if (s == 0) {
                prev_parts = parts;
                fired = 0;
                continue;
            }
            const int tag = r.at("tag").get<int>();
            auto& rec = v.recorded[s];
            for (const auto& [name, val] : r.at("checks").items()) rec[name] = val.get<bool>();
            auto& re = v.recomputed[s];
            bool progress = true, fading = true, stems = true, cond4 = true;
            for (const auto& p : parts) {
                const auto parent_idx = p.at("parent").get<std::size_t>();
                if (parent_idx == 0 || parent_idx > prev_parts.size()) {
                    v.problems.push_back("step " + std::to_string(s) + ": parent out of range");
                    continue;
                }
                const auto& par = prev_parts[parent_idx - 1];
                std::set<int> tags{tag};
                for (const auto& [t, x] : par.at("counters").items()) tags.insert(std::stoi(t));
                for (const auto& [t, x] : p.at("counters").items()) tags.insert(std::stoi(t));
                for (int t : tags)
                    for (int side : {0, 1})
                        if (detail::trace_counter(p.at("counters"), t, side) <
                            detail::trace_counter(par.at("counters"), t, side))
                            progress = false;
                if (detail::trace_counter(p.at("counters"), tag, 0) <= detail::trace_counter(par.at("counters"), tag, 0) &&
                    detail::trace_counter(p.at("counters"), tag, 1) <= detail::trace_counter(par.at("counters"), tag, 1))
                    progress = false;
                for (const char* side : {"l", "r"}) {
                    const std::string key = std::string("fading_") + side;
                    if (par.at(key).get<bool>() && !p.at(key).get<bool>()) fading = false;
                    const std::string sk = std::string("stem_") + side;
                    if (!detail::starts_with(p.at(sk).get<std::string>(), par.at(sk).get<std::string>())) stems = false;
                    if (!detail::ones_inside(p.at(sk).get<std::string>(), a, side[0] == 'l')) cond4 = false;
                }
            }
            re["progress"] = progress;
            re["hereditary_fading"] = fading;
            re["stems_extend"] = stems;
            re["cond4_stems"] = cond4;
            const auto ri = r.at("ri_fired").get<std::size_t>();
            const auto bound = r.at("fac6_bound").get<std::size_t>();
            re["fac6"] = ri < bound;
            re["ri_count"] = ri == fired;
            re["fac6_bound_shape"] = bound % (2 * prev_parts.size()) == 0;
            prev_parts = parts;
            fired = 0;
        } else if (kind == "summary") {
            v.status = r.at("status").get<std::string>();
        }
    }
    return v;
}

inline std::vector<json> parse_trace(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (line.empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw FormatError("trace line " + std::to_string(no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace coneforce
