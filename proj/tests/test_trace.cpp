#include <gtest/gtest.h>

#include "coneforce/forcing.hpp"
#include "coneforce/trace.hpp"

using namespace coneforce;

namespace {

std::vector<json> trace_of(const std::string& name) {
    const auto s = load_scenario(std::string(CONEFORCE_SCENARIOS) + "/" + name + ".json");
    return parse_trace(trace_text(run_scenario(s).trace));
}

json* first_step(std::vector<json>& t, std::size_t n) {
    for (auto& r : t)
        if (r.value("record", "") == "step" && r.at("step") == n) return &r;
    return nullptr;
}

}  // namespace

TEST(Trace, RoundTripHoldsOnBundledScenarios) {
    for (const auto* name : {"trivial", "step1", "case_i_once", "coupled"}) {
        const auto v = verify_trace(trace_of(name));
        EXPECT_TRUE(v.all_hold()) << name << (v.problems.empty() ? "" : ": " + v.problems.front());
        EXPECT_TRUE(v.consistent()) << name;
        EXPECT_EQ(v.status, "ok") << name;
        EXPECT_EQ(v.recorded.size(), 3u) << name;
    }
}

TEST(Trace, SortedKeysOneRecordPerLine) {
    const auto s = load_scenario(std::string(CONEFORCE_SCENARIOS) + "/step1.json");
    const auto text = trace_text(run_scenario(s).trace);
    const auto lines = parse_trace(text);
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), lines.size());
    EXPECT_EQ(text.substr(0, 2), "{\"");
    EXPECT_EQ(lines.front().at("record"), "scenario");
    EXPECT_EQ(lines.back().at("record"), "summary");
}

TEST(Trace, DecreasedCounterIsDetected) {
    auto t = trace_of("step1");
    auto* s2 = first_step(t, 2);
    ASSERT_NE(s2, nullptr);
    (*s2)["parts"][0]["counters"] = json::object();
    const auto v = verify_trace(t);
    EXPECT_FALSE(v.recomputed.at(2).at("progress"));
    EXPECT_FALSE(v.all_hold());
    EXPECT_FALSE(v.consistent());
}

TEST(Trace, StemOutsideSideIsDetected) {
    auto t = trace_of("trivial");
    auto* s1 = first_step(t, 1);
    ASSERT_NE(s1, nullptr);
    const std::string stem = (*s1)["parts"][0]["stem_l"].get<std::string>();
    (*s1)["parts"][0]["stem_l"] = stem + std::string(stem.size() % 2 == 0 ? "01" : "1");
    const auto v = verify_trace(t);
    EXPECT_FALSE(v.recomputed.at(1).at("cond4_stems"));
    EXPECT_FALSE(v.all_hold());
}

TEST(Trace, OpRecordTampering) {
    auto t = trace_of("trivial");
    for (auto& r : t)
        if (r.value("op", "") == "P" && r.value("outcome", "") == "succeeded") {
            r["stem_after"] = r["stem_before"];
            break;
        }
    const auto v = verify_trace(t);
    ASSERT_FALSE(v.problems.empty());
    EXPECT_NE(v.problems.front().find("strictly extend"), std::string::npos);
}

TEST(Trace, ParseErrors) {
    EXPECT_THROW(parse_trace("{\"a\":1}\nnot json\n"), FormatError);
    EXPECT_FALSE(verify_trace({}).all_hold());
    EXPECT_FALSE(verify_trace(parse_trace("{\"record\":\"step\"}\n")).problems.empty());
}
