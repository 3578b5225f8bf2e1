#include <doctest.h>

#include <limits>

#include "riskdp/instances.hpp"
#include "riskdp/json_io.hpp"
#include "riskdp/risk_measures.hpp"

using namespace riskdp;

namespace {

const char* kDoc = R"({
  "states": ["s2", "s1"],
  "actions": ["a2", "a1"],
  "available": {"s1": ["a1", "a2"], "s2": ["a1"]},
  "transitions": [
    {"s": "s1", "a": "a1", "sp": "s1", "p": 0.4},
    {"s": "s1", "a": "a1", "sp": "s2", "p": 0.6},
    {"s": "s1", "a": "a2", "sp": "s1", "p": 0.5},
    {"s": "s1", "a": "a2", "sp": "s2", "p": 0.5},
    {"s": "s2", "a": "a1", "sp": "s1", "p": 0.5},
    {"s": "s2", "a": "a1", "sp": "s2", "p": 0.5}
  ],
  "rewards": [
    {"s": "s1", "a": "a1", "sp": "s1", "r": -50},
    {"s": "s1", "a": "a1", "sp": "s2", "r": 100},
    {"s": "s2", "a": "a1", "sp": "s1", "r": 10},
    {"s": "s2", "a": "a1", "sp": "s2", "r": 10}
  ],
  "initial": {"s1": 0.5, "s2": 0.5}
})";

std::string patched(const std::string& from, const std::string& to) {
    std::string doc = kDoc;
    auto pos = doc.find(from);
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, from.size(), to);
    return doc;
}

} // namespace

TEST_CASE("ids map lexicographically regardless of document order") {
    auto m = parse_mdp_json(kDoc);
    // The document lists s2/a2 first; indices still follow sorted ids.
    CHECK(m.state_ids()[0] == "s1");
    CHECK(m.action_ids()[0] == "a1");
    CHECK(m.horizon() == 1); // default
    CHECK(m.p(0, 0, 1) == 0.6);
    CHECK(m.r(0, 0, 1) == 100.0);
    CHECK(m.available(1).size() == 1);
    CHECK(validate(m).empty());

    // Parsed model reproduces the hand-built mixture.
    auto d = return_distribution(m, DeterministicPolicy{{0, 0}});
    CHECK(cvar(d, RiskLevel(0.5)) == doctest::Approx(-14.0).epsilon(1e-12));
}

TEST_CASE("structural schema violations raise ParseError") {
    CHECK_THROWS_AS(parse_mdp_json("not json"), ParseError);
    CHECK_THROWS_AS(parse_mdp_json("[1, 2]"), ParseError);
    CHECK_THROWS_AS(parse_mdp_json(patched("\"initial\"", "\"extra\": 1, \"initial\"")),
                    ParseError);
    // Duplicate transition row.
    CHECK_THROWS_AS(
        parse_mdp_json(patched("{\"s\": \"s2\", \"a\": \"a1\", \"sp\": \"s1\", \"p\": 0.5}",
                               "{\"s\": \"s1\", \"a\": \"a1\", \"sp\": \"s1\", \"p\": 0.5}")),
        ParseError);
    // Reward on an undeclared transition.
    CHECK_THROWS_AS(
        parse_mdp_json(patched("{\"s\": \"s2\", \"a\": \"a1\", \"sp\": \"s1\", \"r\": 10}",
                               "{\"s\": \"s2\", \"a\": \"a2\", \"sp\": \"s1\", \"r\": 10}")),
        ParseError);
    // Unknown ids and malformed fields.
    CHECK_THROWS_AS(parse_mdp_json(patched("\"s\": \"s1\", \"a\": \"a1\", \"sp\": \"s1\", \"p\": 0.4",
                                           "\"s\": \"s9\", \"a\": \"a1\", \"sp\": \"s1\", \"p\": 0.4")),
                    ParseError);
    CHECK_THROWS_AS(parse_mdp_json(patched("\"p\": 0.4", "\"p\": \"x\"")), ParseError);
    CHECK_THROWS_AS(parse_mdp_json(patched("[\"s2\", \"s1\"]", "[\"s2\", \"s2\"]")),
                    ParseError);
    // Horizon must be a positive integer.
    CHECK_THROWS_AS(parse_mdp_json(patched("\"initial\"", "\"horizon\": 0, \"initial\"")),
                    ParseError);
    CHECK_THROWS_AS(parse_mdp_json(patched("\"initial\"", "\"horizon\": 1.5, \"initial\"")),
                    ParseError);
}

TEST_CASE("policy documents bind ids and availability") {
    auto m = parse_mdp_json(kDoc);
    auto pi = parse_policy_json(m, R"({"s1": "a2", "s2": "a1"})");
    CHECK(pi.action[0] == 1);
    CHECK(pi.action[1] == 0);
    CHECK_THROWS_AS(parse_policy_json(m, R"({"s1": "a1"})"), ParseError);
    CHECK_THROWS_AS(parse_policy_json(m, R"({"s1": "a1", "s2": "a2"})"), ParseError);
    CHECK_THROWS_AS(parse_policy_json(m, R"({"s1": "a1", "s9": "a1"})"), ParseError);
}

TEST_CASE("number formatting is reproducible and spells out non-finites") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(4.0) == "4");
    CHECK(csv_double(1.0 / 3.0) == "0.333333333333");
    double inf = std::numeric_limits<double>::infinity();
    CHECK(format_double(inf) == "inf");
    CHECK(format_double(-inf) == "-inf");
    CHECK(json_number(inf) == "\"inf\"");
    CHECK(json_number(2.5) == "2.5");

    DecompositionReport rep;
    rep.scheme = "var-eval";
    rep.alpha = 0.5;
    rep.value = inf;
    rep.allocation.mode = AllocationMode::SimplexCappedSup;
    auto text = report_to_json(rep);
    CHECK(text.find("\"value\": \"inf\"") != std::string::npos);
    CHECK(text.find("\"scheme\": \"var-eval\"") != std::string::npos);

    SweepResult sweep;
    sweep.rows.push_back({0.5, 100.0, 50.0, 2, 1, 0.0});
    CHECK(sweep_to_csv(sweep) ==
          "alpha,decomposition,oracle,oracle_action,greedy_action,realized\n"
          "0.5,100,50,2,1,0\n");
}

TEST_CASE("canonical serialization round-trips exactly") {
    const Mdp m = parse_mdp_json(kDoc);
    const std::string text = mdp_to_json(m);
    const Mdp back = parse_mdp_json(text);

    CHECK(back.state_ids() == m.state_ids());
    CHECK(back.action_ids() == m.action_ids());
    CHECK(back.horizon() == m.horizon());
    for (int s = 0; s < m.num_states(); ++s) {
        CHECK(back.available(s) == m.available(s));
        CHECK(back.initial()[static_cast<std::size_t>(s)] ==
              m.initial()[static_cast<std::size_t>(s)]);
        for (int a = 0; a < m.num_actions(); ++a)
            for (int sp = 0; sp < m.num_states(); ++sp) {
                CHECK(back.p(s, a, sp) == m.p(s, a, sp));
                CHECK(back.r(s, a, sp) == m.r(s, a, sp));
            }
    }
    // The form is canonical: serializing the reparse is byte-identical.
    CHECK(mdp_to_json(back) == text);

    // Real-valued rewards and dyadic masses survive the %.17g round trip.
    for (std::uint64_t seed : {7u, 8u, 9u}) {
        const Mdp rnd = random_mdp(seed);
        const Mdp rnd_back = parse_mdp_json(mdp_to_json(rnd));
        CHECK(mdp_to_json(rnd_back) == mdp_to_json(rnd));
        for (int s = 0; s < rnd.num_states(); ++s)
            for (int a = 0; a < rnd.num_actions(); ++a)
                for (int sp = 0; sp < rnd.num_states(); ++sp) {
                    CHECK(rnd_back.p(s, a, sp) == rnd.p(s, a, sp));
                    CHECK(rnd_back.r(s, a, sp) == rnd.r(s, a, sp));
                }
    }
}
