#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "uta/cli.hpp"
#include "uta/scenario.hpp"

using namespace uta;

namespace {

std::string fixture(const std::string& name) {
    return std::string(UTA_FIXTURE_DIR) + "/" + name;
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("fixtures load with the documented shapes") {
    Scenario e1 = load_scenario(fixture("e1.json"));
    CHECK(e1.kind == Scenario::Kind::Explicit);
    REQUIRE(e1.instance.has_value());
    CHECK(e1.instance->num_bidders == 3);
    CHECK(e1.instance->num_outcomes == 3);
    CHECK(e1.instance->value(0, 1) == 1.5);
    REQUIRE(e1.bid_sets.count("concentrated") == 1);
    CHECK(e1.bid_sets.at("concentrated")[2].value_bid ==
          std::vector<Money>{0.0, 0.0, 2.0});
    CHECK(e1.simulation.epsilon == 0.01);
    CHECK(e1.simulation.axioms == AxiomSet::All);
    CHECK(e1.simulation.target == ConvergenceTarget::Egalitarian);

    Scenario e3 = load_scenario(fixture("e3.json"));
    CHECK(e3.instance->num_bidders == 4);
    CHECK(e3.simulation.epsilon == 0.001);

    Scenario ad = load_scenario(fixture("ad3.json"));
    CHECK(ad.kind == Scenario::Kind::Ad);
    REQUIRE(ad.ad.has_value());
    CHECK(ad.ad->slot_ctrs == std::vector<double>{1.0, 0.5});
    CHECK(ad.ad->per_click_values == std::vector<Money>{10.0, 8.0, 2.0});
}

TEST_CASE("scenarios round-trip through their json form") {
    for (const char* name : {"e1.json", "e2.json", "e3.json", "e4.json"}) {
        Scenario a = load_scenario(fixture(name));
        Scenario b = parse_scenario(scenario_to_json(a), "roundtrip");
        REQUIRE(b.instance.has_value());
        CHECK(b.instance->values == a.instance->values);
        CHECK(b.bid_sets.size() == a.bid_sets.size());
        CHECK(b.simulation.epsilon == a.simulation.epsilon);
        CHECK(scenario_to_json(b) == scenario_to_json(a));
    }
    Scenario a = load_scenario(fixture("ad3.json"));
    Scenario b = parse_scenario(scenario_to_json(a), "roundtrip");
    CHECK(b.ad->slot_ctrs == a.ad->slot_ctrs);
    CHECK(scenario_to_json(b) == scenario_to_json(a));
}

TEST_CASE("parse errors carry field paths") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_scenario(text, "t.json");
            FAIL_CHECK("expected ScenarioError for ", text);
        } catch (const ScenarioError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("{", "t.json");
    expect_error("[]", "top level");
    expect_error(R"({"kind":"explicit","values":[[1]]})", "/schema_version");
    expect_error(R"({"schema_version":2,"kind":"explicit","values":[[1]]})",
                 "unsupported version");
    expect_error(R"({"schema_version":1,"kind":"banana"})", "/kind");
    expect_error(R"({"schema_version":1,"kind":"explicit"})", "/values");
    expect_error(R"({"schema_version":1,"kind":"explicit","values":[[1,2],[3]]})",
                 "/values/1");
    expect_error(R"({"schema_version":1,"kind":"explicit","values":[[1,-2]]})",
                 "negative");
    expect_error(
        R"({"schema_version":1,"kind":"explicit","values":[[1,2]],"initial_targets":[-1]})",
        "/initial_targets/0");
    expect_error(
        R"({"schema_version":1,"kind":"explicit","values":[[1,2]],"bid_sets":{"a":{"x":[[1,2]]}}})",
        "/bid_sets/a/pi");
    expect_error(
        R"({"schema_version":1,"kind":"explicit","values":[[1,2]],"bid_sets":{"a":{"pi":[-0.5]}}})",
        "/bid_sets/a/pi/0");
    expect_error(
        R"({"schema_version":1,"kind":"explicit","values":[[1,2]],"simulation":{"epsilon":0}})",
        "/simulation/epsilon");
    expect_error(
        R"({"schema_version":1,"kind":"explicit","values":[[1,2]],"simulation":{"axioms":"a9"}})",
        "/simulation/axioms");
    expect_error(R"({"schema_version":1,"kind":"ad"})", "/ad");
    expect_error(
        R"({"schema_version":1,"kind":"ad","ad":{"alpha":[0.5,1.0],"values":[1,2]}})",
        "increases");
}

TEST_CASE("cli validate") {
    CliResult ok = run({"validate", fixture("e1.json")});
    CHECK(ok.code == cli::kExitOk);
    CHECK(ok.out.find("3 bidders") != std::string::npos);
    CHECK(ok.err.empty());

    CliResult missing = run({"validate", "/definitely/not/here.json"});
    CHECK(missing.code == cli::kExitFailure);
    CHECK(missing.err.find("cannot open") != std::string::npos);
}

TEST_CASE("cli solve prints the benchmark stack for e3") {
    CliResult r = run({"solve", fixture("e3.json")});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("vcg revenue: 0.000000000") != std::string::npos);
    CHECK(r.out.find("second-price threat: 2.000000000") != std::string::npos);
    CHECK(r.out.find("egalitarian targets: 0.333333333 0.333333333 0.333333333 "
                     "0.000000000") != std::string::npos);
    CHECK(r.out.find("egalitarian equilibrium: yes") != std::string::npos);
}

TEST_CASE("cli check-cef flags the concentrated profile with exact constants") {
    CliResult r = run({"check-cef", fixture("e1.json"), "--bids", "concentrated"});
    CHECK(r.code == cli::kExitFailure);
    CHECK(r.out.find("tied outcomes: 0 2") != std::string::npos);
    CHECK(r.out.find("winning outcome: 0") != std::string::npos);
    CHECK(r.out.find("competitive: no") != std::string::npos);
    CHECK(r.out.find("violated at outcome 1: envy 3.000000000 > headroom "
                     "2.000000000") != std::string::npos);

    CliResult unknown = run({"check-cef", fixture("e1.json"), "--bids", "nope"});
    CHECK(unknown.code == cli::kExitUsage);
}

TEST_CASE("cli simulate honours the scenario defaults and exits by convergence") {
    CliResult r = run({"simulate", fixture("e3.json")});
    CHECK(r.code == cli::kExitOk);  // scenario block: eps 1e-3, egalitarian target
    CHECK(r.out.find("axioms: all") != std::string::npos);
    CHECK(r.out.find("stayed: yes") != std::string::npos);

    CliResult starved = run({"simulate", fixture("e3.json"), "--max-steps", "50"});
    CHECK(starved.code == cli::kExitNoConvergence);
}

TEST_CASE("cli simulate runs are byte-identical and write the trace") {
    std::string path_a = "/tmp/uta_trace_a.csv";
    std::string path_b = "/tmp/uta_trace_b.csv";
    CliResult a = run({"simulate", fixture("e1.json"), "--seed", "5", "--max-steps",
                       "2000", "--out", path_a});
    CliResult b = run({"simulate", fixture("e1.json"), "--seed", "5", "--max-steps",
                       "2000", "--out", path_b});
    CHECK(a.code == b.code);
    // stdout differs only in the file name it mentions
    std::ifstream fa(path_a), fb(path_b);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(!sa.str().empty());
    std::remove(path_a.c_str());
    std::remove(path_b.c_str());
}

TEST_CASE("cli ad-auction reports assignment, pricing, and the cycling probe") {
    CliResult r = run({"ad-auction", fixture("ad3.json"), "--gfp"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("assignment (slot -> bidder): 0 1") != std::string::npos);
    CHECK(r.out.find("expected revenue: 14.000000000") != std::string::npos);
    CHECK(r.out.find("gfp cycle detected") != std::string::npos);

    CliResult fixed = run({"ad-auction", fixture("ad1.json"), "--gfp"});
    CHECK(fixed.code == cli::kExitOk);
    CHECK(fixed.out.find("gfp fixed point") != std::string::npos);
    CHECK(fixed.out.find("4.900000000 4.900000000") != std::string::npos);

    CliResult wrong_kind = run({"ad-auction", fixture("e1.json")});
    CHECK(wrong_kind.code == cli::kExitUsage);
}

TEST_CASE("cli oracle-compare agrees with the analytic paths on the fixtures") {
    for (const char* name : {"e1.json", "e3.json", "e4.json"}) {
        CliResult r = run({"oracle-compare", fixture(name)});
        CAPTURE(name);
        CHECK(r.code == cli::kExitOk);
        CHECK(r.out.find("membership disagreements: 0") != std::string::npos);
    }
}

TEST_CASE("cli usage errors") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run({"solve"}).code == cli::kExitUsage);
    CHECK(run({"simulate", fixture("e1.json"), "--axioms", "a7"}).code ==
          cli::kExitUsage);
    CHECK(run({"--help"}).code == cli::kExitOk);
    CHECK(run({"--help"}).out.find("simulate") != std::string::npos);
}
