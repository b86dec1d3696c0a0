#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "uta/analysis.hpp"
#include "uta/dynamics.hpp"

using namespace uta;

namespace {

Instance trio() {
    return Instance::from_values({{1.0, 1.5, 0.0}, {1.0, 1.5, 0.0}, {0.0, 0.0, 2.0}});
}

Instance three_vs_one() {
    return Instance::from_values({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}});
}

Instance duel() {
    return Instance::from_values({{10.0, 0.0}, {0.0, 5.0}});
}

std::vector<Money> caps_of(const Instance& inst) {
    std::vector<Money> caps(inst.num_bidders);
    for (int i = 0; i < inst.num_bidders; ++i) caps[i] = inst.cap(i);
    return caps;
}

SimConfig config(AxiomSet axioms, ConvergenceTarget target, Money eps = 0.01) {
    SimConfig cfg;
    cfg.axioms = axioms;
    cfg.target = target;
    cfg.epsilon = eps;
    return cfg;
}

}  // namespace

TEST_CASE("default budget scales with caps over epsilon") {
    Instance inst = three_vs_one();
    // 10 * 4 bidders * (3 * 1000 + 2000) steps at eps = 1e-3
    CHECK(default_max_steps(inst, 0.001) == 200000);
    CHECK(default_max_steps(duel(), 0.5) == 2 * 10 * (20 + 10));
}

TEST_CASE("make_sim_state clamps and seeds the previous winner") {
    Instance inst = duel();
    SimConfig cfg = config(AxiomSet::All, ConvergenceTarget::CefEps);
    SimState st = make_sim_state(inst, {-3.0, 99.0}, cfg);
    CHECK(st.targets == std::vector<Money>{0.0, 5.0});
    REQUIRE(st.previous_winner.has_value());
    CHECK(*st.previous_winner == 0);  // totals (10, 0)
    CHECK(st.step == 0);
}

TEST_CASE("movers: losers first, steady only without A3") {
    Instance inst = duel();
    SimConfig cfg = config(AxiomSet::A1A2, ConvergenceTarget::CefEps, 0.5);

    SimState all_win = make_sim_state(inst, {0.0, 0.0}, cfg);
    CHECK(!next_mover(all_win, inst, cfg).has_value());  // everyone satisfied

    SimConfig with_a3 = config(AxiomSet::A1A2A3, ConvergenceTarget::CefEps, 0.5);
    SimState probing = make_sim_state(inst, {0.0, 0.0}, with_a3);
    auto mv = next_mover(probing, inst, with_a3);
    REQUIRE(mv.has_value());
    CHECK(mv->second == Direction::Lower);

    // bidder 1 cannot reach her 5 while bidder 0 asks for nothing
    SimState losing = make_sim_state(inst, {0.0, 5.0}, cfg);
    auto lose_mv = next_mover(losing, inst, cfg);
    REQUIRE(lose_mv.has_value());
    CHECK(lose_mv->first == 1);
    CHECK(lose_mv->second == Direction::Raise);
}

TEST_CASE("the max-target loser moves first under the full axiom set") {
    Instance inst = three_vs_one();
    SimConfig cfg = config(AxiomSet::All, ConvergenceTarget::Egalitarian, 0.01);
    // outcome 0 wins; only the loner misses her target
    SimState st = make_sim_state(inst, {0.9, 0.8, 0.7, 1.9}, cfg);
    auto mv = next_mover(st, inst, cfg);
    REQUIRE(mv.has_value());
    CHECK(mv->first == 3);
    CHECK(mv->second == Direction::Raise);

    // outcome 1 wins, the whole trio loses at the same target:
    // ties among max-target losers break toward the lowest index
    SimState tied = make_sim_state(inst, {0.5, 0.5, 0.5, 0.0}, cfg);
    REQUIRE(*tied.previous_winner == 1);  // totals (1.5, 2)
    auto tied_mv = next_mover(tied, inst, cfg);
    REQUIRE(tied_mv.has_value());
    CHECK(tied_mv->first == 0);
    CHECK(tied_mv->second == Direction::Raise);
}

TEST_CASE("apply_move clamps at zero and at the cap") {
    Instance inst = duel();
    SimConfig cfg = config(AxiomSet::All, ConvergenceTarget::CefEps, 0.75);
    SimState st = make_sim_state(inst, {0.5, 5.0}, cfg);
    apply_move(st, inst, 0, Direction::Raise, cfg);
    CHECK(st.targets[0] == 0.0);  // 0.5 - 0.75 floors at 0
    apply_move(st, inst, 1, Direction::Lower, cfg);
    CHECK(st.targets[1] == 5.0);  // already at the cap
    CHECK(st.step == 2);
}

TEST_CASE("A1+A2 from caps: all raises, steady finish, competitive entry") {
    Instance inst = duel();
    SimConfig cfg = config(AxiomSet::A1A2, ConvergenceTarget::CefEps, 0.5);
    auto [trace, rep] = simulate(inst, caps_of(inst), cfg);

    CHECK(trace.halted_steady);
    for (const auto& ev : trace.events) CHECK(ev.direction == Direction::Raise);
    CHECK(rep.final_targets[0] == doctest::Approx(5.0));
    CHECK(rep.final_targets[1] == doctest::Approx(0.0));
    REQUIRE(rep.entered_at_step.has_value());
    CHECK(rep.stayed);
    REQUIRE(rep.first_all_winners_step.has_value());
    CHECK(*rep.first_all_winners_step <= rep.all_winners_bound);
    CHECK(rep.all_winners_bound == 30);  // 20 + 10 raises at most
}

TEST_CASE("A1+A3 from caps enters the complement fattening and remains") {
    for (const Instance& inst : {trio(), three_vs_one(), duel()}) {
        SimConfig cfg = config(AxiomSet::A1A3, ConvergenceTarget::NcefEps, 0.01);
        cfg.max_steps = 20000;
        auto [trace, rep] = simulate(inst, caps_of(inst), cfg);
        CAPTURE(inst.num_bidders);
        CHECK(!trace.halted_steady);  // A3 keeps probing forever
        REQUIRE(rep.entered_at_step.has_value());
        CHECK(rep.stayed);
    }
}

TEST_CASE("a1+a2+a3 stays on the eps-boundary after entry") {
    for (const Instance& inst : {trio(), three_vs_one(), duel()}) {
        SimConfig cfg = config(AxiomSet::A1A2A3, ConvergenceTarget::Boundary, 0.01);
        cfg.max_steps = 20000;
        auto [trace, rep] = simulate(inst, caps_of(inst), cfg);
        REQUIRE(rep.entered_at_step.has_value());
        CHECK(rep.stayed);
    }
}

TEST_CASE("full axioms land every target inside the egalitarian bands") {
    for (const Instance& inst : {trio(), three_vs_one(), duel()}) {
        SimConfig cfg = config(AxiomSet::All, ConvergenceTarget::Egalitarian, 0.001);
        auto [trace, rep] = simulate(inst, caps_of(inst), cfg);
        REQUIRE(rep.entered_at_step.has_value());
        CHECK(rep.stayed);

        EgalitarianResult eg = egalitarian(inst);
        LevelPartition lp = levels_and_bounds(inst, eg.targets);
        for (int j = 0; j < inst.num_bidders; ++j) {
            int level = lp.level_of(j);
            CHECK(rep.band_lo[j] == doctest::Approx(
                      eg.targets[j] - cfg.epsilon * lp.lower_factors[level]));
            CHECK(rep.band_hi[j] == doctest::Approx(
                      eg.targets[j] + cfg.epsilon * lp.upper_factors[level]));
            CHECK(rep.final_targets[j] >= rep.band_lo[j] - kTol);
            CHECK(rep.final_targets[j] <= rep.band_hi[j] + kTol);
        }
    }
}

TEST_CASE("the all-winners bound holds for arbitrary starts") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Instance inst = trial % 2 ? trio() : three_vs_one();
        std::vector<Money> start(inst.num_bidders);
        for (int i = 0; i < inst.num_bidders; ++i) start[i] = frac(rng) * inst.cap(i);
        SimConfig cfg = config(AxiomSet::A1A2, ConvergenceTarget::CefEps, 0.01);
        cfg.seed = trial;
        auto [trace, rep] = simulate(inst, start, cfg);
        REQUIRE(rep.first_all_winners_step.has_value());
        CHECK(*rep.first_all_winners_step <= rep.all_winners_bound);
    }
}

TEST_CASE("identical configurations replay byte-identically") {
    Instance inst = three_vs_one();
    SimConfig cfg = config(AxiomSet::A1A2A3, ConvergenceTarget::Boundary, 0.01);
    cfg.winner_policy = WinnerPolicy::SeededRandom;
    cfg.seed = 77;
    cfg.max_steps = 5000;

    std::ostringstream a, b;
    auto [trace_a, rep_a] = simulate(inst, caps_of(inst), cfg);
    auto [trace_b, rep_b] = simulate(inst, caps_of(inst), cfg);
    write_trace_csv(a, trace_a);
    write_trace_csv(b, trace_b);
    CHECK(a.str() == b.str());
    CHECK(!a.str().empty());

    std::ostringstream ja, jb;
    write_trace_json(ja, trace_a);
    write_trace_json(jb, trace_b);
    CHECK(ja.str() == jb.str());
}

TEST_CASE("different seeds usually pick different loser orders") {
    Instance inst = three_vs_one();
    SimConfig cfg = config(AxiomSet::A1A2A3, ConvergenceTarget::Boundary, 0.01);
    cfg.max_steps = 300;
    cfg.seed = 1;
    auto [trace_a, rep_a] = simulate(inst, caps_of(inst), cfg);
    cfg.seed = 2;
    auto [trace_b, rep_b] = simulate(inst, caps_of(inst), cfg);
    REQUIRE(trace_a.events.size() == trace_b.events.size());
    bool any_diff = false;
    for (std::size_t k = 0; k < trace_a.events.size(); ++k)
        if (trace_a.events[k].mover != trace_b.events[k].mover) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("trace csv carries the documented schema") {
    Instance inst = duel();
    SimConfig cfg = config(AxiomSet::A1A2, ConvergenceTarget::CefEps, 0.5);
    auto [trace, rep] = simulate(inst, caps_of(inst), cfg);
    std::ostringstream os;
    write_trace_csv(os, trace);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "step,mover,direction,pi_0,pi_1,winner,cef_flag");
    REQUIRE(std::getline(is, line));
    CHECK(line.substr(0, 2) == "0,");
    CHECK(line.find("raise") != std::string::npos);
    std::size_t rows = 1;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == trace.events.size());
}

TEST_CASE("degenerate instance: targets pin to the caps on the frontier") {
    Instance inst = Instance::from_values({{10.0, 0.0}, {0.0, 0.0}});
    REQUIRE(in_cef_set(inst, caps_of(inst)));  // nobody competes with outcome 0
    SimConfig cfg = config(AxiomSet::A1A3, ConvergenceTarget::NcefEps, 0.01);
    cfg.max_steps = 2000;
    auto [trace, rep] = simulate(inst, caps_of(inst), cfg);
    // With every effective bid at zero the caps sit exactly on the frontier
    // of the competitive set, so the pinned orbit counts as adjacent to the
    // complement for the whole run.
    REQUIRE(rep.entered_at_step.has_value());
    CHECK(*rep.entered_at_step == 0);
    CHECK(rep.stayed);
    for (int i = 0; i < inst.num_bidders; ++i)
        CHECK(std::abs(rep.final_targets[i] - inst.cap(i)) <= cfg.epsilon + kTol);
}
