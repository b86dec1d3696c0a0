#pragma once

// Repeated-auction bidder dynamics over quasi-truthful bids.
//
// Behaviour is generated from a small axiom menu:
//   A1  a loser raises her effective bid (target down by eps), never lowers;
//       a winner never raises.
//   A2  losers move before winners.
//   A3  winners keep probing for a cheaper win (target up by eps).
//   A4  among losers, the one with the highest target moves first.
// The scheduler always gives losers priority (A2's discipline is compatible
// with every supported axiom set).  Without A4 the mover among losers is a
// seeded-random draw.  When everyone is winning: with A3 a winner is picked
// by policy (round-robin or seeded-random); without A3 the state is steady
// and the run halts.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "uta/analysis.hpp"
#include "uta/core.hpp"

namespace uta {

enum class AxiomSet { A1A2, A1A3, A1A2A3, All };
enum class WinnerPolicy { RoundRobin, SeededRandom };
enum class ConvergenceTarget { CefEps, NcefEps, Boundary, Egalitarian };
enum class Direction { Raise, Lower };

struct SimConfig {
  Money epsilon = 0.01;
  // < 0 => default budget 10 * n * sum_i ceil(cap_i / epsilon).
  long long max_steps = -1;
  std::uint64_t seed = 0;
  AxiomSet axioms = AxiomSet::All;
  WinnerPolicy winner_policy = WinnerPolicy::RoundRobin;
  ConvergenceTarget target = ConvergenceTarget::Egalitarian;
};

long long default_max_steps(const Instance& inst, Money epsilon);

struct SimState {
  std::vector<Money> targets;
  std::optional<int> previous_winner;
  long long step = 0;
  int round_robin_cursor = 0;
  // Lives here so identical (config, initial state) replays byte-identically.
  std::mt19937_64 rng;
};

// Clamps the initial targets into [0, cap], seeds the RNG, and runs the
// opening classification auction so previous_winner starts populated.
SimState make_sim_state(const Instance& inst, std::vector<Money> initial,
                        const SimConfig& cfg);

// Chooses the next mover and direction from the current classification
// (most-recent-winner tie-breaking).  Advances state.rng when the choice is
// randomized and the cursor when round-robin; nothing else changes.
// Returns nullopt when all bidders win and A3 is absent (steady state).
std::optional<std::pair<int, Direction>> next_mover(SimState& state,
                                                    const Instance& inst,
                                                    const SimConfig& cfg);

// One eps move with clamping: raises stop at 0, lowers stop at cap(i).
// Re-runs the auction, updates previous_winner, increments step.
void apply_move(SimState& state, const Instance& inst, int mover,
                Direction dir, const SimConfig& cfg);

struct TraceEvent {
  long long step;
  int mover;
  Direction direction;
  int winner_before;
  int winner_after;
  std::vector<Money> targets;   // post-move
  std::vector<bool> is_winner;  // post-move classification
  bool in_cef;                  // post-move membership in C
};

struct Trace {
  std::vector<Money> initial_targets;
  bool initial_all_winners = false;
  std::vector<TraceEvent> events;
  bool halted_steady = false;  // stopped early: all winners, no A3
};

struct ConvergenceReport {
  ConvergenceTarget target;
  Money epsilon = 0;
  std::optional<long long> entered_at_step;  // first event inside the target set
  bool stayed = false;  // every event after entry is inside too
  std::optional<long long> first_all_winners_step;
  long long all_winners_bound = 0;  // sum_i ceil(pi0_i / eps)
  std::vector<Money> final_targets;
  // Per-bidder bands for the egalitarian target: pi*_j -+ eps * level factor.
  std::vector<Money> band_lo, band_hi;
};

ConvergenceReport check_convergence(const Trace& trace, const Instance& inst,
                                    const SimConfig& cfg,
                                    const EgalitarianResult* egal = nullptr);

// Runs the scheduler for up to max_steps moves (or until steady) and scores
// the trace against the configured convergence target.
std::pair<Trace, ConvergenceReport> simulate(const Instance& inst,
                                             std::vector<Money> initial,
                                             const SimConfig& cfg);

// CSV schema: step,mover,direction,pi_0..pi_{n-1},winner,cef_flag; one row
// per event, direction in {raise,lower}, cef_flag in {1,0}.  Values print at
// 9 decimals; identical runs serialize byte-identically.
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_json(std::ostream& out, const Trace& trace);

}  // namespace uta
