#pragma once

// Sponsored-search instantiation: m slots with click-through rates
// alpha_1 >= ... >= alpha_m, n bidders with quality beta_i, per-click values
// v_i and per-click bids (x_i, pi_i).  Clicks factor as alpha_j * beta_i, so
// bidder i in slot j yields expected payment max(alpha_j beta_i x_i - pi_i, 0)
// and the auctioneer's problem is a max-weight injective assignment.
//
// Two per-click pricings realize those expected payments:
//   slot-priced  ppc_i = max(0, x_i - pi_i / (alpha_j beta_i)), no rebate;
//   rebate       ppc_i = x_i with a lump rebate r_i = pi_i (zero-payment
//                bidders pay and receive nothing).
//
// The generalized first-price (GFP) comparison ranks by beta_i * x_i, pays
// bid per click, and lets scheduled bidders grid best-respond; with several
// slots this famously never settles.

#include <cstdint>
#include <string>
#include <vector>

#include "uta/core.hpp"

namespace uta {

struct AdSetting {
  std::vector<double> slot_ctrs;        // alpha, nonincreasing, in (0, 1]
  std::vector<double> quality;          // beta, positive, one per bidder
  std::vector<Money> per_click_values;  // v
  std::vector<Money> value_bids;        // x (defaults to v)
  std::vector<Money> targets;           // pi (defaults to 0)

  int num_slots() const { return static_cast<int>(slot_ctrs.size()); }
  int num_bidders() const { return static_cast<int>(quality.size()); }
};

ValidationReport validate_ad_setting(const AdSetting& setting);

Money expected_payment(const AdSetting& setting, int bidder, int slot);

struct Assignment {
  std::vector<int> slot_of;  // per bidder; -1 = unassigned
  std::vector<Money> expected_payments;
  Money total = 0;
};

// Exact maximizer of total expected payment over injective partial
// assignments.  Zero-payment pairs are never assigned, so bidders the prices
// shut out come back unassigned; among maximizers the slot-by-slot
// lexicographically smallest assignment wins (slot 0's bidder minimized
// first, "empty" ordered after all bidders).
Assignment optimal_assignment(const AdSetting& setting);

enum class PricingScheme { SlotPriced, Rebate };

struct PricingResult {
  PricingScheme scheme;
  std::vector<Money> ppc;     // per-click price per bidder
  std::vector<Money> rebate;  // lump transfer back to the bidder
};

PricingResult price_assignment(const AdSetting& setting,
                               const Assignment& assignment,
                               PricingScheme scheme);

// Compiles the setting into an explicit instance with one outcome per
// injective partial assignment (the empty assignment is outcome 0); bidder
// i's value for an outcome is alpha_j beta_i v_i when assigned slot j, else
// 0.  Throws std::length_error with the count when the outcome space
// exceeds max_outcomes.
Instance to_explicit_instance(const AdSetting& setting,
                              long long max_outcomes = 100000);

// Number of outcomes to_explicit_instance would produce.
long long count_injective_assignments(int slots, int bidders);

struct GfpState {
  std::vector<Money> bids;  // per-click, grid multiples of eps
  int next_mover = 0;       // round-robin cursor
};

// One scheduled best response on the eps grid [0, v_i]: if the current bid
// already attains the best achievable utility the bidder stays put,
// otherwise she moves to the lowest maximizing bid.
GfpState gfp_step(const AdSetting& setting, GfpState state, Money eps);

struct GfpEvent {
  long long step;
  int mover;
  std::vector<Money> bids;  // post-move
  int top_bidder;           // rank-1 bidder after the move
  bool revisit;             // state seen before
};

struct GfpRun {
  std::vector<Money> initial_bids;
  std::vector<GfpEvent> events;
  bool cycled = false;
  long long revisit_step = -1;     // step whose post-state repeated an old one
  long long first_seen_step = -1;  // the earlier occurrence
  bool fixed_point = false;        // a full round moved nobody
  long long fixed_point_step = -1;
};

// Round-robin best responses from the given start (defaults to all-zero
// bids) until a fixed point, a state revisit, or max_steps.
GfpRun gfp_best_response_run(const AdSetting& setting, Money eps,
                             long long max_steps,
                             const std::vector<Money>* start = nullptr);

// CSV with the dynamics trace shape: step,mover,direction,bid_0..bid_{n-1},
// winner,cycle_flag (winner = top-ranked bidder, cycle_flag marks revisits).
void write_gfp_csv(std::ostream& out, const GfpRun& run);

}  // namespace uta
