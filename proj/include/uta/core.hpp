#pragma once

// Core value types for utility-target auctions.
//
// An instance is a finite set of bidders and a finite set of abstract
// outcomes; each bidder has a nonnegative value for every outcome.  A bid is
// a claimed value vector x together with a utility-target pi: the bidder
// offers to pay x(o) - pi for outcome o, floored at zero.  Everything runs on
// 64-bit doubles with a single comparison tolerance (kTol); callers that need
// a different tie granularity pass their own.

#include <optional>
#include <string>
#include <vector>

namespace uta {

using Money = double;

// Comparison tolerance shared by every equality / tie / winner check.
inline constexpr Money kTol = 1e-9;

struct Instance {
  int num_bidders = 0;
  int num_outcomes = 0;
  // values[i][o] = bidder i's value for outcome o.
  std::vector<std::vector<Money>> values;

  static Instance from_values(std::vector<std::vector<Money>> v);

  Money value(int bidder, int outcome) const { return values[bidder][outcome]; }

  // Largest value bidder i assigns to any outcome.  Utility-targets in the
  // dynamics live in [0, cap(i)].
  Money cap(int bidder) const;

  // Sum of all bidders' values for the given outcome.
  Money welfare(int outcome) const;
};

// A bid (x, pi).  The effective offer for outcome o is max(x(o) - pi, 0).
// Construction clamps pi from above at max_o x(o): asking for more utility
// than the best claimed value is indistinguishable from asking for exactly
// that much (all offers are zero either way).  Negative pi is allowed; it
// encodes overbidding (offering more than the claimed value everywhere),
// which is what a bidder who accepted a negative utility was doing.
struct Bid {
  std::vector<Money> value_bid;  // x
  Money target = 0;              // pi

  Bid() = default;
  Bid(std::vector<Money> x, Money pi);

  Money max_value() const;
};

using BidProfile = std::vector<Bid>;

// Offer of `bid` for outcome `o`: max(x(o) - pi, 0).
Money effective_bid(const Bid& bid, int outcome);

// Truthful value report with utility-target pi_i for each bidder.
BidProfile quasi_truthful_profile(const Instance& inst,
                                  const std::vector<Money>& targets);

// Per-outcome sum of effective bids.
std::vector<Money> total_bids(const Instance& inst, const BidProfile& bids);

// Tie handling for the outcome choice: a previous winning outcome, when
// present and tied for the maximum total, is kept.  Otherwise ties go to the
// smallest outcome index.
struct TieBreakContext {
  std::optional<int> previous_winner;
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> issues;
  int optimal_outcome = -1;   // welfare argmax (smallest index on ties)
  bool unique_optimum = true; // no other outcome within kTol of the optimum
};

// Structural checks: dimensions consistent, entries finite and nonnegative,
// at least one bidder and one outcome.  Also reports the welfare-optimal
// outcome and whether it is unique.
ValidationReport validate_instance(const Instance& inst);

}  // namespace uta
