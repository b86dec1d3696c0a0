#pragma once

// The auction itself: pick the outcome with the highest total effective bid,
// charge every bidder her own effective bid for that outcome (pay-your-bid).
//
// A bidder is a *winner* when she got exactly the utility she asked for
// (utility == pi within kTol) and a *loser* otherwise; losers always end up
// strictly below their target.

#include "uta/core.hpp"

namespace uta {

struct AuctionOutcome {
  int winning_outcome = -1;
  std::vector<int> tied_outcomes;  // all outcomes within kTol of the max total
  std::vector<Money> totals;       // per outcome
  std::vector<Money> payments;     // per bidder, = effective bid at the winner
  std::vector<Money> utilities;    // per bidder, = value at winner - payment
  std::vector<bool> is_winner;     // per bidder, utility == target within kTol
};

// Runs one auction round.  Ties for the maximum total go to
// ctx.previous_winner when it is among the tied outcomes, else to the
// smallest tied index.
AuctionOutcome run_auction(const Instance& inst, const BidProfile& bids,
                           const TieBreakContext& ctx = {});

// Winner flags for an already-computed outcome (same rule as
// AuctionOutcome::is_winner; kept as a separate entry point so callers can
// classify hypothetical outcomes).
std::vector<bool> classify_bidders(const Instance& inst, const BidProfile& bids,
                                   const AuctionOutcome& outcome);

// The bid (v_i, u_i) where u_i is bidder i's utility under the current
// profile.  Re-running the auction with this substituted bid (ties broken by
// the fixed index order) yields exactly u_i again: honest values plus the
// achieved utility as target reproduce any bid's result.
Bid quasi_truthful_equivalent(const Instance& inst, int bidder,
                              const BidProfile& bids,
                              const TieBreakContext& ctx = {});

}  // namespace uta
