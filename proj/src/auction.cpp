#include "uta/auction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uta {

AuctionOutcome run_auction(const Instance& inst, const BidProfile& bids,
                           const TieBreakContext& ctx) {
  AuctionOutcome result;
  result.totals = total_bids(inst, bids);
  if (result.totals.empty())
    throw std::invalid_argument("run_auction: instance has no outcomes");

  Money best = *std::max_element(result.totals.begin(), result.totals.end());
  for (int o = 0; o < inst.num_outcomes; ++o)
    if (result.totals[o] >= best - kTol) result.tied_outcomes.push_back(o);

  result.winning_outcome = result.tied_outcomes.front();
  if (ctx.previous_winner) {
    int prev = *ctx.previous_winner;
    if (std::find(result.tied_outcomes.begin(), result.tied_outcomes.end(),
                  prev) != result.tied_outcomes.end())
      result.winning_outcome = prev;
  }

  int w = result.winning_outcome;
  result.payments.resize(inst.num_bidders);
  result.utilities.resize(inst.num_bidders);
  for (int i = 0; i < inst.num_bidders; ++i) {
    result.payments[i] = effective_bid(bids[i], w);
    result.utilities[i] = inst.value(i, w) - result.payments[i];
  }
  result.is_winner = classify_bidders(inst, bids, result);
  return result;
}

std::vector<bool> classify_bidders(const Instance& inst, const BidProfile& bids,
                                   const AuctionOutcome& outcome) {
  std::vector<bool> winner(inst.num_bidders);
  for (int i = 0; i < inst.num_bidders; ++i)
    winner[i] = std::fabs(outcome.utilities[i] - bids[i].target) <= kTol;
  return winner;
}

Bid quasi_truthful_equivalent(const Instance& inst, int bidder,
                              const BidProfile& bids,
                              const TieBreakContext& ctx) {
  if (bidder < 0 || bidder >= inst.num_bidders)
    throw std::out_of_range("quasi_truthful_equivalent: bad bidder index");
  AuctionOutcome outcome = run_auction(inst, bids, ctx);
  // Honest values with the achieved utility as the target.  The offer at the
  // current winner is unchanged (v - u = payment there), so the outcome can
  // only move somewhere this bidder now values above u, which again nets u.
  return Bid(inst.values[bidder], outcome.utilities[bidder]);
}

}  // namespace uta
