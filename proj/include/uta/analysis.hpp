#pragma once

// Static benchmarks for a fixed instance.
//
// The central object is the cooperative envy-freeness (CEF) test: a bid
// profile with winning outcome w is CEF when no outcome o satisfies
//
//   sum_i max[(v_i(o) - b_i(o)) - (v_i(w) - b_i(w)), 0]  >  sum_i [b_i(w) - b_i(o)]
//
// i.e. no coalition could gain more by switching to o than the switch costs
// in dropped bids.  CEF profiles pick a welfare-maximal outcome, charge each
// bidder at least her VCG price, and raise at least the second-price threat
// (the best total top-up losers could credibly offer for an alternative).
//
// Over quasi-truthful profiles, the utility-target vectors whose outcome is
// CEF (ties resolved toward the welfare optimum) form a set C that is closed
// under componentwise decrease; its complement is closed under increase.
// The egalitarian routine walks the C boundary lifting all targets together,
// which maximizes the sorted utility vector lexicographically.

#include "uta/auction.hpp"
#include "uta/core.hpp"

namespace uta {

struct WelfareOptimum {
  int outcome = -1;
  Money welfare = 0;
  bool unique = true;  // no other outcome within kTol
};

WelfareOptimum optimal_outcome(const Instance& inst);

struct CefViolation {
  int outcome;
  Money lhs;  // total envy toward this outcome
  Money rhs;  // total bid drop the switch would cost
};

struct CefReport {
  bool is_cef = true;
  int winning_outcome = -1;
  std::vector<CefViolation> violations;  // outcomes with lhs > rhs + kTol
  // Smallest rhs - lhs over non-winning outcomes; +inf when there are none.
  Money slack = 0;
};

CefReport is_cef(const Instance& inst, const BidProfile& bids,
                 const TieBreakContext& ctx = {});

// Membership of a utility-target vector in C: quasi-truthful bids, ties
// toward the welfare optimum, outcome CEF.
bool in_cef_set(const Instance& inst, const std::vector<Money>& targets);

// Membership in the eps-fattening of C (some point of C within eps in the
// max norm).  Because C is closed under componentwise decrease this reduces
// to testing max(pi - eps, 0).  eps must be >= 0.
bool in_cef_eps(const Instance& inst, const std::vector<Money>& targets,
                Money eps);

// Same for the complement of C, which is closed under increase: tests
// pi + eps.
bool in_ncef_eps(const Instance& inst, const std::vector<Money>& targets,
                 Money eps);

struct VcgResult {
  int optimal_outcome = -1;
  std::vector<Money> prices;  // externality each bidder imposes
  Money revenue = 0;
};

VcgResult vcg(const Instance& inst);

// max over outcomes o of sum_i max(v_i(o) - v_i(opt), 0): the strongest
// aggregate counter-offer losers could make against the optimum.
Money second_price_threat(const Instance& inst, int optimal);

struct FixEvent {
  int phase;
  Money delta;                  // uniform raise applied this phase
  std::vector<int> fixed;       // bidders frozen at the end of the phase
  std::vector<int> binding_outcomes;  // outcomes whose CEF slack hit zero
  std::vector<int> cap_hits;          // bidders that reached v_i(opt)
};

struct EgalitarianResult {
  std::vector<Money> targets;  // pi*
  std::vector<FixEvent> events;
  int optimal_outcome = -1;
  bool unique_optimum = true;  // false => results carry a tie warning
};

// Lifts all unfixed targets uniformly from zero until a bidder hits her
// value at the optimum or a CEF constraint binds, freezes the constrained
// bidders, and repeats.  Each phase finds the largest feasible raise by
// binary search to `tol`, then snaps to the nearest analytic breakpoint
// within 10*tol so rational fixtures come out exact.
EgalitarianResult egalitarian(const Instance& inst, Money tol = kTol);

struct Deviation {
  int bidder = -1;
  Money target = 0;  // deviating utility-target
  Money gain = 0;    // utility improvement over the current profile
};

struct EquilibriumReport {
  bool is_equilibrium = true;
  std::vector<Deviation> improvements;  // best found per deviating bidder
};

// Holds everyone else at the given quasi-truthful targets and scans each
// bidder's alternative targets: every piecewise-linear breakpoint of the
// totals (value kinks and total-bid crossings), probes at +-10*tol around
// each, plus a coarse safety grid.  Ties toward the welfare optimum.
EquilibriumReport check_equilibrium(const Instance& inst,
                                    const std::vector<Money>& targets,
                                    Money tol = kTol);

// Outcomes that witness bidder j's payment at a CEF target vector: tied with
// the optimum in total bid, overtaking it when j asks for 10*tol more, and
// losing j at the top utility-target level among the bidders they would
// drop.  Throws std::invalid_argument when `targets` is not in C.
std::vector<int> find_witnesses(const Instance& inst,
                                const std::vector<Money>& targets, int bidder,
                                Money tol = kTol);

struct LevelPartition {
  std::vector<std::vector<int>> levels;  // bidders grouped by target, ascending
  std::vector<Money> level_targets;      // representative target per level
  std::vector<long long> lower_factors;  // 2^(2 * #bidders below level)
  std::vector<long long> upper_factors;  // 2^(2 * #below + #at level)
  std::vector<int> bidder_level;         // level index per bidder

  int level_of(int bidder) const { return bidder_level[bidder]; }
};

// Groups bidders by egalitarian target (tol grouping) and attaches the
// per-level convergence-band factors.  The factors grow fast enough that
// each level's lower factor dominates the weighted upper factors below it;
// that ordering is validated here.
LevelPartition levels_and_bounds(const Instance& inst,
                                 const std::vector<Money>& targets,
                                 Money tol = kTol);

}  // namespace uta
