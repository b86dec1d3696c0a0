#include "uta/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace uta {

WelfareOptimum optimal_outcome(const Instance& inst) {
  if (inst.num_outcomes <= 0)
    throw std::invalid_argument("optimal_outcome: no outcomes");
  WelfareOptimum opt;
  opt.outcome = 0;
  opt.welfare = inst.welfare(0);
  for (int o = 1; o < inst.num_outcomes; ++o) {
    Money w = inst.welfare(o);
    if (w > opt.welfare + kTol) {
      opt.outcome = o;
      opt.welfare = w;
      opt.unique = true;
    } else if (w > opt.welfare - kTol) {
      opt.unique = false;
      opt.welfare = std::max(opt.welfare, w);
    }
  }
  return opt;
}

CefReport is_cef(const Instance& inst, const BidProfile& bids,
                 const TieBreakContext& ctx) {
  AuctionOutcome outcome = run_auction(inst, bids, ctx);
  CefReport report;
  report.winning_outcome = outcome.winning_outcome;
  report.slack = std::numeric_limits<Money>::infinity();

  int w = outcome.winning_outcome;
  for (int o = 0; o < inst.num_outcomes; ++o) {
    if (o == w) continue;
    Money lhs = 0, rhs = 0;
    for (int i = 0; i < inst.num_bidders; ++i) {
      Money here = inst.value(i, o) - effective_bid(bids[i], o);
      Money at_winner = inst.value(i, w) - outcome.payments[i];
      lhs += std::max(here - at_winner, 0.0);
      rhs += outcome.payments[i] - effective_bid(bids[i], o);
    }
    report.slack = std::min(report.slack, rhs - lhs);
    if (lhs > rhs + kTol) {
      report.is_cef = false;
      report.violations.push_back({o, lhs, rhs});
    }
  }
  return report;
}

bool in_cef_set(const Instance& inst, const std::vector<Money>& targets) {
  WelfareOptimum opt = optimal_outcome(inst);
  TieBreakContext ctx{opt.outcome};
  return is_cef(inst, quasi_truthful_profile(inst, targets), ctx).is_cef;
}

bool in_cef_eps(const Instance& inst, const std::vector<Money>& targets,
                Money eps) {
  if (eps < 0) throw std::invalid_argument("in_cef_eps: eps must be >= 0");
  std::vector<Money> shifted(targets);
  for (Money& t : shifted) t = std::max(t - eps, 0.0);
  return in_cef_set(inst, shifted);
}

bool in_ncef_eps(const Instance& inst, const std::vector<Money>& targets,
                 Money eps) {
  if (eps < 0) throw std::invalid_argument("in_ncef_eps: eps must be >= 0");
  std::vector<Money> shifted(targets);
  for (Money& t : shifted) t += eps;
  // Closed fattening: a profile whose +eps shift lands exactly on the
  // competitive frontier (zero slack) counts as adjacent to the
  // non-competitive region.  Strict-violation membership would drop
  // points at distance exactly eps, which step dynamics do visit when
  // the frontier is axis-aligned with the adjustment lattice.
  WelfareOptimum opt = optimal_outcome(inst);
  TieBreakContext ctx{opt.outcome};
  CefReport rep = is_cef(inst, quasi_truthful_profile(inst, shifted), ctx);
  return rep.slack <= kTol;
}

VcgResult vcg(const Instance& inst) {
  WelfareOptimum opt = optimal_outcome(inst);
  VcgResult result;
  result.optimal_outcome = opt.outcome;
  result.prices.resize(inst.num_bidders);
  for (int i = 0; i < inst.num_bidders; ++i) {
    // Best outcome for everyone else, with and without i's presence felt.
    Money best_without = -std::numeric_limits<Money>::infinity();
    for (int o = 0; o < inst.num_outcomes; ++o) {
      Money w = inst.welfare(o) - inst.value(i, o);
      best_without = std::max(best_without, w);
    }
    Money others_at_opt = inst.welfare(opt.outcome) - inst.value(i, opt.outcome);
    result.prices[i] = best_without - others_at_opt;
    result.revenue += result.prices[i];
  }
  return result;
}

Money second_price_threat(const Instance& inst, int optimal) {
  if (optimal < 0 || optimal >= inst.num_outcomes)
    throw std::out_of_range("second_price_threat: bad outcome index");
  Money best = 0;
  for (int o = 0; o < inst.num_outcomes; ++o) {
    Money sum = 0;
    for (int i = 0; i < inst.num_bidders; ++i)
      sum += std::max(inst.value(i, o) - inst.value(i, optimal), 0.0);
    best = std::max(best, sum);
  }
  return best;
}

namespace {

// Worst CEF slack of the quasi-truthful profile pi + delta restricted to the
// unfixed set, with the optimum forced as winner.  Negative slack beyond tol
// means some outcome overtakes the optimum or accumulates unpaid envy.
Money phase_slack(const Instance& inst, const std::vector<Money>& pi,
                  const std::vector<bool>& fixed, Money delta, int opt) {
  int n = inst.num_bidders;
  std::vector<Money> lifted(pi);
  for (int i = 0; i < n; ++i)
    if (!fixed[i]) lifted[i] += delta;

  Money worst = std::numeric_limits<Money>::infinity();
  for (int o = 0; o < inst.num_outcomes; ++o) {
    if (o == opt) continue;
    Money lhs = 0, rhs = 0;
    for (int i = 0; i < n; ++i) {
      Money bid_o = std::max(inst.value(i, o) - lifted[i], 0.0);
      Money bid_opt = std::max(inst.value(i, opt) - lifted[i], 0.0);
      Money here = inst.value(i, o) - bid_o;
      Money at_opt = inst.value(i, opt) - bid_opt;
      lhs += std::max(here - at_opt, 0.0);
      rhs += bid_opt - bid_o;
    }
    worst = std::min(worst, rhs - lhs);
  }
  return worst;
}

}  // namespace

EgalitarianResult egalitarian(const Instance& inst, Money tol) {
  WelfareOptimum opt = optimal_outcome(inst);
  EgalitarianResult result;
  result.optimal_outcome = opt.outcome;
  result.unique_optimum = opt.unique;

  int n = inst.num_bidders;
  std::vector<Money> pi(n, 0.0);
  std::vector<bool> fixed(n, false);
  int remaining = n;

  for (int phase = 0; remaining > 0; ++phase) {
    if (phase > n)
      throw std::logic_error("egalitarian: phase count exceeded bidder count");

    // Everyone still unfixed stops at her value for the optimum.
    Money cap_delta = std::numeric_limits<Money>::infinity();
    for (int i = 0; i < n; ++i)
      if (!fixed[i])
        cap_delta = std::min(cap_delta, inst.value(i, opt.outcome) - pi[i]);
    cap_delta = std::max(cap_delta, 0.0);

    auto feasible = [&](Money d) {
      return phase_slack(inst, pi, fixed, d, opt.outcome) >= -tol;
    };

    // The slack is non-increasing in the uniform raise, so binary search for
    // the largest feasible delta.
    Money delta = 0;
    if (cap_delta > 0 && feasible(cap_delta)) {
      delta = cap_delta;
    } else if (cap_delta > 0) {
      Money lo = 0, hi = cap_delta;
      while (hi - lo > tol) {
        Money mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
      }
      delta = lo;

      // Snap to the nearest analytic breakpoint: a kink of some offer curve,
      // the cap, or the zero of a slack segment.  Keeps rational inputs
      // producing exact targets instead of binary-search residue.
      std::vector<Money> breakpoints{cap_delta};
      for (int i = 0; i < n; ++i) {
        if (fixed[i]) continue;
        for (int o = 0; o < inst.num_outcomes; ++o) {
          Money kink = inst.value(i, o) - pi[i];
          if (kink > 0 && kink <= cap_delta) breakpoints.push_back(kink);
        }
      }
      std::vector<Money> kinks(breakpoints);
      kinks.push_back(0);
      std::sort(kinks.begin(), kinks.end());
      kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());
      for (int o = 0; o < inst.num_outcomes; ++o) {
        if (o == opt.outcome) continue;
        for (size_t k = 0; k + 1 < kinks.size(); ++k) {
          Money a = kinks[k], b = kinks[k + 1];
          auto seg_slack = [&](Money d) {
            std::vector<Money> lifted(pi);
            for (int i = 0; i < n; ++i)
              if (!fixed[i]) lifted[i] += d;
            Money lhs = 0, rhs = 0;
            for (int i = 0; i < n; ++i) {
              Money bid_o = std::max(inst.value(i, o) - lifted[i], 0.0);
              Money bid_opt = std::max(inst.value(i, opt.outcome) - lifted[i], 0.0);
              lhs += std::max((inst.value(i, o) - bid_o) -
                                  (inst.value(i, opt.outcome) - bid_opt),
                              0.0);
              rhs += bid_opt - bid_o;
            }
            return rhs - lhs;
          };
          Money sa = seg_slack(a), sb = seg_slack(b);
          if ((sa >= 0) != (sb >= 0) && std::fabs(sb - sa) > tol) {
            Money zero = a + sa * (b - a) / (sa - sb);
            if (zero >= 0 && zero <= cap_delta) breakpoints.push_back(zero);
          }
        }
      }
      Money snapped = delta;
      Money best_dist = 10 * tol;
      for (Money b : breakpoints) {
        Money dist = std::fabs(b - delta);
        if (dist <= best_dist && feasible(b)) {
          best_dist = dist;
          snapped = b;
        }
      }
      delta = snapped;
    }

    FixEvent event;
    event.phase = phase;
    event.delta = delta;
    for (int i = 0; i < n; ++i)
      if (!fixed[i]) pi[i] += delta;

    // Freeze bidders at their cap and bidders whose further raise would
    // reopen a binding constraint (their offer at the binding outcome is
    // already zero, so raising only drains the optimum's total).
    for (int i = 0; i < n; ++i)
      if (!fixed[i] && inst.value(i, opt.outcome) - pi[i] <= tol)
        event.cap_hits.push_back(i);

    std::vector<Money> lifted(pi);
    std::set<int> to_fix(event.cap_hits.begin(), event.cap_hits.end());
    for (int o = 0; o < inst.num_outcomes; ++o) {
      if (o == opt.outcome) continue;
      Money lhs = 0, rhs = 0;
      for (int i = 0; i < n; ++i) {
        Money bid_o = std::max(inst.value(i, o) - lifted[i], 0.0);
        Money bid_opt = std::max(inst.value(i, opt.outcome) - lifted[i], 0.0);
        lhs += std::max((inst.value(i, o) - bid_o) -
                            (inst.value(i, opt.outcome) - bid_opt),
                        0.0);
        rhs += bid_opt - bid_o;
      }
      if (rhs - lhs <= 10 * tol) {
        event.binding_outcomes.push_back(o);
        for (int i = 0; i < n; ++i)
          if (!fixed[i] && pi[i] >= inst.value(i, o) - tol) to_fix.insert(i);
      }
    }

    if (to_fix.empty())
      throw std::logic_error("egalitarian: phase fixed no bidder");
    for (int i : to_fix) {
      fixed[i] = true;
      --remaining;
      event.fixed.push_back(i);
    }
    result.events.push_back(std::move(event));
  }

  result.targets = std::move(pi);
  return result;
}

namespace {

// Utility bidder i nets from target t while everyone else stays put.
Money deviation_utility(const Instance& inst, std::vector<Money> targets,
                        int bidder, Money t, const TieBreakContext& ctx) {
  targets[bidder] = t;
  AuctionOutcome out = run_auction(inst, quasi_truthful_profile(inst, targets), ctx);
  return out.utilities[bidder];
}

}  // namespace

EquilibriumReport check_equilibrium(const Instance& inst,
                                    const std::vector<Money>& targets,
                                    Money tol) {
  WelfareOptimum opt = optimal_outcome(inst);
  TieBreakContext ctx{opt.outcome};
  AuctionOutcome base = run_auction(inst, quasi_truthful_profile(inst, targets), ctx);

  EquilibriumReport report;
  for (int i = 0; i < inst.num_bidders; ++i) {
    Money cap = inst.cap(i);

    // Others' totals; the outcome landscape as i's target moves is piecewise
    // linear with kinks at her values and crossings offset by total gaps.
    std::vector<Money> others(inst.num_outcomes, 0.0);
    for (int o = 0; o < inst.num_outcomes; ++o) {
      for (int j = 0; j < inst.num_bidders; ++j) {
        if (j == i) continue;
        others[o] += std::max(inst.value(j, o) - targets[j], 0.0);
      }
    }

    std::vector<Money> candidates{0.0, cap, targets[i]};
    for (int o = 0; o < inst.num_outcomes; ++o) {
      candidates.push_back(inst.value(i, o));
      for (int p = 0; p < inst.num_outcomes; ++p)
        candidates.push_back(inst.value(i, o) - (others[p] - others[o]));
    }
    const int kSafetyGrid = 33;
    for (int g = 0; g <= kSafetyGrid; ++g)
      candidates.push_back(cap * g / kSafetyGrid);

    std::vector<Money> scan;
    for (Money c : candidates)
      for (Money off : {-10 * tol, 0.0, 10 * tol}) {
        Money t = std::min(std::max(c + off, 0.0), cap);
        scan.push_back(t);
      }
    std::sort(scan.begin(), scan.end());
    scan.erase(std::unique(scan.begin(), scan.end()), scan.end());

    Deviation best{i, targets[i], 0.0};
    for (Money t : scan) {
      Money gain = deviation_utility(inst, targets, i, t, ctx) - base.utilities[i];
      if (gain > best.gain) best = {i, t, gain};
    }
    if (best.gain > tol) {
      report.is_equilibrium = false;
      report.improvements.push_back(best);
    }
  }
  return report;
}

std::vector<int> find_witnesses(const Instance& inst,
                                const std::vector<Money>& targets, int bidder,
                                Money tol) {
  if (!in_cef_set(inst, targets))
    throw std::invalid_argument("find_witnesses: targets are not CEF");

  WelfareOptimum opt = optimal_outcome(inst);
  std::vector<Money> totals =
      total_bids(inst, quasi_truthful_profile(inst, targets));

  std::vector<Money> probe_targets(targets);
  probe_targets[bidder] += 10 * tol;
  std::vector<Money> probed =
      total_bids(inst, quasi_truthful_profile(inst, probe_targets));

  LevelPartition levels = levels_and_bounds(inst, targets, tol);

  std::vector<int> witnesses;
  for (int o = 0; o < inst.num_outcomes; ++o) {
    if (o == opt.outcome) continue;
    if (std::fabs(totals[o] - totals[opt.outcome]) > tol) continue;
    if (probed[o] <= probed[opt.outcome] + tol) continue;

    // Bidders who end up short of their target if o wins.
    std::vector<int> losers;
    for (int i = 0; i < inst.num_bidders; ++i)
      if (targets[i] - inst.value(i, o) > tol) losers.push_back(i);
    if (std::find(losers.begin(), losers.end(), bidder) == losers.end())
      continue;
    int top = -1;
    for (int i : losers) top = std::max(top, levels.level_of(i));
    if (levels.level_of(bidder) == top) witnesses.push_back(o);
  }
  return witnesses;
}

LevelPartition levels_and_bounds(const Instance& inst,
                                 const std::vector<Money>& targets,
                                 Money tol) {
  if (static_cast<int>(targets.size()) != inst.num_bidders)
    throw std::invalid_argument("levels_and_bounds: target count != bidders");
  LevelPartition part;
  part.bidder_level.assign(inst.num_bidders, -1);

  std::vector<int> order(inst.num_bidders);
  for (int i = 0; i < inst.num_bidders; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (targets[a] != targets[b]) return targets[a] < targets[b];
    return a < b;
  });

  for (int i : order) {
    if (!part.levels.empty() &&
        targets[i] - part.level_targets.back() <= tol) {
      part.levels.back().push_back(i);
    } else {
      part.levels.push_back({i});
      part.level_targets.push_back(targets[i]);
    }
    part.bidder_level[i] = static_cast<int>(part.levels.size()) - 1;
  }

  long long below = 0;
  for (const auto& level : part.levels) {
    long long size = static_cast<long long>(level.size());
    if (2 * below + size > 62)
      throw std::length_error("levels_and_bounds: factors overflow past 31 bidders");
    part.lower_factors.push_back(1LL << (2 * below));
    part.upper_factors.push_back(1LL << (2 * below + size));
    below += size;
  }

  // Each level's lower factor must dominate the weighted upper factors below
  // it, and its upper factor the weighted lower factors up to it; the
  // doubling construction guarantees both.
  long long upper_acc = 0, lower_acc = 0;
  for (size_t k = 0; k < part.levels.size(); ++k) {
    long long size = static_cast<long long>(part.levels[k].size());
    if (part.lower_factors[k] <= upper_acc)
      throw std::logic_error("levels_and_bounds: factor ordering broken");
    lower_acc += size * part.lower_factors[k];
    if (part.upper_factors[k] <= lower_acc)
      throw std::logic_error("levels_and_bounds: factor ordering broken");
    upper_acc += size * part.upper_factors[k];
  }
  return part;
}

}  // namespace uta
