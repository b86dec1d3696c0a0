#include "uta/ad_auction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace uta {

ValidationReport validate_ad_setting(const AdSetting& setting) {
  ValidationReport report;
  auto flag = [&](std::string msg) {
    report.valid = false;
    report.issues.push_back(std::move(msg));
  };

  int m = setting.num_slots(), n = setting.num_bidders();
  if (m <= 0) flag("no slots");
  if (n <= 0) flag("no bidders");
  if (m > n) flag("more slots than bidders");
  for (int j = 0; j < m; ++j) {
    double a = setting.slot_ctrs[j];
    if (!(a > 0) || a > 1)
      flag("slot_ctrs[" + std::to_string(j) + "] outside (0, 1]");
    if (j > 0 && a > setting.slot_ctrs[j - 1] + kTol)
      flag("slot_ctrs[" + std::to_string(j) + "] increases");
  }
  for (int i = 0; i < n; ++i)
    if (!(setting.quality[i] > 0))
      flag("quality[" + std::to_string(i) + "] not positive");

  auto check_len = [&](const std::vector<Money>& v, const char* what,
                       bool required) {
    if (v.empty() && !required) return;
    if (static_cast<int>(v.size()) != n)
      flag(std::string(what) + " has " + std::to_string(v.size()) +
           " entries, expected " + std::to_string(n));
  };
  check_len(setting.per_click_values, "per_click_values", true);
  check_len(setting.value_bids, "value_bids", false);
  check_len(setting.targets, "targets", false);
  for (size_t i = 0; i < setting.per_click_values.size(); ++i)
    if (!std::isfinite(setting.per_click_values[i]) ||
        setting.per_click_values[i] < 0)
      flag("per_click_values[" + std::to_string(i) + "] invalid");
  return report;
}

namespace {

Money bid_x(const AdSetting& s, int i) {
  return s.value_bids.empty() ? s.per_click_values[i] : s.value_bids[i];
}

Money bid_pi(const AdSetting& s, int i) {
  return s.targets.empty() ? 0.0 : s.targets[i];
}

}  // namespace

Money expected_payment(const AdSetting& setting, int bidder, int slot) {
  if (bidder < 0 || bidder >= setting.num_bidders() || slot < 0 ||
      slot >= setting.num_slots())
    throw std::out_of_range("expected_payment: bad bidder or slot");
  double ctr = setting.slot_ctrs[slot] * setting.quality[bidder];
  return std::max(ctr * bid_x(setting, bidder) - bid_pi(setting, bidder), 0.0);
}

namespace {

// DFS over slots in order, trying bidders 0..n-1 then "leave empty"; the
// first maximum found is the lexicographically smallest one.  Zero-payment
// pairs are skipped, which is what leaves priced-out bidders unassigned.
struct AssignmentSearch {
  const AdSetting& setting;
  int n, m;
  std::vector<int> bidder_of_slot, best;
  std::vector<bool> used;
  Money best_total = -1;

  explicit AssignmentSearch(const AdSetting& s)
      : setting(s), n(s.num_bidders()), m(s.num_slots()),
        bidder_of_slot(m, -1), best(m, -1), used(n, false) {}

  void dfs(int slot, Money total) {
    if (slot == m) {
      if (total > best_total + kTol) {
        best_total = total;
        best = bidder_of_slot;
      }
      return;
    }
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      Money w = expected_payment(setting, i, slot);
      if (w <= 0) continue;
      used[i] = true;
      bidder_of_slot[slot] = i;
      dfs(slot + 1, total + w);
      bidder_of_slot[slot] = -1;
      used[i] = false;
    }
    dfs(slot + 1, total);  // slot stays empty
  }
};

}  // namespace

Assignment optimal_assignment(const AdSetting& setting) {
  ValidationReport v = validate_ad_setting(setting);
  if (!v.valid)
    throw std::invalid_argument("optimal_assignment: " + v.issues.front());

  AssignmentSearch search(setting);
  search.dfs(0, 0.0);

  Assignment result;
  result.slot_of.assign(setting.num_bidders(), -1);
  result.expected_payments.assign(setting.num_bidders(), 0.0);
  for (int j = 0; j < setting.num_slots(); ++j) {
    int i = search.best[j];
    if (i < 0) continue;
    result.slot_of[i] = j;
    result.expected_payments[i] = expected_payment(setting, i, j);
    result.total += result.expected_payments[i];
  }
  return result;
}

PricingResult price_assignment(const AdSetting& setting,
                               const Assignment& assignment,
                               PricingScheme scheme) {
  int n = setting.num_bidders();
  PricingResult result;
  result.scheme = scheme;
  result.ppc.assign(n, 0.0);
  result.rebate.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    int j = assignment.slot_of[i];
    if (j < 0) continue;
    double ctr = setting.slot_ctrs[j] * setting.quality[i];
    Money expected = expected_payment(setting, i, j);
    if (scheme == PricingScheme::SlotPriced) {
      result.ppc[i] = std::max(bid_x(setting, i) - bid_pi(setting, i) / ctr, 0.0);
    } else if (expected > 0) {
      // Pay the full per-click bid, get the utility-target back as a lump.
      result.ppc[i] = bid_x(setting, i);
      result.rebate[i] = bid_pi(setting, i);
    }
  }
  return result;
}

long long count_injective_assignments(int slots, int bidders) {
  // sum over k of C(slots, k) * bidders!/(bidders-k)!
  long long total = 0;
  long long choose = 1;  // C(slots, k)
  long long perm = 1;    // P(bidders, k)
  for (int k = 0; k <= slots && k <= bidders; ++k) {
    if (k > 0) {
      choose = choose * (slots - k + 1) / k;
      perm *= bidders - k + 1;
    }
    if (choose > 0 && perm > (1LL << 62) / choose) return 1LL << 62;
    total += choose * perm;
  }
  return total;
}

namespace {

void enumerate_assignments(int m, int n, std::vector<int>& bidder_of_slot,
                           std::vector<bool>& used,
                           std::vector<std::vector<int>>& out, int slot) {
  if (slot == m) {
    out.push_back(bidder_of_slot);
    return;
  }
  // Empty first so the all-empty assignment lands at index 0.
  bidder_of_slot[slot] = -1;
  enumerate_assignments(m, n, bidder_of_slot, used, out, slot + 1);
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    used[i] = true;
    bidder_of_slot[slot] = i;
    enumerate_assignments(m, n, bidder_of_slot, used, out, slot + 1);
    bidder_of_slot[slot] = -1;
    used[i] = false;
  }
}

}  // namespace

Instance to_explicit_instance(const AdSetting& setting, long long max_outcomes) {
  ValidationReport v = validate_ad_setting(setting);
  if (!v.valid)
    throw std::invalid_argument("to_explicit_instance: " + v.issues.front());

  int m = setting.num_slots(), n = setting.num_bidders();
  long long count = count_injective_assignments(m, n);
  if (count > max_outcomes)
    throw std::length_error("to_explicit_instance: " + std::to_string(count) +
                            " outcomes exceed the limit of " +
                            std::to_string(max_outcomes));

  std::vector<std::vector<int>> assignments;
  std::vector<int> slots(m, -1);
  std::vector<bool> used(n, false);
  enumerate_assignments(m, n, slots, used, assignments, 0);

  std::vector<std::vector<Money>> values(n, std::vector<Money>(assignments.size(), 0.0));
  for (size_t o = 0; o < assignments.size(); ++o)
    for (int j = 0; j < m; ++j) {
      int i = assignments[o][j];
      if (i >= 0)
        values[i][o] = setting.slot_ctrs[j] * setting.quality[i] *
                       setting.per_click_values[i];
    }
  return Instance::from_values(std::move(values));
}

namespace {

// GFP ranking: beta * bid descending, index ascending on exact ties.
std::vector<int> gfp_ranking(const AdSetting& s, const std::vector<Money>& bids) {
  std::vector<int> order(s.num_bidders());
  for (int i = 0; i < s.num_bidders(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return s.quality[a] * bids[a] > s.quality[b] * bids[b];
  });
  return order;
}

// Utility of `bidder` if the profile were `bids`: slot CTR times (value -
// own bid per click), zero when unranked.
Money gfp_utility(const AdSetting& s, const std::vector<Money>& bids,
                  int bidder) {
  std::vector<int> order = gfp_ranking(s, bids);
  for (int j = 0; j < s.num_slots(); ++j)
    if (order[j] == bidder)
      return s.slot_ctrs[j] * s.quality[bidder] *
             (s.per_click_values[bidder] - bids[bidder]);
  return 0.0;
}

}  // namespace

GfpState gfp_step(const AdSetting& setting, GfpState state, Money eps) {
  if (eps <= 0) throw std::invalid_argument("gfp_step: eps must be positive");
  int n = setting.num_bidders();
  int mover = state.next_mover % n;
  state.next_mover = (mover + 1) % n;

  std::vector<Money> bids = state.bids;
  Money value = setting.per_click_values[mover];
  int levels = static_cast<int>(std::floor(value / eps + kTol));

  Money current = gfp_utility(setting, bids, mover);
  Money best = current;
  Money best_bid = bids[mover];
  bool improved = false;
  for (int k = 0; k <= levels; ++k) {
    Money candidate = k * eps;
    bids[mover] = candidate;
    Money u = gfp_utility(setting, bids, mover);
    // Strict improvement required; among improving bids the lowest wins, and
    // a current bid that is already optimal stays put (no pointless churn).
    if (u > best + kTol) {
      best = u;
      best_bid = candidate;
      improved = true;
    }
  }
  bids[mover] = improved ? best_bid : state.bids[mover];
  state.bids = std::move(bids);
  return state;
}

GfpRun gfp_best_response_run(const AdSetting& setting, Money eps,
                             long long max_steps,
                             const std::vector<Money>* start) {
  ValidationReport v = validate_ad_setting(setting);
  if (!v.valid)
    throw std::invalid_argument("gfp_best_response_run: " + v.issues.front());

  int n = setting.num_bidders();
  GfpState state;
  state.bids = start ? *start : std::vector<Money>(n, 0.0);

  GfpRun run;
  run.initial_bids = state.bids;
  std::map<std::pair<std::vector<long long>, int>, long long> seen;
  auto key = [&] {
    std::vector<long long> units(n);
    for (int i = 0; i < n; ++i) units[i] = llround(state.bids[i] / eps);
    return std::make_pair(std::move(units), state.next_mover);
  };
  seen[key()] = -1;

  long long unchanged_streak = 0;
  for (long long step = 0; step < max_steps; ++step) {
    std::vector<Money> before = state.bids;
    int mover = state.next_mover % n;
    state = gfp_step(setting, state, eps);

    GfpEvent ev;
    ev.step = step;
    ev.mover = mover;
    ev.bids = state.bids;
    ev.top_bidder = gfp_ranking(setting, state.bids).front();
    ev.revisit = false;

    unchanged_streak = (state.bids == before) ? unchanged_streak + 1 : 0;
    if (unchanged_streak >= n) {
      run.fixed_point = true;
      run.fixed_point_step = step;
      run.events.push_back(std::move(ev));
      break;
    }

    auto k = key();
    auto it = seen.find(k);
    if (it != seen.end()) {
      ev.revisit = true;
      run.cycled = true;
      run.revisit_step = step;
      run.first_seen_step = it->second;
      run.events.push_back(std::move(ev));
      break;
    }
    seen.emplace(std::move(k), step);
    run.events.push_back(std::move(ev));
  }
  return run;
}

namespace {

void append_fmt9(std::string& s, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  s += buf;
}

}  // namespace

void write_gfp_csv(std::ostream& out, const GfpRun& run) {
  size_t n = run.events.empty() ? 0 : run.events.front().bids.size();
  std::string line = "step,mover,direction";
  for (size_t i = 0; i < n; ++i) line += ",bid_" + std::to_string(i);
  line += ",winner,cycle_flag\n";
  out << line;
  Money prev = 0;
  for (const GfpEvent& ev : run.events) {
    line.clear();
    line += std::to_string(ev.step);
    line += ',';
    line += std::to_string(ev.mover);
    line += ',';
    // Direction relative to the mover's previous bid.
    size_t idx = static_cast<size_t>(ev.mover);
    prev = ev.step == 0 ? run.initial_bids[idx] : run.events[ev.step - 1].bids[idx];
    line += ev.bids[idx] >= prev ? "raise" : "lower";
    for (Money b : ev.bids) {
      line += ',';
      append_fmt9(line, b);
    }
    line += ',';
    line += std::to_string(ev.top_bidder);
    line += ',';
    line += ev.revisit ? '1' : '0';
    line += '\n';
    out << line;
  }
}

}  // namespace uta
