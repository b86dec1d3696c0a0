#include "uta/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uta {

Instance Instance::from_values(std::vector<std::vector<Money>> v) {
  Instance inst;
  inst.num_bidders = static_cast<int>(v.size());
  inst.num_outcomes = v.empty() ? 0 : static_cast<int>(v.front().size());
  inst.values = std::move(v);
  return inst;
}

Money Instance::cap(int bidder) const {
  const auto& row = values[bidder];
  Money best = 0;
  for (Money x : row) best = std::max(best, x);
  return best;
}

Money Instance::welfare(int outcome) const {
  Money sum = 0;
  for (const auto& row : values) sum += row[outcome];
  return sum;
}

Bid::Bid(std::vector<Money> x, Money pi) : value_bid(std::move(x)) {
  Money cap = 0;
  for (Money v : value_bid) cap = std::max(cap, v);
  // Targets above the best claimed value produce all-zero offers either way;
  // clamp so winner classification treats them as "asked for the max".
  target = std::min(pi, cap);
}

Money Bid::max_value() const {
  Money cap = 0;
  for (Money v : value_bid) cap = std::max(cap, v);
  return cap;
}

Money effective_bid(const Bid& bid, int outcome) {
  if (outcome < 0 || outcome >= static_cast<int>(bid.value_bid.size()))
    throw std::out_of_range("effective_bid: outcome index out of range");
  return std::max(bid.value_bid[outcome] - bid.target, 0.0);
}

BidProfile quasi_truthful_profile(const Instance& inst,
                                  const std::vector<Money>& targets) {
  if (static_cast<int>(targets.size()) != inst.num_bidders)
    throw std::invalid_argument("quasi_truthful_profile: target count != bidders");
  BidProfile bids;
  bids.reserve(targets.size());
  for (int i = 0; i < inst.num_bidders; ++i)
    bids.emplace_back(inst.values[i], targets[i]);
  return bids;
}

std::vector<Money> total_bids(const Instance& inst, const BidProfile& bids) {
  if (static_cast<int>(bids.size()) != inst.num_bidders)
    throw std::invalid_argument("total_bids: profile size != bidders");
  for (const Bid& b : bids)
    if (static_cast<int>(b.value_bid.size()) != inst.num_outcomes)
      throw std::invalid_argument("total_bids: bid dimension != outcomes");
  std::vector<Money> totals(inst.num_outcomes, 0.0);
  for (int o = 0; o < inst.num_outcomes; ++o)
    for (const Bid& b : bids) totals[o] += effective_bid(b, o);
  return totals;
}

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport report;
  auto flag = [&](std::string msg) {
    report.valid = false;
    report.issues.push_back(std::move(msg));
  };

  if (inst.num_bidders <= 0) flag("no bidders");
  if (inst.num_outcomes <= 0) flag("no outcomes");
  if (static_cast<int>(inst.values.size()) != inst.num_bidders)
    flag("values has " + std::to_string(inst.values.size()) + " rows, expected " +
         std::to_string(inst.num_bidders));

  for (size_t i = 0; i < inst.values.size(); ++i) {
    const auto& row = inst.values[i];
    if (static_cast<int>(row.size()) != inst.num_outcomes) {
      flag("values row " + std::to_string(i) + " has " +
           std::to_string(row.size()) + " entries, expected " +
           std::to_string(inst.num_outcomes));
      continue;
    }
    for (size_t o = 0; o < row.size(); ++o) {
      if (!std::isfinite(row[o]))
        flag("values[" + std::to_string(i) + "][" + std::to_string(o) +
             "] is not finite");
      else if (row[o] < 0)
        flag("values[" + std::to_string(i) + "][" + std::to_string(o) +
             "] is negative");
    }
  }

  if (!report.valid) return report;

  Money best = -1;
  for (int o = 0; o < inst.num_outcomes; ++o) {
    Money w = inst.welfare(o);
    if (w > best + kTol) {
      best = w;
      report.optimal_outcome = o;
      report.unique_optimum = true;
    } else if (w > best - kTol) {
      report.unique_optimum = false;
      if (w > best) best = w;
    }
  }
  return report;
}

}  // namespace uta
