#include "uta/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uta/auction.hpp"

namespace uta {
namespace oracles {

GridShape grid_shape(const Instance& inst, const GridSpec& grid) {
  if (grid.step <= 0) throw std::invalid_argument("grid step must be positive");
  GridShape shape;
  shape.caps = grid.caps;
  if (shape.caps.empty()) {
    shape.caps.resize(inst.num_bidders);
    for (int i = 0; i < inst.num_bidders; ++i) shape.caps[i] = inst.cap(i);
  }
  if (static_cast<int>(shape.caps.size()) != inst.num_bidders)
    throw std::invalid_argument("grid caps count != bidders");
  for (Money cap : shape.caps) {
    int points = static_cast<int>(std::floor(cap / grid.step + kTol)) + 1;
    shape.axis_points.push_back(points);
    if (shape.total > grid.max_points / points)
      throw std::length_error("grid budget exceeded: more than " +
                              std::to_string(grid.max_points) + " points");
    shape.total *= points;
  }
  return shape;
}

// Everything below recomputes the auction pieces directly from the values
// matrix, on purpose: these are the reference answers the analytic code is
// checked against, so they must not share its plumbing.

namespace {

int welfare_argmax(const Instance& inst) {
  int best = 0;
  double best_w = -1;
  for (int o = 0; o < inst.num_outcomes; ++o) {
    double w = 0;
    for (int i = 0; i < inst.num_bidders; ++i) w += inst.values[i][o];
    if (w > best_w + kTol) {
      best_w = w;
      best = o;
    }
  }
  return best;
}

// Winner under quasi-truthful targets with ties deferring to `favored`.
int winner_for_targets(const Instance& inst, const std::vector<Money>& pi,
                       int favored) {
  int n = inst.num_bidders, m = inst.num_outcomes;
  std::vector<double> total(m, 0.0);
  for (int o = 0; o < m; ++o)
    for (int i = 0; i < n; ++i) {
      double offer = inst.values[i][o] - pi[i];
      if (offer > 0) total[o] += offer;
    }
  double top = *std::max_element(total.begin(), total.end());
  if (total[favored] >= top - kTol) return favored;
  for (int o = 0; o < m; ++o)
    if (total[o] >= top - kTol) return o;
  return 0;
}

double utility_at(const Instance& inst, const std::vector<Money>& pi,
                  int bidder, int outcome) {
  double offer = inst.values[bidder][outcome] - pi[bidder];
  if (offer < 0) offer = 0;
  return inst.values[bidder][outcome] - offer;
}

}  // namespace

bool cef_from_definition(const Instance& inst,
                         const std::vector<Money>& targets) {
  int n = inst.num_bidders, m = inst.num_outcomes;
  int opt = welfare_argmax(inst);
  int w = winner_for_targets(inst, targets, opt);

  for (int o = 0; o < m; ++o) {
    double envy = 0, drop = 0;
    for (int i = 0; i < n; ++i) {
      double offer_o = std::max(inst.values[i][o] - targets[i], 0.0);
      double offer_w = std::max(inst.values[i][w] - targets[i], 0.0);
      double gain = (inst.values[i][o] - offer_o) - (inst.values[i][w] - offer_w);
      if (gain > 0) envy += gain;
      drop += offer_w - offer_o;
    }
    if (envy > drop + kTol) return false;
  }
  return true;
}

std::vector<Money> GridClassification::point(long long flat_index) const {
  std::vector<Money> pi(shape.axis_points.size());
  for (int i = static_cast<int>(pi.size()) - 1; i >= 0; --i) {
    pi[i] = step * static_cast<Money>(flat_index % shape.axis_points[i]);
    flat_index /= shape.axis_points[i];
  }
  return pi;
}

GridClassification enumerate_cef_grid(const Instance& inst,
                                      const GridSpec& grid) {
  GridClassification result;
  result.shape = grid_shape(inst, grid);
  result.step = grid.step;
  result.in_cef.resize(result.shape.total);
  for (long long idx = 0; idx < result.shape.total; ++idx) {
    bool cef = cef_from_definition(inst, result.point(idx));
    result.in_cef[idx] = cef ? 1 : 0;
    if (cef) ++result.cef_count;
  }
  return result;
}

GridEquilibria enumerate_equilibria_grid(const Instance& inst,
                                         const GridSpec& grid) {
  GridShape shape = grid_shape(inst, grid);
  int n = inst.num_bidders;
  int opt = welfare_argmax(inst);

  GridClassification indexer;
  indexer.shape = shape;
  indexer.step = grid.step;

  GridEquilibria result;
  for (long long idx = 0; idx < shape.total; ++idx) {
    std::vector<Money> pi = indexer.point(idx);
    int w = winner_for_targets(inst, pi, opt);

    bool equilibrium = true;
    for (int i = 0; i < n && equilibrium; ++i) {
      double u = utility_at(inst, pi, i, w);
      std::vector<Money> dev = pi;
      for (int k = 0; k < shape.axis_points[i]; ++k) {
        dev[i] = grid.step * k;
        int dw = winner_for_targets(inst, dev, opt);
        if (utility_at(inst, dev, i, dw) > u + kTol) {
          equilibrium = false;
          break;
        }
      }
    }
    if (equilibrium) {
      result.cef.push_back(cef_from_definition(inst, pi) ? 1 : 0);
      result.points.push_back(std::move(pi));
    }
  }
  return result;
}

BruteEgalitarian brute_force_egalitarian(const Instance& inst,
                                         const GridSpec& grid) {
  GridEquilibria eq = enumerate_equilibria_grid(inst, grid);
  int opt = welfare_argmax(inst);

  BruteEgalitarian result;
  for (size_t p = 0; p < eq.points.size(); ++p) {
    if (!eq.cef[p]) continue;
    const std::vector<Money>& pi = eq.points[p];
    int w = winner_for_targets(inst, pi, opt);
    std::vector<Money> utilities(inst.num_bidders);
    for (int i = 0; i < inst.num_bidders; ++i)
      utilities[i] = utility_at(inst, pi, i, w);
    std::sort(utilities.begin(), utilities.end());

    if (!result.found) {
      result.found = true;
      result.sorted_utilities = utilities;
      result.argmax.push_back(pi);
      continue;
    }
    // Lexicographic comparison of ascending-sorted utility vectors.
    int cmp = 0;
    for (size_t k = 0; k < utilities.size(); ++k) {
      if (utilities[k] > result.sorted_utilities[k] + kTol) { cmp = 1; break; }
      if (utilities[k] < result.sorted_utilities[k] - kTol) { cmp = -1; break; }
    }
    if (cmp > 0) {
      result.sorted_utilities = utilities;
      result.argmax.clear();
      result.argmax.push_back(pi);
    } else if (cmp == 0) {
      result.argmax.push_back(pi);
    }
  }
  return result;
}

BestResponse best_response_oracle(
    const Instance& inst, int bidder, const BidProfile& others,
    const GridSpec& grid,
    const std::vector<std::vector<Money>>& extra_value_bids) {
  GridShape shape = grid_shape(inst, grid);
  BestResponse result;
  result.best_utility = -std::numeric_limits<double>::infinity();
  result.best_quasi_truthful = -std::numeric_limits<double>::infinity();

  auto probe = [&](const std::vector<Money>& x, Money t, bool quasi) {
    BidProfile profile = others;
    profile[bidder] = Bid(x, t);
    AuctionOutcome out = run_auction(inst, profile, TieBreakContext{});
    double u = out.utilities[bidder];
    if (u > result.best_utility) result.best_utility = u;
    if (quasi && u > result.best_quasi_truthful) {
      result.best_quasi_truthful = u;
      result.best_target = t;
    }
  };

  for (int k = 0; k < shape.axis_points[bidder]; ++k)
    probe(inst.values[bidder], grid.step * k, true);
  for (const auto& x : extra_value_bids) {
    Money cap = *std::max_element(x.begin(), x.end());
    int points = static_cast<int>(std::floor(cap / grid.step + kTol)) + 1;
    for (int k = 0; k < points; ++k) probe(x, grid.step * k, false);
  }
  return result;
}

}  // namespace oracles
}  // namespace uta
