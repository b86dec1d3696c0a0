#pragma once

// Brute-force ground truth at desk scale.  Everything here recomputes from
// first principles (its own CEF arithmetic, its own winner scan) so the
// analytic routines have something independent to disagree with.

#include <cstdint>
#include <vector>

#include "uta/core.hpp"

namespace uta {
namespace oracles {

struct GridSpec {
  Money step = 0.25;
  // Per-bidder axis upper ends; empty = use instance caps.
  std::vector<Money> caps;
  long long max_points = 2'000'000;  // refusal budget
};

// Axis sizes and total point count for a grid over [0, cap_i] per bidder.
// Throws std::length_error with the count when over budget.
struct GridShape {
  std::vector<int> axis_points;
  std::vector<Money> caps;
  long long total = 1;
};
GridShape grid_shape(const Instance& inst, const GridSpec& grid);

// Independent CEF membership test for a quasi-truthful target vector (ties
// toward the welfare optimum).  Written from the definition; shares no code
// with uta::is_cef.
bool cef_from_definition(const Instance& inst,
                         const std::vector<Money>& targets);

struct GridClassification {
  GridShape shape;
  Money step;
  std::vector<std::uint8_t> in_cef;  // flat row-major over the grid
  long long cef_count = 0;

  std::vector<Money> point(long long flat_index) const;
};

// Classifies every grid point via cef_from_definition.
GridClassification enumerate_cef_grid(const Instance& inst,
                                      const GridSpec& grid);

struct GridEquilibria {
  // Points where no bidder can gain more than kTol by jumping to another
  // value on her own grid axis; listed in lexicographic order.
  std::vector<std::vector<Money>> points;
  std::vector<std::uint8_t> cef;  // parallel to points
};

GridEquilibria enumerate_equilibria_grid(const Instance& inst,
                                         const GridSpec& grid);

struct BruteEgalitarian {
  bool found = false;
  // CEF grid equilibria whose sorted utility vector is lexicographically
  // maximal; utility ties leave several target vectors, reported in
  // lexicographic order (so front() is the canonical representative).
  std::vector<std::vector<Money>> argmax;
  std::vector<Money> sorted_utilities;
};

BruteEgalitarian brute_force_egalitarian(const Instance& inst,
                                         const GridSpec& grid);

struct BestResponse {
  Money best_utility = 0;             // over everything scanned
  Money best_quasi_truthful = 0;      // over (v_i, pi) bids only
  Money best_target = 0;              // argmax target on the pi axis
};

// Exhaustive utility scan for one bidder against a fixed profile: every
// target on the bidder's grid axis with her true values, plus the same axis
// under each supplied alternative value vector.  Fixed-order ties.
BestResponse best_response_oracle(
    const Instance& inst, int bidder, const BidProfile& others,
    const GridSpec& grid,
    const std::vector<std::vector<Money>>& extra_value_bids = {});

}  // namespace oracles
}  // namespace uta
