#include "doctest.h"

#include <random>
#include <vector>

#include "uta/auction.hpp"
#include "uta/core.hpp"

using namespace uta;

namespace {

Instance trio() {
    return Instance::from_values({{1.0, 1.5, 0.0}, {1.0, 1.5, 0.0}, {0.0, 0.0, 2.0}});
}

BidProfile concentrated_bids() {
    return {Bid({1.0, 0.0, 0.0}, 0.0), Bid({1.0, 0.0, 0.0}, 0.0),
            Bid({0.0, 0.0, 2.0}, 0.0)};
}

Instance three_vs_one() {
    return Instance::from_values({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}});
}

}  // namespace

TEST_CASE("concentrated bids tie outcomes 0 and 2, first round keeps index order") {
    Instance inst = trio();
    AuctionOutcome res = run_auction(inst, concentrated_bids());
    CHECK(res.totals[0] == doctest::Approx(2.0));
    CHECK(res.totals[1] == doctest::Approx(0.0));
    CHECK(res.totals[2] == doctest::Approx(2.0));
    CHECK(res.tied_outcomes == std::vector<int>{0, 2});
    CHECK(res.winning_outcome == 0);
    CHECK(res.payments[0] == doctest::Approx(1.0));
    CHECK(res.payments[1] == doctest::Approx(1.0));
    CHECK(res.payments[2] == doctest::Approx(0.0));
    // everyone got exactly the zero utility they asked for
    CHECK(res.is_winner == std::vector<bool>{true, true, true});
}

TEST_CASE("a tied previous winner is kept") {
    Instance inst = trio();
    TieBreakContext ctx;
    ctx.previous_winner = 2;
    AuctionOutcome res = run_auction(inst, concentrated_bids(), ctx);
    CHECK(res.winning_outcome == 2);
    CHECK(res.payments[2] == doctest::Approx(2.0));
    CHECK(res.utilities[0] == doctest::Approx(0.0));

    // a previous winner that is not tied anymore is ignored
    ctx.previous_winner = 1;
    CHECK(run_auction(inst, concentrated_bids(), ctx).winning_outcome == 0);
}

TEST_CASE("losers sit strictly below their targets") {
    Instance inst = three_vs_one();
    // the loner asks for more than the trio leaves on the table
    BidProfile bids = quasi_truthful_profile(inst, {0.0, 0.0, 0.0, 1.5});
    AuctionOutcome res = run_auction(inst, bids);
    CHECK(res.winning_outcome == 0);  // totals (3, 0.5)
    CHECK(res.utilities[3] == doctest::Approx(0.0));
    CHECK(!res.is_winner[3]);
    CHECK(res.utilities[3] < 1.5);
    CHECK(res.is_winner[0]);
}

TEST_CASE("payments equal effective bids at the winning outcome") {
    Instance inst = trio();
    BidProfile bids = quasi_truthful_profile(inst, {0.25, 0.5, 0.75});
    AuctionOutcome res = run_auction(inst, bids);
    for (int i = 0; i < inst.num_bidders; ++i) {
        CHECK(res.payments[i] ==
              doctest::Approx(effective_bid(bids[i], res.winning_outcome)));
        CHECK(res.utilities[i] == doctest::Approx(inst.value(i, res.winning_outcome) -
                                                  res.payments[i]));
    }
}

TEST_CASE("classify_bidders matches the embedded winner flags") {
    Instance inst = three_vs_one();
    BidProfile bids = quasi_truthful_profile(inst, {0.2, 0.4, 0.6, 0.1});
    AuctionOutcome res = run_auction(inst, bids);
    CHECK(classify_bidders(inst, bids, res) == res.is_winner);
}

TEST_CASE("quasi-truthful equivalent reproduces the utility of a skewed bid") {
    Instance inst = three_vs_one();
    // bidder 3 overstates her value and asks for half of it
    BidProfile bids = quasi_truthful_profile(inst, {0.0, 0.0, 0.0, 0.0});
    bids[3] = Bid({0.0, 3.0}, 1.5);
    AuctionOutcome before = run_auction(inst, bids);
    CHECK(before.winning_outcome == 0);  // totals (3, 1.5)
    CHECK(before.utilities[3] == doctest::Approx(0.0));

    Bid equiv = quasi_truthful_equivalent(inst, 3, bids);
    CHECK(equiv.value_bid == inst.values[3]);
    CHECK(equiv.target == doctest::Approx(0.0));

    BidProfile swapped = bids;
    swapped[3] = equiv;
    AuctionOutcome after = run_auction(inst, swapped);
    CHECK(after.utilities[3] == doctest::Approx(before.utilities[3]));
}

TEST_CASE("quasi-truthful equivalent preserves negative utilities via overbidding") {
    Instance inst = Instance::from_values({{2.0, 0.0}, {0.0, 1.0}});
    BidProfile bids = {Bid({5.0, 0.0}, 1.0), Bid({0.0, 1.0}, 0.0)};
    AuctionOutcome before = run_auction(inst, bids);
    CHECK(before.winning_outcome == 0);
    // pays 4 for a value of 2
    CHECK(before.utilities[0] == doctest::Approx(-2.0));

    Bid equiv = quasi_truthful_equivalent(inst, 0, bids);
    CHECK(equiv.target == doctest::Approx(-2.0));
    BidProfile swapped = bids;
    swapped[0] = equiv;
    AuctionOutcome after = run_auction(inst, swapped);
    CHECK(after.winning_outcome == 0);
    CHECK(after.utilities[0] == doctest::Approx(-2.0));
}

TEST_CASE("random bids: substitution never changes anyone's utility") {
    std::mt19937_64 rng(20260824);
    std::uniform_real_distribution<double> val(0.0, 2.0);
    std::uniform_int_distribution<int> dim(1, 5);
    for (int trial = 0; trial < 300; ++trial) {
        int n = dim(rng), m = dim(rng);
        std::vector<std::vector<Money>> values(n, std::vector<Money>(m));
        for (auto& row : values)
            for (auto& v : row) v = val(rng);
        Instance inst = Instance::from_values(values);

        BidProfile bids(n);
        for (int i = 0; i < n; ++i) {
            std::vector<Money> x(m);
            for (auto& xo : x) xo = val(rng);
            bids[i] = Bid(std::move(x), val(rng));
        }

        AuctionOutcome before = run_auction(inst, bids);
        for (int i = 0; i < n; ++i) {
            BidProfile swapped = bids;
            swapped[i] = quasi_truthful_equivalent(inst, i, bids);
            AuctionOutcome after = run_auction(inst, swapped);
            CHECK(after.utilities[i] ==
                  doctest::Approx(before.utilities[i]).epsilon(1e-9));
        }
    }
}
