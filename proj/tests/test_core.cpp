#include "doctest.h"

#include <cmath>
#include <limits>

#include "uta/core.hpp"

using namespace uta;

namespace {

Instance trio() {
    return Instance::from_values({{1.0, 1.5, 0.0}, {1.0, 1.5, 0.0}, {0.0, 0.0, 2.0}});
}

}  // namespace

TEST_CASE("from_values fills dimensions and accessors") {
    Instance inst = trio();
    CHECK(inst.num_bidders == 3);
    CHECK(inst.num_outcomes == 3);
    CHECK(inst.value(0, 1) == 1.5);
    CHECK(inst.cap(0) == 1.5);
    CHECK(inst.cap(2) == 2.0);
    CHECK(inst.welfare(0) == doctest::Approx(2.0));
    CHECK(inst.welfare(1) == doctest::Approx(3.0));
    CHECK(inst.welfare(2) == doctest::Approx(2.0));
}

TEST_CASE("bid construction clamps the target from above only") {
    Bid b({1.0, 3.0}, 5.0);
    CHECK(b.target == 3.0);  // asking above max x is cut to max x
    Bid ok({1.0, 3.0}, 2.0);
    CHECK(ok.target == 2.0);
    Bid neg({1.0, 3.0}, -0.75);  // overbidding stays representable
    CHECK(neg.target == -0.75);
    CHECK(effective_bid(neg, 0) == doctest::Approx(1.75));
    CHECK(effective_bid(neg, 1) == doctest::Approx(3.75));
}

TEST_CASE("effective bid floors at zero") {
    Bid b({1.0, 0.25}, 0.5);
    CHECK(effective_bid(b, 0) == doctest::Approx(0.5));
    CHECK(effective_bid(b, 1) == 0.0);
}

TEST_CASE("quasi-truthful profile reports true values with the given targets") {
    Instance inst = trio();
    BidProfile bids = quasi_truthful_profile(inst, {0.5, 0.25, 2.5});
    REQUIRE(bids.size() == 3);
    CHECK(bids[0].value_bid == inst.values[0]);
    CHECK(bids[0].target == 0.5);
    CHECK(bids[1].target == 0.25);
    CHECK(bids[2].target == 2.0);  // clamped at cap
    auto totals = total_bids(inst, bids);
    CHECK(totals[0] == doctest::Approx(0.5 + 0.75));
    CHECK(totals[1] == doctest::Approx(1.0 + 1.25));
    CHECK(totals[2] == doctest::Approx(0.0));
}

TEST_CASE("validate_instance accepts the fixtures") {
    ValidationReport rep = validate_instance(trio());
    CHECK(rep.valid);
    CHECK(rep.issues.empty());
    CHECK(rep.optimal_outcome == 1);
    CHECK(rep.unique_optimum);
}

TEST_CASE("validate_instance flags structural problems") {
    SUBCASE("negative value") {
        Instance inst = Instance::from_values({{1.0, -2.0}, {0.0, 1.0}});
        ValidationReport rep = validate_instance(inst);
        CHECK(!rep.valid);
        REQUIRE(!rep.issues.empty());
        CHECK(rep.issues[0].find("negative") != std::string::npos);
    }
    SUBCASE("non-finite value") {
        Instance inst = Instance::from_values({{1.0, std::numeric_limits<double>::infinity()}});
        ValidationReport rep = validate_instance(inst);
        CHECK(!rep.valid);
    }
    SUBCASE("empty") {
        Instance inst;
        CHECK(!validate_instance(inst).valid);
    }
    SUBCASE("ragged rows") {
        Instance inst;
        inst.num_bidders = 2;
        inst.num_outcomes = 2;
        inst.values = {{1.0, 2.0}, {1.0}};
        CHECK(!validate_instance(inst).valid);
    }
}

TEST_CASE("validate_instance reports welfare ties") {
    Instance inst = Instance::from_values({{1.0, 1.0}, {2.0, 2.0}});
    ValidationReport rep = validate_instance(inst);
    CHECK(rep.valid);
    CHECK(rep.optimal_outcome == 0);  // smallest index representative
    CHECK(!rep.unique_optimum);
}
