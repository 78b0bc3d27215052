#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "icl/cli.hpp"
#include "icl/icl_fit.hpp"
#include "icl/isotonic.hpp"
#include "icl/oracle.hpp"
#include "icl/scoring.hpp"

using namespace icl;

TEST_CASE("brute isotonic mean reproduces the solver examples") {
    const FiniteSpace u3 = FiniteSpace::uniform(3);
    const auto chain = brute_isotonic_mean(u3, Preorder::chain(3), {1, 0, 2});
    CHECK(chain == std::vector<double>{0.5, 0.5, 2});
    const auto same = brute_isotonic_mean(u3, Preorder::chain(3), {0, 1, 2});
    CHECK(same == std::vector<double>{0, 1, 2});
    const auto vee = brute_isotonic_mean(u3, Preorder::from_edges(3, {{0, 1}, {0, 2}}), {2, 0, 1});
    CHECK(vee == std::vector<double>{1, 1, 1});
}

TEST_CASE("budget limits are hard") {
    const FiniteSpace big = FiniteSpace::uniform(9);
    OracleBudget budget;
    CHECK_THROWS_AS(brute_isotonic_mean(big, Preorder::chain(9), std::vector<double>(9, 0.0), budget),
                    std::length_error);
}

TEST_CASE("expected score minimizer on an antichain is pointwise") {
    const FiniteSpace u3 = FiniteSpace::uniform(3);
    const std::vector<double> y{1, 0, 2};
    const auto score = [&](int atom, double value) {
        return brier_score(value, y[static_cast<std::size_t>(atom)]);
    };
    const auto r = brute_expected_score_min(u3, Preorder::antichain(3), score, {0, 1, 2});
    CHECK(r.argmin == y);
    CHECK(r.objective == doctest::Approx(0.0));
}

TEST_CASE("crps oracle matches the fits") {
    const FiniteSpace u3 = FiniteSpace::uniform(3);
    SUBCASE("chain") {
        const auto fit = icl_fit(u3, Preorder::chain(3), {1, 0, 2});
        const auto oracle = brute_crps_min(u3, Preorder::chain(3), {1, 0, 2});
        for (std::size_t i = 0; i < oracle.size(); ++i)
            CHECK(oracle[i] == doctest::Approx(fit.cdf[i]).epsilon(1e-9));
    }
    SUBCASE("antichain gives empirical point masses") {
        const auto oracle = brute_crps_min(u3, Preorder::antichain(3), {1, 0, 2});
        const auto fit = icl_fit(u3, Preorder::antichain(3), {1, 0, 2});
        for (std::size_t i = 0; i < oracle.size(); ++i)
            CHECK(oracle[i] == doctest::Approx(fit.cdf[i]).epsilon(1e-9));
    }
    SUBCASE("constant responses give a common point mass") {
        const auto oracle = brute_crps_min(u3, Preorder::chain(3), {1, 1, 1});
        CHECK(oracle == std::vector<double>{1, 1, 1});
    }
}

TEST_CASE("counterexample searches succeed and are stable") {
    OracleBudget budget;
    for (const auto kind : {CounterexampleKind::linearity, CounterexampleKind::tower,
                            CounterexampleKind::ic_without_ac, CounterexampleKind::tcqc_without_ic}) {
        CAPTURE(to_string(kind));
        const auto found = search_counterexample(kind, 42, budget);
        REQUIRE(found.has_value());
        CHECK(verify_counterexample(*found));
        const auto again = search_counterexample(kind, 42, budget);
        REQUIRE(again.has_value());
        CHECK(instance_to_json(*found).dump() == instance_to_json(*again).dump());
        // different seed still succeeds
        const auto other = search_counterexample(kind, 1234, budget);
        REQUIRE(other.has_value());
        CHECK(verify_counterexample(*other));
    }
}

TEST_CASE("instances survive a serialization round trip") {
    const auto found = search_counterexample(CounterexampleKind::tcqc_without_ic, 7);
    REQUIRE(found.has_value());
    const Json j = instance_to_json(*found);
    const CounterexampleInstance back = instance_from_json(j);
    CHECK(verify_counterexample(back));
    CHECK(instance_to_json(back).dump() == j.dump());
}
