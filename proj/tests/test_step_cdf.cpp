#include "doctest.h"

#include <stdexcept>

#include "icl/rng.hpp"
#include "icl/step_cdf.hpp"

using namespace icl;

namespace {

StepCdf half_half(double a, double b) {
    return StepCdf::from_points_masses({{a, 0.5}, {b, 0.5}});
}

StepCdf random_cdf(Rng& rng) {
    std::vector<std::pair<double, double>> pm;
    const int k = rng.uniform_int(1, 5);
    double rest = 1.0;
    for (int j = 0; j < k; ++j) {
        const double m = (j == k - 1) ? rest : rest * rng.uniform(0.15, 0.7);
        pm.emplace_back(rng.uniform_int(-3, 6) + (rng.bernoulli(0.5) ? 0.0 : 0.5), m);
        rest -= m;
    }
    return StepCdf::from_points_masses(std::move(pm));
}

}  // namespace

TEST_CASE("construction merges equal points") {
    const StepCdf f = StepCdf::from_points_masses({{1, 0.25}, {0, 0.5}, {1, 0.25}});
    CHECK(f.jumps() == 2);
    CHECK(f.points[1] == 1);
    CHECK(f.mass_at(1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(StepCdf::from_points_masses({{0, 0.5}}), std::invalid_argument);
}

TEST_CASE("evaluation") {
    CHECK(cdf_eval(StepCdf::point_mass(0), 0) == 1.0);
    CHECK(cdf_eval(half_half(0, 1), 0.5) == 0.5);
    CHECK(cdf_eval(half_half(0, 1), -1) == 0.0);
}

TEST_CASE("left limits") {
    CHECK(left_limit_eval(StepCdf::point_mass(0), 0) == 0.0);
    CHECK(left_limit_eval(half_half(0, 1), 1) == 0.5);
    CHECK(left_limit_eval(half_half(0, 1), 2) == 1.0);
}

TEST_CASE("lower quantiles") {
    CHECK(lower_quantile(half_half(0, 1), 0.5) == 0.0);
    CHECK(lower_quantile(half_half(0, 1), 0.75) == 1.0);
    CHECK(lower_quantile(StepCdf::point_mass(2), 0.1) == 2.0);
    CHECK(lower_quantile(StepCdf::point_mass(2), 0.9) == 2.0);
    CHECK_THROWS_AS(lower_quantile(StepCdf::point_mass(2), 0.0), std::domain_error);
    CHECK_THROWS_AS(lower_quantile(StepCdf::point_mass(2), 1.0), std::domain_error);
}

TEST_CASE("upper quantiles") {
    CHECK(upper_quantile(half_half(0, 1), 0.5) == 1.0);
    CHECK(upper_quantile(half_half(0, 1), 0.3) == 0.0);
    CHECK(upper_quantile(StepCdf::point_mass(2), 0.4) == 2.0);
}

TEST_CASE("mean") {
    CHECK(mean(half_half(0, 1)) == doctest::Approx(0.5));
    CHECK(mean(StepCdf::point_mass(3.5)) == 3.5);
    CHECK(mean(half_half(0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("quantile properties on random cdfs") {
    Rng rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        const StepCdf f = random_cdf(rng);
        const double alpha = rng.uniform(0.01, 0.99);
        const double lo = lower_quantile(f, alpha);
        const double hi = upper_quantile(f, alpha);
        CHECK(lo <= hi);
        // Galois connection: F(z) >= alpha iff z >= lower quantile
        for (int g = -4; g <= 8; ++g) {
            const double z = 0.5 * g;
            CHECK((cdf_eval(f, z) >= alpha) == (z >= lo));
        }
    }
}

TEST_CASE("empirical distribution") {
    const StepCdf f = StepCdf::empirical({2, 1, 2}, {0.25, 0.5, 0.25});
    CHECK(f.jumps() == 2);
    CHECK(f.points[0] == 1);
    CHECK(f.mass_at(0) == doctest::Approx(0.5));
    CHECK(f.mass_at(1) == doctest::Approx(0.5));
}

TEST_CASE("stochastic comparison") {
    CHECK(stochastically_leq(StepCdf::point_mass(0), StepCdf::point_mass(1)));
    CHECK_FALSE(stochastically_leq(StepCdf::point_mass(1), StepCdf::point_mass(0)));
    CHECK(stochastically_leq(half_half(0, 1), half_half(0, 2)));
    CHECK(cdf_equal(half_half(0, 1), half_half(0, 1)));
    CHECK_FALSE(cdf_equal(half_half(0, 1), half_half(0, 2)));
}
