#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "icl/functionals.hpp"
#include "icl/icl_fit.hpp"
#include "icl/isotonic.hpp"
#include "icl/rng.hpp"

using namespace icl;

namespace {

const FiniteSpace u3 = FiniteSpace::uniform(3);

Preorder random_order(Rng& rng, int n, double p) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && rng.bernoulli(p)) edges.emplace_back(i, j);
    return Preorder::from_edges(n, edges);
}

double objective_over(const FiniteSpace& space, const std::vector<double>& y,
                      const IdentificationFunction& v, double eta, const UpperSet& a) {
    return ModularObjective::from(space, y, v, eta).sum_over(a);
}

}  // namespace

TEST_CASE("minimizing sets on the chain example") {
    const std::vector<double> y{1, 0, 2};
    const Preorder chain = Preorder::chain(3);
    SUBCASE("unique minimizer") {
        const auto v = IdentificationFunction::quantile_fn(0.4);
        const UpperSet a = minimizing_set(u3, chain, y, v, 0.5);
        CHECK(a.mask() == 0b100);
    }
    SUBCASE("tie resolved by policy") {
        const auto v = IdentificationFunction::quantile_fn(0.5);
        CHECK(minimizing_set(u3, chain, y, v, 0.5, SetPolicy::maximal).mask() == 0b111);
        CHECK(minimizing_set(u3, chain, y, v, 0.5, SetPolicy::minimal).mask() == 0b100);
    }
    SUBCASE("sign-forced extremes") {
        const auto v = IdentificationFunction::quantile_fn(0.4);
        CHECK(minimizing_set(u3, chain, y, v, -5.0).mask() == 0b111);
        CHECK(minimizing_set(u3, chain, y, v, 9.0).count() == 0);
    }
}

TEST_CASE("modular objective") {
    Rng rng(101);
    const Preorder p = Preorder::chain(4);
    const FiniteSpace space = FiniteSpace::uniform(4);
    const std::vector<double> y{2, 0, 3, 1};
    const auto m = ModularObjective::from(space, y, IdentificationFunction::quantile_fn(0.3), 1.5);
    CHECK(m.alpha == 0.3);
    for (int rep = 0; rep < 50; ++rep) {
        const UpperSet a = UpperSet::from_mask(4, static_cast<std::uint32_t>(rng.uniform_int(0, 15)));
        const UpperSet b = UpperSet::from_mask(4, static_cast<std::uint32_t>(rng.uniform_int(0, 15)));
        CHECK(m.sum_over(a.set_union(b)) + m.sum_over(a.set_intersection(b)) ==
              doctest::Approx(m.sum_over(a) + m.sum_over(b)).epsilon(1e-14));
    }
}

TEST_CASE("custom identification functions take the quantile-style grid") {
    const std::vector<double> y{1, 0, 2};
    const Preorder chain = Preorder::chain(3);
    const auto custom = IdentificationFunction::custom(
        [](double x, double yy) { return (x > yy ? 1.0 : 0.0) - 0.4; }, false);
    const auto as_custom = build_decreasing_path(u3, chain, y, custom);
    const auto as_quantile = build_decreasing_path(u3, chain, y, IdentificationFunction::quantile_fn(0.4),
                                                   QuantileSide::upper);
    REQUIRE(as_custom.breakpoints == as_quantile.breakpoints);
    for (std::size_t j = 0; j < as_custom.sets.size(); ++j)
        CHECK(as_custom.sets[j] == as_quantile.sets[j]);
}

TEST_CASE("minimizing set certified against enumeration") {
    Rng rng(61);
    for (int rep = 0; rep < 60; ++rep) {
        const int n = rng.uniform_int(1, 6);
        const Preorder p = random_order(rng, n, 0.3);
        const FiniteSpace space = FiniteSpace::uniform(n);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = rng.uniform_int(0, 3);
        const auto v = rng.bernoulli(0.5)
                           ? IdentificationFunction::quantile_fn(rng.uniform(0.1, 0.9))
                           : IdentificationFunction::mean_fn();
        const double eta = rng.uniform(-0.5, 3.5);
        const UpperSet chosen = minimizing_set(space, p, y, v, eta);
        CHECK(chosen.is_upper(p));
        double best = 1e300;
        for (const auto& a : enumerate_upper_sets(p))
            best = std::min(best, objective_over(space, y, v, eta, a));
        CHECK(objective_over(space, y, v, eta, chosen) == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("minimizer family is a lattice") {
    Rng rng(67);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = rng.uniform_int(2, 6);
        const Preorder p = random_order(rng, n, 0.3);
        const FiniteSpace space = FiniteSpace::uniform(n);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = rng.uniform_int(0, 3);
        const auto v = IdentificationFunction::quantile_fn(rng.uniform(0.15, 0.85));
        const double eta = rng.uniform(0.0, 3.0);
        const auto sets = enumerate_upper_sets(p);
        double best = 1e300;
        for (const auto& a : sets) best = std::min(best, objective_over(space, y, v, eta, a));
        std::vector<UpperSet> minimizers;
        for (const auto& a : sets)
            if (objective_over(space, y, v, eta, a) <= best + 1e-12) minimizers.push_back(a);
        for (const auto& a : minimizers)
            for (const auto& b : minimizers) {
                CHECK(objective_over(space, y, v, eta, a.set_union(b)) ==
                      doctest::Approx(best).epsilon(1e-12));
                CHECK(objective_over(space, y, v, eta, a.set_intersection(b)) ==
                      doctest::Approx(best).epsilon(1e-12));
            }
    }
}

TEST_CASE("decreasing path for the quantile functional") {
    const std::vector<double> y{1, 0, 2};
    const Preorder chain = Preorder::chain(3);
    const auto v = IdentificationFunction::quantile_fn(0.4);
    const MinimizingPath path = build_decreasing_path(u3, chain, y, v, QuantileSide::lower);
    REQUIRE(path.breakpoints == std::vector<double>{0, 1, 2});
    CHECK(path.sets[0].mask() == 0b111);
    CHECK(path.sets[1].mask() == 0b100);
    CHECK(path.sets[2].mask() == 0b100);
    CHECK(path.sets[3].count() == 0);
    const auto inv = path_inverse(path, y);
    CHECK(inv.values == std::vector<double>{0, 0, 2});
}

TEST_CASE("mean path inverts to the isotonic fit") {
    Rng rng(71);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = rng.uniform_int(1, 6);
        const Preorder p = random_order(rng, n, 0.35);
        const FiniteSpace space = FiniteSpace::uniform(n);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = rng.uniform_int(-2, 3);
        const auto path = build_decreasing_path(space, p, y, IdentificationFunction::mean_fn());
        const auto inv = path_inverse(path, y);
        const auto iso = isotonic_mean(space, p, y).fitted;
        for (int i = 0; i < n; ++i)
            CHECK(inv.values[static_cast<std::size_t>(i)] == doctest::Approx(iso[static_cast<std::size_t>(i)]).epsilon(1e-12));
        // level sets of the fit minimize the modular objective on every cell
        for (double b : path.breakpoints) {
            double best = 1e300;
            for (const auto& a : enumerate_upper_sets(p))
                best = std::min(best, objective_over(space, y, IdentificationFunction::mean_fn(), b, a));
            UpperSet level(n);
            for (int i = 0; i < n; ++i)
                if (iso[static_cast<std::size_t>(i)] >= b) level.member[static_cast<std::size_t>(i)] = 1;
            CHECK(objective_over(space, y, IdentificationFunction::mean_fn(), b, level) ==
                  doctest::Approx(best).epsilon(1e-10));
        }
    }
}

TEST_CASE("constant responses collapse the path") {
    const std::vector<double> y{1, 1, 1};
    const auto v = IdentificationFunction::quantile_fn(0.5);
    const auto path = build_decreasing_path(u3, Preorder::chain(3), y, v, QuantileSide::lower);
    REQUIRE(path.breakpoints == std::vector<double>{1});
    CHECK(path.sets[0].mask() == 0b111);
    CHECK(path.sets[1].count() == 0);
    CHECK(path_inverse(path, y).values == std::vector<double>{1, 1, 1});
}

TEST_CASE("conditional quantiles match the law quantiles") {
    const std::vector<double> y{1, 0, 2};
    const Preorder chain = Preorder::chain(3);
    CHECK(conditional_quantile(u3, chain, y, 0.5, QuantileSide::lower).values ==
          std::vector<double>{0, 0, 2});
    CHECK(conditional_quantile(u3, chain, y, 0.5, QuantileSide::upper).values ==
          std::vector<double>{1, 1, 2});
    CHECK(conditional_quantile(u3, Preorder::antichain(3), y, 0.73, QuantileSide::lower).values ==
          std::vector<double>{1, 0, 2});

    Rng rng(73);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = rng.uniform_int(1, 6);
        const Preorder p = random_order(rng, n, 0.3);
        const FiniteSpace space = FiniteSpace::uniform(n);
        std::vector<double> y2(static_cast<std::size_t>(n));
        for (auto& v : y2) v = rng.uniform_int(0, 4);
        const auto fit = icl_fit(space, p, y2);
        const double alpha = rng.uniform(0.05, 0.95);
        CHECK(conditional_quantile(space, p, y2, alpha, QuantileSide::lower).values ==
              icl_quantile(fit, alpha));
        CHECK(conditional_quantile(space, p, y2, alpha, QuantileSide::upper).values ==
              icl_upper_quantile(fit, alpha));
    }
}

TEST_CASE("join levels are monotone and produce the interleaving") {
    Rng rng(79);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = rng.uniform_int(2, 6);
        const Preorder p = random_order(rng, n, 0.3);
        const FiniteSpace space = FiniteSpace::uniform(n);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = rng.uniform_int(0, 3);
        // maximal minimizers grow with alpha and shrink with eta
        std::vector<double> etas{-0.5, 0.5, 1.5, 2.5, 3.5};
        std::vector<double> alphas{0.2, 0.4, 0.6, 0.8};
        std::vector<std::vector<UpperSet>> grid;
        for (double eta : etas) {
            std::vector<UpperSet> row;
            for (double alpha : alphas)
                row.push_back(minimizing_set(space, p, y, IdentificationFunction::quantile_fn(alpha), eta));
            grid.push_back(row);
        }
        for (std::size_t e = 0; e < etas.size(); ++e)
            for (std::size_t a = 0; a + 1 < alphas.size(); ++a)
                CHECK(grid[e][a].set_union(grid[e][a + 1]) == grid[e][a + 1]);
        for (std::size_t e = 0; e + 1 < etas.size(); ++e)
            for (std::size_t a = 0; a < alphas.size(); ++a)
                CHECK(grid[e + 1][a].set_union(grid[e][a]) == grid[e][a]);
        // join levels agree with direct evaluation around the join
        const double eta = 0.5;
        const auto joins = quantile_join_levels(space, p, y, eta);
        for (int i = 0; i < n; ++i) {
            const double j = joins[static_cast<std::size_t>(i)];
            if (j < 1.0) {
                const auto at = minimizing_set(space, p, y,
                                               IdentificationFunction::quantile_fn(std::min(0.999999, j + 1e-7)), eta);
                CHECK(at.contains(i));
            }
            if (j > 0.0) {
                const auto below = minimizing_set(space, p, y,
                                                  IdentificationFunction::quantile_fn(std::max(1e-7, j - 1e-7)), eta);
                CHECK_FALSE(below.contains(i));
            }
        }
    }
}

TEST_CASE("lower quantiles are increasing and left-continuous in the level") {
    Rng rng(83);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = rng.uniform_int(2, 6);
        const Preorder p = random_order(rng, n, 0.3);
        const FiniteSpace space = FiniteSpace::uniform(n);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = rng.uniform_int(0, 3);
        std::vector<double> prev;
        for (double alpha : {0.1, 0.25, 0.4, 0.55, 0.7, 0.85}) {
            const auto q = conditional_quantile(space, p, y, alpha, QuantileSide::lower).values;
            if (!prev.empty())
                for (int i = 0; i < n; ++i) CHECK(prev[static_cast<std::size_t>(i)] <= q[static_cast<std::size_t>(i)]);
            prev = q;
        }
        // left-continuity: the map is constant on each half-open level cell
        // (prev, level], so the cell midpoint agrees with the right endpoint
        const auto fit = icl_fit(space, p, y);
        std::vector<double> levels{0.0};
        for (double v : fit.cdf)
            if (v > 1e-9 && v < 1.0 - 1e-9) levels.push_back(v);
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        for (std::size_t k = 1; k < levels.size(); ++k) {
            const double mid = 0.5 * (levels[k - 1] + levels[k]);
            const auto at = conditional_quantile(space, p, y, levels[k], QuantileSide::lower).values;
            const auto inside = conditional_quantile(space, p, y, mid, QuantileSide::lower).values;
            CHECK(at == inside);
        }
    }
}

TEST_CASE("simultaneous elementary optimality of the path inverse") {
    Rng rng(89);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = rng.uniform_int(1, 6);
        const Preorder p = random_order(rng, n, 0.3);
        const FiniteSpace space = FiniteSpace::uniform(n);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = rng.uniform_int(0, 3);
        const double alpha = rng.uniform(0.1, 0.9);
        const auto v = IdentificationFunction::quantile_fn(alpha);
        const auto path = build_decreasing_path(space, p, y, v, QuantileSide::lower);
        const auto x = path_inverse(path, y).values;
        // for every eta cell, the superlevel set of x minimizes the cell objective
        std::vector<double> etas;
        etas.push_back(path.breakpoints.front() - 1.0);
        for (std::size_t k = 0; k + 1 < path.breakpoints.size(); ++k)
            etas.push_back(0.5 * (path.breakpoints[k] + path.breakpoints[k + 1]));
        etas.push_back(path.breakpoints.back());
        for (double eta : etas) {
            double best = 1e300;
            for (const auto& a : enumerate_upper_sets(p))
                best = std::min(best, objective_over(space, y, v, eta, a));
            UpperSet level(n);
            for (int i = 0; i < n; ++i)
                if (x[static_cast<std::size_t>(i)] >= eta) level.member[static_cast<std::size_t>(i)] = 1;
            CHECK(objective_over(space, y, v, eta, level) == doctest::Approx(best).epsilon(1e-10));
        }
    }
}

TEST_CASE("quantile fixed point checks") {
    const std::vector<double> y{1, 0, 2};
    const Preorder chain = Preorder::chain(3);
    SUBCASE("conditional quantile output is a fixed point") {
        const auto x = conditional_quantile(u3, chain, y, 0.5, QuantileSide::lower).values;
        const auto fp = check_quantile_fixed_point(u3, x, y, 0.5);
        CHECK(fp.classical);
        CHECK(fp.lattice);
    }
    SUBCASE("responses on an antichain are a fixed point") {
        const auto fp = check_quantile_fixed_point(FiniteSpace::uniform(3), y, y, 0.3);
        CHECK(fp.classical);
        CHECK(fp.lattice);
    }
    SUBCASE("perturbation breaks both sides") {
        const auto fp = check_quantile_fixed_point(u3, {0.25, 0.25, 2}, y, 0.5);
        CHECK_FALSE(fp.classical);
        CHECK_FALSE(fp.lattice);
    }
    SUBCASE("flat pinball levels still agree") {
        // x minimizes the empirical score here, but it is not the lower
        // quantile, so both sides must reject it
        const FiniteSpace u2 = FiniteSpace::uniform(2);
        const auto fp = check_quantile_fixed_point(u2, {1, 1}, {1, 0}, 0.5);
        CHECK_FALSE(fp.classical);
        CHECK_FALSE(fp.lattice);
        const auto ok = check_quantile_fixed_point(u2, {0, 0}, {1, 0}, 0.5);
        CHECK(ok.classical);
        CHECK(ok.lattice);
    }
    CHECK_THROWS_AS(check_quantile_fixed_point(u3, y, y, 1.5), std::domain_error);
}
