#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "icl/closure.hpp"
#include "icl/isotonic.hpp"
#include "icl/oracle.hpp"
#include "icl/rng.hpp"
#include "icl/space.hpp"

using namespace icl;

namespace {

std::vector<double> fit3(const Preorder& order, std::vector<double> y) {
    return isotonic_mean(FiniteSpace::uniform(3), order, y).fitted;
}

}  // namespace

TEST_CASE("chain pooling") {
    const auto f = fit3(Preorder::chain(3), {1, 0, 2});
    CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f[2] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("projection fixes isotonic data") {
    const std::vector<double> y{-1, 0.5, 0.5, 3};
    const auto fit = isotonic_mean(FiniteSpace::uniform(4), Preorder::chain(4), y);
    for (int i = 0; i < 4; ++i) CHECK(fit.fitted[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(i)]);
    CHECK(fit.objective == doctest::Approx(0.0));
}

TEST_CASE("vee poset pools everything") {
    const Preorder p = Preorder::from_edges(3, {{0, 1}, {0, 2}});
    const auto f = fit3(p, {2, 0, 1});
    for (double v : f) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pava on the index chain") {
    const auto fit = pava_chain({0.25, 0.25, 0.25, 0.25}, {3, 1, 2, 4});
    CHECK(fit.fitted[0] == doctest::Approx(2.0));
    CHECK(fit.fitted[1] == doctest::Approx(2.0));
    CHECK(fit.fitted[2] == doctest::Approx(2.0));
    CHECK(fit.fitted[3] == doctest::Approx(4.0));
    CHECK(fit.block_count == 2);
    CHECK_THROWS_AS(pava_chain({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("pava rejects partial orders") {
    const Preorder p = Preorder::from_edges(3, {{0, 1}, {0, 2}});
    CHECK_THROWS_AS(pava_chain(FiniteSpace::uniform(3), p, {1, 0, 2}), std::invalid_argument);
    // a chain with ties is still total after contraction
    const Preorder tied = Preorder::from_edges(3, {{0, 1}, {1, 0}, {1, 2}});
    const auto fit = pava_chain(FiniteSpace::uniform(3), tied, {2, 0, 1});
    CHECK(fit.fitted[0] == doctest::Approx(1.0));
    CHECK(fit.fitted[1] == doctest::Approx(1.0));
    CHECK(fit.fitted[2] == doctest::Approx(1.0));
}

TEST_CASE("minmax examples") {
    const FiniteSpace u3 = FiniteSpace::uniform(3);
    CHECK(minmax_value(u3, Preorder::chain(3), {1, 0, 2}, 0) == doctest::Approx(0.5));
    CHECK(minmax_value(u3, Preorder::chain(3), {0, 1, 2}, 2) == doctest::Approx(2.0));
    const Preorder vee = Preorder::from_edges(3, {{0, 1}, {0, 2}});
    CHECK(minmax_value(u3, vee, {2, 0, 1}, 2) == doctest::Approx(1.0));
}

TEST_CASE("ties are contracted to forced-equal values") {
    const Preorder tied = Preorder::from_edges(4, {{0, 1}, {1, 0}, {1, 2}, {2, 3}});
    const auto fit = isotonic_mean(FiniteSpace::uniform(4), tied, {4, 0, 1, 5});
    CHECK(fit.fitted[0] == fit.fitted[1]);
    CHECK(fit.fitted[0] == doctest::Approx(5.0 / 3));
    CHECK(fit.fitted[2] == doctest::Approx(5.0 / 3));
    CHECK(fit.fitted[3] == doctest::Approx(5.0));
}

TEST_CASE("solver agrees with the oracles on random instances") {
    Rng rng(41);
    for (int rep = 0; rep < 60; ++rep) {
        const int n = rng.uniform_int(1, 7);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && rng.bernoulli(0.3)) edges.emplace_back(i, j);
        const Preorder p = Preorder::from_edges(n, edges);
        const FiniteSpace space = FiniteSpace::uniform(n);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = rng.uniform_int(-2, 3);
        const auto fit = isotonic_mean(space, p, y).fitted;
        const auto brute = brute_isotonic_mean(space, p, y);
        for (int i = 0; i < n; ++i) {
            CHECK(fit[static_cast<std::size_t>(i)] == doctest::Approx(brute[static_cast<std::size_t>(i)]).epsilon(1e-9));
            CHECK(fit[static_cast<std::size_t>(i)] ==
                  doctest::Approx(minmax_value(space, p, y, i)).epsilon(1e-9));
        }
    }
}

TEST_CASE("monotone in the data") {
    Rng rng(43);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = rng.uniform_int(2, 6);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && rng.bernoulli(0.3)) edges.emplace_back(i, j);
        const Preorder p = Preorder::from_edges(n, edges);
        const FiniteSpace space = FiniteSpace::uniform(n);
        std::vector<double> y(static_cast<std::size_t>(n)), y2(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            y[static_cast<std::size_t>(i)] = rng.uniform_int(-2, 2);
            y2[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + rng.uniform_int(0, 2);
        }
        const auto f1 = isotonic_mean(space, p, y).fitted;
        const auto f2 = isotonic_mean(space, p, y2).fitted;
        for (int i = 0; i < n; ++i)
            CHECK(f1[static_cast<std::size_t>(i)] <= f2[static_cast<std::size_t>(i)] + 1e-10);
    }
}

TEST_CASE("idempotent and mass preserving") {
    Rng rng(47);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = rng.uniform_int(1, 6);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && rng.bernoulli(0.35)) edges.emplace_back(i, j);
        const Preorder p = Preorder::from_edges(n, edges);
        std::vector<double> w(static_cast<std::size_t>(n));
        double total = 0.0;
        for (auto& x : w) total += (x = rng.uniform(0.2, 1.0));
        for (auto& x : w) x /= total;
        const FiniteSpace space = FiniteSpace::with_weights(w);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = rng.uniform(-2.0, 2.0);
        const auto fit = isotonic_mean(space, p, y).fitted;
        const auto refit = isotonic_mean(space, p, fit).fitted;
        double mass_y = 0.0, mass_fit = 0.0;
        for (int i = 0; i < n; ++i) {
            CHECK(refit[static_cast<std::size_t>(i)] == doctest::Approx(fit[static_cast<std::size_t>(i)]).epsilon(1e-10));
            mass_y += w[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
            mass_fit += w[static_cast<std::size_t>(i)] * fit[static_cast<std::size_t>(i)];
        }
        CHECK(mass_fit == doctest::Approx(mass_y).epsilon(1e-10));
    }
}

TEST_CASE("linearity fails: frozen instance") {
    // projection onto the cone is not additive
    const Preorder chain = Preorder::chain(3);
    const auto f1 = fit3(chain, {1, 0, 2});
    const auto f2 = fit3(chain, {2, 1, 0});
    const auto fs = fit3(chain, {3, 1, 2});
    CHECK(f1[0] + f2[0] == doctest::Approx(1.5));
    CHECK(fs[0] == doctest::Approx(2.0));
}

TEST_CASE("tower property fails: frozen instance") {
    // the coarser lattice pools atoms 1 and 2; conditioning twice is not
    // conditioning once
    const Preorder coarse = Preorder::from_edges(3, {{0, 1}, {1, 2}, {2, 1}});
    const Preorder fine = Preorder::chain(3);
    CHECK(coarse.contains(fine));
    const std::vector<double> y{1, 0, 2};
    const auto inner = fit3(fine, y);
    const auto towered = fit3(coarse, inner);
    const auto direct = fit3(coarse, y);
    CHECK(towered[0] == doctest::Approx(0.5));
    CHECK(towered[1] == doctest::Approx(1.25));
    CHECK(direct[0] == doctest::Approx(1.0));
    CHECK(direct[1] == doctest::Approx(1.0));
}

TEST_CASE("moderate sizes still satisfy the optimality certificate") {
    // beyond enumeration range: upper-measurability, block means, and the
    // one-cut certificate that no upper set improves on the fit
    Rng rng(103);
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 50;
        CovariateTable t;
        t.rows = n;
        t.cols = 2;
        for (int i = 0; i < 2 * n; ++i) t.data.push_back(rng.uniform(0.0, 1.0));
        const Preorder p = preorder_from_covariates(t);
        const FiniteSpace space = FiniteSpace::uniform(n);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = rng.uniform(-1.0, 1.0);
        const auto fit = isotonic_mean(space, p, y);
        CHECK(is_upper_measurable(p, fit.fitted, 1e-10));
        for (double value : fit.fitted) {
            double wsum = 0.0, diff = 0.0;
            for (int i = 0; i < n; ++i)
                if (fit.fitted[static_cast<std::size_t>(i)] == value) {
                    wsum += space.weights[static_cast<std::size_t>(i)];
                    diff += space.weights[static_cast<std::size_t>(i)] *
                            (y[static_cast<std::size_t>(i)] - value);
                }
            CHECK(wsum > 0.0);
            CHECK(std::abs(diff) <= 1e-9);
        }
        std::vector<double> gain(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            gain[static_cast<std::size_t>(i)] =
                space.weights[static_cast<std::size_t>(i)] *
                (fit.fitted[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]);
        const auto best = min_weight_upper_set(p, gain, SetPolicy::maximal);
        CHECK(best.objective >= -1e-9);
    }
}

TEST_CASE("closure solver policies") {
    // chain with ties in the objective: both the union and the intersection
    // of minimizers are minimizers
    const Preorder chain = Preorder::chain(3);
    const std::vector<double> v{-1.0 / 6, 1.0 / 6, -1.0 / 6};
    const auto max_side = min_weight_upper_set(chain, v, SetPolicy::maximal);
    const auto min_side = min_weight_upper_set(chain, v, SetPolicy::minimal);
    CHECK(max_side.set.mask() == 0b111);
    CHECK(min_side.set.mask() == 0b100);
    CHECK(max_side.objective == doctest::Approx(min_side.objective));
}
