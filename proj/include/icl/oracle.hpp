#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "icl/space.hpp"
#include "icl/step_cdf.hpp"

namespace icl {

/// Hard limits for the brute-force verifiers; enforced before enumerating.
struct OracleBudget {
    int max_atoms = 8;
    int max_upper_sets = 4096;
    int value_grid = 64;
    int max_tries = 200000;
};

/// Exhaustive search over order-consistent level-set partitions (each block
/// valued at its weighted mean, means strictly increasing up the chain of
/// upper sets); returns the feasible candidate with minimal weighted SSE.
std::vector<double> brute_isotonic_mean(const FiniteSpace& space, const Preorder& order,
                                        const std::vector<double>& y,
                                        const OracleBudget& budget = {});

struct ScoreMinResult {
    double objective = 0.0;
    std::vector<double> argmin;
};

/// Exhaustive minimization of sum_i w_i * score(i, x_i) over upper-measurable
/// vectors with values in `domain`. Enumerates nested chains of upper sets
/// (memoized), so the search is exact and independent of the solvers it
/// certifies.
ScoreMinResult brute_expected_score_min(const FiniteSpace& space, const Preorder& order,
                                        const std::function<double(int, double)>& score,
                                        std::vector<double> domain,
                                        const OracleBudget& budget = {});

/// Per-threshold Brier minimization over upper-measurable [0,1] vectors with
/// values restricted to weighted block means of the indicators; returns a
/// column-major cdf matrix on the unique response grid.
std::vector<double> brute_crps_min(const FiniteSpace& space, const Preorder& order,
                                   const std::vector<double>& y,
                                   const OracleBudget& budget = {});

enum class CounterexampleKind { linearity, tower, ic_without_ac, tcqc_without_ic };

std::string to_string(CounterexampleKind kind);
std::optional<CounterexampleKind> counterexample_kind_from_string(const std::string& s);

/// A frozen, replayable instance. Fields beyond (space, order, y) are filled
/// per kind: linearity carries y2, tower carries the coarser order2,
/// the calibration counterexamples carry forecasts.
struct CounterexampleInstance {
    CounterexampleKind kind = CounterexampleKind::linearity;
    std::uint64_t seed = 0;
    FiniteSpace space;
    Preorder order;
    std::vector<double> y;
    std::vector<double> y2;
    std::optional<Preorder> order2;
    std::vector<StepCdf> forecasts;
};

/// Randomized search for an instance exhibiting the property; deterministic
/// for a fixed seed and budget. Returns the verified instance or nothing if
/// the budget runs out.
std::optional<CounterexampleInstance> search_counterexample(CounterexampleKind kind,
                                                            std::uint64_t seed,
                                                            const OracleBudget& budget = {});

/// Re-checks that an instance actually exhibits its property.
bool verify_counterexample(const CounterexampleInstance& instance);

}  // namespace icl
