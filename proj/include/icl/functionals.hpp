#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "icl/closure.hpp"
#include "icl/scoring.hpp"
#include "icl/space.hpp"

namespace icl {

/// Per-atom contributions v_i = w_i V(eta, y_i); s(A) = sum over A is modular.
struct ModularObjective {
    std::vector<double> contributions;
    double eta = 0.0;
    std::optional<double> alpha;

    static ModularObjective from(const FiniteSpace& space, const std::vector<double>& y,
                                 const IdentificationFunction& v, double eta);
    double sum_over(const UpperSet& a) const;
};

/// An upper set minimizing s_A(eta) under the chosen tie policy.
UpperSet minimizing_set(const FiniteSpace& space, const Preorder& order,
                        const std::vector<double>& y, const IdentificationFunction& v,
                        double eta, SetPolicy policy = SetPolicy::maximal);

/// Minimizing path: cells (b_j, b_{j+1}] bounded by `breakpoints` with
/// sentinel cells below and above, one minimizing upper set per cell,
/// decreasing in eta.
struct MinimizingPath {
    std::vector<double> breakpoints;  // strictly increasing, size K
    std::vector<UpperSet> sets;       // size K+1, sets[j] valid on (b_j, b_{j+1}]
    std::optional<double> alpha;

    void validate_decreasing() const;  // throws on violation
};

enum class QuantileSide { lower, upper };

/// Maximal-minimizer path for the identification function. Mean paths come
/// from isotonic regression level sets; quantile paths evaluate each response
/// cell, with the lower side realizing the union-over-beta<alpha extension
/// through exact parametric join levels.
MinimizingPath build_decreasing_path(const FiniteSpace& space, const Preorder& order,
                                     const std::vector<double>& y,
                                     const IdentificationFunction& v,
                                     QuantileSide side = QuantileSide::lower);

/// Per-atom sup{eta : atom in A_eta}; atoms outside every (or inside all)
/// cells are clipped to the response range and flagged.
struct ConditionalFunctional {
    std::vector<double> values;
    std::vector<std::uint8_t> clipped;
};

ConditionalFunctional path_inverse(const MinimizingPath& path, const std::vector<double>& y);

ConditionalFunctional conditional_quantile(const FiniteSpace& space, const Preorder& order,
                                           const std::vector<double>& y, double alpha,
                                           QuantileSide side);

/// For one response cell (fixed eta), the level at which each atom enters the
/// maximal minimizing set as alpha grows. Exact via parametric cuts.
std::vector<double> quantile_join_levels(const FiniteSpace& space, const Preorder& order,
                                         const std::vector<double>& y, double eta);

/// Both directions of the quantile fixed-point equivalence: (a) x is the
/// lower alpha-quantile of the classical conditional law given sigma(x);
/// (b) x is the lower conditional quantile for the preorder induced by x.
/// When (b) holds, an oracle search certifies that x also attains the
/// empirical quantile-score minimum (small n).
struct QuantileFixedPoint {
    bool classical = false;
    bool lattice = false;
};

QuantileFixedPoint check_quantile_fixed_point(const FiniteSpace& space,
                                              const std::vector<double>& x,
                                              const std::vector<double>& y, double alpha);

}  // namespace icl
