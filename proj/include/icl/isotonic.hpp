#pragma once

#include <vector>

#include "icl/space.hpp"

namespace icl {

/// Weighted L2 isotonic fit. `blocks` is the solver's level-set partition;
/// atoms in one block share a fitted value equal to the block's weighted mean
/// of the responses.
struct IsotonicFit {
    std::vector<double> fitted;
    std::vector<int> blocks;  // atom -> block id (0-based, ids ordered arbitrarily)
    double objective = 0.0;   // weighted sum of squares
    int block_count = 0;
};

/// Weighted L2 projection of y onto the cone of upper-measurable vectors.
/// Chains short-circuit to PAVA; general preorders run block-refinement
/// splits solved as minimum-weight closure problems. Tied atoms are
/// contracted before solving and expanded after.
IsotonicFit isotonic_mean(const FiniteSpace& space, const Preorder& order,
                          const std::vector<double>& y);

/// Reusable fitting kernel: the tie contraction and the transitively reduced
/// class DAG are computed once and shared by fits against many response
/// vectors (the per-threshold loops). fit() is pure, so concurrent calls on
/// one solver are safe.
class IsotonicSolver {
  public:
    IsotonicSolver(const FiniteSpace& space, const Preorder& order);
    IsotonicFit fit(const std::vector<double>& y) const;
    const Contraction& contraction() const { return tie_classes_; }
    /// Cover arcs of the class DAG; their transitive closure is the class order.
    std::vector<std::pair<int, int>> class_cover_arcs() const;

  private:
    FiniteSpace space_;
    Contraction tie_classes_;
    bool chain_ = false;
    std::vector<int> chain_order_;            // class at each chain position
    std::vector<std::pair<int, int>> arcs_;   // reduced arcs of the class DAG
};

/// Pool-adjacent-violators on the index chain 0 <= 1 <= ... <= n-1.
IsotonicFit pava_chain(const std::vector<double>& weights, const std::vector<double>& y);

/// PAVA against an explicit order; throws when the order is not total.
IsotonicFit pava_chain(const FiniteSpace& space, const Preorder& order,
                       const std::vector<double>& y);

/// Classical min-max characterization, by enumeration: min over lower sets L
/// containing i of max over upper sets U containing i of the weighted mean of
/// y over L intersect U. Oracle paths only.
double minmax_value(const FiniteSpace& space, const Preorder& order,
                    const std::vector<double>& y, int atom, int cap = 20);

}  // namespace icl
