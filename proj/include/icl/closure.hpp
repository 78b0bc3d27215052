#pragma once

#include <vector>

#include "icl/space.hpp"

namespace icl {

enum class SetPolicy { maximal, minimal };

struct ClosureResult {
    UpperSet set;
    double objective = 0.0;  // sum of v over the returned set
};

/// Minimum-weight closure: an upper set A of `order` minimizing
/// sum_{i in A} v_i, solved as a min-cut. Ties across multiple minimum cuts
/// resolve to the union (maximal policy) or intersection (minimal) of all
/// minimizers; both are minimizers since the objective is modular.
ClosureResult min_weight_upper_set(const Preorder& order, const std::vector<double>& v,
                                   SetPolicy policy);

/// Restriction to a subset of atoms: minimizes over upper sets of the induced
/// sub-preorder on `atoms`. Returned set indexes the full space.
ClosureResult min_weight_upper_set_within(const Preorder& order,
                                          const std::vector<double>& v,
                                          const std::vector<int>& atoms,
                                          SetPolicy policy);

/// Same problem with the relation given as an explicit arc list whose
/// transitive closure, restricted to `atoms`, is the intended preorder.
/// Callers pass transitively reduced arcs; `atoms` must be order-convex for
/// the restriction to stay faithful.
ClosureResult min_weight_upper_set_edges(int n, const std::vector<std::pair<int, int>>& arcs,
                                         const std::vector<double>& v,
                                         const std::vector<int>& atoms, SetPolicy policy);

}  // namespace icl
