#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace icl {

struct StepCdf;

/// Finite probability space: atoms 1..n with strictly positive weights
/// summing to one.
struct FiniteSpace {
    int n = 0;
    std::vector<double> weights;
    std::vector<std::string> labels;  // optional, empty or size n

    static FiniteSpace uniform(int n);
    static FiniteSpace with_weights(std::vector<double> weights);

    void validate() const;
};

/// Reflexive-transitive relation on atoms. Upper sets of the relation
/// realize the sigma-lattice; ties (i<=j and j<=i) are genuine cycles and
/// stand for forced-equal fitted values.
struct Preorder {
    int n = 0;

    static Preorder antichain(int n);
    static Preorder chain(int n);  // 0 <= 1 <= ... <= n-1
    /// Validates reflexivity and transitivity of an explicit relation.
    static Preorder from_relation(int n, std::vector<std::uint8_t> rel);
    /// Transitively closes an edge list (i <= j per edge).
    static Preorder from_edges(int n, const std::vector<std::pair<int, int>>& edges);

    bool leq(int i, int j) const { return rel_[static_cast<std::size_t>(i) * n + j] != 0; }
    void set(int i, int j) { rel_[static_cast<std::size_t>(i) * n + j] = 1; }

    Preorder reversed() const;
    bool is_total() const;
    bool equals(const Preorder& other) const { return n == other.n && rel_ == other.rel_; }
    /// True if this relation contains every pair of `other` (finer preorder,
    /// hence coarser upper-set lattice).
    bool contains(const Preorder& other) const;

    const std::vector<std::uint8_t>& relation() const { return rel_; }

  private:
    friend Preorder preorder_from_covariates(const struct CovariateTable&);
    friend Preorder preorder_from_stochastic_order(const std::vector<StepCdf>&);
    friend struct Contraction contract_ties(const FiniteSpace&, const Preorder&);
    static Preorder unchecked(int n, std::vector<std::uint8_t> rel);
    std::vector<std::uint8_t> rel_;  // row-major n*n
};

/// Upward-closed atom subset.
struct UpperSet {
    std::vector<std::uint8_t> member;  // 0/1 per atom

    explicit UpperSet(int n = 0) : member(static_cast<std::size_t>(n), 0) {}
    static UpperSet full(int n);
    static UpperSet from_mask(int n, std::uint32_t mask);

    int size() const { return static_cast<int>(member.size()); }
    bool contains(int i) const { return member[static_cast<std::size_t>(i)] != 0; }
    int count() const;
    bool operator==(const UpperSet& o) const { return member == o.member; }

    bool is_upper(const Preorder& order) const;
    UpperSet set_union(const UpperSet& o) const;
    UpperSet set_intersection(const UpperSet& o) const;
    UpperSet complement() const;
    std::uint32_t mask() const;  // atoms must fit in 32 bits
};

/// Real covariate matrix, n rows by p columns, no missing values.
struct CovariateTable {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major

    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
    void validate() const;
};

/// Componentwise order on covariate rows; ties produce cycles.
Preorder preorder_from_covariates(const CovariateTable& table);

/// i <= j iff F_i(x) >= F_j(x) for all x (F_i stochastically smaller).
Preorder preorder_from_stochastic_order(const std::vector<StepCdf>& cdfs);

/// All upward-closed subsets, lexicographic by bitmask. Oracle/verification
/// paths only; throws when n exceeds the cap.
std::vector<UpperSet> enumerate_upper_sets(const Preorder& order, int cap = 20);

/// True iff leq(i,j) implies values[i] <= values[j] (+tol), i.e. every
/// superlevel set is an upper set.
bool is_upper_measurable(const Preorder& order, const std::vector<double>& values,
                         double tol = 0.0);

/// Tie classes (mutual leq) contracted to super-atoms with a partial order.
struct Contraction {
    int k = 0;                     // number of classes
    std::vector<int> class_of;     // atom -> class
    std::vector<double> class_weight;
    std::vector<std::vector<int>> members;
    Preorder class_order;          // antisymmetric on classes
};

Contraction contract_ties(const FiniteSpace& space, const Preorder& order);

}  // namespace icl
