#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "icl/space.hpp"
#include "icl/step_cdf.hpp"

namespace icl {

/// Isotonic conditional law on a finite space: per-atom step cdfs over the
/// grid of observed response values, stochastically monotone along the
/// preorder. Column k holds F_i(z_k) = 1 - fit of the indicators 1{y > z_k}.
struct IclFit {
    int n = 0;
    std::vector<double> thresholds;  // sorted unique response values
    std::vector<double> cdf;         // column-major: cdf[k*n + i] = F_i(z_k)

    FiniteSpace space;
    Preorder order;
    std::vector<double> y;

    int threshold_count() const { return static_cast<int>(thresholds.size()); }
    double at(int atom, int k) const { return cdf[static_cast<std::size_t>(k) * n + atom]; }
    std::vector<double> survival_column(int k) const;
    StepCdf row(int atom) const;
    std::vector<double> row_means() const;
};

/// Parallel fit (OpenMP over thresholds when available).
IclFit icl_fit(const FiniteSpace& space, const Preorder& order, const std::vector<double>& y);

/// Serial reference kernel; identical output, kept for tests and benchmarks.
IclFit icl_fit_serial(const FiniteSpace& space, const Preorder& order,
                      const std::vector<double>& y);

/// Per-atom lower quantiles of the fitted rows; upper-measurable by theory,
/// asserted here.
std::vector<double> icl_quantile(const IclFit& fit, double alpha);

/// Per-atom upper quantiles of the fitted rows.
std::vector<double> icl_upper_quantile(const IclFit& fit, double alpha);

/// Classical conditional law versus ICL. Groups atoms by tie class, computes
/// group empirical cdfs, and reports whether those are stochastically
/// monotone along the order. When they are, the ICL coincides with them.
struct ClassicalEquivalence {
    bool isotonic = false;
    std::optional<std::pair<int, int>> witness_classes;  // comparable, crossing
    std::vector<StepCdf> classical;                      // per atom
};

ClassicalEquivalence check_classical_equivalence(const FiniteSpace& space,
                                                 const Preorder& order,
                                                 const std::vector<double>& y);

}  // namespace icl
