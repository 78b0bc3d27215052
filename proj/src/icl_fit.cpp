#include "icl/icl_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "icl/isotonic.hpp"

namespace icl {
namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<double> survival_fit(const IsotonicSolver& solver, const std::vector<double>& y,
                                 double z) {
    std::vector<double> ind(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) ind[i] = y[i] > z ? 1.0 : 0.0;
    return solver.fit(ind).fitted;
}

// Row monotonicity holds because the indicator vectors decrease in z and the
// projection is monotone in the data; column monotonicity is membership in
// the isotonic cone. A violation is a solver bug, so fail loudly. The column
// check walks the contracted class DAG: tied atoms carry identical values by
// construction and transitivity covers the remaining pairs.
void assert_monotone(const IclFit& fit, const IsotonicSolver& solver,
                     const std::vector<std::pair<int, int>>& class_arcs) {
    const double tol = 1e-10;
    const int m = fit.threshold_count();
    for (int i = 0; i < fit.n; ++i)
        for (int k = 0; k + 1 < m; ++k)
            if (fit.at(i, k) > fit.at(i, k + 1) + tol)
                throw std::logic_error("icl_fit: row not monotone in threshold");
    for (int i = 0; i < fit.n; ++i)
        if (std::abs(fit.at(i, m - 1) - 1.0) > tol)
            throw std::logic_error("icl_fit: final column must be one");
    const Contraction& c = solver.contraction();
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < fit.n; ++i)
            if (fit.at(i, k) != fit.at(c.members[static_cast<std::size_t>(c.class_of[static_cast<std::size_t>(i)])][0], k))
                throw std::logic_error("icl_fit: tied atoms differ");
        for (const auto& [a, b] : class_arcs)
            if (fit.at(c.members[static_cast<std::size_t>(a)][0], k) <
                fit.at(c.members[static_cast<std::size_t>(b)][0], k) - tol)
                throw std::logic_error("icl_fit: column not anti-isotonic");
    }
}

IclFit fit_impl(const FiniteSpace& space, const Preorder& order, const std::vector<double>& y,
                bool parallel) {
    if (space.n != order.n || static_cast<int>(y.size()) != space.n)
        throw std::invalid_argument("icl_fit: dimension mismatch");
    IclFit fit;
    fit.n = space.n;
    fit.space = space;
    fit.order = order;
    fit.y = y;
    fit.thresholds = unique_sorted(y);
    const int m = fit.threshold_count();
    fit.cdf.assign(static_cast<std::size_t>(m) * space.n, 0.0);

    const IsotonicSolver solver(space, order);
    const auto class_arcs = solver.class_cover_arcs();
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < m; ++k) {
            const auto s = survival_fit(solver, y, fit.thresholds[static_cast<std::size_t>(k)]);
            for (int i = 0; i < space.n; ++i)
                fit.cdf[static_cast<std::size_t>(k) * space.n + i] = 1.0 - s[static_cast<std::size_t>(i)];
        }
    } else {
        for (int k = 0; k < m; ++k) {
            const auto s = survival_fit(solver, y, fit.thresholds[static_cast<std::size_t>(k)]);
            for (int i = 0; i < space.n; ++i)
                fit.cdf[static_cast<std::size_t>(k) * space.n + i] = 1.0 - s[static_cast<std::size_t>(i)];
        }
    }
    assert_monotone(fit, solver, class_arcs);
    return fit;
}

}  // namespace

std::vector<double> IclFit::survival_column(int k) const {
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = 1.0 - at(i, k);
    return s;
}

StepCdf IclFit::row(int atom) const {
    // independent per-threshold solves can wobble by an ulp; sub-tolerance
    // increments are not jumps
    std::vector<std::pair<double, double>> pm;
    double prev = 0.0;
    for (int k = 0; k < threshold_count(); ++k) {
        const double cur = at(atom, k);
        if (cur > prev + 1e-13) {
            pm.emplace_back(thresholds[static_cast<std::size_t>(k)], cur - prev);
            prev = cur;
        }
    }
    return StepCdf::from_points_masses(std::move(pm));
}

std::vector<double> IclFit::row_means() const {
    std::vector<double> m(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = mean(row(i));
    return m;
}

IclFit icl_fit(const FiniteSpace& space, const Preorder& order, const std::vector<double>& y) {
    return fit_impl(space, order, y, true);
}

IclFit icl_fit_serial(const FiniteSpace& space, const Preorder& order,
                      const std::vector<double>& y) {
    return fit_impl(space, order, y, false);
}

std::vector<double> icl_quantile(const IclFit& fit, double alpha) {
    std::vector<double> q(static_cast<std::size_t>(fit.n));
    for (int i = 0; i < fit.n; ++i) q[static_cast<std::size_t>(i)] = lower_quantile(fit.row(i), alpha);
    if (!is_upper_measurable(fit.order, q))
        throw std::logic_error("icl_quantile: quantile vector not upper-measurable");
    return q;
}

std::vector<double> icl_upper_quantile(const IclFit& fit, double alpha) {
    std::vector<double> q(static_cast<std::size_t>(fit.n));
    for (int i = 0; i < fit.n; ++i) q[static_cast<std::size_t>(i)] = upper_quantile(fit.row(i), alpha);
    if (!is_upper_measurable(fit.order, q))
        throw std::logic_error("icl_upper_quantile: quantile vector not upper-measurable");
    return q;
}

ClassicalEquivalence check_classical_equivalence(const FiniteSpace& space, const Preorder& order,
                                                 const std::vector<double>& y) {
    if (space.n != order.n || static_cast<int>(y.size()) != space.n)
        throw std::invalid_argument("check_classical_equivalence: dimension mismatch");
    const Contraction c = contract_ties(space, order);

    std::vector<StepCdf> class_cdf;
    class_cdf.reserve(static_cast<std::size_t>(c.k));
    for (int cls = 0; cls < c.k; ++cls) {
        std::vector<double> values, weights;
        for (int i : c.members[static_cast<std::size_t>(cls)]) {
            values.push_back(y[static_cast<std::size_t>(i)]);
            weights.push_back(space.weights[static_cast<std::size_t>(i)]);
        }
        class_cdf.push_back(StepCdf::empirical(values, weights));
    }

    ClassicalEquivalence result;
    result.isotonic = true;
    for (int a = 0; a < c.k && result.isotonic; ++a)
        for (int b = 0; b < c.k; ++b) {
            if (a == b || !c.class_order.leq(a, b)) continue;
            if (!stochastically_leq(class_cdf[static_cast<std::size_t>(a)], class_cdf[static_cast<std::size_t>(b)])) {
                result.isotonic = false;
                result.witness_classes = {a, b};
                break;
            }
        }
    result.classical.reserve(static_cast<std::size_t>(space.n));
    for (int i = 0; i < space.n; ++i)
        result.classical.push_back(class_cdf[static_cast<std::size_t>(c.class_of[static_cast<std::size_t>(i)])]);
    return result;
}

}  // namespace icl
