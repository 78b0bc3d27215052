#include "icl/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "icl/isotonic.hpp"
#include "icl/oracle.hpp"

namespace icl {
namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<double> indicator_above(const std::vector<double>& y, double eta) {
    std::vector<double> ind(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) ind[i] = eta > y[i] ? 1.0 : 0.0;
    return ind;
}

UpperSet maximal_minimizer_at(const FiniteSpace& space, const Preorder& order,
                              const std::vector<double>& ind, double alpha) {
    std::vector<double> v(static_cast<std::size_t>(space.n));
    for (int i = 0; i < space.n; ++i)
        v[static_cast<std::size_t>(i)] = space.weights[static_cast<std::size_t>(i)] * (ind[static_cast<std::size_t>(i)] - alpha);
    return min_weight_upper_set(order, v, SetPolicy::maximal).set;
}

// Joins of the maximal minimizing set as alpha grows, computed by monotone
// parametric refinement: the unresolved band D = Sr \ Sl crosses zero at
// alpha = (sum of w*ind over D) / (weight of D); a single jump lands exactly
// there, several jumps place it strictly between the outer ones.
void join_recurse(const FiniteSpace& space, const Preorder& order, const std::vector<double>& ind,
                  double al, const UpperSet& sl, double ar, const UpperSet& sr,
                  std::vector<double>& join, int depth) {
    if (depth > 4 * space.n + 16)
        throw std::logic_error("quantile_join_levels: parametric recursion stalled");
    std::vector<int> band;
    for (int i = 0; i < space.n; ++i)
        if (sr.contains(i) && !sl.contains(i)) band.push_back(i);
    if (band.empty()) return;

    double wsum = 0.0, csum = 0.0;
    for (int i : band) {
        wsum += space.weights[static_cast<std::size_t>(i)];
        csum += space.weights[static_cast<std::size_t>(i)] * ind[static_cast<std::size_t>(i)];
    }
    const double alpha_star = csum / wsum;
    UpperSet mid = maximal_minimizer_at(space, order, ind, alpha_star);

    if (mid == sl) {
        // can only happen through rounding; nudge into the upper part
        mid = maximal_minimizer_at(space, order, ind, alpha_star + 1e-12 * (1.0 + std::abs(alpha_star)));
        if (mid == sl) throw std::logic_error("quantile_join_levels: no progress");
    }
    if (mid == sr) {
        for (int i : band) join[static_cast<std::size_t>(i)] = alpha_star;
        return;
    }
    join_recurse(space, order, ind, al, sl, alpha_star, mid, join, depth + 1);
    join_recurse(space, order, ind, alpha_star, mid, ar, sr, join, depth + 1);
}

}  // namespace

ModularObjective ModularObjective::from(const FiniteSpace& space, const std::vector<double>& y,
                                        const IdentificationFunction& v, double eta) {
    if (space.n != static_cast<int>(y.size()))
        throw std::invalid_argument("ModularObjective: dimension mismatch");
    ModularObjective m;
    m.eta = eta;
    if (v.kind == IdentificationFunction::Kind::quantile) m.alpha = v.alpha;
    m.contributions.resize(y.size());
    for (int i = 0; i < space.n; ++i)
        m.contributions[static_cast<std::size_t>(i)] =
            space.weights[static_cast<std::size_t>(i)] * v(eta, y[static_cast<std::size_t>(i)]);
    return m;
}

double ModularObjective::sum_over(const UpperSet& a) const {
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i)
        if (a.contains(i)) s += contributions[static_cast<std::size_t>(i)];
    return s;
}

UpperSet minimizing_set(const FiniteSpace& space, const Preorder& order,
                        const std::vector<double>& y, const IdentificationFunction& v,
                        double eta, SetPolicy policy) {
    const ModularObjective m = ModularObjective::from(space, y, v, eta);
    return min_weight_upper_set(order, m.contributions, policy).set;
}

void MinimizingPath::validate_decreasing() const {
    if (sets.size() != breakpoints.size() + 1)
        throw std::logic_error("MinimizingPath: cell count mismatch");
    for (std::size_t j = 0; j + 1 < sets.size(); ++j)
        for (int i = 0; i < sets[j].size(); ++i)
            if (sets[j + 1].contains(i) && !sets[j].contains(i))
                throw std::logic_error("MinimizingPath: sets not decreasing in eta");
}

std::vector<double> quantile_join_levels(const FiniteSpace& space, const Preorder& order,
                                         const std::vector<double>& y, double eta) {
    if (space.n != order.n || static_cast<int>(y.size()) != space.n)
        throw std::invalid_argument("quantile_join_levels: dimension mismatch");
    const auto ind = indicator_above(y, eta);
    std::vector<double> join(static_cast<std::size_t>(space.n), 1.0);
    const UpperSet s0 = maximal_minimizer_at(space, order, ind, 0.0);
    const UpperSet s1 = UpperSet::full(space.n);  // at alpha=1 every contribution is <= 0
    for (int i = 0; i < space.n; ++i)
        if (s0.contains(i)) join[static_cast<std::size_t>(i)] = 0.0;
    join_recurse(space, order, ind, 0.0, s0, 1.0, s1, join, 0);
    return join;
}

MinimizingPath build_decreasing_path(const FiniteSpace& space, const Preorder& order,
                                     const std::vector<double>& y,
                                     const IdentificationFunction& v, QuantileSide side) {
    if (space.n != order.n || static_cast<int>(y.size()) != space.n)
        throw std::invalid_argument("build_decreasing_path: dimension mismatch");
    MinimizingPath path;

    if (v.kind == IdentificationFunction::Kind::mean) {
        // Level sets of the isotonic fit are the maximal minimizers: the set
        // {fit >= eta} is constant on cells bounded by the fitted values.
        const IsotonicFit fit = isotonic_mean(space, order, y);
        path.breakpoints = unique_sorted(fit.fitted);
        const std::size_t cells = path.breakpoints.size() + 1;
        path.sets.reserve(cells);
        for (std::size_t j = 0; j < cells; ++j) {
            UpperSet a(space.n);
            if (j < path.breakpoints.size()) {
                const double cut = path.breakpoints[j];
                for (int i = 0; i < space.n; ++i)
                    if (fit.fitted[static_cast<std::size_t>(i)] >= cut) a.member[static_cast<std::size_t>(i)] = 1;
            }
            path.sets.push_back(std::move(a));
        }
        path.validate_decreasing();
        return path;
    }

    path.breakpoints = unique_sorted(y);
    if (v.kind == IdentificationFunction::Kind::quantile) path.alpha = v.alpha;
    const std::size_t cells = path.breakpoints.size() + 1;
    path.sets.reserve(cells);
    for (std::size_t j = 0; j < cells; ++j) {
        double eta;
        if (j == 0) eta = path.breakpoints.front() - 1.0;
        else if (j < path.breakpoints.size())
            eta = 0.5 * (path.breakpoints[j - 1] + path.breakpoints[j]);
        else eta = path.breakpoints.back() + 1.0;

        if (v.kind == IdentificationFunction::Kind::quantile && side == QuantileSide::lower) {
            // left-continuous extension: atoms whose join level lies strictly
            // below alpha. Joins and evaluation levels are the same rationals
            // computed along different float paths, so levels within 1e-12 of
            // a join count as the join itself.
            const auto join = quantile_join_levels(space, order, y, eta);
            UpperSet a(space.n);
            for (int i = 0; i < space.n; ++i)
                if (join[static_cast<std::size_t>(i)] < v.alpha - 1e-12) a.member[static_cast<std::size_t>(i)] = 1;
            path.sets.push_back(std::move(a));
        } else {
            path.sets.push_back(minimizing_set(space, order, y, v, eta, SetPolicy::maximal));
        }
    }
    path.validate_decreasing();
    return path;
}

ConditionalFunctional path_inverse(const MinimizingPath& path, const std::vector<double>& y) {
    if (path.sets.empty()) throw std::invalid_argument("path_inverse: empty path");
    const int n = path.sets.front().size();
    const double lo = *std::min_element(y.begin(), y.end());
    const double hi = *std::max_element(y.begin(), y.end());
    ConditionalFunctional out;
    out.values.assign(static_cast<std::size_t>(n), 0.0);
    out.clipped.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        int last = -1;
        for (std::size_t j = 0; j < path.sets.size(); ++j)
            if (path.sets[j].contains(i)) last = static_cast<int>(j);
        if (last < 0) {
            out.values[static_cast<std::size_t>(i)] = lo;
            out.clipped[static_cast<std::size_t>(i)] = 1;
        } else if (last == static_cast<int>(path.breakpoints.size())) {
            out.values[static_cast<std::size_t>(i)] = hi;
            out.clipped[static_cast<std::size_t>(i)] = 1;
        } else {
            // sup over the last cell (b_last, b_last+1]; the inf of the
            // non-membership cells above agrees by monotonicity
            out.values[static_cast<std::size_t>(i)] = path.breakpoints[static_cast<std::size_t>(last)];
        }
    }
    return out;
}

ConditionalFunctional conditional_quantile(const FiniteSpace& space, const Preorder& order,
                                           const std::vector<double>& y, double alpha,
                                           QuantileSide side) {
    const auto v = IdentificationFunction::quantile_fn(alpha);
    const MinimizingPath path = build_decreasing_path(space, order, y, v, side);
    ConditionalFunctional out = path_inverse(path, y);
    for (auto flag : out.clipped)
        if (flag) throw std::logic_error("conditional_quantile: sentinel reached for interior level");
    return out;
}

QuantileFixedPoint check_quantile_fixed_point(const FiniteSpace& space,
                                              const std::vector<double>& x,
                                              const std::vector<double>& y, double alpha) {
    if (space.n != static_cast<int>(x.size()) || x.size() != y.size())
        throw std::invalid_argument("check_quantile_fixed_point: dimension mismatch");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("check_quantile_fixed_point: level outside (0,1)");

    QuantileFixedPoint result;

    // (a) classical: within each sigma(x) group the lower alpha-quantile of y
    // must reproduce the common x value.
    result.classical = true;
    const auto values = unique_sorted(x);
    for (double xv : values) {
        std::vector<double> gy, gw;
        for (int i = 0; i < space.n; ++i)
            if (x[static_cast<std::size_t>(i)] == xv) {
                gy.push_back(y[static_cast<std::size_t>(i)]);
                gw.push_back(space.weights[static_cast<std::size_t>(i)]);
            }
        const double q = lower_quantile(StepCdf::empirical(gy, gw), alpha);
        if (std::abs(q - xv) > 1e-12) {
            result.classical = false;
            break;
        }
    }

    // (b) lattice: x must be the lower conditional quantile for the order it
    // induces. Score minimality alone would be too weak here: at levels where
    // the pinball loss is flat the minimizer is a whole interval, and only
    // the lower endpoint matches the classical side.
    CovariateTable t;
    t.rows = space.n;
    t.cols = 1;
    t.data = x;
    const Preorder induced = preorder_from_covariates(t);
    const auto cq = conditional_quantile(space, induced, y, alpha, QuantileSide::lower);
    result.lattice = true;
    for (int i = 0; i < space.n; ++i)
        if (std::abs(cq.values[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]) > 1e-12) {
            result.lattice = false;
            break;
        }

    if (result.lattice) {
        // certify minimality with the oracle search; the domain can be
        // restricted to observed responses because the score is piecewise
        // linear in each block value with breakpoints only at observed y,
        // so some minimizer sits on them
        const auto score = [&](int atom, double value) {
            return quantile_score(alpha, value, y[static_cast<std::size_t>(atom)]);
        };
        OracleBudget budget;
        budget.max_atoms = std::max(budget.max_atoms, space.n);
        const ScoreMinResult oracle = brute_expected_score_min(space, induced, score, y, budget);
        double at_x = 0.0;
        for (int i = 0; i < space.n; ++i)
            at_x += space.weights[static_cast<std::size_t>(i)] *
                    quantile_score(alpha, x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
        if (at_x > oracle.objective + 1e-9)
            throw std::logic_error("check_quantile_fixed_point: fixed point misses the score minimum");
    }
    return result;
}

}  // namespace icl
