#include "icl/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "icl/icl_fit.hpp"
#include "icl/isotonic.hpp"

namespace icl {
namespace {

constexpr double kTol = 1e-10;

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// atoms grouped by identical forecast (same jumps, same masses within 1e-12)
std::vector<std::vector<int>> forecast_groups(const ForecastProfile& p) {
    std::vector<std::vector<int>> groups;
    std::vector<int> rep;
    for (int i = 0; i < p.space.n; ++i) {
        bool placed = false;
        for (std::size_t g = 0; g < groups.size(); ++g)
            if (cdf_equal(p.forecasts[static_cast<std::size_t>(i)], p.forecasts[static_cast<std::size_t>(rep[g])])) {
                groups[g].push_back(i);
                placed = true;
                break;
            }
        if (!placed) {
            groups.push_back({i});
            rep.push_back(i);
        }
    }
    return groups;
}

double group_weight(const ForecastProfile& p, const std::vector<int>& atoms) {
    double w = 0.0;
    for (int i : atoms) w += p.space.weights[static_cast<std::size_t>(i)];
    return w;
}

double group_freq_leq(const ForecastProfile& p, const std::vector<int>& atoms, double z) {
    double w = 0.0;
    for (int i : atoms)
        if (p.y[static_cast<std::size_t>(i)] <= z) w += p.space.weights[static_cast<std::size_t>(i)];
    return w / group_weight(p, atoms);
}

double group_freq_lt(const ForecastProfile& p, const std::vector<int>& atoms, double z) {
    double w = 0.0;
    for (int i : atoms)
        if (p.y[static_cast<std::size_t>(i)] < z) w += p.space.weights[static_cast<std::size_t>(i)];
    return w / group_weight(p, atoms);
}

StepCdf group_law(const ForecastProfile& p, const std::vector<int>& atoms) {
    std::vector<double> values, weights;
    for (int i : atoms) {
        values.push_back(p.y[static_cast<std::size_t>(i)]);
        weights.push_back(p.space.weights[static_cast<std::size_t>(i)]);
    }
    return StepCdf::empirical(values, weights);
}

// lower alpha-quantile of the group law just above level `from`: the smallest
// observed value whose cumulative group mass strictly exceeds `from`
double group_quantile_above(const StepCdf& law, double from) {
    for (int k = 0; k < law.jumps(); ++k)
        if (law.cum[static_cast<std::size_t>(k)] > from + kTol) return law.points[static_cast<std::size_t>(k)];
    return law.points.back();
}

// lower quantile with a tolerance on the level: cumulative masses reached
// along different summation orders may differ from the level by a few ulps
double lower_quantile_tol(const StepCdf& f, double alpha) {
    for (int k = 0; k < f.jumps(); ++k)
        if (f.cum[static_cast<std::size_t>(k)] >= alpha - kTol) return f.points[static_cast<std::size_t>(k)];
    return f.points.back();
}

}  // namespace

void ForecastProfile::validate() const {
    space.validate();
    if (static_cast<int>(forecasts.size()) != space.n || static_cast<int>(y.size()) != space.n)
        throw std::invalid_argument("ForecastProfile: dimension mismatch");
    for (const auto& f : forecasts) f.validate();
}

CheckResult check_auto(const ForecastProfile& profile) {
    profile.validate();
    for (const auto& atoms : forecast_groups(profile)) {
        const StepCdf& f = profile.forecasts[static_cast<std::size_t>(atoms.front())];
        const StepCdf law = group_law(profile, atoms);
        std::vector<double> grid = f.points;
        grid.insert(grid.end(), law.points.begin(), law.points.end());
        for (double z : unique_sorted(std::move(grid))) {
            const double lhs = cdf_eval(law, z);
            const double rhs = cdf_eval(f, z);
            if (std::abs(lhs - rhs) > kTol)
                return {false, CalibrationWitness{z, atoms.front(), lhs, rhs,
                                                  "group law differs from forecast"}};
        }
    }
    return {};
}

CheckResult check_isotonic(const ForecastProfile& profile) {
    profile.validate();
    const Preorder order = preorder_from_stochastic_order(profile.forecasts);
    const IclFit fit = icl_fit(profile.space, order, profile.y);
    for (int i = 0; i < profile.space.n; ++i) {
        const StepCdf refit = fit.row(i);
        const StepCdf& f = profile.forecasts[static_cast<std::size_t>(i)];
        std::vector<double> grid = f.points;
        grid.insert(grid.end(), refit.points.begin(), refit.points.end());
        for (double z : unique_sorted(std::move(grid))) {
            const double lhs = cdf_eval(refit, z);
            const double rhs = cdf_eval(f, z);
            if (std::abs(lhs - rhs) > kTol)
                return {false,
                        CalibrationWitness{z, i, lhs, rhs, "conditional law given the forecast "
                                                           "lattice differs from forecast"}};
        }
    }
    return {};
}

CheckResult check_threshold(const ForecastProfile& profile) {
    profile.validate();
    std::vector<double> grid = profile.y;
    for (const auto& f : profile.forecasts)
        grid.insert(grid.end(), f.points.begin(), f.points.end());
    for (double z : unique_sorted(std::move(grid))) {
        // group atoms by the forecast value at z
        std::vector<double> values;
        for (const auto& f : profile.forecasts) values.push_back(cdf_eval(f, z));
        for (double v : unique_sorted(values)) {
            std::vector<int> atoms;
            for (int i = 0; i < profile.space.n; ++i)
                if (std::abs(cdf_eval(profile.forecasts[static_cast<std::size_t>(i)], z) - v) <= 1e-12)
                    atoms.push_back(i);
            const double freq = group_freq_leq(profile, atoms, z);
            if (std::abs(freq - v) > kTol)
                return {false, CalibrationWitness{z, atoms.front(), freq, v,
                                                  "conditional frequency differs from forecast value"}};
        }
    }
    return {};
}

CheckResult check_quantile(const ForecastProfile& profile) {
    profile.validate();
    // Forecast quantiles and their groupings are constant between consecutive
    // forecast mass levels, so each level cell is checked at its entry and at
    // its endpoint; together the two pin the group quantile on the whole cell.
    std::vector<double> levels;
    for (const auto& f : profile.forecasts)
        for (double c : f.cum)
            if (c < 1.0 - 1e-12) levels.push_back(c);
    levels = unique_sorted(std::move(levels));
    // cluster levels that differ only by float noise; slivers between them
    // are not genuine quantile cells
    {
        std::vector<double> merged;
        for (double c : levels) {
            if (!merged.empty() && c - merged.back() < 1e-9) merged.back() = c;
            else merged.push_back(c);
        }
        levels = std::move(merged);
    }

    std::vector<double> alphas;  // cell endpoints in (0,1)
    for (double c : levels) alphas.push_back(c);
    // the unbounded top cell is probed near one, but always above the last level
    const double top = levels.empty() ? 0.0 : levels.back();
    alphas.push_back(std::max(1.0 - 1e-9, 0.5 * (top + 1.0)));
    double prev = 0.0;
    std::vector<std::pair<double, double>> cells;  // (alpha, cell entry level)
    for (double a : alphas) {
        cells.emplace_back(a, prev);
        prev = a;
    }

    for (auto [alpha, entry] : cells) {
        std::vector<double> qvalues;
        for (const auto& f : profile.forecasts) qvalues.push_back(lower_quantile_tol(f, alpha));
        for (double qv : unique_sorted(qvalues)) {
            std::vector<int> atoms;
            for (int i = 0; i < profile.space.n; ++i)
                if (lower_quantile_tol(profile.forecasts[static_cast<std::size_t>(i)], alpha) == qv)
                    atoms.push_back(i);
            const StepCdf law = group_law(profile, atoms);
            const double q_exit = lower_quantile_tol(law, alpha);
            const double q_entry = group_quantile_above(law, entry);
            if (std::abs(q_exit - qv) > kTol || std::abs(q_entry - qv) > kTol)
                return {false, CalibrationWitness{alpha, atoms.front(),
                                                  std::abs(q_exit - qv) > kTol ? q_exit : q_entry,
                                                  qv, "group quantile differs from forecast quantile"}};
            // bracketing over the whole cell: P(Y < q) <= entry and
            // alpha <= P(Y <= q) within the group
            const double below = group_freq_lt(profile, atoms, qv);
            const double upto = group_freq_leq(profile, atoms, qv);
            if (below > entry + kTol || upto < alpha - kTol)
                return {false, CalibrationWitness{alpha, atoms.front(), below, upto,
                                                  "group does not bracket the level"}};
        }
    }
    return {};
}

CheckResult check_pit_bounds(const ForecastProfile& profile) {
    profile.validate();
    const int n = profile.space.n;
    std::vector<double> pit(static_cast<std::size_t>(n)), pit_left(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        pit[static_cast<std::size_t>(i)] = cdf_eval(profile.forecasts[static_cast<std::size_t>(i)], profile.y[static_cast<std::size_t>(i)]);
        pit_left[static_cast<std::size_t>(i)] = left_limit_eval(profile.forecasts[static_cast<std::size_t>(i)], profile.y[static_cast<std::size_t>(i)]);
    }
    // P(F(Y) < a) <= a for all a in (0,1) holds iff P(F(Y) <= a) <= a at
    // every attained value a < 1.
    for (double a : unique_sorted(pit)) {
        if (a >= 1.0 - 1e-12) continue;
        double mass = 0.0;
        for (int i = 0; i < n; ++i)
            if (pit[static_cast<std::size_t>(i)] <= a + 1e-12) mass += profile.space.weights[static_cast<std::size_t>(i)];
        if (mass > a + kTol)
            return {false, CalibrationWitness{a, -1, mass, a, "PIT lower bound violated"}};
    }
    // a <= P(F(Y-) <= a) for all a in (0,1) holds iff P(F(Y-) < b) >= b at
    // every attained value b in (0,1].
    for (double b : unique_sorted(pit_left)) {
        if (b <= 1e-12) continue;
        double mass = 0.0;
        for (int i = 0; i < n; ++i)
            if (pit_left[static_cast<std::size_t>(i)] < b - 1e-12) mass += profile.space.weights[static_cast<std::size_t>(i)];
        if (mass < b - kTol)
            return {false, CalibrationWitness{b, -1, mass, b, "PIT upper bound violated"}};
    }
    return {};
}

MeanFixedPoint check_mean_fixed_point(const FiniteSpace& space, const std::vector<double>& x,
                                      const std::vector<double>& y) {
    if (space.n != static_cast<int>(x.size()) || x.size() != y.size())
        throw std::invalid_argument("check_mean_fixed_point: dimension mismatch");
    MeanFixedPoint result;

    result.classical = true;
    for (double xv : unique_sorted(x)) {
        double wsum = 0.0, ysum = 0.0;
        for (int i = 0; i < space.n; ++i)
            if (x[static_cast<std::size_t>(i)] == xv) {
                wsum += space.weights[static_cast<std::size_t>(i)];
                ysum += space.weights[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
            }
        if (std::abs(ysum / wsum - xv) > kTol) {
            result.classical = false;
            break;
        }
    }

    CovariateTable t;
    t.rows = space.n;
    t.cols = 1;
    t.data = x;
    const IsotonicFit fit = isotonic_mean(space, preorder_from_covariates(t), y);
    result.lattice = true;
    for (int i = 0; i < space.n; ++i)
        if (std::abs(fit.fitted[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]) > kTol) {
            result.lattice = false;
            break;
        }
    return result;
}

CalibrationReport run_calibration(const ForecastProfile& profile) {
    CalibrationReport report;
    report.auto_calibration = check_auto(profile);
    report.isotonic = check_isotonic(profile);
    report.threshold = check_threshold(profile);
    report.quantile = check_quantile(profile);
    report.pit_bounds = check_pit_bounds(profile);
    report.tolerance = kTol;
    if (report.auto_calibration.ok && !report.isotonic.ok)
        throw std::logic_error("calibration hierarchy violated: auto without isotonic");
    if (report.isotonic.ok && (!report.threshold.ok || !report.quantile.ok))
        throw std::logic_error("calibration hierarchy violated: isotonic without threshold/quantile");
    return report;
}

}  // namespace icl
