#pragma once

#include <optional>
#include <string>
#include <vector>

#include "icl/space.hpp"
#include "icl/step_cdf.hpp"

namespace icl {

/// A forecast profile: per-atom predictive step cdf plus the realized
/// response on a finite space.
struct ForecastProfile {
    FiniteSpace space;
    std::vector<StepCdf> forecasts;
    std::vector<double> y;

    void validate() const;
};

struct CalibrationWitness {
    double at = 0.0;   // threshold or level
    int group = -1;    // representative atom of the failing group
    double lhs = 0.0;
    double rhs = 0.0;
    std::string note;
};

struct CheckResult {
    bool ok = true;
    std::optional<CalibrationWitness> witness;
};

/// Grouping by identical forecast; within each group the empirical
/// conditional law of y must equal the common forecast.
CheckResult check_auto(const ForecastProfile& profile);

/// ICL of y under the forecast-induced stochastic preorder must reproduce
/// the forecasts.
CheckResult check_isotonic(const ForecastProfile& profile);

/// For every threshold, atoms grouped by the forecast value there must have
/// matching conditional frequency of {y <= z}.
CheckResult check_threshold(const ForecastProfile& profile);

/// For every level, atoms grouped by the forecast lower quantile must have a
/// matching empirical lower quantile, and the group must bracket the level:
/// P(Y < q) <= alpha <= P(Y <= q).
CheckResult check_quantile(const ForecastProfile& profile);

/// Discrete PIT bounds P(F(Y) < a) <= a <= P(F(Y-) <= a) for all levels.
CheckResult check_pit_bounds(const ForecastProfile& profile);

/// Both directions of the mean fixed-point equivalence: (a) group-by-value
/// conditional means of y equal x; (b) x is the isotonic fit of y under the
/// preorder induced by x. The two always agree.
struct MeanFixedPoint {
    bool classical = false;
    bool lattice = false;
};

MeanFixedPoint check_mean_fixed_point(const FiniteSpace& space, const std::vector<double>& x,
                                      const std::vector<double>& y);

struct CalibrationReport {
    CheckResult auto_calibration;
    CheckResult isotonic;
    CheckResult threshold;
    CheckResult quantile;
    CheckResult pit_bounds;
    double tolerance = 1e-10;
};

/// Runs all five checks and enforces the implication hierarchy
/// (auto => isotonic => threshold and quantile); a violation is a bug,
/// reported by throwing.
CalibrationReport run_calibration(const ForecastProfile& profile);

}  // namespace icl
