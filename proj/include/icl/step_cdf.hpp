#pragma once

#include <utility>
#include <vector>

namespace icl {

/// Right-continuous step distribution on the real line: strictly increasing
/// jump locations with strictly increasing cumulative masses ending at one.
struct StepCdf {
    std::vector<double> points;
    std::vector<double> cum;

    /// Builds from (location, mass) pairs; masses at exactly-equal locations
    /// are merged, zero masses dropped, total must be 1 within 1e-12.
    static StepCdf from_points_masses(std::vector<std::pair<double, double>> pm);
    static StepCdf point_mass(double y);
    /// Weighted empirical distribution (weights need not be normalized).
    static StepCdf empirical(const std::vector<double>& values,
                             const std::vector<double>& weights);

    int jumps() const { return static_cast<int>(points.size()); }
    double mass_at(int k) const { return k == 0 ? cum[0] : cum[k] - cum[k - 1]; }

    void validate() const;
};

/// F(x), right-continuous evaluation.
double cdf_eval(const StepCdf& f, double x);

/// F(x-), mass strictly below x.
double left_limit_eval(const StepCdf& f, double x);

/// inf{z : F(z) >= alpha}, alpha in (0,1).
double lower_quantile(const StepCdf& f, double alpha);

/// sup{z : F(z) <= alpha}, alpha in (0,1).
double upper_quantile(const StepCdf& f, double alpha);

double mean(const StepCdf& f);

/// Step functions are equal iff they agree on the merged jump grid.
bool cdf_equal(const StepCdf& a, const StepCdf& b, double tol = 1e-12);

/// True iff a is stochastically smaller or equal: a(x) >= b(x) for all x.
bool stochastically_leq(const StepCdf& a, const StepCdf& b, double tol = 1e-12);

}  // namespace icl
