#pragma once

#include <functional>
#include <vector>

#include "icl/step_cdf.hpp"

namespace icl {

/// V(x,y), increasing and left-continuous in x for each fixed y. The mean
/// functional uses x - y, the alpha-quantile uses 1{x>y} - alpha.
struct IdentificationFunction {
    enum class Kind { mean, quantile, custom };

    Kind kind = Kind::mean;
    double alpha = 0.0;  // quantile only
    bool strictly_increasing = true;
    std::function<double(double, double)> fn;  // custom only

    static IdentificationFunction mean_fn();
    static IdentificationFunction quantile_fn(double alpha);
    static IdentificationFunction custom(std::function<double(double, double)> fn,
                                         bool strictly_increasing);

    double operator()(double x, double y) const;
};

struct ElementaryScoreParams {
    double eta = 0.0;
    double alpha = 0.5;  // quantile family only
};

/// S^Q_{alpha,eta}(x,y) = (1-alpha) 1{y < eta <= x} + alpha 1{x < eta <= y}.
double elementary_quantile_score(double alpha, double eta, double x, double y);

/// S^E_eta(x,y) = (eta-y) 1{y < eta <= x} + (y-eta) 1{x < eta <= y}.
double elementary_mean_score(double eta, double x, double y);

/// S_eta(x,y) = V(eta,y) 1{y < eta <= x} - V(eta,y) 1{x < eta <= y}.
double elementary_score(const IdentificationFunction& v, double eta, double x, double y);

/// QS_alpha(x,y) = (1{y<=x} - alpha)(x - y).
double quantile_score(double alpha, double x, double y);

/// BS(x,y) = (x-y)^2.
double brier_score(double x, double y);

/// crps(F,y) = integral of BS(F(z), 1{y<=z}) dz, exact for step cdfs.
double crps(const StepCdf& f, double y);

/// Same value through 2 * integral over (0,1) of QS_alpha(F^{-1}(alpha), y).
double crps_via_quantiles(const StepCdf& f, double y);

/// Finite discrete measure over eta, used for mixture representations.
struct DiscreteMeasure {
    std::vector<double> points;
    std::vector<double> masses;

    static DiscreteMeasure dirac(double eta);
    /// n cells of Lebesgue measure on [lo,hi]: midpoints weighted by cell width.
    static DiscreteMeasure lebesgue_grid(double lo, double hi, int cells);
};

/// Sum of elementary mean scores against the measure H.
double mixture_mean_score(const DiscreteMeasure& h, double x, double y);

/// Sum of elementary quantile scores against the measure H.
double mixture_quantile_score(const DiscreteMeasure& h, double alpha, double x, double y);

}  // namespace icl
