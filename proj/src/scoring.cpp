#include "icl/scoring.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace icl {

IdentificationFunction IdentificationFunction::mean_fn() {
    IdentificationFunction v;
    v.kind = Kind::mean;
    v.strictly_increasing = true;
    return v;
}

IdentificationFunction IdentificationFunction::quantile_fn(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("quantile level must lie in (0,1)");
    IdentificationFunction v;
    v.kind = Kind::quantile;
    v.alpha = alpha;
    v.strictly_increasing = false;
    return v;
}

IdentificationFunction IdentificationFunction::custom(std::function<double(double, double)> fn,
                                                      bool strictly_increasing) {
    IdentificationFunction v;
    v.kind = Kind::custom;
    v.fn = std::move(fn);
    v.strictly_increasing = strictly_increasing;
    return v;
}

double IdentificationFunction::operator()(double x, double y) const {
    switch (kind) {
        case Kind::mean: return x - y;
        case Kind::quantile: return (x > y ? 1.0 : 0.0) - alpha;
        case Kind::custom: return fn(x, y);
    }
    return 0.0;
}

double elementary_quantile_score(double alpha, double eta, double x, double y) {
    if (y < eta && eta <= x) return 1.0 - alpha;
    if (x < eta && eta <= y) return alpha;
    return 0.0;
}

double elementary_mean_score(double eta, double x, double y) {
    if (y < eta && eta <= x) return eta - y;
    if (x < eta && eta <= y) return y - eta;
    return 0.0;
}

double elementary_score(const IdentificationFunction& v, double eta, double x, double y) {
    if (y < eta && eta <= x) return v(eta, y);
    if (x < eta && eta <= y) return -v(eta, y);
    return 0.0;
}

double quantile_score(double alpha, double x, double y) {
    return ((y <= x ? 1.0 : 0.0) - alpha) * (x - y);
}

double brier_score(double x, double y) { return (x - y) * (x - y); }

double crps(const StepCdf& f, double y) {
    // The integrand (F(z) - 1{y<=z})^2 is constant between consecutive points
    // of {jumps} union {y} and vanishes outside their span.
    std::vector<double> cuts = f.points;
    cuts.push_back(y);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double z = cuts[k];
        const double d = cdf_eval(f, z) - (y <= z ? 1.0 : 0.0);
        total += d * d * (cuts[k + 1] - z);
    }
    return total;
}

double crps_via_quantiles(const StepCdf& f, double y) {
    // On (c_{k-1}, c_k] the lower quantile is points[k]; the integrand is
    // affine in alpha, so each cell integrates in closed form.
    double total = 0.0;
    double lo = 0.0;
    for (int k = 0; k < f.jumps(); ++k) {
        const double hi = f.cum[static_cast<std::size_t>(k)];
        const double x = f.points[static_cast<std::size_t>(k)];
        const double indicator = (y <= x) ? 1.0 : 0.0;
        // integral over (lo, hi) of (indicator - alpha) dalpha, times (x - y)
        const double seg = indicator * (hi - lo) - 0.5 * (hi * hi - lo * lo);
        total += seg * (x - y);
        lo = hi;
    }
    return 2.0 * total;
}

DiscreteMeasure DiscreteMeasure::dirac(double eta) { return {{eta}, {1.0}}; }

DiscreteMeasure DiscreteMeasure::lebesgue_grid(double lo, double hi, int cells) {
    if (cells <= 0 || !(hi > lo))
        throw std::invalid_argument("lebesgue_grid: bad range");
    DiscreteMeasure h;
    const double step = (hi - lo) / cells;
    for (int k = 0; k < cells; ++k) {
        h.points.push_back(lo + (k + 0.5) * step);
        h.masses.push_back(step);
    }
    return h;
}

double mixture_mean_score(const DiscreteMeasure& h, double x, double y) {
    double total = 0.0;
    for (std::size_t k = 0; k < h.points.size(); ++k)
        total += h.masses[k] * elementary_mean_score(h.points[k], x, y);
    return total;
}

double mixture_quantile_score(const DiscreteMeasure& h, double alpha, double x, double y) {
    double total = 0.0;
    for (std::size_t k = 0; k < h.points.size(); ++k)
        total += h.masses[k] * elementary_quantile_score(alpha, h.points[k], x, y);
    return total;
}

}  // namespace icl
