#include "icl/step_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icl {

StepCdf StepCdf::from_points_masses(std::vector<std::pair<double, double>> pm) {
    if (pm.empty()) throw std::invalid_argument("StepCdf: no mass");
    std::sort(pm.begin(), pm.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    StepCdf f;
    double running = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) {
        const auto [x, m] = pm[i];
        if (std::isnan(x) || std::isnan(m) || m < 0.0)
            throw std::invalid_argument("StepCdf: bad jump");
        if (m == 0.0) continue;
        if (!f.points.empty() && x == f.points.back()) {
            running += m;
            f.cum.back() = running;
        } else {
            running += m;
            f.points.push_back(x);
            f.cum.push_back(running);
        }
    }
    f.validate();
    return f;
}

StepCdf StepCdf::point_mass(double y) { return from_points_masses({{y, 1.0}}); }

StepCdf StepCdf::empirical(const std::vector<double>& values,
                           const std::vector<double>& weights) {
    if (values.size() != weights.size() || values.empty())
        throw std::invalid_argument("StepCdf::empirical: length mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("StepCdf::empirical: weights must be positive");
        total += w;
    }
    std::vector<std::pair<double, double>> pm;
    pm.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) pm.emplace_back(values[i], weights[i] / total);
    return from_points_masses(std::move(pm));
}

void StepCdf::validate() const {
    if (points.empty() || points.size() != cum.size())
        throw std::invalid_argument("StepCdf: empty or inconsistent");
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (!(points[k] > points[k - 1])) throw std::invalid_argument("StepCdf: points not increasing");
        if (!(cum[k] > cum[k - 1])) throw std::invalid_argument("StepCdf: cum not increasing");
    }
    if (!(cum.front() > 0.0)) throw std::invalid_argument("StepCdf: nonpositive first mass");
    if (std::abs(cum.back() - 1.0) > 1e-12)
        throw std::invalid_argument("StepCdf: total mass must be one");
}

double cdf_eval(const StepCdf& f, double x) {
    // largest point <= x
    auto it = std::upper_bound(f.points.begin(), f.points.end(), x);
    if (it == f.points.begin()) return 0.0;
    return f.cum[static_cast<std::size_t>(it - f.points.begin()) - 1];
}

double left_limit_eval(const StepCdf& f, double x) {
    auto it = std::lower_bound(f.points.begin(), f.points.end(), x);
    if (it == f.points.begin()) return 0.0;
    return f.cum[static_cast<std::size_t>(it - f.points.begin()) - 1];
}

static void check_level(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("quantile level must lie in (0,1)");
}

double lower_quantile(const StepCdf& f, double alpha) {
    check_level(alpha);
    auto it = std::lower_bound(f.cum.begin(), f.cum.end(), alpha);
    return f.points[static_cast<std::size_t>(it - f.cum.begin())];
}

double upper_quantile(const StepCdf& f, double alpha) {
    check_level(alpha);
    auto it = std::upper_bound(f.cum.begin(), f.cum.end(), alpha);
    return f.points[static_cast<std::size_t>(it - f.cum.begin())];
}

double mean(const StepCdf& f) {
    double m = 0.0;
    for (int k = 0; k < f.jumps(); ++k) m += f.points[static_cast<std::size_t>(k)] * f.mass_at(k);
    return m;
}

bool cdf_equal(const StepCdf& a, const StepCdf& b, double tol) {
    std::vector<double> grid = a.points;
    grid.insert(grid.end(), b.points.begin(), b.points.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (double x : grid)
        if (std::abs(cdf_eval(a, x) - cdf_eval(b, x)) > tol) return false;
    return true;
}

bool stochastically_leq(const StepCdf& a, const StepCdf& b, double tol) {
    std::vector<double> grid = a.points;
    grid.insert(grid.end(), b.points.begin(), b.points.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (double x : grid)
        if (cdf_eval(a, x) < cdf_eval(b, x) - tol) return false;
    return true;
}

}  // namespace icl
