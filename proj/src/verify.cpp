#include "icl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "icl/calibration.hpp"
#include "icl/cli.hpp"
#include "icl/functionals.hpp"
#include "icl/icl_fit.hpp"
#include "icl/isotonic.hpp"
#include "icl/scoring.hpp"

namespace icl {
namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::uint64_t sub_seed(std::uint64_t seed, int t) {
    return seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(t + 1));
}

std::string describe(double lhs, double rhs) {
    std::ostringstream os;
    os << lhs << " vs " << rhs;
    return os.str();
}

// isotonic vector from independent uniforms: value = max of u over the down-set
std::vector<double> random_isotonic(Rng& rng, const Preorder& order) {
    std::vector<double> u(static_cast<std::size_t>(order.n));
    for (auto& x : u) x = rng.uniform();
    std::vector<double> v(static_cast<std::size_t>(order.n), 0.0);
    for (int i = 0; i < order.n; ++i) {
        double m = 0.0;
        for (int j = 0; j < order.n; ++j)
            if (order.leq(j, i)) m = std::max(m, u[static_cast<std::size_t>(j)]);
        v[static_cast<std::size_t>(i)] = m;
    }
    return v;
}

double fit_mean_crps(const IclFit& fit) {
    double total = 0.0;
    for (int i = 0; i < fit.n; ++i)
        total += fit.space.weights[static_cast<std::size_t>(i)] * crps(fit.row(i), fit.y[static_cast<std::size_t>(i)]);
    return total;
}

}  // namespace

void BatteryResult::fail(std::uint64_t seed, const std::string& what) {
    pass = false;
    std::ostringstream os;
    os << what << " [instance seed " << seed << "]";
    failures.push_back(os.str());
}

RandomInstance random_instance(Rng& rng, int max_atoms, bool covariate_based) {
    RandomInstance inst;
    const int n = rng.uniform_int(1, max_atoms);
    if (rng.bernoulli(0.5)) {
        inst.space = FiniteSpace::uniform(n);
    } else {
        std::vector<double> w(static_cast<std::size_t>(n));
        double total = 0.0;
        for (auto& x : w) {
            x = rng.uniform(0.1, 1.0);
            total += x;
        }
        for (auto& x : w) x /= total;
        inst.space = FiniteSpace::with_weights(w);
    }

    if (covariate_based) {
        CovariateTable t;
        t.rows = n;
        t.cols = rng.uniform_int(1, 3);
        t.data.resize(static_cast<std::size_t>(n) * t.cols);
        for (auto& x : t.data) x = rng.uniform_int(0, 3);
        inst.order = preorder_from_covariates(t);
        inst.y.resize(static_cast<std::size_t>(n));
        if (rng.bernoulli(0.4)) {
            // isotonic-leaning responses so the classical law is sometimes monotone
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int c = 0; c < t.cols; ++c) s += t.at(i, c);
                inst.y[static_cast<std::size_t>(i)] = s + rng.uniform_int(0, 1);
            }
        } else {
            for (auto& v : inst.y) v = rng.uniform_int(0, 4);
        }
        return inst;
    }

    const int mode = rng.uniform_int(0, 3);
    if (mode == 0) inst.order = Preorder::chain(n);
    else if (mode == 1) inst.order = Preorder::antichain(n);
    else {
        std::vector<std::pair<int, int>> edges;
        const double p = rng.uniform(0.15, 0.6);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.bernoulli(p)) edges.emplace_back(i, j);
        if (mode == 3 && n >= 2 && rng.bernoulli(0.6)) {
            const int a = rng.uniform_int(0, n - 2);
            edges.emplace_back(a, a + 1);
            edges.emplace_back(a + 1, a);  // tie
        }
        inst.order = Preorder::from_edges(n, edges);
    }
    inst.y.resize(static_cast<std::size_t>(n));
    if (rng.bernoulli(0.7))
        for (auto& v : inst.y) v = rng.uniform_int(0, 4);
    else
        for (auto& v : inst.y) v = rng.uniform(-1.0, 1.0);
    return inst;
}

BatteryResult run_oracle_battery(std::uint64_t seed, int instances, int max_atoms) {
    BatteryResult result;
    for (int t = 0; t < instances; ++t) {
        const std::uint64_t s = sub_seed(seed, t);
        result.seeds.push_back(s);
        Rng rng(s);
        const RandomInstance inst = random_instance(rng, max_atoms);
        ++result.checked;

        const IsotonicFit fit = isotonic_mean(inst.space, inst.order, inst.y);
        if (!is_upper_measurable(inst.order, fit.fitted, 1e-10))
            result.fail(s, "cert: fit not upper-measurable");

        const auto uppers = enumerate_upper_sets(inst.order);
        for (const auto& a : uppers) {
            double ly = 0.0, lx = 0.0;
            for (int i = 0; i < inst.space.n; ++i)
                if (a.contains(i)) {
                    ly += inst.space.weights[static_cast<std::size_t>(i)] * inst.y[static_cast<std::size_t>(i)];
                    lx += inst.space.weights[static_cast<std::size_t>(i)] * fit.fitted[static_cast<std::size_t>(i)];
                }
            if (ly > lx + 1e-9) {
                result.fail(s, "cert: upper-set inequality violated " + describe(ly, lx));
                break;
            }
        }
        for (double value : unique_sorted(fit.fitted)) {
            double diff = 0.0;
            for (int i = 0; i < inst.space.n; ++i)
                if (fit.fitted[static_cast<std::size_t>(i)] == value)
                    diff += inst.space.weights[static_cast<std::size_t>(i)] *
                            (inst.y[static_cast<std::size_t>(i)] - fit.fitted[static_cast<std::size_t>(i)]);
            if (std::abs(diff) > 1e-9) {
                result.fail(s, "cert: level-set equality violated " + describe(diff, 0.0));
                break;
            }
        }

        const auto brute = brute_isotonic_mean(inst.space, inst.order, inst.y);
        for (int i = 0; i < inst.space.n; ++i) {
            if (std::abs(brute[static_cast<std::size_t>(i)] - fit.fitted[static_cast<std::size_t>(i)]) > 1e-9) {
                result.fail(s, "agree: solver vs partition oracle " +
                                   describe(fit.fitted[static_cast<std::size_t>(i)], brute[static_cast<std::size_t>(i)]));
                break;
            }
            const double mm = minmax_value(inst.space, inst.order, inst.y, i);
            if (std::abs(mm - fit.fitted[static_cast<std::size_t>(i)]) > 1e-9) {
                result.fail(s, "agree: solver vs minmax " + describe(fit.fitted[static_cast<std::size_t>(i)], mm));
                break;
            }
        }

        const IclFit law = icl_fit(inst.space, inst.order, inst.y);
        ForecastProfile profile;
        profile.space = inst.space;
        profile.y = inst.y;
        for (int i = 0; i < inst.space.n; ++i) profile.forecasts.push_back(law.row(i));
        if (!check_isotonic(profile).ok) result.fail(s, "calib: fitted law not isotonically calibrated");
        if (!check_threshold(profile).ok) result.fail(s, "calib: fitted law not threshold calibrated");
        if (!check_quantile(profile).ok) result.fail(s, "calib: fitted law not quantile calibrated");
        if (!check_pit_bounds(profile).ok) result.fail(s, "calib: fitted law violates PIT bounds");
    }
    return result;
}

BatteryResult run_universality_battery(std::uint64_t seed, int instances, int max_atoms) {
    BatteryResult result;
    for (int t = 0; t < instances; ++t) {
        const std::uint64_t s = sub_seed(seed, t);
        result.seeds.push_back(s);
        Rng rng(s);
        const RandomInstance inst = random_instance(rng, max_atoms);
        ++result.checked;
        const int n = inst.space.n;
        const IclFit fit = icl_fit(inst.space, inst.order, inst.y);
        const int m = fit.threshold_count();

        const auto oracle_cdf = brute_crps_min(inst.space, inst.order, inst.y);
        for (std::size_t idx = 0; idx < oracle_cdf.size(); ++idx)
            if (std::abs(oracle_cdf[idx] - fit.cdf[idx]) > 1e-9) {
                result.fail(s, "crps-min: fit differs from oracle matrix " +
                                   describe(fit.cdf[idx], oracle_cdf[idx]));
                break;
            }

        const double fit_crps = fit_mean_crps(fit);
        for (int rep = 0; rep < 1000; ++rep) {
            // random member of the isotonic class: per-threshold isotonic
            // columns, rows made monotone by a running max, last column one
            std::vector<double> member(static_cast<std::size_t>(m) * n, 1.0);
            for (int k = 0; k + 1 < m; ++k) {
                const auto col = random_isotonic(rng, inst.order);
                for (int i = 0; i < n; ++i) {
                    const double prev = k > 0 ? member[static_cast<std::size_t>(k - 1) * n + i] : 0.0;
                    member[static_cast<std::size_t>(k) * n + i] = std::max(prev, 1.0 - col[static_cast<std::size_t>(i)]);
                }
            }
            double member_crps = 0.0;
            for (int i = 0; i < n; ++i) {
                std::vector<std::pair<double, double>> pm;
                double prev = 0.0;
                for (int k = 0; k < m; ++k) {
                    const double cur = member[static_cast<std::size_t>(k) * n + i];
                    if (cur > prev) pm.emplace_back(fit.thresholds[static_cast<std::size_t>(k)], cur - prev);
                    prev = cur;
                }
                member_crps += inst.space.weights[static_cast<std::size_t>(i)] *
                               crps(StepCdf::from_points_masses(std::move(pm)), inst.y[static_cast<std::size_t>(i)]);
            }
            if (member_crps < fit_crps - 1e-12) {
                result.fail(s, "crps-dominance: random member beats the fit " +
                                   describe(member_crps, fit_crps));
                break;
            }
            if (member_crps <= fit_crps + 1e-12) {
                double dev = 0.0;
                for (std::size_t idx = 0; idx < member.size(); ++idx)
                    dev = std::max(dev, std::abs(member[idx] - fit.cdf[idx]));
                if (dev > 1e-9) {
                    result.fail(s, "crps-dominance: tie without matrix equality");
                    break;
                }
            }
        }

        // per-threshold, per-eta minimality of the survival column for the
        // elementary mean scores, against direct upper-set enumeration
        const auto uppers = enumerate_upper_sets(inst.order);
        for (int k = 0; k < m && result.pass; ++k) {
            const auto survival = fit.survival_column(k);
            std::vector<double> ind(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                ind[static_cast<std::size_t>(i)] =
                    inst.y[static_cast<std::size_t>(i)] > fit.thresholds[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
            std::vector<double> grid{0.0, 1.0};
            for (double v : survival) grid.push_back(v);
            grid = unique_sorted(std::move(grid));
            std::vector<double> etas;
            for (std::size_t g = 0; g + 1 < grid.size(); ++g) etas.push_back(0.5 * (grid[g] + grid[g + 1]));
            for (double v : grid)
                if (v > 0.0 && v <= 1.0) etas.push_back(v);
            for (double eta : etas) {
                double best = 0.0;
                bool first = true;
                for (const auto& a : uppers) {
                    double value = 0.0;
                    for (int i = 0; i < n; ++i) {
                        const bool in = a.contains(i);
                        if (ind[static_cast<std::size_t>(i)] == 0.0 && in)
                            value += inst.space.weights[static_cast<std::size_t>(i)] * eta;
                        if (ind[static_cast<std::size_t>(i)] == 1.0 && !in)
                            value += inst.space.weights[static_cast<std::size_t>(i)] * (1.0 - eta);
                    }
                    if (first || value < best) best = value, first = false;
                }
                double at_fit = 0.0;
                for (int i = 0; i < n; ++i)
                    at_fit += inst.space.weights[static_cast<std::size_t>(i)] *
                              elementary_mean_score(eta, survival[static_cast<std::size_t>(i)], ind[static_cast<std::size_t>(i)]);
                if (at_fit > best + 1e-9) {
                    result.fail(s, "elementary: survival column misses the oracle minimum " +
                                       describe(at_fit, best));
                    break;
                }
            }
        }

        // quantile path equalities and score minimality at the natural levels
        std::vector<double> alphas;
        for (double v : fit.cdf)
            if (v > 1e-12 && v < 1.0 - 1e-12) alphas.push_back(v);
        alphas = unique_sorted(std::move(alphas));
        {
            std::vector<double> mids;
            for (std::size_t g = 0; g + 1 < alphas.size(); ++g) mids.push_back(0.5 * (alphas[g] + alphas[g + 1]));
            if (!alphas.empty()) {
                mids.push_back(0.5 * alphas.front());
                mids.push_back(0.5 * (alphas.back() + 1.0));
            } else {
                mids.push_back(0.5);
            }
            alphas.insert(alphas.end(), mids.begin(), mids.end());
            alphas = unique_sorted(std::move(alphas));
        }
        for (double alpha : alphas) {
            const auto lower_path = conditional_quantile(inst.space, inst.order, inst.y, alpha,
                                                         QuantileSide::lower);
            const auto lower_law = icl_quantile(fit, alpha);
            for (int i = 0; i < n; ++i)
                if (lower_path.values[static_cast<std::size_t>(i)] != lower_law[static_cast<std::size_t>(i)]) {
                    result.fail(s, "quantile-eq: path and law lower quantiles differ at level " +
                                       std::to_string(alpha));
                    break;
                }
            const auto upper_path = conditional_quantile(inst.space, inst.order, inst.y, alpha,
                                                         QuantileSide::upper);
            const auto upper_law = icl_upper_quantile(fit, alpha);
            for (int i = 0; i < n; ++i)
                if (upper_path.values[static_cast<std::size_t>(i)] != upper_law[static_cast<std::size_t>(i)]) {
                    result.fail(s, "quantile-eq: path and law upper quantiles differ at level " +
                                       std::to_string(alpha));
                    break;
                }
            const auto score = [&](int atom, double value) {
                return quantile_score(alpha, value, inst.y[static_cast<std::size_t>(atom)]);
            };
            const auto oracle = brute_expected_score_min(inst.space, inst.order, score, inst.y);
            double at_q = 0.0;
            for (int i = 0; i < n; ++i)
                at_q += inst.space.weights[static_cast<std::size_t>(i)] *
                        quantile_score(alpha, lower_path.values[static_cast<std::size_t>(i)], inst.y[static_cast<std::size_t>(i)]);
            if (at_q > oracle.objective + 1e-9) {
                result.fail(s, "quantile-min: conditional quantile misses the oracle minimum " +
                                   describe(at_q, oracle.objective));
                break;
            }
            if (!result.pass) break;
        }
    }
    return result;
}

BatteryResult run_hierarchy_battery(std::uint64_t seed, int profiles) {
    BatteryResult result;
    for (int t = 0; t < profiles; ++t) {
        const std::uint64_t s = sub_seed(seed, t);
        result.seeds.push_back(s);
        Rng rng(s);
        ++result.checked;

        const int mode = t % 4;
        ForecastProfile profile;
        const RandomInstance inst = random_instance(rng, 6);
        profile.space = inst.space;
        profile.y = inst.y;
        if (mode == 0) {
            // auto-calibrated by construction: forecast = own-group law
            const int groups = rng.uniform_int(1, std::max(1, inst.space.n / 2));
            for (int i = 0; i < inst.space.n; ++i) {
                std::vector<double> gy, gw;
                for (int k = 0; k < inst.space.n; ++k)
                    if (k % std::max(groups, 1) == i % std::max(groups, 1)) {
                        gy.push_back(inst.y[static_cast<std::size_t>(k)]);
                        gw.push_back(inst.space.weights[static_cast<std::size_t>(k)]);
                    }
                profile.forecasts.push_back(StepCdf::empirical(gy, gw));
            }
        } else if (mode == 1) {
            const IclFit fit = icl_fit(inst.space, inst.order, inst.y);
            for (int i = 0; i < inst.space.n; ++i) profile.forecasts.push_back(fit.row(i));
        } else if (mode == 2) {
            for (int i = 0; i < inst.space.n; ++i) {
                const int a = rng.uniform_int(0, 3);
                const int b = rng.uniform_int(a + 1, 4);
                profile.forecasts.push_back(
                    StepCdf::from_points_masses({{double(a), 0.5}, {double(b), 0.5}}));
            }
        } else {
            const IclFit fit = icl_fit(inst.space, inst.order, inst.y);
            for (int i = 0; i < inst.space.n; ++i) profile.forecasts.push_back(fit.row(i));
            // perturb one forecast jump
            const int i = rng.uniform_int(0, inst.space.n - 1);
            auto& f = profile.forecasts[static_cast<std::size_t>(i)];
            std::vector<std::pair<double, double>> pm;
            for (int k = 0; k < f.jumps(); ++k) pm.emplace_back(f.points[static_cast<std::size_t>(k)], f.mass_at(k));
            pm.front().first -= 0.5;
            f = StepCdf::from_points_masses(std::move(pm));
        }

        const bool ac = check_auto(profile).ok;
        const bool ic = check_isotonic(profile).ok;
        const bool tc = check_threshold(profile).ok;
        const bool qc = check_quantile(profile).ok;
        if (ac && !ic) result.fail(s, "hierarchy: auto-calibrated profile fails isotonic");
        if (ic && !(tc && qc)) result.fail(s, "hierarchy: isotonically calibrated profile fails threshold/quantile");
    }
    return result;
}

BatteryResult run_fixed_point_battery(std::uint64_t seed, int mean_cases, int quantile_cases) {
    BatteryResult result;
    for (int t = 0; t < mean_cases; ++t) {
        const std::uint64_t s = sub_seed(seed, t);
        result.seeds.push_back(s);
        Rng rng(s);
        const RandomInstance inst = random_instance(rng, 8);
        ++result.checked;
        std::vector<double> x;
        const int mode = t % 3;
        if (mode == 0) x = isotonic_mean(inst.space, inst.order, inst.y).fitted;
        else if (mode == 1) x = inst.y;
        else {
            x.resize(inst.y.size());
            for (auto& v : x) v = rng.uniform_int(0, 3);
        }
        const MeanFixedPoint fp = check_mean_fixed_point(inst.space, x, inst.y);
        if (fp.classical != fp.lattice)
            result.fail(s, "fixed-point: mean equivalence sides disagree");
    }
    for (int t = 0; t < quantile_cases; ++t) {
        const std::uint64_t s = sub_seed(seed ^ 0x5bd1e995, t);
        result.seeds.push_back(s);
        Rng rng(s);
        const RandomInstance inst = random_instance(rng, 8);
        ++result.checked;
        const double alpha = std::clamp(rng.uniform(0.1, 0.9), 0.1, 0.9);
        std::vector<double> x;
        const int mode = t % 3;
        if (mode == 0)
            x = conditional_quantile(inst.space, inst.order, inst.y, alpha, QuantileSide::lower).values;
        else if (mode == 1) x = inst.y;
        else {
            x.resize(inst.y.size());
            for (auto& v : x) v = rng.uniform_int(0, 3);
        }
        const QuantileFixedPoint fp = check_quantile_fixed_point(inst.space, x, inst.y, alpha);
        if (fp.classical != fp.lattice)
            result.fail(s, "fixed-point: quantile equivalence sides disagree");
    }
    return result;
}

BatteryResult run_classical_battery(std::uint64_t seed, int instances, int max_atoms) {
    BatteryResult result;
    for (int t = 0; t < instances; ++t) {
        const std::uint64_t s = sub_seed(seed, t);
        result.seeds.push_back(s);
        Rng rng(s);
        const RandomInstance inst = random_instance(rng, max_atoms, true);
        ++result.checked;

        const ClassicalEquivalence ce = check_classical_equivalence(inst.space, inst.order, inst.y);

        // direct recomputation of group-wise stochastic monotonicity
        const Contraction c = contract_ties(inst.space, inst.order);
        bool monotone = true;
        for (int a = 0; a < c.k && monotone; ++a)
            for (int b = 0; b < c.k && monotone; ++b) {
                if (a == b || !c.class_order.leq(a, b)) continue;
                const StepCdf& fa = ce.classical[static_cast<std::size_t>(c.members[static_cast<std::size_t>(a)][0])];
                const StepCdf& fb = ce.classical[static_cast<std::size_t>(c.members[static_cast<std::size_t>(b)][0])];
                std::vector<double> grid = fa.points;
                grid.insert(grid.end(), fb.points.begin(), fb.points.end());
                for (double z : unique_sorted(std::move(grid)))
                    if (cdf_eval(fa, z) < cdf_eval(fb, z) - 1e-12) {
                        monotone = false;
                        break;
                    }
            }
        if (monotone != ce.isotonic) {
            result.fail(s, "classical: flag disagrees with direct monotonicity check");
            continue;
        }
        if (ce.isotonic) {
            const IclFit fit = icl_fit(inst.space, inst.order, inst.y);
            for (int i = 0; i < inst.space.n; ++i)
                if (!cdf_equal(fit.row(i), ce.classical[static_cast<std::size_t>(i)], 1e-12)) {
                    result.fail(s, "classical: ICL differs from monotone classical law");
                    break;
                }
        }
    }
    return result;
}

BatteryResult run_counterexample_battery(std::uint64_t seed, const std::string& fixtures_dir) {
    BatteryResult result;
    const CounterexampleKind kinds[] = {CounterexampleKind::linearity, CounterexampleKind::tower,
                                        CounterexampleKind::ic_without_ac,
                                        CounterexampleKind::tcqc_without_ic};
    for (const auto kind : kinds) {
        ++result.checked;
        if (!fixtures_dir.empty()) {
            const std::string path = fixtures_dir + "/counterexample_" + to_string(kind) + ".json";
            std::ifstream in(path);
            if (!in) {
                result.fail(seed, "counterexample: missing fixture " + path);
                continue;
            }
            Json stored = Json::parse(in, nullptr, false);
            if (stored.is_discarded()) {
                result.fail(seed, "counterexample: unparsable fixture " + path);
                continue;
            }
            const CounterexampleInstance loaded = instance_from_json(stored);
            result.seeds.push_back(loaded.seed);
            if (!verify_counterexample(loaded)) {
                result.fail(loaded.seed, "counterexample: fixture no longer exhibits " + to_string(kind));
                continue;
            }
            const auto replayed = search_counterexample(kind, loaded.seed);
            if (!replayed) {
                result.fail(loaded.seed, "counterexample: replay found nothing for " + to_string(kind));
                continue;
            }
            if (instance_to_json(*replayed).dump(2) != stored.dump(2))
                result.fail(loaded.seed, "counterexample: replay is not bit-identical for " + to_string(kind));
        } else {
            result.seeds.push_back(seed);
            const auto found = search_counterexample(kind, seed);
            if (!found) {
                result.fail(seed, "counterexample: search exhausted budget for " + to_string(kind));
                continue;
            }
            if (!verify_counterexample(*found))
                result.fail(seed, "counterexample: found instance fails verification for " + to_string(kind));
        }
    }
    return result;
}

}  // namespace icl
