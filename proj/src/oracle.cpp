#include "icl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "icl/calibration.hpp"
#include "icl/icl_fit.hpp"
#include "icl/isotonic.hpp"
#include "icl/rng.hpp"
#include "icl/scoring.hpp"

namespace icl {
namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<std::uint32_t> upper_masks(const Preorder& order, const OracleBudget& budget) {
    if (order.n > budget.max_atoms)
        throw std::length_error("oracle: atom budget exceeded");
    const auto uppers = enumerate_upper_sets(order, budget.max_atoms);
    if (static_cast<int>(uppers.size()) > budget.max_upper_sets)
        throw std::length_error("oracle: upper-set budget exceeded");
    std::vector<std::uint32_t> masks;
    masks.reserve(uppers.size());
    for (const auto& u : uppers) masks.push_back(u.mask());
    std::sort(masks.begin(), masks.end());
    return masks;
}

struct ChainSearch {
    const FiniteSpace* space;
    const std::vector<double>* y;
    const std::vector<std::uint32_t>* uppers;
    int n = 0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::uint32_t, double>> stack;  // (block mask, mean)
    std::vector<std::pair<std::uint32_t, double>> best_chain;

    double block_mean(std::uint32_t mask) const {
        double w = 0.0, s = 0.0;
        for (int i = 0; i < n; ++i)
            if ((mask >> i) & 1u) {
                w += space->weights[static_cast<std::size_t>(i)];
                s += space->weights[static_cast<std::size_t>(i)] * (*y)[static_cast<std::size_t>(i)];
            }
        return s / w;
    }

    double block_sse(std::uint32_t mask, double value) const {
        double sse = 0.0;
        for (int i = 0; i < n; ++i)
            if ((mask >> i) & 1u) {
                const double d = (*y)[static_cast<std::size_t>(i)] - value;
                sse += space->weights[static_cast<std::size_t>(i)] * d * d;
            }
        return sse;
    }

    // peel blocks from the bottom: remaining atoms form an upper set; each
    // step picks the next (smaller) upper set, the difference is a block
    void dfs(std::uint32_t remaining, double prev_mean, bool have_prev, double acc) {
        if (acc >= best) return;
        if (remaining == 0) {
            best = acc;
            best_chain = stack;
            return;
        }
        for (std::uint32_t next : *uppers) {
            if (next == remaining || (next & ~remaining) != 0) continue;
            const std::uint32_t block = remaining & ~next;
            const double m = block_mean(block);
            if (have_prev && m <= prev_mean) continue;  // level values must increase
            stack.emplace_back(block, m);
            dfs(next, m, true, acc + block_sse(block, m));
            stack.pop_back();
        }
    }
};

}  // namespace

std::vector<double> brute_isotonic_mean(const FiniteSpace& space, const Preorder& order,
                                        const std::vector<double>& y, const OracleBudget& budget) {
    if (space.n != order.n || static_cast<int>(y.size()) != space.n)
        throw std::invalid_argument("brute_isotonic_mean: dimension mismatch");
    const auto uppers = upper_masks(order, budget);
    ChainSearch search;
    search.space = &space;
    search.y = &y;
    search.uppers = &uppers;
    search.n = space.n;
    const std::uint32_t full = space.n >= 32 ? 0xffffffffu : ((1u << space.n) - 1u);
    search.dfs(full, 0.0, false, 0.0);
    std::vector<double> fitted(static_cast<std::size_t>(space.n), 0.0);
    for (const auto& [mask, value] : search.best_chain)
        for (int i = 0; i < space.n; ++i)
            if ((mask >> i) & 1u) fitted[static_cast<std::size_t>(i)] = value;
    return fitted;
}

ScoreMinResult brute_expected_score_min(const FiniteSpace& space, const Preorder& order,
                                        const std::function<double(int, double)>& score,
                                        std::vector<double> domain, const OracleBudget& budget) {
    if (space.n != order.n) throw std::invalid_argument("brute_expected_score_min: dimension mismatch");
    domain = unique_sorted(std::move(domain));
    if (domain.empty()) throw std::invalid_argument("brute_expected_score_min: empty domain");
    const auto uppers = upper_masks(order, budget);
    const int levels = static_cast<int>(domain.size());
    const int count = static_cast<int>(uppers.size());
    std::unordered_map<std::uint32_t, int> id;
    for (int u = 0; u < count; ++u) id[uppers[static_cast<std::size_t>(u)]] = u;

    const auto cost = [&](std::uint32_t mask, double value) {
        double c = 0.0;
        for (int i = 0; i < space.n; ++i)
            if ((mask >> i) & 1u)
                c += space.weights[static_cast<std::size_t>(i)] * score(i, value);
        return c;
    };

    // table[j][u]: minimal cost of assigning values >= domain[j] to the atoms
    // of upper set u; choice[j][u]: lexicographically first optimal successor
    std::vector<std::vector<double>> table(static_cast<std::size_t>(levels),
                                           std::vector<double>(static_cast<std::size_t>(count), 0.0));
    std::vector<std::vector<int>> choice(static_cast<std::size_t>(levels),
                                         std::vector<int>(static_cast<std::size_t>(count), -1));
    for (int u = 0; u < count; ++u)
        table[static_cast<std::size_t>(levels - 1)][static_cast<std::size_t>(u)] =
            cost(uppers[static_cast<std::size_t>(u)], domain[static_cast<std::size_t>(levels - 1)]);
    for (int j = levels - 2; j >= 0; --j)
        for (int u = 0; u < count; ++u) {
            const std::uint32_t a = uppers[static_cast<std::size_t>(u)];
            double bestv = std::numeric_limits<double>::infinity();
            int bestc = -1;
            for (int v = 0; v < count; ++v) {
                const std::uint32_t sub = uppers[static_cast<std::size_t>(v)];
                if ((sub & ~a) != 0) continue;
                const double value = cost(a & ~sub, domain[static_cast<std::size_t>(j)]) +
                                     table[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(v)];
                if (value < bestv) {
                    bestv = value;
                    bestc = v;
                }
            }
            table[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)] = bestv;
            choice[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)] = bestc;
        }

    const std::uint32_t full = space.n >= 32 ? 0xffffffffu : ((1u << space.n) - 1u);
    ScoreMinResult result;
    result.argmin.assign(static_cast<std::size_t>(space.n), domain.front());
    int u = id.at(full);
    result.objective = table[0][static_cast<std::size_t>(u)];
    for (int j = 0; j < levels; ++j) {
        const std::uint32_t a = uppers[static_cast<std::size_t>(u)];
        const int v = (j + 1 < levels) ? choice[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)] : id.at(0);
        const std::uint32_t sub = (j + 1 < levels) ? uppers[static_cast<std::size_t>(v)] : 0u;
        for (int i = 0; i < space.n; ++i)
            if (((a & ~sub) >> i) & 1u) result.argmin[static_cast<std::size_t>(i)] = domain[static_cast<std::size_t>(j)];
        if (j + 1 < levels) u = v;
    }
    return result;
}

std::vector<double> brute_crps_min(const FiniteSpace& space, const Preorder& order,
                                   const std::vector<double>& y, const OracleBudget& budget) {
    if (space.n != order.n || static_cast<int>(y.size()) != space.n)
        throw std::invalid_argument("brute_crps_min: dimension mismatch");
    const auto thresholds = unique_sorted(y);
    const int m = static_cast<int>(thresholds.size());
    std::vector<double> cdf(static_cast<std::size_t>(m) * space.n, 0.0);
    for (int k = 0; k < m; ++k) {
        std::vector<double> ind(static_cast<std::size_t>(space.n));
        for (int i = 0; i < space.n; ++i)
            ind[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] > thresholds[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
        // candidate survival values: weighted means of indicator subsets
        std::vector<double> domain;
        const std::uint32_t full = space.n >= 32 ? 0xffffffffu : ((1u << space.n) - 1u);
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            double w = 0.0, s = 0.0;
            for (int i = 0; i < space.n; ++i)
                if ((mask >> i) & 1u) {
                    w += space.weights[static_cast<std::size_t>(i)];
                    s += space.weights[static_cast<std::size_t>(i)] * ind[static_cast<std::size_t>(i)];
                }
            domain.push_back(s / w);
        }
        const auto score = [&](int atom, double value) {
            return brier_score(value, ind[static_cast<std::size_t>(atom)]);
        };
        const auto column = brute_expected_score_min(space, order, score, std::move(domain), budget);
        for (int i = 0; i < space.n; ++i)
            cdf[static_cast<std::size_t>(k) * space.n + i] = 1.0 - column.argmin[static_cast<std::size_t>(i)];
    }
    return cdf;
}

std::string to_string(CounterexampleKind kind) {
    switch (kind) {
        case CounterexampleKind::linearity: return "linearity";
        case CounterexampleKind::tower: return "tower";
        case CounterexampleKind::ic_without_ac: return "ic_without_ac";
        case CounterexampleKind::tcqc_without_ic: return "tcqc_without_ic";
    }
    return "unknown";
}

std::optional<CounterexampleKind> counterexample_kind_from_string(const std::string& s) {
    if (s == "linearity") return CounterexampleKind::linearity;
    if (s == "tower") return CounterexampleKind::tower;
    if (s == "ic_without_ac") return CounterexampleKind::ic_without_ac;
    if (s == "tcqc_without_ic") return CounterexampleKind::tcqc_without_ic;
    return std::nullopt;
}

namespace {

std::vector<double> random_int_vector(Rng& rng, int n, int lo, int hi) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.uniform_int(lo, hi);
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

bool linearity_fails(const CounterexampleInstance& inst) {
    const auto f1 = isotonic_mean(inst.space, inst.order, inst.y).fitted;
    const auto f2 = isotonic_mean(inst.space, inst.order, inst.y2).fitted;
    std::vector<double> sum(inst.y.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = inst.y[i] + inst.y2[i];
    const auto fs = isotonic_mean(inst.space, inst.order, sum).fitted;
    std::vector<double> additive(f1.size());
    for (std::size_t i = 0; i < additive.size(); ++i) additive[i] = f1[i] + f2[i];
    return max_abs_diff(fs, additive) > 1e-6;
}

bool tower_fails(const CounterexampleInstance& inst) {
    // order holds the coarser lattice A1 (finer preorder), order2 the finer
    // lattice A2; A1 subset of A2 iff the A1 preorder contains the A2 one
    if (!inst.order2 || !inst.order.contains(*inst.order2)) return false;
    const auto inner = isotonic_mean(inst.space, *inst.order2, inst.y).fitted;
    const auto towered = isotonic_mean(inst.space, inst.order, inner).fitted;
    const auto direct = isotonic_mean(inst.space, inst.order, inst.y).fitted;
    return max_abs_diff(towered, direct) > 1e-6;
}

ForecastProfile instance_profile(const CounterexampleInstance& inst) {
    ForecastProfile p;
    p.space = inst.space;
    p.forecasts = inst.forecasts;
    p.y = inst.y;
    return p;
}

bool ic_without_ac_holds(const CounterexampleInstance& inst) {
    const ForecastProfile p = instance_profile(inst);
    return check_isotonic(p).ok && !check_auto(p).ok;
}

bool tcqc_without_ic_holds(const CounterexampleInstance& inst) {
    const ForecastProfile p = instance_profile(inst);
    return check_threshold(p).ok && check_quantile(p).ok && !check_isotonic(p).ok;
}

}  // namespace

bool verify_counterexample(const CounterexampleInstance& instance) {
    switch (instance.kind) {
        case CounterexampleKind::linearity: return linearity_fails(instance);
        case CounterexampleKind::tower: return tower_fails(instance);
        case CounterexampleKind::ic_without_ac: return ic_without_ac_holds(instance);
        case CounterexampleKind::tcqc_without_ic: return tcqc_without_ic_holds(instance);
    }
    return false;
}

std::optional<CounterexampleInstance> search_counterexample(CounterexampleKind kind,
                                                            std::uint64_t seed,
                                                            const OracleBudget& budget) {
    Rng rng(seed);
    for (int attempt = 0; attempt < budget.max_tries; ++attempt) {
        CounterexampleInstance inst;
        inst.kind = kind;
        inst.seed = seed;
        switch (kind) {
            case CounterexampleKind::linearity: {
                const int n = rng.uniform_int(3, 4);
                inst.space = FiniteSpace::uniform(n);
                inst.order = Preorder::chain(n);
                inst.y = random_int_vector(rng, n, -2, 3);
                inst.y2 = random_int_vector(rng, n, -2, 3);
                if (linearity_fails(inst)) return inst;
                break;
            }
            case CounterexampleKind::tower: {
                const int n = rng.uniform_int(3, 4);
                inst.space = FiniteSpace::uniform(n);
                const Preorder fine = Preorder::chain(n);
                // contract one adjacent pair on top of the chain to get a
                // strictly smaller lattice
                const int j = rng.uniform_int(0, n - 2);
                std::vector<std::pair<int, int>> edges;
                for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
                edges.emplace_back(j + 1, j);
                inst.order = Preorder::from_edges(n, edges);
                inst.order2 = fine;
                inst.y = random_int_vector(rng, n, -2, 3);
                if (tower_fails(inst)) return inst;
                break;
            }
            case CounterexampleKind::ic_without_ac: {
                const int n = rng.uniform_int(2, 3) * 2;
                inst.space = FiniteSpace::uniform(n);
                const int groups = rng.uniform_int(2, n / 2);
                inst.y = random_int_vector(rng, n, 0, 4);
                // impose an order independent of the group laws: ties within
                // each group and a chain across the groups; crossing group
                // laws then pool, and the pooled rows are the candidate
                // forecasts
                std::vector<std::pair<int, int>> edges;
                std::vector<int> rep(static_cast<std::size_t>(groups), -1);
                for (int i = 0; i < n; ++i) {
                    const int g = i % groups;
                    if (rep[static_cast<std::size_t>(g)] < 0) rep[static_cast<std::size_t>(g)] = i;
                    else {
                        edges.emplace_back(rep[static_cast<std::size_t>(g)], i);
                        edges.emplace_back(i, rep[static_cast<std::size_t>(g)]);
                    }
                }
                for (int g = 0; g + 1 < groups; ++g)
                    edges.emplace_back(rep[static_cast<std::size_t>(g)], rep[static_cast<std::size_t>(g + 1)]);
                inst.order = Preorder::from_edges(n, edges);
                const IclFit fit = icl_fit(inst.space, inst.order, inst.y);
                inst.forecasts.clear();
                for (int i = 0; i < n; ++i) inst.forecasts.push_back(fit.row(i));
                if (ic_without_ac_holds(inst)) return inst;
                break;
            }
            case CounterexampleKind::tcqc_without_ic: {
                const int n = 4;
                inst.space = FiniteSpace::uniform(n);
                std::vector<double> support;
                if (rng.bernoulli(0.5)) {
                    // crossing quad: two low support points paired with two
                    // high ones
                    std::vector<double> grid{0, 1, 2, 3, 4};
                    rng.shuffle(grid);
                    std::vector<double> pick(grid.begin(), grid.begin() + 4);
                    std::sort(pick.begin(), pick.end());
                    const double lo1 = pick[0], lo2 = pick[1], hi1 = pick[2], hi2 = pick[3];
                    inst.forecasts = {
                        StepCdf::from_points_masses({{lo1, 0.5}, {hi1, 0.5}}),
                        StepCdf::from_points_masses({{lo1, 0.5}, {hi2, 0.5}}),
                        StepCdf::from_points_masses({{lo2, 0.5}, {hi1, 0.5}}),
                        StepCdf::from_points_masses({{lo2, 0.5}, {hi2, 0.5}}),
                    };
                } else {
                    inst.forecasts.clear();
                    for (int i = 0; i < n; ++i) {
                        const int a = rng.uniform_int(0, 3);
                        const int b = rng.uniform_int(a + 1, 4);
                        inst.forecasts.push_back(StepCdf::from_points_masses({{double(a), 0.5}, {double(b), 0.5}}));
                    }
                }
                inst.y.clear();
                for (int i = 0; i < n; ++i) {
                    const auto& pts = inst.forecasts[static_cast<std::size_t>(i)].points;
                    inst.y.push_back(pts[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pts.size()) - 1))]);
                }
                inst.order = preorder_from_stochastic_order(inst.forecasts);
                if (tcqc_without_ic_holds(inst)) return inst;
                break;
            }
        }
    }
    return std::nullopt;
}

}  // namespace icl
