#include "icl/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "icl/closure.hpp"

namespace icl {
namespace {

void check_inputs(const FiniteSpace& space, const Preorder& order, const std::vector<double>& y) {
    if (space.n != order.n || static_cast<int>(y.size()) != space.n)
        throw std::invalid_argument("isotonic: dimension mismatch");
}

// PAVA over classes already arranged in chain order.
void pava_core(const std::vector<double>& w, const std::vector<double>& v,
               std::vector<double>& fitted, std::vector<int>& block) {
    const int n = static_cast<int>(w.size());
    std::vector<double> bw, bsum;
    std::vector<int> bend;
    for (int i = 0; i < n; ++i) {
        double cw = w[static_cast<std::size_t>(i)];
        double cs = w[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        while (!bw.empty() && bsum.back() * cw >= cs * bw.back()) {
            cs += bsum.back();
            cw += bw.back();
            bw.pop_back();
            bsum.pop_back();
            bend.pop_back();
        }
        bw.push_back(cw);
        bsum.push_back(cs);
        bend.push_back(i);
    }
    fitted.assign(static_cast<std::size_t>(n), 0.0);
    block.assign(static_cast<std::size_t>(n), 0);
    int start = 0;
    for (std::size_t b = 0; b < bw.size(); ++b) {
        const double value = bsum[b] / bw[b];
        for (int i = start; i <= bend[b]; ++i) {
            fitted[static_cast<std::size_t>(i)] = value;
            block[static_cast<std::size_t>(i)] = static_cast<int>(b);
        }
        start = bend[b] + 1;
    }
}

IsotonicFit expand(const FiniteSpace& space, const Contraction& c,
                   const std::vector<double>& fitted_class, const std::vector<int>& block_class,
                   const std::vector<double>& y) {
    IsotonicFit fit;
    fit.fitted.resize(static_cast<std::size_t>(space.n));
    fit.blocks.resize(static_cast<std::size_t>(space.n));
    for (int i = 0; i < space.n; ++i) {
        const int cls = c.class_of[static_cast<std::size_t>(i)];
        fit.fitted[static_cast<std::size_t>(i)] = fitted_class[static_cast<std::size_t>(cls)];
        fit.blocks[static_cast<std::size_t>(i)] = block_class[static_cast<std::size_t>(cls)];
    }
    fit.block_count = *std::max_element(fit.blocks.begin(), fit.blocks.end()) + 1;
    fit.objective = 0.0;
    for (int i = 0; i < space.n; ++i) {
        const double d = y[static_cast<std::size_t>(i)] - fit.fitted[static_cast<std::size_t>(i)];
        fit.objective += space.weights[static_cast<std::size_t>(i)] * d * d;
    }
    return fit;
}

std::vector<double> class_means(const FiniteSpace& space, const Contraction& c,
                                const std::vector<double>& y) {
    std::vector<double> value(static_cast<std::size_t>(c.k), 0.0);
    for (int cls = 0; cls < c.k; ++cls) {
        double ysum = 0.0;
        for (int i : c.members[static_cast<std::size_t>(cls)])
            ysum += space.weights[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
        value[static_cast<std::size_t>(cls)] = ysum / c.class_weight[static_cast<std::size_t>(cls)];
    }
    return value;
}

}  // namespace

IsotonicFit pava_chain(const std::vector<double>& weights, const std::vector<double>& y) {
    if (weights.size() != y.size() || weights.empty())
        throw std::invalid_argument("pava_chain: dimension mismatch");
    for (double w : weights)
        if (!(w > 0.0)) throw std::invalid_argument("pava_chain: weights must be positive");
    IsotonicFit fit;
    pava_core(weights, y, fit.fitted, fit.blocks);
    fit.block_count = fit.blocks.back() + 1;
    fit.objective = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - fit.fitted[i];
        fit.objective += weights[i] * d * d;
    }
    return fit;
}

IsotonicSolver::IsotonicSolver(const FiniteSpace& space, const Preorder& order)
    : space_(space), tie_classes_(contract_ties(space, order)) {
    const Contraction& c = tie_classes_;
    chain_ = c.class_order.is_total();
    if (chain_) {
        std::vector<int> rank(static_cast<std::size_t>(c.k), 0);
        for (int a = 0; a < c.k; ++a)
            for (int b = 0; b < c.k; ++b)
                if (a != b && c.class_order.leq(b, a)) ++rank[static_cast<std::size_t>(a)];
        chain_order_.assign(static_cast<std::size_t>(c.k), -1);
        for (int a = 0; a < c.k; ++a) chain_order_[static_cast<std::size_t>(rank[static_cast<std::size_t>(a)])] = a;
        return;
    }
    // transitive reduction of the class DAG; recursion blocks are
    // order-convex, so reduced arcs restricted to a block still span the
    // induced suborder. Bit rows keep the cover test at k^2 word ops.
    const int words = (c.k + 63) / 64;
    std::vector<std::uint64_t> succ(static_cast<std::size_t>(c.k) * words, 0);
    std::vector<std::uint64_t> pred(static_cast<std::size_t>(c.k) * words, 0);
    for (int a = 0; a < c.k; ++a)
        for (int b = 0; b < c.k; ++b)
            if (a != b && c.class_order.leq(a, b)) {
                succ[static_cast<std::size_t>(a) * words + b / 64] |= 1ULL << (b % 64);
                pred[static_cast<std::size_t>(b) * words + a / 64] |= 1ULL << (a % 64);
            }
    for (int a = 0; a < c.k; ++a)
        for (int b = 0; b < c.k; ++b) {
            if (a == b || !c.class_order.leq(a, b)) continue;
            bool covered = false;
            for (int w = 0; w < words && !covered; ++w)
                covered = (succ[static_cast<std::size_t>(a) * words + w] &
                           pred[static_cast<std::size_t>(b) * words + w]) != 0;
            if (!covered) arcs_.emplace_back(a, b);
        }
}

std::vector<std::pair<int, int>> IsotonicSolver::class_cover_arcs() const {
    if (!chain_) return arcs_;
    std::vector<std::pair<int, int>> arcs;
    for (std::size_t pos = 0; pos + 1 < chain_order_.size(); ++pos)
        arcs.emplace_back(chain_order_[pos], chain_order_[pos + 1]);
    return arcs;
}

IsotonicFit IsotonicSolver::fit(const std::vector<double>& y) const {
    if (static_cast<int>(y.size()) != space_.n)
        throw std::invalid_argument("IsotonicSolver: dimension mismatch");
    const Contraction& c = tie_classes_;
    const std::vector<double> value = class_means(space_, c, y);

    std::vector<double> fitted_class(static_cast<std::size_t>(c.k), 0.0);
    std::vector<int> block_class(static_cast<std::size_t>(c.k), 0);

    if (chain_) {
        std::vector<double> w(static_cast<std::size_t>(c.k)), v(static_cast<std::size_t>(c.k));
        for (int pos = 0; pos < c.k; ++pos) {
            const int cls = chain_order_[static_cast<std::size_t>(pos)];
            w[static_cast<std::size_t>(pos)] = c.class_weight[static_cast<std::size_t>(cls)];
            v[static_cast<std::size_t>(pos)] = value[static_cast<std::size_t>(cls)];
        }
        std::vector<double> fitted_pos;
        std::vector<int> block_pos;
        pava_core(w, v, fitted_pos, block_pos);
        for (int pos = 0; pos < c.k; ++pos) {
            fitted_class[static_cast<std::size_t>(chain_order_[static_cast<std::size_t>(pos)])] = fitted_pos[static_cast<std::size_t>(pos)];
            block_class[static_cast<std::size_t>(chain_order_[static_cast<std::size_t>(pos)])] = block_pos[static_cast<std::size_t>(pos)];
        }
        return expand(space_, c, fitted_class, block_class, y);
    }

    // Recursive block refinement: a block either is a level set of the final
    // fit (no upper set improves on the block mean) or splits along the
    // maximal minimizer of sum_{i in A} w_i (mean - y_i).
    std::vector<int> all(static_cast<std::size_t>(c.k));
    std::iota(all.begin(), all.end(), 0);
    int next_block = 0;
    std::vector<std::vector<int>> stack{std::move(all)};
    std::vector<double> contribution(static_cast<std::size_t>(c.k), 0.0);
    while (!stack.empty()) {
        std::vector<int> classes = std::move(stack.back());
        stack.pop_back();
        double wsum = 0.0, ysum = 0.0;
        for (int cls : classes) {
            wsum += c.class_weight[static_cast<std::size_t>(cls)];
            ysum += c.class_weight[static_cast<std::size_t>(cls)] * value[static_cast<std::size_t>(cls)];
        }
        const double mean = ysum / wsum;
        for (int cls : classes)
            contribution[static_cast<std::size_t>(cls)] =
                c.class_weight[static_cast<std::size_t>(cls)] * (mean - value[static_cast<std::size_t>(cls)]);

        const ClosureResult cut =
            min_weight_upper_set_edges(c.k, arcs_, contribution, classes, SetPolicy::maximal);
        std::vector<int> upper, lower;
        for (int cls : classes) (cut.set.contains(cls) ? upper : lower).push_back(cls);

        if (lower.empty() || upper.empty() ||
            cut.objective > -1e-13 * (1.0 + std::abs(mean))) {
            const int id = next_block++;
            for (int cls : classes) {
                fitted_class[static_cast<std::size_t>(cls)] = mean;
                block_class[static_cast<std::size_t>(cls)] = id;
            }
            continue;
        }
        stack.push_back(std::move(lower));
        stack.push_back(std::move(upper));
    }
    return expand(space_, c, fitted_class, block_class, y);
}

IsotonicFit isotonic_mean(const FiniteSpace& space, const Preorder& order,
                          const std::vector<double>& y) {
    check_inputs(space, order, y);
    return IsotonicSolver(space, order).fit(y);
}

IsotonicFit pava_chain(const FiniteSpace& space, const Preorder& order,
                       const std::vector<double>& y) {
    check_inputs(space, order, y);
    const IsotonicSolver solver(space, order);
    if (!solver.contraction().class_order.is_total())
        throw std::invalid_argument("pava_chain: order is not a total order");
    return solver.fit(y);
}

double minmax_value(const FiniteSpace& space, const Preorder& order,
                    const std::vector<double>& y, int atom, int cap) {
    check_inputs(space, order, y);
    if (atom < 0 || atom >= space.n) throw std::invalid_argument("minmax_value: atom out of range");
    const auto uppers = enumerate_upper_sets(order, cap);
    double best = std::numeric_limits<double>::infinity();
    for (const UpperSet& upper_of_lower : uppers) {
        const UpperSet lower = upper_of_lower.complement();  // lower sets of the order
        if (!lower.contains(atom)) continue;
        double worst = -std::numeric_limits<double>::infinity();
        for (const UpperSet& u : uppers) {
            if (!u.contains(atom)) continue;
            double wsum = 0.0, ysum = 0.0;
            for (int i = 0; i < space.n; ++i)
                if (lower.contains(i) && u.contains(i)) {
                    wsum += space.weights[static_cast<std::size_t>(i)];
                    ysum += space.weights[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
                }
            if (wsum > 0.0) worst = std::max(worst, ysum / wsum);
        }
        best = std::min(best, worst);
    }
    return best;
}

}  // namespace icl
