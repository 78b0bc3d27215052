#include "icl/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "icl/step_cdf.hpp"

namespace icl {

FiniteSpace FiniteSpace::uniform(int n) {
    if (n <= 0) throw std::invalid_argument("FiniteSpace: atom count must be positive");
    FiniteSpace s;
    s.n = n;
    s.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
    return s;
}

FiniteSpace FiniteSpace::with_weights(std::vector<double> weights) {
    FiniteSpace s;
    s.n = static_cast<int>(weights.size());
    s.weights = std::move(weights);
    s.validate();
    return s;
}

void FiniteSpace::validate() const {
    if (n <= 0 || static_cast<int>(weights.size()) != n)
        throw std::invalid_argument("FiniteSpace: weight vector does not match atom count");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("FiniteSpace: weights must be strictly positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("FiniteSpace: weights must sum to one");
    if (!labels.empty() && static_cast<int>(labels.size()) != n)
        throw std::invalid_argument("FiniteSpace: label count does not match atom count");
}

Preorder Preorder::unchecked(int n, std::vector<std::uint8_t> rel) {
    Preorder p;
    p.n = n;
    p.rel_ = std::move(rel);
    return p;
}

Preorder Preorder::antichain(int n) {
    std::vector<std::uint8_t> rel(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) rel[static_cast<std::size_t>(i) * n + i] = 1;
    return unchecked(n, std::move(rel));
}

Preorder Preorder::chain(int n) {
    std::vector<std::uint8_t> rel(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) rel[static_cast<std::size_t>(i) * n + j] = 1;
    return unchecked(n, std::move(rel));
}

Preorder Preorder::from_relation(int n, std::vector<std::uint8_t> rel) {
    if (static_cast<std::size_t>(n) * n != rel.size())
        throw std::invalid_argument("Preorder: relation size mismatch");
    for (auto& v : rel) v = v ? 1 : 0;
    Preorder p = unchecked(n, std::move(rel));
    for (int i = 0; i < n; ++i)
        if (!p.leq(i, i)) throw std::invalid_argument("Preorder: relation is not reflexive");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (p.leq(i, j))
                for (int k = 0; k < n; ++k)
                    if (p.leq(j, k) && !p.leq(i, k))
                        throw std::invalid_argument("Preorder: relation is not transitive");
    return p;
}

Preorder Preorder::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    Preorder p = antichain(n);
    for (auto [i, j] : edges) {
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw std::invalid_argument("Preorder: edge endpoint out of range");
        p.set(i, j);
    }
    // Floyd-Warshall style transitive closure
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (p.leq(i, k))
                for (int j = 0; j < n; ++j)
                    if (p.leq(k, j)) p.set(i, j);
    return p;
}

Preorder Preorder::reversed() const {
    std::vector<std::uint8_t> rel(rel_.size(), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rel[static_cast<std::size_t>(j) * n + i] = rel_[static_cast<std::size_t>(i) * n + j];
    return unchecked(n, std::move(rel));
}

bool Preorder::is_total() const {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!leq(i, j) && !leq(j, i)) return false;
    return true;
}

bool Preorder::contains(const Preorder& other) const {
    if (n != other.n) return false;
    for (std::size_t idx = 0; idx < rel_.size(); ++idx)
        if (other.rel_[idx] && !rel_[idx]) return false;
    return true;
}

UpperSet UpperSet::full(int n) {
    UpperSet u(n);
    std::fill(u.member.begin(), u.member.end(), 1);
    return u;
}

UpperSet UpperSet::from_mask(int n, std::uint32_t mask) {
    UpperSet u(n);
    for (int i = 0; i < n; ++i) u.member[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
    return u;
}

int UpperSet::count() const {
    int c = 0;
    for (auto m : member) c += m;
    return c;
}

bool UpperSet::is_upper(const Preorder& order) const {
    const int n = size();
    for (int i = 0; i < n; ++i)
        if (contains(i))
            for (int j = 0; j < n; ++j)
                if (order.leq(i, j) && !contains(j)) return false;
    return true;
}

UpperSet UpperSet::set_union(const UpperSet& o) const {
    UpperSet u(size());
    for (int i = 0; i < size(); ++i)
        u.member[static_cast<std::size_t>(i)] = member[static_cast<std::size_t>(i)] | o.member[static_cast<std::size_t>(i)];
    return u;
}

UpperSet UpperSet::set_intersection(const UpperSet& o) const {
    UpperSet u(size());
    for (int i = 0; i < size(); ++i)
        u.member[static_cast<std::size_t>(i)] = member[static_cast<std::size_t>(i)] & o.member[static_cast<std::size_t>(i)];
    return u;
}

UpperSet UpperSet::complement() const {
    UpperSet u(size());
    for (int i = 0; i < size(); ++i)
        u.member[static_cast<std::size_t>(i)] = member[static_cast<std::size_t>(i)] ? 0 : 1;
    return u;
}

std::uint32_t UpperSet::mask() const {
    if (size() > 32) throw std::length_error("UpperSet: mask needs <= 32 atoms");
    std::uint32_t m = 0;
    for (int i = 0; i < size(); ++i)
        if (contains(i)) m |= (1u << i);
    return m;
}

void CovariateTable::validate() const {
    if (rows <= 0 || cols <= 0)
        throw std::invalid_argument("CovariateTable: empty table");
    if (static_cast<std::size_t>(rows) * cols != data.size())
        throw std::invalid_argument("CovariateTable: data size mismatch");
    for (double v : data)
        if (std::isnan(v)) throw std::invalid_argument("CovariateTable: missing value");
}

Preorder preorder_from_covariates(const CovariateTable& table) {
    table.validate();
    const int n = table.rows;
    std::vector<std::uint8_t> rel(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            bool le = true;
            for (int c = 0; c < table.cols && le; ++c) le = table.at(i, c) <= table.at(j, c);
            rel[static_cast<std::size_t>(i) * n + j] = le ? 1 : 0;
        }
    }
    return Preorder::unchecked(n, std::move(rel));
}

Preorder preorder_from_stochastic_order(const std::vector<StepCdf>& cdfs) {
    const int n = static_cast<int>(cdfs.size());
    if (n == 0) throw std::invalid_argument("preorder_from_stochastic_order: no distributions");
    std::vector<std::uint8_t> rel(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rel[static_cast<std::size_t>(i) * n + j] = stochastically_leq(cdfs[static_cast<std::size_t>(i)], cdfs[static_cast<std::size_t>(j)]) ? 1 : 0;
    return Preorder::unchecked(n, std::move(rel));
}

std::vector<UpperSet> enumerate_upper_sets(const Preorder& order, int cap) {
    const int n = order.n;
    if (n > cap) throw std::length_error("enumerate_upper_sets: atom cap exceeded");
    // up_mask[i] = atoms forced in once i is in
    std::vector<std::uint32_t> up_mask(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (order.leq(i, j)) up_mask[static_cast<std::size_t>(i)] |= (1u << j);
    std::vector<UpperSet> out;
    const std::uint32_t limit = (n >= 32) ? 0xffffffffu : ((1u << n) - 1u);
    for (std::uint32_t mask = 0;; ++mask) {
        bool closed = true;
        for (int i = 0; i < n && closed; ++i)
            if ((mask >> i) & 1u) closed = (up_mask[static_cast<std::size_t>(i)] & ~mask) == 0;
        if (closed) out.push_back(UpperSet::from_mask(n, mask));
        if (mask == limit) break;
    }
    return out;
}

bool is_upper_measurable(const Preorder& order, const std::vector<double>& values, double tol) {
    if (static_cast<int>(values.size()) != order.n)
        throw std::invalid_argument("is_upper_measurable: length mismatch");
    for (int i = 0; i < order.n; ++i)
        for (int j = 0; j < order.n; ++j)
            if (order.leq(i, j) && values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(j)] + tol) return false;
    return true;
}

Contraction contract_ties(const FiniteSpace& space, const Preorder& order) {
    if (space.n != order.n) throw std::invalid_argument("contract_ties: dimension mismatch");
    const int n = order.n;
    Contraction c;
    c.class_of.assign(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (c.class_of[static_cast<std::size_t>(i)] >= 0) continue;
        const int id = c.k++;
        c.class_of[static_cast<std::size_t>(i)] = id;
        c.members.push_back({i});
        for (int j = i + 1; j < n; ++j)
            if (c.class_of[static_cast<std::size_t>(j)] < 0 && order.leq(i, j) && order.leq(j, i)) {
                c.class_of[static_cast<std::size_t>(j)] = id;
                c.members.back().push_back(j);
            }
    }
    c.class_weight.assign(static_cast<std::size_t>(c.k), 0.0);
    for (int i = 0; i < n; ++i)
        c.class_weight[static_cast<std::size_t>(c.class_of[static_cast<std::size_t>(i)])] += space.weights[static_cast<std::size_t>(i)];
    std::vector<std::uint8_t> rel(static_cast<std::size_t>(c.k) * c.k, 0);
    for (int a = 0; a < c.k; ++a)
        for (int b = 0; b < c.k; ++b)
            rel[static_cast<std::size_t>(a) * c.k + b] =
                order.leq(c.members[static_cast<std::size_t>(a)][0], c.members[static_cast<std::size_t>(b)][0]) ? 1 : 0;
    c.class_order = Preorder::unchecked(c.k, std::move(rel));
    return c;
}

}  // namespace icl
