#include "icl/closure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace icl {
namespace {

// Dinic max-flow on doubles. Capacities here are bounded sums of weighted
// responses, so a scale-aware epsilon separates saturated from residual arcs.
class MaxFlow {
  public:
    explicit MaxFlow(int n) : n_(n), head_(static_cast<std::size_t>(n), -1) {}

    void add_edge(int u, int v, double cap) {
        edges_.push_back({v, head_[static_cast<std::size_t>(u)], cap});
        head_[static_cast<std::size_t>(u)] = static_cast<int>(edges_.size()) - 1;
        edges_.push_back({u, head_[static_cast<std::size_t>(v)], 0.0});
        head_[static_cast<std::size_t>(v)] = static_cast<int>(edges_.size()) - 1;
    }

    double run(int s, int t, double eps) {
        eps_ = eps;
        double flow = 0.0;
        while (bfs(s, t)) {
            iter_ = head_;
            double f;
            while ((f = dfs(s, t, std::numeric_limits<double>::infinity())) > eps_) flow += f;
        }
        return flow;
    }

    std::vector<std::uint8_t> reachable_from(int s) const {
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(n_), 0);
        std::queue<int> q;
        q.push(s);
        seen[static_cast<std::size_t>(s)] = 1;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int e = head_[static_cast<std::size_t>(u)]; e >= 0; e = edges_[static_cast<std::size_t>(e)].next)
                if (edges_[static_cast<std::size_t>(e)].cap > eps_) {
                    const int v = edges_[static_cast<std::size_t>(e)].to;
                    if (!seen[static_cast<std::size_t>(v)]) {
                        seen[static_cast<std::size_t>(v)] = 1;
                        q.push(v);
                    }
                }
        }
        return seen;
    }

    std::vector<std::uint8_t> can_reach(int t) const {
        // u reaches t iff some residual arc u->v leads to a node reaching t
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(n_), 0);
        std::queue<int> q;
        q.push(t);
        seen[static_cast<std::size_t>(t)] = 1;
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int e = head_[static_cast<std::size_t>(v)]; e >= 0; e = edges_[static_cast<std::size_t>(e)].next) {
                // reverse arc of (u -> v) sits at e^1; its residual is edges_[e^1].cap
                const int u = edges_[static_cast<std::size_t>(e)].to;
                if (!seen[static_cast<std::size_t>(u)] && edges_[static_cast<std::size_t>(e ^ 1)].cap > eps_) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    q.push(u);
                }
            }
        }
        return seen;
    }

  private:
    struct Edge {
        int to;
        int next;
        double cap;
    };

    bool bfs(int s, int t) {
        level_.assign(static_cast<std::size_t>(n_), -1);
        std::queue<int> q;
        q.push(s);
        level_[static_cast<std::size_t>(s)] = 0;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int e = head_[static_cast<std::size_t>(u)]; e >= 0; e = edges_[static_cast<std::size_t>(e)].next)
                if (edges_[static_cast<std::size_t>(e)].cap > eps_) {
                    const int v = edges_[static_cast<std::size_t>(e)].to;
                    if (level_[static_cast<std::size_t>(v)] < 0) {
                        level_[static_cast<std::size_t>(v)] = level_[static_cast<std::size_t>(u)] + 1;
                        q.push(v);
                    }
                }
        }
        return level_[static_cast<std::size_t>(t)] >= 0;
    }

    double dfs(int u, int t, double pushed) {
        if (u == t) return pushed;
        for (int& e = iter_[static_cast<std::size_t>(u)]; e >= 0; e = edges_[static_cast<std::size_t>(e)].next) {
            Edge& edge = edges_[static_cast<std::size_t>(e)];
            if (edge.cap > eps_ && level_[static_cast<std::size_t>(edge.to)] == level_[static_cast<std::size_t>(u)] + 1) {
                const double got = dfs(edge.to, t, std::min(pushed, edge.cap));
                if (got > eps_) {
                    edge.cap -= got;
                    edges_[static_cast<std::size_t>(e ^ 1)].cap += got;
                    return got;
                }
            }
        }
        return 0.0;
    }

    int n_;
    double eps_ = 0.0;
    std::vector<int> head_;
    std::vector<Edge> edges_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

}  // namespace

namespace {

// Minimizing sum_{i in A} v_i over upper sets equals the max-closure problem
// with profits -v_i: source arcs carry the gains, sink arcs the losses, and
// infinite precedence arcs i -> j for i <= j keep A upward closed.
ClosureResult solve_closure(int full_n, const std::vector<double>& v,
                            const std::vector<int>& atoms,
                            const std::vector<std::pair<int, int>>& local_arcs,
                            SetPolicy policy) {
    const int m = static_cast<int>(atoms.size());
    double scale = 0.0;
    for (int idx : atoms) scale = std::max(scale, std::abs(v[static_cast<std::size_t>(idx)]));
    const double eps = (scale > 0.0 ? scale : 1.0) * 1e-13;

    const int source = m;
    const int sink = m + 1;
    MaxFlow net(m + 2);
    const double inf = std::numeric_limits<double>::infinity();
    for (int a = 0; a < m; ++a) {
        const double profit = -v[static_cast<std::size_t>(atoms[static_cast<std::size_t>(a)])];
        if (profit > 0.0) net.add_edge(source, a, profit);
        else if (profit < 0.0) net.add_edge(a, sink, -profit);
    }
    for (const auto& [a, b] : local_arcs) net.add_edge(a, b, inf);

    net.run(source, sink, eps);

    ClosureResult result;
    result.set = UpperSet(full_n);
    if (policy == SetPolicy::minimal) {
        const auto side = net.reachable_from(source);
        for (int a = 0; a < m; ++a)
            if (side[static_cast<std::size_t>(a)]) result.set.member[static_cast<std::size_t>(atoms[static_cast<std::size_t>(a)])] = 1;
    } else {
        const auto to_sink = net.can_reach(sink);
        for (int a = 0; a < m; ++a)
            if (!to_sink[static_cast<std::size_t>(a)]) result.set.member[static_cast<std::size_t>(atoms[static_cast<std::size_t>(a)])] = 1;
    }
    for (int idx : atoms)
        if (result.set.contains(idx)) result.objective += v[static_cast<std::size_t>(idx)];
    return result;
}

}  // namespace

ClosureResult min_weight_upper_set_within(const Preorder& order, const std::vector<double>& v,
                                          const std::vector<int>& atoms, SetPolicy policy) {
    if (static_cast<int>(v.size()) != order.n)
        throw std::invalid_argument("min_weight_upper_set: length mismatch");
    const int m = static_cast<int>(atoms.size());
    std::vector<std::pair<int, int>> arcs;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (a != b && order.leq(atoms[static_cast<std::size_t>(a)], atoms[static_cast<std::size_t>(b)]))
                arcs.emplace_back(a, b);
    return solve_closure(order.n, v, atoms, arcs, policy);
}

ClosureResult min_weight_upper_set_edges(int n, const std::vector<std::pair<int, int>>& arcs,
                                         const std::vector<double>& v,
                                         const std::vector<int>& atoms, SetPolicy policy) {
    if (static_cast<int>(v.size()) != n)
        throw std::invalid_argument("min_weight_upper_set_edges: length mismatch");
    const int m = static_cast<int>(atoms.size());
    std::vector<int> local(static_cast<std::size_t>(n), -1);
    for (int a = 0; a < m; ++a) local[static_cast<std::size_t>(atoms[static_cast<std::size_t>(a)])] = a;
    std::vector<std::pair<int, int>> local_arcs;
    for (const auto& [u, w] : arcs) {
        const int a = local[static_cast<std::size_t>(u)];
        const int b = local[static_cast<std::size_t>(w)];
        if (a >= 0 && b >= 0) local_arcs.emplace_back(a, b);
    }
    return solve_closure(n, v, atoms, local_arcs, policy);
}

ClosureResult min_weight_upper_set(const Preorder& order, const std::vector<double>& v,
                                   SetPolicy policy) {
    std::vector<int> atoms(static_cast<std::size_t>(order.n));
    for (int i = 0; i < order.n; ++i) atoms[static_cast<std::size_t>(i)] = i;
    return min_weight_upper_set_within(order, v, atoms, policy);
}

}  // namespace icl
