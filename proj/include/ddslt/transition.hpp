#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddslt/graph.hpp"

namespace ddslt {

/// Per-node code degrees d_u, all >= 1.
using CodeDegreeVector = std::vector<int>;

inline void validate_degrees(const Graph& g, const CodeDegreeVector& d) {
    if (static_cast<int>(d.size()) != g.n) {
        throw std::invalid_argument("code degree vector size does not match graph");
    }
    for (int x : d) {
        if (x < 1) throw std::invalid_argument("code degrees must be >= 1");
    }
}

/// Row-stochastic dense forwarding table. Off-diagonal mass only on graph
/// edges; the diagonal holds whatever completes each row to 1.
struct TransitionMatrix {
    int n = 0;
    std::vector<double> entries;  // row-major

    TransitionMatrix() = default;
    explicit TransitionMatrix(int n_) : n(n_), entries(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& at(int u, int v) { return entries[static_cast<std::size_t>(u) * n + v]; }
    double at(int u, int v) const { return entries[static_cast<std::size_t>(u) * n + v]; }

    double row_sum(int u) const {
        double s = 0.0;
        for (int v = 0; v < n; ++v) s += at(u, v);
        return s;
    }
};

namespace detail {

inline void require_no_isolated(const Graph& g, const char* who) {
    for (int u = 0; u < g.n; ++u) {
        if (g.adjacency[u].empty() && g.n > 1) {
            throw std::invalid_argument(std::string(who) + ": node " + std::to_string(u) +
                                        " is isolated");
        }
    }
}

/// mu_u = d_u / sum of code degrees over u's neighbors.
inline std::vector<double> degree_weights(const Graph& g, const CodeDegreeVector& d) {
    std::vector<double> mu(g.n, 0.0);
    for (int u = 0; u < g.n; ++u) {
        double neighbor_sum = 0.0;
        for (int v : g.adjacency[u]) neighbor_sum += d[v];
        mu[u] = neighbor_sum > 0.0 ? d[u] / neighbor_sum : 0.0;
    }
    return mu;
}

/// One row of the degree-proportional construction:
/// TP[u][v] = min(mu_v, mu_u * d_v / d_u) on edges, diagonal completes to 1.
inline void fill_ddslt_row(TransitionMatrix& tp, const Graph& g, const CodeDegreeVector& d,
                           const std::vector<double>& mu, int u) {
    for (int v = 0; v < tp.n; ++v) tp.at(u, v) = 0.0;
    double off = 0.0;
    const double du = static_cast<double>(d[u]);
    for (int v : g.adjacency[u]) {
        const double p = std::min(mu[v], mu[u] * d[v] / du);
        tp.at(u, v) = p;
        off += p;
    }
    tp.at(u, u) = std::max(0.0, 1.0 - off);
}

}  // namespace detail

/// Degree-proportional forwarding table; stationary distribution is
/// proportional to the code degrees (detailed balance d_u TP[u][v] = d_v TP[v][u]).
inline TransitionMatrix build_ddslt(const Graph& g, const CodeDegreeVector& d) {
    validate_degrees(g, d);
    detail::require_no_isolated(g, "build_ddslt");
    TransitionMatrix tp(g.n);
    const auto mu = detail::degree_weights(g, d);
    for (int u = 0; u < g.n; ++u) detail::fill_ddslt_row(tp, g, d, mu, u);
    if (g.n == 1) tp.at(0, 0) = 1.0;
    return tp;
}

/// Metropolis-style table: TP[u][v] = min(1, d_v/d_u) / D_max on edges,
/// where D_max is the maximum node degree of the graph.
inline TransitionMatrix build_metropolis(const Graph& g, const CodeDegreeVector& d) {
    validate_degrees(g, d);
    detail::require_no_isolated(g, "build_metropolis");
    TransitionMatrix tp(g.n);
    if (g.n == 1) {
        tp.at(0, 0) = 1.0;
        return tp;
    }
    const double dmax = static_cast<double>(g.max_node_degree());
    for (int u = 0; u < g.n; ++u) {
        double off = 0.0;
        const double du = static_cast<double>(d[u]);
        for (int v : g.adjacency[u]) {
            const double p = std::min(1.0, d[v] / du) / dmax;
            tp.at(u, v) = p;
            off += p;
        }
        tp.at(u, u) = std::max(0.0, 1.0 - off);
    }
    return tp;
}

/// Uniform neighbor selection: TP[u][v] = 1/|N(u)| on edges, zero diagonal.
inline TransitionMatrix build_uniform(const Graph& g) {
    detail::require_no_isolated(g, "build_uniform");
    TransitionMatrix tp(g.n);
    if (g.n == 1) {
        tp.at(0, 0) = 1.0;
        return tp;
    }
    for (int u = 0; u < g.n; ++u) {
        const double p = 1.0 / static_cast<double>(g.adjacency[u].size());
        for (int v : g.adjacency[u]) tp.at(u, v) = p;
    }
    return tp;
}

inline void require_row_stochastic(const TransitionMatrix& tp, double tol = 1e-9) {
    for (int u = 0; u < tp.n; ++u) {
        double s = 0.0;
        for (int v = 0; v < tp.n; ++v) {
            const double x = tp.at(u, v);
            if (x < -tol) throw std::invalid_argument("matrix has negative entries");
            s += x;
        }
        if (std::abs(s - 1.0) > tol) {
            throw std::invalid_argument("matrix is not row-stochastic (row " +
                                        std::to_string(u) + " sums to " + std::to_string(s) + ")");
        }
    }
}

namespace detail {

/// Stationary vector by direct linear solve of pi (TP - I) = 0 with the
/// normalization sum(pi) = 1 replacing one redundant equation. Returns an
/// empty vector when the solve is degenerate (reducible chain).
inline std::vector<double> stationary_by_solve(const TransitionMatrix& tp) {
    const int n = tp.n;
    Eigen::MatrixXd A(n, n);
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            A(u, v) = tp.at(v, u) - (u == v ? 1.0 : 0.0);
        }
    }
    A.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    const Eigen::VectorXd x = A.fullPivLu().solve(b);
    // validate: residual small and strictly positive entries
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(x(i)) || x(i) <= 0.0) return {};
    }
    double resid = 0.0;
    for (int v = 0; v < n; ++v) {
        double acc = 0.0;
        for (int u = 0; u < n; ++u) acc += x(u) * tp.at(u, v);
        resid = std::max(resid, std::abs(acc - x(v)));
    }
    if (resid > 1e-8) return {};
    std::vector<double> pi(n);
    for (int i = 0; i < n; ++i) pi[i] = x(i);
    return pi;
}

inline bool detailed_balance_holds(const TransitionMatrix& tp, const std::vector<double>& pi,
                                   double tol = 1e-10) {
    for (int u = 0; u < tp.n; ++u) {
        for (int v = u + 1; v < tp.n; ++v) {
            if (std::abs(pi[u] * tp.at(u, v) - pi[v] * tp.at(v, u)) > tol) return false;
        }
    }
    return true;
}

}  // namespace detail

/// Second largest eigenvalue modulus, max{lambda_2, -lambda_n} for the real
/// spectrum lambda_1 >= ... >= lambda_n. Reversible chains (all three
/// constructions here) are handled through the symmetric similarity
/// transform D^{1/2} TP D^{-1/2}; anything else goes to a general solver
/// that asserts the spectrum is real.
inline double slem(const TransitionMatrix& tp) {
    require_row_stochastic(tp);
    const int n = tp.n;
    if (n == 1) return 0.0;

    const std::vector<double> pi = detail::stationary_by_solve(tp);
    if (!pi.empty() && detail::detailed_balance_holds(tp, pi)) {
        Eigen::MatrixXd S(n, n);
        for (int u = 0; u < n; ++u) {
            for (int v = 0; v < n; ++v) {
                S(u, v) = std::sqrt(pi[u] / pi[v]) * tp.at(u, v);
            }
        }
        S = 0.5 * (S + S.transpose().eval());  // scrub fp asymmetry
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();  // ascending
        return std::max(ev(n - 2), -ev(0));
    }

    Eigen::MatrixXd M(n, n);
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) M(u, v) = tp.at(u, v);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
    std::vector<double> real_parts(n);
    for (int i = 0; i < n; ++i) {
        const std::complex<double> lam = es.eigenvalues()(i);
        if (std::abs(lam.imag()) > 1e-9) {
            throw std::runtime_error("slem: spectrum is not real (non-reversible chain)");
        }
        real_parts[i] = lam.real();
    }
    std::sort(real_parts.begin(), real_parts.end(), std::greater<double>());
    return std::max(real_parts[1], -real_parts[n - 1]);
}

/// Unique stationary distribution by power iteration on the half-lazy chain
/// (TP + I)/2, which shares pi with TP and converges even on periodic
/// instances. Residual is measured against the original chain.
inline std::vector<double> stationary_distribution(const TransitionMatrix& tp,
                                                   double tol = 1e-12,
                                                   int max_iters = 200000) {
    require_row_stochastic(tp);
    const int n = tp.n;
    std::vector<double> x(n, 1.0 / n), next(n, 0.0);
    for (int iter = 0; iter < max_iters; ++iter) {
        for (int v = 0; v < n; ++v) next[v] = 0.0;
        for (int u = 0; u < n; ++u) {
            const double xu = x[u];
            if (xu == 0.0) continue;
            for (int v = 0; v < n; ++v) next[v] += xu * tp.at(u, v);
        }
        double resid = 0.0;
        for (int v = 0; v < n; ++v) resid = std::max(resid, std::abs(next[v] - x[v]));
        for (int v = 0; v < n; ++v) x[v] = 0.5 * (x[v] + next[v]);
        if (resid < tol) {
            double s = 0.0;
            for (double v : x) s += v;
            for (double& v : x) v /= s;
            return x;
        }
    }
    throw std::runtime_error("stationary_distribution: not converged (chain may be "
                             "periodic or reducible)");
}

/// Closed 2-hop neighborhood of a node: {u} + N(u) + N(N(u)), sorted.
inline std::vector<int> two_hop_closure(const Graph& g, int u) {
    std::set<int> rows;
    rows.insert(u);
    for (int v : g.adjacency[u]) {
        rows.insert(v);
        for (int w : g.adjacency[v]) rows.insert(w);
    }
    return {rows.begin(), rows.end()};
}

/// Recompute the given rows of a degree-proportional table in place for the
/// degree vector d. Uses the same row fill as build_ddslt so recomputed
/// rows are bit-identical to a full rebuild.
inline void rebuild_ddslt_rows(TransitionMatrix& tp, const Graph& g, const CodeDegreeVector& d,
                               const std::vector<int>& rows) {
    const auto mu = detail::degree_weights(g, d);
    for (int u : rows) detail::fill_ddslt_row(tp, g, d, mu, u);
}

/// Incremental maintenance after a single-node code-degree change: only rows
/// in the closed 2-hop neighborhood of the changed node are recomputed.
/// Result equals build_ddslt(g, d_next) exactly.
inline TransitionMatrix local_update(const TransitionMatrix& tp, const Graph& g,
                                     const CodeDegreeVector& d_prev,
                                     const CodeDegreeVector& d_next) {
    validate_degrees(g, d_prev);
    validate_degrees(g, d_next);
    int changed = -1;
    for (int u = 0; u < g.n; ++u) {
        if (d_prev[u] != d_next[u]) {
            if (changed >= 0) {
                throw std::invalid_argument("local_update: more than one code degree changed");
            }
            changed = u;
        }
    }
    if (changed < 0) return tp;
    TransitionMatrix out = tp;
    rebuild_ddslt_rows(out, g, d_next, two_hop_closure(g, changed));
    return out;
}

}  // namespace ddslt
