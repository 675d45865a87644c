#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddslt {

enum class DistKind { ideal, robust };

/// Code-degree distribution over degrees 1..K, stored as pmf and prefix-sum
/// cdf. pmf[i-1] = Pr(d = i).
struct DegreeDistribution {
    DistKind kind = DistKind::ideal;
    int K = 0;
    std::vector<double> pmf;
    std::vector<double> cdf;
};

/// Ideal Soliton: pmf(1) = 1/K, pmf(i) = 1/(i(i-1)) for i = 2..K.
inline DegreeDistribution ideal_soliton(int K) {
    if (K < 1) throw std::invalid_argument("ideal_soliton: K must be >= 1");
    DegreeDistribution d;
    d.kind = DistKind::ideal;
    d.K = K;
    d.pmf.resize(K);
    d.cdf.resize(K);
    d.pmf[0] = 1.0 / K;
    for (int i = 2; i <= K; ++i) {
        d.pmf[i - 1] = 1.0 / (static_cast<double>(i) * (i - 1));
    }
    double run = 0.0;
    for (int i = 0; i < K; ++i) {
        run += d.pmf[i];
        d.cdf[i] = run;
    }
    d.cdf[K - 1] = 1.0;  // telescoping sum is exactly 1
    return d;
}

/// True iff (K, c, delta) give a non-degenerate Robust Soliton: the spike
/// index ceil(K/R) must land in 1..K and R must exceed delta so the spike
/// weight ln(R/delta) is positive.
inline bool robust_params_valid(int K, double c, double delta) {
    if (K < 1 || c <= 0.0 || delta <= 0.0 || delta >= 1.0) return false;
    const double R = c * std::log(K / delta) * std::sqrt(static_cast<double>(K));
    if (R <= delta) return false;
    const double pivot = std::ceil(K / R);
    return pivot >= 1.0 && pivot <= static_cast<double>(K);
}

/// Robust Soliton: rho as in the ideal case, plus the extra component
///   tau(i) = R/(iK)            for i < ceil(K/R)
///   tau(i) = R ln(R/delta)/K   at i = ceil(K/R)
///   tau(i) = 0                 above,
/// with R = c ln(K/delta) sqrt(K), normalized by beta = sum(rho + tau).
inline DegreeDistribution robust_soliton(int K, double c, double delta) {
    if (K < 1) throw std::invalid_argument("robust_soliton: K must be >= 1");
    if (c <= 0.0) throw std::invalid_argument("robust_soliton: c must be > 0");
    if (delta <= 0.0 || delta >= 1.0) {
        throw std::invalid_argument("robust_soliton: delta must be in (0,1)");
    }
    if (!robust_params_valid(K, c, delta)) {
        throw std::invalid_argument("robust_soliton: degenerate robust parameters (K=" +
                                    std::to_string(K) + ", c=" + std::to_string(c) +
                                    ", delta=" + std::to_string(delta) + ")");
    }
    const double R = c * std::log(K / delta) * std::sqrt(static_cast<double>(K));
    const int pivot = static_cast<int>(std::ceil(K / R));

    std::vector<double> rho(K, 0.0);
    rho[0] = 1.0 / K;
    for (int i = 2; i <= K; ++i) {
        rho[i - 1] = 1.0 / (static_cast<double>(i) * (i - 1));
    }
    std::vector<double> tau(K, 0.0);
    for (int i = 1; i < pivot; ++i) {
        tau[i - 1] = R / (static_cast<double>(i) * K);
    }
    tau[pivot - 1] = R * std::log(R / delta) / K;

    double beta = 0.0;
    for (int i = 0; i < K; ++i) beta += rho[i] + tau[i];

    DegreeDistribution d;
    d.kind = DistKind::robust;
    d.K = K;
    d.pmf.resize(K);
    d.cdf.resize(K);
    double run = 0.0;
    for (int i = 0; i < K; ++i) {
        d.pmf[i] = (rho[i] + tau[i]) / beta;
        run += d.pmf[i];
        d.cdf[i] = run;
    }
    d.cdf[K - 1] = 1.0;
    return d;
}

/// Interval lookup: smallest degree d with alpha <= cdf[d-1]. The first
/// interval is [0, cdf[0]]; the rest are half-open (cdf[d-2], cdf[d-1]].
inline int degree_from_alpha(const DegreeDistribution& dist, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) {
        throw std::invalid_argument("degree_from_alpha: alpha must be in [0,1]");
    }
    const auto it = std::lower_bound(dist.cdf.begin(), dist.cdf.end(), alpha);
    if (it == dist.cdf.end()) return dist.K;  // alpha above the fp cdf top
    return static_cast<int>(it - dist.cdf.begin()) + 1;
}

/// Expand to a pmf indexed by degree 0..K; theoretical distributions put
/// zero mass on degree 0 (empirical storage profiles may not).
inline std::vector<double> degree_indexed_pmf(const DegreeDistribution& dist) {
    std::vector<double> out(dist.K + 1, 0.0);
    for (int i = 1; i <= dist.K; ++i) out[i] = dist.pmf[i - 1];
    return out;
}

/// Total variation distance between two pmfs indexed by degree from 0.
/// Shorter input is zero-padded. Both must sum to 1 within 1e-9.
inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    auto check = [](const std::vector<double>& v, const char* name) {
        double s = 0.0;
        for (double x : v) s += x;
        if (std::abs(s - 1.0) > 1e-9) {
            throw std::invalid_argument(std::string("tv_distance: ") + name +
                                        " does not sum to 1");
        }
    };
    check(p, "p");
    check(q, "q");
    const std::size_t m = std::max(p.size(), q.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double pi = i < p.size() ? p[i] : 0.0;
        const double qi = i < q.size() ? q[i] : 0.0;
        acc += std::abs(pi - qi);
    }
    return 0.5 * acc;
}

inline double tv_distance(const DegreeDistribution& p, const DegreeDistribution& q) {
    return tv_distance(degree_indexed_pmf(p), degree_indexed_pmf(q));
}

inline double tv_distance(const std::vector<double>& p, const DegreeDistribution& q) {
    return tv_distance(p, degree_indexed_pmf(q));
}

/// Degree-selection rule used by the protocol: which Soliton family to form
/// at each current estimate of k. Falls back to the Ideal Soliton for
/// estimates where the robust parameters are degenerate (small-K spike
/// index out of range), so early-walk estimates stay usable.
struct DegreeRule {
    DistKind kind = DistKind::ideal;
    double c = 0.1;
    double delta = 0.5;

    DegreeDistribution make(int K) const {
        if (kind == DistKind::robust && robust_params_valid(K, c, delta)) {
            return robust_soliton(K, c, delta);
        }
        return ideal_soliton(K);
    }
};

}  // namespace ddslt
