#pragma once

// Test-only oracles, written independently of the library implementations
// they check: brute-force pair enumeration for Krippendorff's alpha, dense
// power iteration for PageRank, and tanh-sinh quadrature for the
// incomplete beta / F-distribution tail.

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------------
// Krippendorff's alpha by direct enumeration of pairable value pairs.

enum class Metric { Nominal, Ordinal, Interval };

inline double delta_sq(Metric metric, int c, int k, const std::map<int, double>& pooled_counts) {
    if (c == k) return 0.0;
    if (metric == Metric::Nominal) return 1.0;
    if (metric == Metric::Interval) {
        const double d = c - k;
        return d * d;
    }
    // Ordinal: (sum of counts between the categories, minus half the ends)^2
    const int lo = c < k ? c : k;
    const int hi = c < k ? k : c;
    double between = 0.0;
    for (const auto& [cat, count] : pooled_counts)
        if (cat >= lo && cat <= hi) between += count;
    between -= (pooled_counts.at(lo) + pooled_counts.at(hi)) / 2.0;
    return between * between;
}

inline double alpha_bruteforce(const std::vector<std::vector<std::optional<int>>>& grid,
                               Metric metric) {
    std::vector<std::vector<int>> units;
    for (const auto& row : grid) {
        std::vector<int> vals;
        for (const auto& cell : row)
            if (cell) vals.push_back(*cell);
        if (vals.size() >= 2) units.push_back(std::move(vals));
    }
    std::vector<int> pooled;
    for (const auto& u : units) pooled.insert(pooled.end(), u.begin(), u.end());
    const double n = static_cast<double>(pooled.size());
    if (n < 2.0) throw std::runtime_error("alpha undefined");

    std::map<int, double> pooled_counts;
    for (int v : pooled) pooled_counts[v] += 1.0;

    double d_obs = 0.0;
    for (const auto& u : units) {
        const double m = static_cast<double>(u.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = 0; j < u.size(); ++j)
                if (i != j) d_obs += delta_sq(metric, u[i], u[j], pooled_counts) / (m - 1.0);
    }
    d_obs /= n;

    double d_exp = 0.0;
    for (std::size_t i = 0; i < pooled.size(); ++i)
        for (std::size_t j = 0; j < pooled.size(); ++j)
            if (i != j) d_exp += delta_sq(metric, pooled[i], pooled[j], pooled_counts);
    d_exp /= n * (n - 1.0);

    if (d_exp == 0.0) return 1.0;
    return 1.0 - d_obs / d_exp;
}

// ---------------------------------------------------------------------------
// Dense personalized PageRank by plain power iteration on the full matrix.

struct DenseEdge {
    std::size_t src, dst;
    double weight;  // boosts already applied
};

inline std::vector<double> pagerank_dense(std::size_t n, const std::vector<DenseEdge>& edges,
                                          const std::vector<double>& personalization,
                                          double damping) {
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    std::vector<double> out(n, 0.0);
    for (const auto& e : edges) out[e.src] += e.weight;
    for (const auto& e : edges) m[e.dst][e.src] = 0.0;  // filled below (sum duplicates)
    for (const auto& e : edges) m[e.dst][e.src] += e.weight / out[e.src];

    std::vector<double> r(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < 20000; ++it) {
        std::vector<double> next(n, 0.0);
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (out[i] == 0.0) dangling += r[i];
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += m[j][i] * r[i];
            next[j] = (1.0 - damping) * personalization[j] +
                      damping * (acc + dangling * personalization[j]);
        }
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff += std::fabs(next[j] - r[j]);
        r = std::move(next);
        if (diff < 1e-14) break;
    }
    return r;
}

// ---------------------------------------------------------------------------
// tanh-sinh (double-exponential) quadrature.

template <typename F>
double tanh_sinh(F f, double lo, double hi) {
    // Integrates f over (lo, hi); tolerates integrable endpoint
    // singularities.
    const double half = (hi - lo) / 2.0;
    const double mid = (hi + lo) / 2.0;
    const double h = 1.0 / 64.0;
    double sum = 0.0;
    for (int k = -4000; k <= 4000; ++k) {
        const double u = k * h;
        const double s = std::sinh(u) * (M_PI / 2.0);
        const double t = std::tanh(s);
        const double x = mid + half * t;
        if (x <= lo || x >= hi) continue;
        const double w = (M_PI / 2.0) * std::cosh(u) / (std::cosh(s) * std::cosh(s));
        const double v = f(x);
        if (std::isfinite(v)) sum += v * w;
    }
    return sum * half * h;
}

inline double inc_beta_quadrature(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    auto integrand = [&](double t) {
        return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - ln_beta);
    };
    return tanh_sinh(integrand, 0.0, x);
}

// Upper tail of the F distribution by integrating the density on [f, inf)
// with the substitution t = f + exp(s).
inline double f_upper_tail_quadrature(double f_stat, double d1, double d2) {
    const double ln_norm = std::lgamma((d1 + d2) / 2.0) - std::lgamma(d1 / 2.0) -
                           std::lgamma(d2 / 2.0) + (d1 / 2.0) * std::log(d1 / d2);
    auto density = [&](double t) {
        return std::exp(ln_norm + (d1 / 2.0 - 1.0) * std::log(t) -
                        ((d1 + d2) / 2.0) * std::log1p(d1 * t / d2));
    };
    // [f, f+1] directly, then [f+1, inf) via t = (f+1) + e^s over s in (-inf, inf)
    const double head = tanh_sinh(density, f_stat, f_stat + 1.0);
    const double h = 1.0 / 64.0;
    double tail = 0.0;
    for (int k = -4000; k <= 4000; ++k) {
        const double s = k * h;
        const double es = std::exp(s);
        if (!std::isfinite(es)) continue;
        const double t = f_stat + 1.0 + es;
        const double v = density(t) * es;
        if (std::isfinite(v)) tail += v;
    }
    tail *= h;
    return head + tail;
}

// ---------------------------------------------------------------------------
// Deterministic test RNG (no std distributions).

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
    double uniform() { return static_cast<double>(next() >> 11) / static_cast<double>(1ull << 53); }
};

}  // namespace oracles
