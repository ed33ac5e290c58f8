#pragma once

// Reference implementations used only by tests. They are deliberately
// naive and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson to an absolute tolerance.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

// Smallest (max - min) over every M-subset, by bitmask enumeration (K <= 20).
inline double brute_min_range(const std::vector<double>& xs, std::size_t M) {
    const std::size_t K = xs.size();
    double best = std::numeric_limits<double>::infinity();
    for (unsigned long mask = 0; mask < (1UL << K); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountl(mask)) != M) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < K; ++i)
            if (mask >> i & 1UL) {
                lo = std::min(lo, xs[i]);
                hi = std::max(hi, xs[i]);
            }
        best = std::min(best, hi - lo);
    }
    return best;
}

// M-th smallest |x| by repeated minimum extraction.
inline double brute_mth_abs(std::vector<double> xs, std::size_t M) {
    double v = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        auto it = std::min_element(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        v = std::abs(*it);
        xs.erase(it);
    }
    return v;
}

// E||(1/K) sum I_i/pi_i y_i||^2 over all 2^K gate patterns; y_i as flat vectors.
inline double enumerate_ht_second_moment(const std::vector<std::vector<double>>& ys, const std::vector<double>& pis,
                                         std::size_t K) {
    const std::size_t n = ys.size();
    const std::size_t dim = ys.front().size();
    double total = 0.0;
    for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
        double prob = 1.0;
        std::vector<double> g(dim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const bool on = mask >> i & 1UL;
            prob *= on ? pis[i] : 1.0 - pis[i];
            if (on)
                for (std::size_t j = 0; j < dim; ++j) g[j] += ys[i][j] / pis[i] / static_cast<double>(K);
        }
        double sq = 0.0;
        for (double v : g) sq += v * v;
        total += prob * sq;
    }
    return total;
}

// Nearest of the 2^b evenly spaced levels on [-s, s] by scanning all levels;
// on an exact tie the level farther from zero wins.
inline std::vector<double> scan_quantize(const std::vector<double>& v, int bits) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    std::vector<double> out(v.size(), 0.0);
    if (s == 0.0) return out;
    const long n = (1L << bits) - 1;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double best = 0.0, gap = std::numeric_limits<double>::infinity();
        for (long k = 0; k <= n; ++k) {
            const double level = s * static_cast<double>(2 * k - n) / static_cast<double>(n);
            const double dist = std::abs(v[i] - level);
            if (dist < gap || (dist == gap && std::abs(level) > std::abs(best)) ||
                (dist == gap && std::abs(level) == std::abs(best) && level > best)) {
                best = level;
                gap = dist;
            }
        }
        out[i] = best;
    }
    return out;
}

}  // namespace oracle
