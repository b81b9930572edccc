#pragma once

// Bracketing root finders for scalar equations on a bounded interval.

#include <algorithm>
#include <cmath>
#include <vector>

namespace am2 {

struct RootScanOptions {
    int panels = 2048;
    double rel_tol = 1e-15;        ///< stop when |dx| < rel_tol*(1+|x|)
    double tangency_tol = 1e-10;   ///< |h| below this at a sign-preserving minimum counts as a double root
    int max_iter = 200;
};

struct ScalarRoot {
    double x = 0.0;
    bool tangency = false;
};

/// Bisection on [a,b] given h(a) and h(b) of opposite signs.
template <class F>
[[nodiscard]] double bisect(F&& h, double a, double b, double ha, const RootScanOptions& opt = {}) {
    for (int it = 0; it < opt.max_iter; ++it) {
        const double mid = 0.5 * (a + b);
        if (std::abs(b - a) < opt.rel_tol * (1.0 + std::abs(mid)) || mid <= std::min(a, b) || mid >= std::max(a, b)) break;
        const double hm = h(mid);
        if (hm == 0.0) return mid;
        if ((hm > 0.0) == (ha > 0.0)) {
            a = mid;
            ha = hm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

namespace detail {

/// Golden-section search for the minimum of |h| on [a,b] (h keeps one sign there).
template <class F>
double min_abs(F&& h, double a, double b, double& at) {
    constexpr double g = 0.6180339887498949;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = std::abs(h(c)), fd = std::abs(h(d));
    for (int it = 0; it < 80 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a); fc = std::abs(h(c));
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a); fd = std::abs(h(d));
        }
    }
    at = fc < fd ? c : d;
    return std::min(fc, fd);
}

} // namespace detail

/// All roots of h on the open interval (a,b): uniform sign scan, bisection per bracket,
/// plus sign-preserving near-zero minima reported as tangencies. Ascending order.
template <class F>
[[nodiscard]] std::vector<ScalarRoot> scan_roots(F&& h, double a, double b, const RootScanOptions& opt = {}) {
    std::vector<ScalarRoot> out;
    const int n = opt.panels;
    const double dx = (b - a) / n;
    std::vector<double> xs(n + 1), hs(n + 1);
    for (int k = 0; k <= n; ++k) {
        xs[k] = (k == n) ? b : a + k * dx;
        hs[k] = h(xs[k]);
    }
    for (int k = 0; k < n; ++k) {
        if (hs[k] == 0.0) {
            if (k > 0) out.push_back({xs[k], false});
            continue;
        }
        if (hs[k + 1] != 0.0 && (hs[k] > 0.0) != (hs[k + 1] > 0.0)) {
            out.push_back({bisect(h, xs[k], xs[k + 1], hs[k], opt), false});
            continue;
        }
        // Sign preserved across [k-1, k+1] with a local dip in |h|: candidate double root.
        if (k > 0 && hs[k - 1] != 0.0 && hs[k + 1] != 0.0 && (hs[k - 1] > 0.0) == (hs[k] > 0.0) &&
            (hs[k] > 0.0) == (hs[k + 1] > 0.0) && std::abs(hs[k]) <= std::abs(hs[k - 1]) &&
            std::abs(hs[k]) <= std::abs(hs[k + 1])) {
            double at = xs[k];
            if (detail::min_abs(h, xs[k - 1], xs[k + 1], at) < opt.tangency_tol) out.push_back({at, true});
        }
    }
    return out;
}

} // namespace am2
