#pragma once

// Globally adaptive Gauss–Kronrod 7/15 quadrature (QUADPACK qk15 rule and
// error heuristic). The panel with the largest error estimate is bisected
// until the summed estimate drops below abs_tol.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "entropy/errors.hpp"

namespace entropy {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    int max_subdivisions = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
    bool converged = false;
};

namespace detail {

struct Panel {
    double a;
    double b;
    double value;
    double error;
    friend bool operator<(const Panel& x, const Panel& y) { return x.error < y.error; }
};

template <class F>
Panel gauss_kronrod_15(const F& f, double a, double b) {
    static constexpr std::array<double, 8> xgk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wgk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    // Gauss weights for xgk[1], xgk[3], xgk[5], xgk[7].
    static constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[static_cast<std::size_t>(j)];
        const double v1 = f(center - dx);
        const double v2 = f(center + dx);
        f1[static_cast<std::size_t>(j)] = v1;
        f2[static_cast<std::size_t>(j)] = v2;
        resk += wgk[static_cast<std::size_t>(j)] * (v1 + v2);
        resabs += wgk[static_cast<std::size_t>(j)] * (std::abs(v1) + std::abs(v2));
        if (j % 2 == 1) resg += wg[static_cast<std::size_t>(j / 2)] * (v1 + v2);
    }
    const double mean = resk * 0.5;
    double resasc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        resasc += wgk[static_cast<std::size_t>(j)] *
                  (std::abs(f1[static_cast<std::size_t>(j)] - mean) +
                   std::abs(f2[static_cast<std::size_t>(j)] - mean));
    }
    const double scale = std::abs(half);
    double err = std::abs((resk - resg) * half);
    resasc *= scale;
    resabs *= scale;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, resk * half, err};
}

}  // namespace detail

/// ∫_a^b f. Returns converged = false (never throws) when the subdivision
/// budget runs out; callers decide whether that is fatal.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, const QuadratureConfig& cfg) {
    if (a == b) return {0.0, 0.0, 0, true};
    std::priority_queue<detail::Panel> panels;
    panels.push(detail::gauss_kronrod_15(f, a, b));
    double value = panels.top().value;
    double error = panels.top().error;
    int count = 1;
    while (error > cfg.abs_tol && count < cfg.max_subdivisions) {
        const detail::Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // panel at machine resolution
        panels.pop();
        const detail::Panel left = detail::gauss_kronrod_15(f, worst.a, mid);
        const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    // Re-sum to shed the drift of incremental updates.
    value = 0.0;
    error = 0.0;
    std::vector<detail::Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
    for (const auto& p : all) {
        value += p.value;
        error += p.error;
    }
    return {value, error, count, error <= cfg.abs_tol};
}

/// As integrate_adaptive, but throws QuadratureError on non-convergence.
template <class F>
double integrate_or_throw(const F& f, double a, double b, const QuadratureConfig& cfg) {
    const QuadratureResult r = integrate_adaptive(f, a, b, cfg);
    if (!r.converged) {
        throw QuadratureError("adaptive quadrature did not converge", r.value, r.error);
    }
    return r.value;
}

}  // namespace entropy
