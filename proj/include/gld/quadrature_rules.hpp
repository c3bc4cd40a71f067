#pragma once

// Generic one-dimensional quadrature rules used by the level-set integrator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace gld::quad {

struct Result {
    double value = 0.0;
    double est_error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct TanhSinhOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int max_levels = 12;
    int min_levels = 3;
    /// Nodes closer to an endpoint than min_fraction * (b - a) are not used.
    double min_fraction = 1e-60;
};

/// Double-exponential (tanh-sinh) quadrature on [a, b].
///
/// The integrand is called as f(x, x - a, b - x) where the two distances are
/// computed without cancellation, so integrands with endpoint singularities
/// can be evaluated accurately at nodes that round onto the endpoint. The
/// endpoints themselves are never evaluated. Each level halves the step in
/// the transformed variable and reuses all previous nodes.
template <class F>
Result tanh_sinh(F&& f, double a, double b, const TanhSinhOptions& opt)
{
    constexpr double half_pi = 0.5 * std::numbers::pi;
    const double width = b - a;
    const double half = 0.5 * width;
    const double u_max = 0.5 * std::log(1.0 / opt.min_fraction);
    const double t_max = std::asinh(u_max / half_pi);

    Result res;
    auto node_sum = [&](double t) {
        const double u = half_pi * std::sinh(t);
        const double e = std::exp(-2.0 * u);
        const double d = width * e / (1.0 + e);
        const double w = half * half_pi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if (t == 0.0) {
            ++res.evaluations;
            return w * f(a + half, half, half);
        }
        if (!(d > 0.0) || w == 0.0) {
            return 0.0;
        }
        res.evaluations += 2;
        return w * (f(a + d, d, width - d) + f(b - d, width - d, d));
    };

    double h = 1.0;
    double sum = node_sum(0.0);
    for (int k = 1; k * h <= t_max; ++k) {
        sum += node_sum(k * h);
    }
    double estimate = h * sum;
    for (int level = 1; level <= opt.max_levels; ++level) {
        h *= 0.5;
        for (int k = 1; k * h <= t_max; k += 2) {
            sum += node_sum(k * h);
        }
        const double next = h * sum;
        res.est_error = std::abs(next - estimate);
        estimate = next;
        res.value = estimate;
        if (level >= opt.min_levels &&
            res.est_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(estimate))) {
            res.converged = true;
            return res;
        }
    }
    res.value = estimate;
    return res;
}

struct GaussKronrodOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_panels = 4096;
};

namespace detail {

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

// 15-point Kronrod extension of the 7-point Gauss rule, QUADPACK error model.
template <class F>
Panel gk15(F& f, double a, double b)
{
    static constexpr std::array<double, 8> xgk{
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wgk{
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg{
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double res_g = fc * wg[3];
    double res_k = fc * wgk[7];
    double res_abs = std::abs(res_k);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        const double pair = f1[j] + f2[j];
        res_k += wgk[j] * pair;
        res_abs += wgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) {
            res_g += wg[j / 2] * pair;
        }
    }
    const double mean = 0.5 * res_k;
    double res_asc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        res_asc += wgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    const double scale = std::abs(half);
    res_asc *= scale;
    res_abs *= scale;
    double err = std::abs((res_k - res_g) * half);
    if (res_asc != 0.0 && err != 0.0) {
        err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * res_abs, err);
    }
    return Panel{a, b, res_k * half, err};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7, 15) quadrature: repeatedly bisects the
/// panel with the largest error estimate.
template <class F>
Result gauss_kronrod(F&& f, double a, double b, const GaussKronrodOptions& opt)
{
    std::priority_queue<detail::Panel> panels;
    Result res;
    auto evaluate = [&](double lo, double hi) {
        res.evaluations += 15;
        return detail::gk15(f, lo, hi);
    };
    auto first = evaluate(a, b);
    double total = first.value;
    double total_err = first.error;
    panels.push(first);
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (panels.size() >= opt.max_panels) {
            break;
        }
        const auto worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            break;
        }
        panels.pop();
        const auto left = evaluate(worst.a, mid);
        const auto right = evaluate(mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    // Re-sum in a fixed order to avoid drift from the running updates.
    std::vector<detail::Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    res.value = 0.0;
    res.est_error = 0.0;
    for (const auto& p : all) {
        res.value += p.value;
        res.est_error += p.error;
    }
    res.converged = res.est_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value));
    return res;
}

} // namespace gld::quad
