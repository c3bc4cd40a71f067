#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta integrator with FSAL and
// standard step-size control.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace gld::ode {

struct Dopri5Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0; ///< 0: unlimited
    std::size_t max_steps = 10'000'000;
    /// Integration stops when the Euclidean norm of the first `watched`
    /// components exceeds this value.
    double blowup_norm = 1e12;
    std::size_t watched = 0;
};

enum class Status { Ok, BlowUp, StepLimit, StepUnderflow };

template <std::size_t N>
struct Report {
    Status status = Status::Ok;
    double t = 0.0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    /// Sum over accepted steps of the absolute local error estimate.
    std::array<double, N> local_error{};
};

namespace detail {
namespace dp {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                        b6 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
} // namespace dp

template <std::size_t N>
double scaled_rms(const std::array<double, N>& v, const std::array<double, N>& y0, const std::array<double, N>& y1,
                  const Dopri5Options& opt)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = v[i] / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(N));
}

} // namespace detail

/// Integrates y' = rhs(y) from t = 0 to t_end in place. observer(t, y) is
/// called after every accepted step.
template <std::size_t N, class Rhs, class Observer>
Report<N> dopri5(Rhs&& rhs, std::array<double, N>& y, double t_end, const Dopri5Options& opt, Observer&& observer)
{
    using namespace detail::dp;
    using Vec = std::array<double, N>;
    Report<N> rep;

    auto axpy = [](const Vec& base, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
        Vec out = base;
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (const auto& [c, k] : terms) {
                acc += c * (*k)[i];
            }
            out[i] += h * acc;
        }
        return out;
    };
    auto blown = [&](const Vec& v) {
        if (opt.watched == 0) {
            return false;
        }
        double n2 = 0.0;
        for (std::size_t i = 0; i < opt.watched && i < N; ++i) {
            n2 += v[i] * v[i];
        }
        return !(std::sqrt(n2) <= opt.blowup_norm);
    };

    Vec k1 = rhs(y);
    const double h_cap = opt.max_step > 0.0 ? opt.max_step : std::numeric_limits<double>::infinity();

    // Initial step guess (Hairer, Norsett & Wanner, II.4).
    double h;
    {
        const Vec zero{};
        const double d0 = detail::scaled_rms(y, zero, y, opt);
        const double d1 = detail::scaled_rms(k1, zero, y, opt);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min({h0, t_end, h_cap});
        const Vec y1 = axpy(y, h0, {{1.0, &k1}});
        const Vec k_probe = rhs(y1);
        Vec diff{};
        for (std::size_t i = 0; i < N; ++i) {
            diff[i] = k_probe[i] - k1[i];
        }
        const double d2 = detail::scaled_rms(diff, zero, y, opt) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, 1e-3 * h0) : std::pow(0.01 / dm, 0.2);
        h = std::min({100.0 * h0, h1, t_end, h_cap});
    }

    double t = 0.0;
    bool last_rejected = false;
    while (t < t_end) {
        if (rep.accepted + rep.rejected >= opt.max_steps) {
            rep.status = Status::StepLimit;
            break;
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            rep.status = Status::StepUnderflow;
            break;
        }
        bool final_step = false;
        if (t + h >= t_end) {
            h = t_end - t;
            final_step = true;
        }
        const Vec k2 = rhs(axpy(y, h, {{a21, &k1}}));
        const Vec k3 = rhs(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const Vec k4 = rhs(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec k5 = rhs(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec k6 = rhs(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const Vec y_new = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const Vec k7 = rhs(y_new);
        Vec err{};
        for (std::size_t i = 0; i < N; ++i) {
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        }
        const double err_norm = detail::scaled_rms(err, y, y_new, opt);

        if (err_norm <= 1.0 && std::isfinite(err_norm)) {
            t = final_step ? t_end : t + h;
            y = y_new;
            k1 = k7;
            ++rep.accepted;
            for (std::size_t i = 0; i < N; ++i) {
                rep.local_error[i] += std::abs(err[i]);
            }
            observer(t, static_cast<const Vec&>(y));
            if (blown(y)) {
                rep.status = Status::BlowUp;
                break;
            }
            double fac = err_norm == 0.0 ? 10.0 : 0.9 * std::pow(err_norm, -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            h = std::min(h * fac, h_cap);
            last_rejected = false;
        } else {
            ++rep.rejected;
            const double fac = std::isfinite(err_norm) ? std::max(0.2, 0.9 * std::pow(err_norm, -0.2)) : 0.2;
            h *= fac;
            last_rejected = true;
        }
    }
    rep.t = t;
    return rep;
}

} // namespace gld::ode
