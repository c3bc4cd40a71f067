#include <cmath>
#include <numbers>
#include <vector>

#include "gld/quadrature.hpp"
#include "gld/quadrature_rules.hpp"

namespace gld {

std::string_view to_string(QuadratureScheme scheme) noexcept
{
    switch (scheme) {
    case QuadratureScheme::Auto: return "auto";
    case QuadratureScheme::TanhSinh: return "tanh-sinh";
    case QuadratureScheme::AdaptiveGaussKronrod: return "adaptive-gk";
    case QuadratureScheme::Polyline: return "polyline";
    }
    return "unknown";
}

void QuadratureConfig::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "quadrature tolerances must be positive");
    }
    if (max_levels < 4 || max_levels > 24) {
        throw Error(ErrorCode::InvalidArgument, "quadrature max_levels must lie in [4, 24]");
    }
}

namespace {

IntervalLength integrate_piece(const HamiltonianModel& model, double E, const DomainInterval& piece,
                               const QuadratureConfig& cfg)
{
    const double lo = piece.lo;
    const double hi = piece.hi;
    const bool lo_turning = piece.lo_kind == EndpointKind::TurningPoint;
    const bool hi_turning = piece.hi_kind == EndpointKind::TurningPoint;
    const double two_k = 2.0 * model.kinetic_coefficient();

    auto integrand = [&](double q, double d_lo, double d_hi) {
        double p2;
        if (lo_turning && d_lo <= d_hi) {
            p2 = model.momentum_squared_near(lo, d_lo);
        } else if (hi_turning && d_hi < d_lo) {
            p2 = model.momentum_squared_near(hi, -d_hi);
        } else {
            p2 = model.momentum_squared(q, E);
        }
        if (!(p2 > 0.0)) {
            // Radicand rounded to zero; only happens within ~1 ulp of a turning point.
            return 0.0;
        }
        const double g = model.potential_slope(q) / two_k;
        return std::sqrt(1.0 + g * g / p2);
    };

    auto scheme = cfg.scheme;
    if (scheme == QuadratureScheme::Auto) {
        scheme = piece.singular() ? QuadratureScheme::TanhSinh : QuadratureScheme::AdaptiveGaussKronrod;
    }

    IntervalLength out;
    switch (scheme) {
    case QuadratureScheme::TanhSinh: {
        quad::TanhSinhOptions opt;
        opt.rel_tol = cfg.rel_tol;
        opt.abs_tol = cfg.abs_tol;
        opt.max_levels = cfg.max_levels;
        const auto r = quad::tanh_sinh(integrand, lo, hi, opt);
        out = {r.value, r.est_error, r.evaluations, r.converged};
        break;
    }
    case QuadratureScheme::AdaptiveGaussKronrod: {
        quad::GaussKronrodOptions opt;
        opt.rel_tol = cfg.rel_tol;
        opt.abs_tol = cfg.abs_tol;
        opt.max_panels = std::size_t{1} << cfg.max_levels;
        auto f = [&](double q) { return integrand(q, q - lo, hi - q); };
        const auto r = quad::gauss_kronrod(f, lo, hi, opt);
        out = {r.value, r.est_error, r.evaluations, r.converged};
        break;
    }
    case QuadratureScheme::Polyline:
    case QuadratureScheme::Auto: {
        const std::size_t n = std::size_t{1} << (cfg.max_levels + 8);
        const double fine = polyline_oracle(model, E, piece, n);
        const double coarse = polyline_oracle(model, E, piece, n / 2);
        // Chord sums converge at second order.
        const double err = (fine - coarse) / 3.0;
        out.value = fine + err;
        out.est_error = std::abs(err);
        out.evaluations = n + 1 + n / 2 + 1;
        out.converged = out.est_error <= cfg.rel_tol * std::abs(out.value) + cfg.abs_tol;
        break;
    }
    }
    return out;
}

} // namespace

IntervalLength arclength_interval(const HamiltonianModel& model, double E, const DomainInterval& interval,
                                  const QuadratureConfig& cfg)
{
    cfg.validate();
    if (!(interval.lo < interval.hi)) {
        throw Error(ErrorCode::InvalidInterval, "arclength_interval: lo must be below hi");
    }

    std::vector<DomainInterval> pieces;
    DomainInterval current = interval;
    const double margin = 1e-12 * std::max(1.0, std::abs(interval.lo) + std::abs(interval.hi));
    for (double s : model.saddle_coordinates()) {
        if (s > current.lo + margin && s < current.hi - margin) {
            pieces.push_back({current.lo, s, current.lo_kind, EndpointKind::Regular});
            current.lo = s;
            current.lo_kind = EndpointKind::Regular;
        }
    }
    pieces.push_back(current);

    IntervalLength total;
    total.value = 0.0;
    for (const auto& piece : pieces) {
        const auto part = integrate_piece(model, E, piece, cfg);
        total.value += part.value;
        total.est_error += part.est_error;
        total.evaluations += part.evaluations;
        total.converged = total.converged && part.converged;
    }
    return total;
}

double polyline_oracle(const HamiltonianModel& model, double E, const DomainInterval& interval,
                       std::size_t n_segments)
{
    if (n_segments < 2) {
        throw Error(ErrorCode::InvalidArgument, "polyline_oracle needs at least 2 segments");
    }
    const double lo = interval.lo;
    const double hi = interval.hi;
    if (!(hi > lo)) {
        return 0.0;
    }
    const double width = hi - lo;
    const double n = static_cast<double>(n_segments);
    auto node = [&](std::size_t i) {
        if (i == 0) {
            return lo;
        }
        if (i == n_segments) {
            return hi;
        }
        // lo + width (1 - cos(pi i / n)) / 2, anchored at the nearer end.
        if (2 * i <= n_segments) {
            const double s = std::sin(0.5 * std::numbers::pi * static_cast<double>(i) / n);
            return lo + width * s * s;
        }
        const double s = std::sin(0.5 * std::numbers::pi * static_cast<double>(n_segments - i) / n);
        return hi - width * s * s;
    };
    auto momentum = [&](std::size_t i, double q) {
        if ((i == 0 && interval.lo_kind == EndpointKind::TurningPoint) ||
            (i == n_segments && interval.hi_kind == EndpointKind::TurningPoint)) {
            return 0.0;
        }
        return model.branch(q, E);
    };

    double sum = 0.0;
    double carry = 0.0;
    double q_prev = node(0);
    double p_prev = momentum(0, q_prev);
    for (std::size_t i = 1; i <= n_segments; ++i) {
        const double q = node(i);
        const double p = momentum(i, q);
        const double chord = std::hypot(q - q_prev, p - p_prev);
        // Neumaier summation.
        const double t = sum + chord;
        carry += (std::abs(sum) >= chord) ? (sum - t) + chord : (chord - t) + sum;
        sum = t;
        q_prev = q;
        p_prev = p;
    }
    return sum + carry;
}

} // namespace gld
