#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gld/model.hpp"

namespace gld {

namespace {

// Monic cubic x^3 + a x^2 + b x + c.
struct Monic {
    double a, b, c;
    double value(double x) const { return ((x + a) * x + b) * x + c; }
    double slope(double x) const { return (3.0 * x + 2.0 * a) * x + b; }
};

double polish(const Monic& poly, double x)
{
    for (int it = 0; it < 4; ++it) {
        const double fx = poly.value(x);
        const double dfx = poly.slope(x);
        if (fx == 0.0 || dfx == 0.0) {
            break;
        }
        const double next = x - fx / dfx;
        if (!(std::abs(poly.value(next)) < std::abs(fx))) {
            break;
        }
        x = next;
    }
    return x;
}

} // namespace

std::vector<double> cubic_roots(double c3, double c2, double c1, double c0)
{
    if (c3 == 0.0 || !std::isfinite(c3)) {
        throw Error(ErrorCode::InvalidArgument, "cubic_roots: leading coefficient must be nonzero");
    }
    const Monic poly{c2 / c3, c1 / c3, c0 / c3};
    const double shift = poly.a / 3.0;

    // Depressed cubic t^3 + P t + Q = 0 with x = t - a/3.
    const double P = poly.b - poly.a * poly.a / 3.0;
    const double Q = 2.0 * poly.a * poly.a * poly.a / 27.0 - poly.a * poly.b / 3.0 + poly.c;
    const double half_q = Q / 2.0;
    const double third_p = P / 3.0;
    const double disc = half_q * half_q + third_p * third_p * third_p;
    const double disc_scale = half_q * half_q + std::abs(third_p * third_p * third_p);

    std::vector<double> roots;
    if (P == 0.0 && Q == 0.0) {
        roots.push_back(-shift);
    } else if (disc > 1e-12 * disc_scale) {
        const double s = std::sqrt(disc);
        const double A = -std::copysign(std::cbrt(std::abs(half_q) + s), half_q);
        const double B = (A != 0.0) ? -third_p / A : 0.0;
        roots.push_back(A + B - shift);
    } else {
        // Three real roots (possibly repeated); P < 0 here.
        const double m = 2.0 * std::sqrt(-third_p);
        const double arg = std::clamp(3.0 * Q / (P * m), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            roots.push_back(m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift);
        }
    }

    for (double& r : roots) {
        r = polish(poly, r);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots) {
        if (out.empty() || r - out.back() > 1e-9) {
            out.push_back(r);
        }
    }
    return out;
}

} // namespace gld
