#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gld/geometric.hpp"
#include "gld/parallel.hpp"

namespace gld {

LevelLength ell(const HamiltonianModel& model, double E, std::optional<Truncation> trunc, const QuadratureConfig& cfg)
{
    const auto dom = model.domain(E, trunc);
    LevelLength out;
    for (const auto& iv : dom.intervals) {
        const auto part = arclength_interval(model, E, iv, cfg);
        out.value += part.value;
        out.est_error += part.est_error;
        out.evaluations += part.evaluations;
        out.converged = out.converged && part.converged;
    }
    const double m = model.multiplier();
    out.value *= m;
    out.est_error *= m;
    return out;
}

double default_derivative_step(const HamiltonianModel& model, double E)
{
    const auto crit = model.critical_energies();
    double dist = E - crit.minimum;
    if (crit.separatrix) {
        dist = std::min(dist, std::abs(E - *crit.separatrix));
    }
    return std::max(default_relative_step * dist, 1e-12);
}

DerivativeEstimate dell_dE(const HamiltonianModel& model, double E, std::optional<Truncation> trunc,
                           const QuadratureConfig& cfg, std::optional<double> step)
{
    const double h = step ? *step : default_derivative_step(model, E);
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw Error(ErrorCode::InvalidArgument, "derivative step must be positive");
    }
    const double e_plus = E + h;
    const double e_minus = E - h;
    const auto crit = model.critical_energies();
    if (e_minus < crit.minimum) {
        throw Error(ErrorCode::StraddlesCritical,
                    "E - h = " + std::to_string(e_minus) + " falls below the minimum energy");
    }
    if (crit.separatrix && !((e_minus - *crit.separatrix) * (e_plus - *crit.separatrix) > 0.0)) {
        throw Error(ErrorCode::StraddlesCritical, "E +- h straddles the separatrix energy");
    }
    const auto upper = ell(model, e_plus, trunc, cfg);
    const auto lower = ell(model, e_minus, trunc, cfg);
    return {(upper.value - lower.value) / (e_plus - e_minus), h, upper.converged && lower.converged};
}

Landscape landscape(const HamiltonianModel& model, double e_lo, double e_hi, std::size_t n,
                    std::optional<Truncation> trunc, const LandscapeOptions& opt)
{
    if (n < 2) {
        throw Error(ErrorCode::InvalidArgument, "landscape needs at least 2 samples");
    }
    if (!(e_lo < e_hi)) {
        throw Error(ErrorCode::InvalidArgument, "landscape needs e_lo < e_hi");
    }
    const auto crit = model.critical_energies();
    if (e_lo < crit.minimum) {
        throw Error(ErrorCode::BelowMinimum, "landscape starts below the minimum energy");
    }

    Landscape out;
    out.energies.resize(n);
    const double step = (e_hi - e_lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out.energies[i] = (i + 1 == n) ? e_hi : e_lo + static_cast<double>(i) * step;
    }
    std::optional<double> sep = crit.separatrix;
    if (sep && *sep > e_lo && *sep < e_hi) {
        const double tol = 1e-12 * std::max(1.0, std::abs(*sep));
        bool snapped = false;
        for (auto& e : out.energies) {
            if (std::abs(e - *sep) <= tol) {
                e = *sep;
                snapped = true;
            }
        }
        if (!snapped) {
            const auto pos = std::upper_bound(out.energies.begin(), out.energies.end(), *sep);
            out.energies.insert(pos, *sep);
        }
    }

    const std::size_t count = out.energies.size();
    out.lengths.assign(count, 0.0);
    std::vector<char> converged(count, 1);
    if (opt.with_derivs) {
        out.derivs.emplace(count, std::numeric_limits<double>::quiet_NaN());
    }
    parallel_for(count, opt.workers, [&](std::size_t i) {
        const double E = out.energies[i];
        const auto len = ell(model, E, trunc, opt.quadrature);
        out.lengths[i] = len.value;
        bool ok = len.converged;
        if (opt.with_derivs && !(sep && E == *sep)) {
            try {
                const auto d = dell_dE(model, E, trunc, opt.quadrature);
                (*out.derivs)[i] = d.value;
                ok = ok && d.converged;
            } catch (const Error& err) {
                if (err.code() != ErrorCode::StraddlesCritical) {
                    throw;
                }
            }
        }
        converged[i] = ok ? 1 : 0;
    });
    for (char c : converged) {
        out.unconverged += c ? 0 : 1;
    }
    return out;
}

double f_lambda(double lambda, double q)
{
    if (!(lambda > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "f_lambda: lambda must be positive");
    }
    if (!(q >= 0.0 && q <= std::numbers::pi)) {
        throw Error(ErrorCode::InvalidArgument, "f_lambda: q must lie in [0, pi]");
    }
    if (q == 0.0) {
        return 0.0;
    }
    const double s = std::sin(q);
    const double l2 = lambda * lambda;
    return q * std::sqrt(q * q * l2 + s * s) / (l2 * q + s);
}

} // namespace gld
