#include <algorithm>
#include <cmath>
#include <limits>

#include "gld/error.hpp"
#include "gld/geometric.hpp"
#include "gld/parallel.hpp"
#include "gld/rates.hpp"

namespace gld {

std::string_view to_string(CriticalKind c) noexcept
{
    return c == CriticalKind::Separatrix ? "separatrix" : "elliptic";
}

std::string_view to_string(Side s) noexcept
{
    return s == Side::Below ? "below" : "above";
}

namespace {

// Critical energy, or an error message when the approach does not exist.
double critical_energy(const HamiltonianModel& model, CriticalKind critical, Side side)
{
    const auto crit = model.critical_energies();
    if (critical == CriticalKind::Elliptic) {
        if (side == Side::Below) {
            throw Error(ErrorCode::InvalidArgument, "the elliptic energy can only be approached from above");
        }
        return crit.minimum;
    }
    if (!crit.separatrix) {
        throw Error(ErrorCode::InvalidArgument, std::string(model.name()) + " has no separatrix");
    }
    if (side == Side::Below && *crit.separatrix <= crit.minimum) {
        throw Error(ErrorCode::InvalidArgument, std::string(model.name()) + " has no energies below its separatrix");
    }
    return *crit.separatrix;
}

} // namespace

RateLadder sample_rates(const HamiltonianModel& model, CriticalKind critical, Side side,
                        std::optional<Truncation> trunc, const RateOptions& opt)
{
    if (!(opt.eps_lo > 0.0) || !(opt.eps_lo < opt.eps_hi) || !std::isfinite(opt.eps_hi)) {
        throw Error(ErrorCode::InvalidArgument, "ladder needs 0 < eps_lo < eps_hi");
    }
    if (opt.pts_per_decade < 3) {
        throw Error(ErrorCode::InvalidArgument, "ladder needs at least 3 points per decade");
    }
    if (model.needs_truncation() && !trunc) {
        throw Error(ErrorCode::TruncationRequired, std::string(model.name()) + " needs a truncation");
    }
    const double e_c = critical_energy(model, critical, side);
    const double sign = side == Side::Above ? 1.0 : -1.0;
    const double ppd = static_cast<double>(opt.pts_per_decade);
    const double steps = std::log10(opt.eps_hi / opt.eps_lo) * ppd;
    const auto n = static_cast<std::size_t>(std::floor(steps + 1e-9)) + 1;

    std::vector<double> derivs(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> eps(n);
    for (std::size_t k = 0; k < n; ++k) {
        eps[k] = opt.eps_hi * std::pow(10.0, -static_cast<double>(k) / ppd);
    }
    parallel_for(n, opt.workers, [&](std::size_t k) {
        try {
            const auto d = dell_dE(model, e_c + sign * eps[k], trunc, opt.quadrature);
            if (d.converged) {
                derivs[k] = std::abs(d.value);
            }
        } catch (const Error&) {
        }
    });

    RateLadder out;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::isfinite(derivs[k]) && derivs[k] > 0.0) {
            out.samples.push_back({eps[k], derivs[k]});
        } else {
            ++out.failed;
        }
    }
    if (out.samples.empty()) {
        throw Error(ErrorCode::EmptyLadder, "every ladder point failed");
    }
    return out;
}

RateFit fit_power_law(const std::vector<RateSample>& samples, Side side, CriticalKind critical)
{
    if (samples.size() < 5) {
        throw Error(ErrorCode::TooFewSamples, "a power-law fit needs at least 5 samples");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double mx = 0.0;
    double my = 0.0;
    for (const auto& s : samples) {
        if (!(s.eps > 0.0) || !(s.deriv_abs > 0.0) || !std::isfinite(s.eps) || !std::isfinite(s.deriv_abs)) {
            throw Error(ErrorCode::InvalidArgument, "samples must be positive and finite");
        }
        lo = std::min(lo, s.eps);
        hi = std::max(hi, s.eps);
        mx += std::log(s.eps);
        my += std::log(s.deriv_abs);
    }
    if (hi < 10.0 * lo) {
        throw Error(ErrorCode::DegenerateFit, "samples span less than one decade");
    }
    const double count = static_cast<double>(samples.size());
    mx /= count;
    my /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& s : samples) {
        const double dx = std::log(s.eps) - mx;
        const double dy = std::log(s.deriv_abs) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    RateFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double ss_res = 0.0;
    for (const auto& s : samples) {
        const double r = std::log(s.deriv_abs) - (fit.intercept + fit.exponent * std::log(s.eps));
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.side = side;
    fit.critical = critical;
    return fit;
}

std::vector<RateEntry> rate_report(const HamiltonianModel& model, std::optional<Truncation> trunc,
                                   const RateOptions& opt, std::optional<CriticalKind> only_critical,
                                   std::optional<Side> only_side)
{
    const auto crit = model.critical_energies();
    std::vector<RateEntry> plan;
    if (crit.separatrix) {
        if (*crit.separatrix > crit.minimum) {
            plan.push_back({CriticalKind::Separatrix, Side::Below, {}, 0, 0, {}});
        }
        plan.push_back({CriticalKind::Separatrix, Side::Above, {}, 0, 0, {}});
    }
    if (!crit.separatrix || *crit.separatrix > crit.minimum) {
        plan.push_back({CriticalKind::Elliptic, Side::Above, {}, 0, 0, {}});
    }

    std::vector<RateEntry> out;
    for (auto entry : plan) {
        if ((only_critical && entry.critical != *only_critical) || (only_side && entry.side != *only_side)) {
            continue;
        }
        try {
            const auto ladder = sample_rates(model, entry.critical, entry.side, trunc, opt);
            entry.n_samples = ladder.samples.size();
            entry.failed = ladder.failed;
            entry.fit = fit_power_law(ladder.samples, entry.side, entry.critical);
        } catch (const Error& err) {
            if (err.code() == ErrorCode::TruncationRequired) {
                throw;
            }
            entry.error = err.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

} // namespace gld
