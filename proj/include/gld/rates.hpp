#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gld/model.hpp"
#include "gld/quadrature.hpp"

namespace gld {

enum class CriticalKind { Separatrix, Elliptic };
enum class Side { Below, Above };

std::string_view to_string(CriticalKind c) noexcept;
std::string_view to_string(Side s) noexcept;

/// |dl/dE| at distance eps from a critical energy.
struct RateSample {
    double eps = 0.0;
    double deriv_abs = 0.0;
};

struct RateLadder {
    std::vector<RateSample> samples;
    std::size_t failed = 0; ///< ladder points where differencing failed
};

struct RateOptions {
    double eps_hi = 1e-2;
    double eps_lo = 1e-6;
    std::size_t pts_per_decade = 25;
    unsigned workers = 0;
    QuadratureConfig quadrature{};
};

/// Geometric ladder eps_k = eps_hi * 10^(-k / pts_per_decade) down to eps_lo,
/// with dl/dE evaluated at E_c -+ eps_k.
RateLadder sample_rates(const HamiltonianModel& model, CriticalKind critical, Side side,
                        std::optional<Truncation> trunc = std::nullopt, const RateOptions& opt = {});

struct RateFit {
    double exponent = 0.0;
    double intercept = 0.0; ///< natural log of the prefactor
    double r_squared = 0.0;
    Side side = Side::Below;
    CriticalKind critical = CriticalKind::Separatrix;
};

/// Least-squares line through (log eps, log deriv_abs).
RateFit fit_power_law(const std::vector<RateSample>& samples, Side side = Side::Below,
                      CriticalKind critical = CriticalKind::Separatrix);

struct RateEntry {
    CriticalKind critical = CriticalKind::Separatrix;
    Side side = Side::Below;
    std::optional<RateFit> fit;
    std::size_t n_samples = 0;
    std::size_t failed = 0;
    std::string error; ///< set when no fit could be made
};

/// Approaches that make sense for the model: separatrix from below and above,
/// elliptic point from above. Filters select a subset.
std::vector<RateEntry> rate_report(const HamiltonianModel& model, std::optional<Truncation> trunc = std::nullopt,
                                   const RateOptions& opt = {}, std::optional<CriticalKind> only_critical = std::nullopt,
                                   std::optional<Side> only_side = std::nullopt);

} // namespace gld
