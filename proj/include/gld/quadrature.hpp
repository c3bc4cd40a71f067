#pragma once

#include <cstddef>
#include <string_view>

#include "gld/model.hpp"

namespace gld {

enum class QuadratureScheme {
    Auto, ///< tanh-sinh with a turning-point endpoint, Gauss-Kronrod otherwise
    TanhSinh,
    AdaptiveGaussKronrod,
    Polyline,
};

std::string_view to_string(QuadratureScheme scheme) noexcept;

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    /// Step halvings for tanh-sinh; Gauss-Kronrod may use 2^max_levels panels.
    int max_levels = 12;
    QuadratureScheme scheme = QuadratureScheme::Auto;

    void validate() const;
};

/// Arc length of one branch piece. est_error is within tolerance whenever
/// converged is set; otherwise value is the best estimate reached.
struct IntervalLength {
    double value = 0.0;
    double est_error = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

/// Integral of sqrt(1 + (dp/dq)^2) over the interval of the level H = E.
///
/// Interior saddle coordinates split the interval so that the near-singular
/// behaviour close to the separatrix always sits at a panel endpoint. The
/// integrand is written as sqrt(1 + (V'/2k)^2 / p^2) with p^2 taken relative to
/// the nearest turning point, so it is never evaluated at a turning point.
IntervalLength arclength_interval(const HamiltonianModel& model, double E, const DomainInterval& interval,
                                  const QuadratureConfig& cfg = {});

/// Brute-force chord length through n_segments + 1 cosine-spaced samples of
/// the branch. Underestimates the arc length and increases under refinement.
double polyline_oracle(const HamiltonianModel& model, double E, const DomainInterval& interval,
                       std::size_t n_segments);

} // namespace gld
