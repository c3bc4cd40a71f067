#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gld/model.hpp"
#include "gld/quadrature.hpp"

namespace gld {

/// Total length of the level curve H = E.
struct LevelLength {
    double value = 0.0;
    double est_error = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

/// Geometric descriptor l(E): multiplier times the summed branch lengths over
/// domain(E). Zero when the level set is a point.
LevelLength ell(const HamiltonianModel& model, double E, std::optional<Truncation> trunc = std::nullopt,
                const QuadratureConfig& cfg = {});

struct DerivativeEstimate {
    double value = 0.0;
    double step = 0.0;
    bool converged = true;
};

/// Relative size of the default difference step with respect to the distance
/// from E to the nearest critical energy.
inline constexpr double default_relative_step = 1e-4;

/// Default central-difference step: default_relative_step times the distance
/// to the nearest critical energy, floored at 1e-12.
double default_derivative_step(const HamiltonianModel& model, double E);

/// Central difference (l(E+h) - l(E-h)) / (2h). Throws StraddlesCritical when
/// E +- h crosses the separatrix energy or leaves the energy range.
DerivativeEstimate dell_dE(const HamiltonianModel& model, double E, std::optional<Truncation> trunc = std::nullopt,
                           const QuadratureConfig& cfg = {}, std::optional<double> step = std::nullopt);

struct Landscape {
    std::vector<double> energies;
    std::vector<double> lengths;
    /// dl/dE per sample; NaN where it is undefined (separatrix, endpoints).
    std::optional<std::vector<double>> derivs;
    std::size_t unconverged = 0;
};

struct LandscapeOptions {
    bool with_derivs = false;
    unsigned workers = 0; ///< 0 means hardware concurrency
    QuadratureConfig quadrature{};
};

/// n uniform samples of l over [e_lo, e_hi]. A separatrix energy inside the
/// range is always a sample: a grid point within 1e-12 of it is snapped onto
/// it, otherwise it is inserted.
Landscape landscape(const HamiltonianModel& model, double e_lo, double e_hi, std::size_t n,
                    std::optional<Truncation> trunc = std::nullopt, const LandscapeOptions& opt = {});

/// q sqrt(q^2 lambda^2 + sin^2 q) / (lambda^2 q + sin q), extended by 0 at q = 0.
/// Ratio function controlling the pendulum libration arc comparison; it grows
/// monotonically on [0, pi] to pi / lambda.
double f_lambda(double lambda, double q);

} // namespace gld
