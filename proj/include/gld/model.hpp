#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gld/error.hpp"

namespace gld {

enum class ModelKind {
    Pendulum,
    Duffing,
    FishTail,
    HarmonicOscillator,
    HarmonicRepulsor,
    CustomMechanical,
};

std::string_view to_string(ModelKind kind) noexcept;

/// User supplied potential for H = p^2/2 + V(q).
///
/// Turning points are located by bracketed root finding of E - V(q) on
/// [search_lo, search_hi]; a search bound where the momentum is still real
/// becomes a truncation endpoint.
struct MechanicalSystem {
    std::function<double(double)> potential;
    std::function<double(double)> potential_slope;
    double search_lo = -1.0;
    double search_hi = 1.0;
    /// Energy of the hyperbolic level, if the potential has one.
    std::optional<double> separatrix_energy;
    /// Coordinates of hyperbolic equilibria; used as quadrature split points.
    std::vector<double> saddles;
    bool bounded = true;
};

enum class EndpointKind {
    TurningPoint, ///< momentum branch vanishes, integrand ~ (q* - q)^(-1/2)
    Regular,
    Truncation, ///< artificial coordinate cut
};

std::string_view to_string(EndpointKind kind) noexcept;

struct DomainInterval {
    double lo = 0.0;
    double hi = 0.0;
    EndpointKind lo_kind = EndpointKind::Regular;
    EndpointKind hi_kind = EndpointKind::Regular;

    double width() const noexcept { return hi - lo; }
    bool singular() const noexcept
    {
        return lo_kind == EndpointKind::TurningPoint || hi_kind == EndpointKind::TurningPoint;
    }
};

/// Sorted, pairwise disjoint intervals of the curve parameter on which the
/// nonnegative momentum branch is real.
struct EnergyDomain {
    std::vector<DomainInterval> intervals;

    bool empty() const noexcept { return intervals.empty(); }
};

/// Lower coordinate cut for models whose level curves are unbounded.
struct Truncation {
    double a = -5.0;
};

struct CriticalEnergies {
    double minimum;                   ///< elliptic equilibrium (or parametrisation floor)
    std::optional<double> separatrix; ///< absent when the model has no saddle
};

struct PhaseVelocity {
    double dq;
    double dp;
};

namespace detail {
class ModelImpl;
}

/// One degree-of-freedom Hamiltonian of mechanical form H = k p^2 + V(q).
///
/// For the pendulum q is the angle and p the action-like momentum r. Values
/// are immutable and cheap to copy; all members are safe to call
/// concurrently.
class HamiltonianModel {
public:
    ModelKind kind() const noexcept;
    std::string_view name() const noexcept;

    double energy(double q, double p) const;

    /// Nonnegative momentum on the level H = E. Roundoff-negative radicands
    /// down to -1e-12 clamp to zero; anything below throws OutsideDomain.
    double branch(double q, double E) const;

    /// dp/dq of the nonnegative branch. Throws TurningPoint where the branch
    /// is below 1e-12.
    double branch_slope(double q, double E) const;

    PhaseVelocity vector_field(double q, double p) const;

    int multiplier() const noexcept;
    CriticalEnergies critical_energies() const noexcept;
    bool bounded() const noexcept;
    bool needs_truncation() const noexcept;

    EnergyDomain domain(double E, std::optional<Truncation> trunc = std::nullopt) const;

    double kinetic_coefficient() const noexcept;
    double potential(double q) const;
    double potential_slope(double q) const;

    /// p^2 on the level E at q, evaluated in a form that avoids cancellation
    /// near the model's equilibria.
    double momentum_squared(double q, double E) const;

    /// p^2 at q_star + delta on the level through the turning point q_star,
    /// accurate for tiny |delta|.
    double momentum_squared_near(double q_star, double delta) const;

    /// Hyperbolic equilibria coordinates; interior ones split quadrature.
    std::span<const double> saddle_coordinates() const noexcept;

    /// Hyperbolic angle cut of the harmonic repulsor (0 for other models).
    double hyperbolic_cut() const noexcept;

private:
    explicit HamiltonianModel(std::shared_ptr<const detail::ModelImpl> impl);
    std::shared_ptr<const detail::ModelImpl> impl_;

    friend HamiltonianModel make_pendulum();
    friend HamiltonianModel make_duffing();
    friend HamiltonianModel make_fishtail(bool bounded_librations);
    friend HamiltonianModel make_harmonic_oscillator();
    friend HamiltonianModel make_harmonic_repulsor(double t_star);
    friend HamiltonianModel make_mechanical(MechanicalSystem system);
};

/// H = p^2/2 - cos q - 1, separatrix at E = 0.
HamiltonianModel make_pendulum();
/// H = p^2/2 - q^2/2 + q^4/4, 8-shaped separatrix at E = 0.
HamiltonianModel make_duffing();
/// H = p^2 + q^3 + 6 q^2 - 32, fish-tail separatrix at E = 0. With
/// bounded_librations the level curve is restricted to q >= -4 and E <= 0.
HamiltonianModel make_fishtail(bool bounded_librations = false);
/// H = (p^2 + q^2)/2.
HamiltonianModel make_harmonic_oscillator();
/// H = (p^2 - q^2)/2, quarter branch cut at hyperbolic angle t_star.
HamiltonianModel make_harmonic_repulsor(double t_star = 1.0);
HamiltonianModel make_mechanical(MechanicalSystem system);

/// Built-in model by name: pendulum, duffing, fishtail, fishtail-bounded,
/// harmonic-oscillator, harmonic-repulsor. Throws InvalidArgument otherwise.
HamiltonianModel model_from_name(std::string_view name);
std::vector<std::string> builtin_model_names();

/// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 in increasing order; roots closer
/// than 1e-9 are collapsed.
std::vector<double> cubic_roots(double c3, double c2, double c1, double c0);

} // namespace gld
