#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "gld/model.hpp"

namespace gld {

std::string_view to_string(ModelKind kind) noexcept
{
    switch (kind) {
    case ModelKind::Pendulum: return "pendulum";
    case ModelKind::Duffing: return "duffing";
    case ModelKind::FishTail: return "fishtail";
    case ModelKind::HarmonicOscillator: return "harmonic-oscillator";
    case ModelKind::HarmonicRepulsor: return "harmonic-repulsor";
    case ModelKind::CustomMechanical: return "custom-mechanical";
    }
    return "unknown";
}

std::string_view to_string(EndpointKind kind) noexcept
{
    switch (kind) {
    case EndpointKind::TurningPoint: return "turning-point";
    case EndpointKind::Regular: return "regular";
    case EndpointKind::Truncation: return "truncation";
    }
    return "unknown";
}

namespace detail {

class ModelImpl {
public:
    virtual ~ModelImpl() = default;

    ModelKind kind{};
    std::string name;
    double kinetic = 0.5;
    int multiplier = 2;
    CriticalEnergies critical{0.0, std::nullopt};
    bool bounded = true;
    bool needs_truncation = false;
    std::vector<double> saddles;
    double t_star = 0.0;

    virtual double potential(double q) const = 0;
    virtual double potential_slope(double q) const = 0;
    virtual double gap(double q, double E) const { return E - potential(q); }
    virtual double drop(double q_star, double delta) const
    {
        return potential(q_star) - potential(q_star + delta);
    }
    virtual EnergyDomain domain(double E, std::optional<Truncation> trunc) const = 0;
};

} // namespace detail

namespace {

constexpr double pi = std::numbers::pi;
constexpr double coincide_tol = 1e-9;

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Merge intervals whose facing turning points coincide, drop zero-width pieces.
EnergyDomain finalize(std::vector<DomainInterval> pieces)
{
    EnergyDomain out;
    for (const auto& piece : pieces) {
        if (!out.intervals.empty()) {
            auto& last = out.intervals.back();
            if (piece.lo - last.hi < coincide_tol && last.hi_kind == EndpointKind::TurningPoint &&
                piece.lo_kind == EndpointKind::TurningPoint) {
                last.hi = piece.hi;
                last.hi_kind = piece.hi_kind;
                continue;
            }
        }
        out.intervals.push_back(piece);
    }
    std::erase_if(out.intervals, [](const DomainInterval& iv) { return iv.width() < coincide_tol; });
    return out;
}

DomainInterval make_interval(double lo, double hi, EndpointKind lk, EndpointKind hk)
{
    return DomainInterval{lo, hi, lk, hk};
}

class Pendulum final : public detail::ModelImpl {
public:
    Pendulum()
    {
        kind = ModelKind::Pendulum;
        name = "pendulum";
        kinetic = 0.5;
        multiplier = 2;
        critical = {-2.0, 0.0};
        saddles = {-pi, pi};
    }

    double potential(double q) const override { return -std::cos(q) - 1.0; }
    double potential_slope(double q) const override { return std::sin(q); }

    // E + 1 + cos q, written around whichever equilibrium is closer.
    double gap(double q, double E) const override
    {
        const double c = std::cos(0.5 * q);
        const double s = std::sin(0.5 * q);
        if (c * c <= 0.5) {
            return E + 2.0 * c * c;
        }
        return (E + 2.0) - 2.0 * s * s;
    }

    double drop(double q_star, double delta) const override
    {
        return -2.0 * std::sin(q_star + 0.5 * delta) * std::sin(0.5 * delta);
    }

    EnergyDomain domain(double E, std::optional<Truncation>) const override
    {
        if (E >= 0.0) {
            const auto kind = (E == 0.0) ? EndpointKind::TurningPoint : EndpointKind::Regular;
            return finalize({make_interval(-pi, pi, kind, kind)});
        }
        // cos(theta*) = -E - 1, written with half angles for accuracy at both ends.
        const double theta = 2.0 * std::atan2(std::sqrt(0.5 * (E + 2.0)), std::sqrt(-0.5 * E));
        if (pi - theta < 0.5 * coincide_tol) {
            return finalize({make_interval(-pi, pi, EndpointKind::TurningPoint, EndpointKind::TurningPoint)});
        }
        return finalize(
            {make_interval(-theta, theta, EndpointKind::TurningPoint, EndpointKind::TurningPoint)});
    }
};

class Duffing final : public detail::ModelImpl {
public:
    Duffing()
    {
        kind = ModelKind::Duffing;
        name = "duffing";
        kinetic = 0.5;
        multiplier = 4;
        critical = {-0.25, 0.0};
        saddles = {0.0};
    }

    double potential(double q) const override
    {
        const double q2 = q * q;
        return 0.25 * q2 * q2 - 0.5 * q2;
    }
    double potential_slope(double q) const override { return q * (q - 1.0) * (q + 1.0); }

    double gap(double q, double E) const override
    {
        const double q2 = q * q;
        if (q2 < 0.5) {
            return E + 0.25 * q2 * (2.0 - q2);
        }
        const double w = (q - 1.0) * (q + 1.0);
        return (E + 0.25) - 0.25 * w * w;
    }

    double drop(double q_star, double delta) const override
    {
        const double x = q_star + delta;
        const double bracket = (x - 1.0) * (x + 1.0) + (q_star - 1.0) * (q_star + 1.0);
        return -0.25 * delta * (2.0 * q_star + delta) * bracket;
    }

    EnergyDomain domain(double E, std::optional<Truncation>) const override
    {
        const double s = std::sqrt(4.0 * (E + 0.25));
        const double x2 = std::sqrt(1.0 + s);
        if (E >= 0.0) {
            const auto left = (E == 0.0) ? EndpointKind::TurningPoint : EndpointKind::Regular;
            return finalize({make_interval(0.0, x2, left, EndpointKind::TurningPoint)});
        }
        const double x1 = std::sqrt(-4.0 * E / (1.0 + s));
        if (x1 < 0.5 * coincide_tol) {
            // Mirror lobes touch at the saddle.
            return finalize({make_interval(0.0, x2, EndpointKind::TurningPoint, EndpointKind::TurningPoint)});
        }
        return finalize({make_interval(x1, x2, EndpointKind::TurningPoint, EndpointKind::TurningPoint)});
    }
};

class FishTail final : public detail::ModelImpl {
public:
    explicit FishTail(bool bounded_librations) : bounded_librations_(bounded_librations)
    {
        kind = ModelKind::FishTail;
        name = bounded_librations ? "fishtail-bounded" : "fishtail";
        kinetic = 1.0;
        multiplier = 2;
        critical = {-32.0, 0.0};
        bounded = bounded_librations;
        needs_truncation = !bounded_librations;
        saddles = {-4.0};
    }

    double potential(double q) const override { return q * q * (q + 6.0) - 32.0; }
    double potential_slope(double q) const override { return 3.0 * q * (q + 4.0); }

    double gap(double q, double E) const override
    {
        if (q < -2.0) {
            const double u = q + 4.0;
            return E - u * u * (u - 6.0);
        }
        return (E + 32.0) - q * q * (q + 6.0);
    }

    double drop(double q_star, double delta) const override
    {
        return -delta * (3.0 * q_star * (q_star + 4.0) + delta * (3.0 * q_star + 6.0 + delta));
    }

    double polish(double x, double E) const
    {
        for (int it = 0; it < 6; ++it) {
            const double slope = potential_slope(x);
            if (slope == 0.0) {
                break;
            }
            const double step = gap(x, E) / slope;
            x += step;
            if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(x))) {
                break;
            }
        }
        return x;
    }

    // Single real root of -X^3 - 6X^2 + E + 32 for E > 0.
    double circulation_root(double E) const
    {
        const double p = 0.5 * std::sqrt(E * (E + 32.0)) + 0.5 * (E + 32.0) - 8.0;
        const double c = std::cbrt(p);
        return polish(c + 4.0 / c - 2.0, E);
    }

    // Ordered roots x2 <= x3 <= x4 for -32 <= E <= 0.
    std::array<double, 3> libration_roots(double E) const
    {
        double x2 = 0.0;
        double x3 = 0.0;
        double x4 = 0.0;
        if (-E <= 1.0) {
            // Near the saddle: u^2 (6 - u) = -E with q = -4 + u.
            const double c = -E;
            double up = std::sqrt(c / 6.0);
            double um = -up;
            for (int it = 0; it < 100; ++it) {
                const double nup = std::sqrt(c / (6.0 - up));
                const double num = -std::sqrt(c / (6.0 - um));
                const bool done = nup == up && num == um;
                up = nup;
                um = num;
                if (done) {
                    break;
                }
            }
            x2 = -4.0 + um;
            x3 = -4.0 + up;
            x4 = polish(-6.0 - x2 - x3, E);
        } else if (E + 32.0 <= 1.0) {
            // Near the elliptic point: w^2 (w + 6) = E + 32.
            const double c = E + 32.0;
            double wp = std::sqrt(c / 6.0);
            double wm = -wp;
            for (int it = 0; it < 100; ++it) {
                const double nwp = std::sqrt(c / (6.0 + wp));
                const double nwm = -std::sqrt(c / (6.0 + wm));
                const bool done = nwp == wp && nwm == wm;
                wp = nwp;
                wm = nwm;
                if (done) {
                    break;
                }
            }
            x3 = wm;
            x4 = wp;
            x2 = polish(-6.0 - x3 - x4, E);
        } else {
            const auto roots = cubic_roots(-1.0, -6.0, 0.0, E + 32.0);
            if (roots.size() != 3) {
                throw Error(ErrorCode::OutsideDomain, "fishtail: expected three real roots at E=" + fmt(E));
            }
            x2 = polish(roots[0], E);
            x3 = polish(roots[1], E);
            x4 = polish(roots[2], E);
        }
        return {x2, x3, x4};
    }

    EnergyDomain domain(double E, std::optional<Truncation> trunc) const override
    {
        if (bounded_librations_) {
            if (E > 0.0) {
                throw Error(ErrorCode::OutsideEnergyRange,
                            "fishtail bounded librations exist only for E <= 0, got E=" + fmt(E));
            }
            const auto r = libration_roots(E);
            return finalize({make_interval(r[1], r[2], EndpointKind::TurningPoint, EndpointKind::TurningPoint)});
        }
        const double a = trunc->a;
        if (E > 0.0) {
            const double x2 = circulation_root(E);
            check_truncation(a, x2, E);
            return finalize({make_interval(a, x2, EndpointKind::Truncation, EndpointKind::TurningPoint)});
        }
        const auto r = libration_roots(E);
        check_truncation(a, r[0], E);
        return finalize({make_interval(a, r[0], EndpointKind::Truncation, EndpointKind::TurningPoint),
                         make_interval(r[1], r[2], EndpointKind::TurningPoint, EndpointKind::TurningPoint)});
    }

private:
    static void check_truncation(double a, double leftmost, double E)
    {
        if (!(a < leftmost)) {
            throw Error(ErrorCode::TruncationInsideDomain, "truncation a=" + fmt(a) +
                                                               " is not left of the turning point " +
                                                               fmt(leftmost) + " at E=" + fmt(E));
        }
    }

    bool bounded_librations_;
};

class HarmonicOscillator final : public detail::ModelImpl {
public:
    HarmonicOscillator()
    {
        kind = ModelKind::HarmonicOscillator;
        name = "harmonic-oscillator";
        kinetic = 0.5;
        multiplier = 2;
        critical = {0.0, std::nullopt};
    }

    double potential(double q) const override { return 0.5 * q * q; }
    double potential_slope(double q) const override { return q; }
    double drop(double q_star, double delta) const override { return -0.5 * delta * (2.0 * q_star + delta); }

    EnergyDomain domain(double E, std::optional<Truncation>) const override
    {
        const double r = std::sqrt(2.0 * E);
        return finalize({make_interval(-r, r, EndpointKind::TurningPoint, EndpointKind::TurningPoint)});
    }
};

class HarmonicRepulsor final : public detail::ModelImpl {
public:
    explicit HarmonicRepulsor(double cut)
    {
        if (!(cut > 0.0) || !std::isfinite(cut)) {
            throw Error(ErrorCode::InvalidArgument, "harmonic repulsor: hyperbolic cut must be positive");
        }
        kind = ModelKind::HarmonicRepulsor;
        name = "harmonic-repulsor";
        kinetic = 0.5;
        multiplier = 1;
        critical = {0.0, 0.0};
        bounded = false;
        saddles = {0.0};
        t_star = cut;
    }

    double potential(double q) const override { return -0.5 * q * q; }
    double potential_slope(double q) const override { return -q; }
    double gap(double q, double E) const override { return E + 0.5 * q * q; }

    // Quarter branch (sqrt(2E) sinh t, sqrt(2E) cosh t), t in [0, t*].
    EnergyDomain domain(double E, std::optional<Truncation>) const override
    {
        const double hi = std::sqrt(2.0 * E) * std::sinh(t_star);
        return finalize({make_interval(0.0, hi, EndpointKind::Regular, EndpointKind::Truncation)});
    }
};

class Mechanical final : public detail::ModelImpl {
public:
    explicit Mechanical(MechanicalSystem sys) : sys_(std::move(sys))
    {
        if (!sys_.potential || !sys_.potential_slope) {
            throw Error(ErrorCode::InvalidArgument, "mechanical system needs potential and slope");
        }
        if (!(sys_.search_lo < sys_.search_hi)) {
            throw Error(ErrorCode::InvalidArgument, "mechanical system: empty search interval");
        }
        kind = ModelKind::CustomMechanical;
        name = "custom-mechanical";
        kinetic = 0.5;
        multiplier = 2;
        bounded = sys_.bounded;
        saddles = sys_.saddles;
        critical = {minimum_potential(), sys_.separatrix_energy};
    }

    double potential(double q) const override { return sys_.potential(q); }
    double potential_slope(double q) const override { return sys_.potential_slope(q); }

    // Close to a turning point V(q*) - V(q*+delta) cancels badly; Simpson's
    // rule on the slope keeps full relative accuracy there.
    double drop(double q_star, double delta) const override
    {
        if (std::abs(delta) > 1e-2 * std::max(1.0, std::abs(q_star))) {
            return potential(q_star) - potential(q_star + delta);
        }
        return -delta / 6.0 *
               (potential_slope(q_star) + 4.0 * potential_slope(q_star + 0.5 * delta) +
                potential_slope(q_star + delta));
    }

    EnergyDomain domain(double E, std::optional<Truncation>) const override
    {
        const double lo = sys_.search_lo;
        const double hi = sys_.search_hi;
        const double step = (hi - lo) / scan_cells;
        auto f = [&](double q) { return E - potential(q); };

        std::vector<DomainInterval> pieces;
        double prev_q = lo;
        double prev_f = f(lo);
        bool open = prev_f >= 0.0;
        DomainInterval current{lo, hi, EndpointKind::Truncation, EndpointKind::Truncation};
        for (int i = 1; i <= scan_cells; ++i) {
            const double q = (i == scan_cells) ? hi : lo + i * step;
            const double fq = f(q);
            const bool nonneg = fq >= 0.0;
            if (nonneg != open) {
                const double root = bracketed_root(f, prev_q, q, prev_f, fq);
                if (open) {
                    current.hi = root;
                    current.hi_kind = EndpointKind::TurningPoint;
                    pieces.push_back(current);
                } else {
                    current = DomainInterval{root, hi, EndpointKind::TurningPoint, EndpointKind::Truncation};
                }
                open = nonneg;
            }
            prev_q = q;
            prev_f = fq;
        }
        if (open) {
            current.hi = hi;
            current.hi_kind = EndpointKind::Truncation;
            pieces.push_back(current);
        }
        return finalize(std::move(pieces));
    }

private:
    static constexpr int scan_cells = 2048;

    template <class F>
    static double bracketed_root(F& f, double a, double b, double fa, double fb)
    {
        if (fa == 0.0) {
            return a;
        }
        if (fb == 0.0) {
            return b;
        }
        std::uintmax_t iters = 200;
        const auto [r_lo, r_hi] =
            boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), iters);
        return 0.5 * (r_lo + r_hi);
    }

    double minimum_potential() const
    {
        const double lo = sys_.search_lo;
        const double hi = sys_.search_hi;
        const double step = (hi - lo) / scan_cells;
        int best = 0;
        double best_v = potential(lo);
        for (int i = 1; i <= scan_cells; ++i) {
            const double v = potential(lo + i * step);
            if (v < best_v) {
                best_v = v;
                best = i;
            }
        }
        const double a = std::max(lo, lo + (best - 1) * step);
        const double b = std::min(hi, lo + (best + 1) * step);
        auto v = [this](double q) { return potential(q); };
        const auto [q_min, v_min] = boost::math::tools::brent_find_minima(v, a, b, 52);
        return std::min(best_v, v_min);
    }

    MechanicalSystem sys_;
};

} // namespace

HamiltonianModel::HamiltonianModel(std::shared_ptr<const detail::ModelImpl> impl) : impl_(std::move(impl)) {}

ModelKind HamiltonianModel::kind() const noexcept { return impl_->kind; }
std::string_view HamiltonianModel::name() const noexcept { return impl_->name; }
int HamiltonianModel::multiplier() const noexcept { return impl_->multiplier; }
CriticalEnergies HamiltonianModel::critical_energies() const noexcept { return impl_->critical; }
bool HamiltonianModel::bounded() const noexcept { return impl_->bounded; }
bool HamiltonianModel::needs_truncation() const noexcept { return impl_->needs_truncation; }
double HamiltonianModel::kinetic_coefficient() const noexcept { return impl_->kinetic; }
double HamiltonianModel::potential(double q) const { return impl_->potential(q); }
double HamiltonianModel::potential_slope(double q) const { return impl_->potential_slope(q); }
std::span<const double> HamiltonianModel::saddle_coordinates() const noexcept { return impl_->saddles; }
double HamiltonianModel::hyperbolic_cut() const noexcept { return impl_->t_star; }

double HamiltonianModel::energy(double q, double p) const
{
    return impl_->kinetic * p * p + impl_->potential(q);
}

double HamiltonianModel::momentum_squared(double q, double E) const
{
    return impl_->gap(q, E) / impl_->kinetic;
}

double HamiltonianModel::momentum_squared_near(double q_star, double delta) const
{
    return impl_->drop(q_star, delta) / impl_->kinetic;
}

double HamiltonianModel::branch(double q, double E) const
{
    const double p2 = momentum_squared(q, E);
    if (p2 < -1e-12 || std::isnan(p2)) {
        throw Error(ErrorCode::OutsideDomain,
                    std::string(name()) + ": no real branch at q=" + fmt(q) + ", E=" + fmt(E));
    }
    return std::sqrt(std::max(p2, 0.0));
}

double HamiltonianModel::branch_slope(double q, double E) const
{
    const double p = branch(q, E);
    if (p < 1e-12) {
        throw Error(ErrorCode::TurningPoint,
                    std::string(name()) + ": slope diverges at q=" + fmt(q) + ", E=" + fmt(E));
    }
    return -impl_->potential_slope(q) / (2.0 * impl_->kinetic * p);
}

PhaseVelocity HamiltonianModel::vector_field(double q, double p) const
{
    return {2.0 * impl_->kinetic * p, -impl_->potential_slope(q)};
}

EnergyDomain HamiltonianModel::domain(double E, std::optional<Truncation> trunc) const
{
    if (!std::isfinite(E)) {
        throw Error(ErrorCode::InvalidArgument, "energy must be finite");
    }
    if (E < impl_->critical.minimum) {
        throw Error(ErrorCode::BelowMinimum, std::string(name()) + ": E=" + fmt(E) +
                                                 " is below the minimum " + fmt(impl_->critical.minimum));
    }
    if (impl_->needs_truncation && !trunc) {
        throw Error(ErrorCode::TruncationRequired,
                    std::string(name()) + " has unbounded level curves; a truncation is required");
    }
    return impl_->domain(E, impl_->needs_truncation ? trunc : std::nullopt);
}

HamiltonianModel make_pendulum() { return HamiltonianModel(std::make_shared<const Pendulum>()); }
HamiltonianModel make_duffing() { return HamiltonianModel(std::make_shared<const Duffing>()); }
HamiltonianModel make_fishtail(bool bounded_librations)
{
    return HamiltonianModel(std::make_shared<const FishTail>(bounded_librations));
}
HamiltonianModel make_harmonic_oscillator()
{
    return HamiltonianModel(std::make_shared<const HarmonicOscillator>());
}
HamiltonianModel make_harmonic_repulsor(double t_star)
{
    return HamiltonianModel(std::make_shared<const HarmonicRepulsor>(t_star));
}
HamiltonianModel make_mechanical(MechanicalSystem system)
{
    return HamiltonianModel(std::make_shared<const Mechanical>(std::move(system)));
}

std::vector<std::string> builtin_model_names()
{
    return {"pendulum", "duffing", "fishtail", "fishtail-bounded", "harmonic-oscillator", "harmonic-repulsor"};
}

HamiltonianModel model_from_name(std::string_view name)
{
    if (name == "pendulum") {
        return make_pendulum();
    }
    if (name == "duffing") {
        return make_duffing();
    }
    if (name == "fishtail") {
        return make_fishtail(false);
    }
    if (name == "fishtail-bounded") {
        return make_fishtail(true);
    }
    if (name == "harmonic-oscillator") {
        return make_harmonic_oscillator();
    }
    if (name == "harmonic-repulsor") {
        return make_harmonic_repulsor();
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

} // namespace gld
