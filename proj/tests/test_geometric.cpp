#include <algorithm>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "gld/geometric.hpp"

using namespace gld;
using std::numbers::pi;

namespace {

// Composite Simpson rule, used as an independent reference for smooth integrands.
template <class F>
double simpson(F f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    }
    return s * h / 3.0;
}

} // namespace

TEST_CASE("pendulum near its elliptic point")
{
    const auto pend = make_pendulum();
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        const double E = -2.0 + eps;
        CHECK(ell(pend, E).value == doctest::Approx(2.0 * pi * std::sqrt(2.0 * eps)).epsilon(0.01).scale(0.0));
        const auto d = dell_dE(pend, E);
        CHECK(d.converged);
        CHECK(d.value == doctest::Approx(2.0 * pi / std::sqrt(2.0 * eps)).epsilon(0.02).scale(0.0));
    }
}

TEST_CASE("harmonic oscillator derivative")
{
    const auto ho = make_harmonic_oscillator();
    for (double E : {0.01, 0.5, 4.0}) {
        CHECK(dell_dE(ho, E).value == doctest::Approx(pi * std::sqrt(2.0) / std::sqrt(E)).epsilon(1e-7));
    }
}

TEST_CASE("harmonic repulsor scales as the square root of the energy")
{
    const auto rep = make_harmonic_repulsor();
    const double kappa = simpson([](double t) { return std::sqrt(std::cosh(2.0 * t)); }, 0.0, 1.0, 2000);
    for (double E : {1e-6, 1e-3, 0.5, 2.0}) {
        CHECK(ell(rep, E).value == doctest::Approx(std::sqrt(2.0 * E) * kappa).epsilon(1e-10));
        CHECK(dell_dE(rep, E).value == doctest::Approx(kappa / std::sqrt(2.0 * E)).epsilon(1e-7));
    }
}

TEST_CASE("pendulum landscape peaks on the separatrix")
{
    const auto land = landscape(make_pendulum(), -2.0, 1.0, 601);
    REQUIRE(land.energies.size() == 601);
    const auto it = std::max_element(land.lengths.begin(), land.lengths.end());
    const auto k = static_cast<std::size_t>(it - land.lengths.begin());
    CHECK(land.energies[k] == 0.0);
    for (std::size_t i = 0; i < land.lengths.size(); ++i) {
        if (i != k) {
            CHECK(land.lengths[i] < land.lengths[k]);
        }
    }
    CHECK(land.lengths.front() == 0.0);
    CHECK(land.unconverged == 0);
}

TEST_CASE("separatrix energy is inserted when the grid misses it")
{
    LandscapeOptions opt;
    opt.with_derivs = true;
    const auto land = landscape(make_pendulum(), -1.0, 1.0, 600, std::nullopt, opt);
    REQUIRE(land.energies.size() == 601);
    CHECK(std::is_sorted(land.energies.begin(), land.energies.end()));
    const auto it = std::find(land.energies.begin(), land.energies.end(), 0.0);
    REQUIRE(it != land.energies.end());
    const auto k = static_cast<std::size_t>(it - land.energies.begin());
    CHECK(std::isnan((*land.derivs)[k]));
    CHECK(std::isfinite((*land.derivs)[k + 1]));
    CHECK(std::isfinite((*land.derivs)[k - 1]));
}

TEST_CASE("landscapes do not depend on the worker count")
{
    LandscapeOptions one;
    one.workers = 1;
    one.with_derivs = true;
    LandscapeOptions many = one;
    many.workers = 4;
    const auto a = landscape(make_duffing(), -0.25, 0.5, 97, std::nullopt, one);
    const auto b = landscape(make_duffing(), -0.25, 0.5, 97, std::nullopt, many);
    CHECK(a.lengths == b.lengths);
    for (std::size_t i = 0; i < a.energies.size(); ++i) {
        const double x = (*a.derivs)[i];
        const double y = (*b.derivs)[i];
        CHECK(((std::isnan(x) && std::isnan(y)) || x == y));
    }
}

TEST_CASE("local maximum at the separatrix for every separatrix model")
{
    struct Case {
        HamiltonianModel m;
        std::optional<Truncation> t;
    };
    for (const auto& [m, t] : {Case{make_pendulum(), {}}, Case{make_duffing(), {}},
                               Case{make_fishtail(), Truncation{-5.0}}, Case{make_fishtail(true), {}}}) {
        const double top = ell(m, 0.0, t).value;
        for (double eps : {1e-9, 1e-6, 1e-3}) {
            CHECK(ell(m, -eps, t).value < top);
            if (m.kind() != ModelKind::FishTail || m.needs_truncation()) {
                CHECK(ell(m, eps, t).value < top);
            }
        }
        // Continuous through the separatrix.
        CHECK(ell(m, -1e-14, t).value == doctest::Approx(top).epsilon(1e-6));
    }
}

TEST_CASE("derivative refuses to straddle critical energies")
{
    const auto pend = make_pendulum();
    CHECK_THROWS_AS(dell_dE(pend, 0.0), Error);
    try {
        dell_dE(pend, 1e-3, std::nullopt, {}, 1e-2);
        FAIL("expected StraddlesCritical");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StraddlesCritical);
    }
    CHECK_THROWS_AS(dell_dE(pend, -1.999, std::nullopt, {}, 0.01), Error);
    CHECK_THROWS_AS(dell_dE(pend, -1.0, std::nullopt, {}, -1.0), Error);
}

TEST_CASE("default derivative step tracks the nearest critical energy")
{
    const auto pend = make_pendulum();
    CHECK(default_derivative_step(pend, -1.0) == doctest::Approx(1e-4));
    CHECK(default_derivative_step(pend, -1e-3) == doctest::Approx(1e-7));
    CHECK(default_derivative_step(pend, -2.0 + 1e-3) == doctest::Approx(1e-7));
    CHECK(default_derivative_step(pend, 0.0) == 1e-12);
}

TEST_CASE("custom mechanical model reproduces the pendulum")
{
    MechanicalSystem sys;
    sys.potential = [](double q) { return -std::cos(q) - 1.0; };
    sys.potential_slope = [](double q) { return std::sin(q); };
    sys.search_lo = -pi;
    sys.search_hi = pi;
    sys.separatrix_energy = 0.0;
    sys.saddles = {-pi, pi};
    const auto custom = make_mechanical(sys);
    for (double E : {-1.5, -0.3, 0.4}) {
        CHECK(ell(custom, E).value == doctest::Approx(ell(make_pendulum(), E).value).epsilon(1e-9));
    }
}

TEST_CASE("F_lambda")
{
    for (double lambda : {0.1, 1.0, 10.0}) {
        CHECK(f_lambda(lambda, pi) == doctest::Approx(pi / lambda).epsilon(1e-12));
        CHECK(f_lambda(lambda, 0.0) == 0.0);
        double prev = 0.0;
        for (int i = 1; i <= 10000; ++i) {
            const double v = f_lambda(lambda, pi * i / 10000.0);
            CHECK(v >= prev);
            prev = v;
        }
    }
    // lambda = 1: q sqrt(q^2 + sin^2 q) / (q + sin q)
    const double q = 1.3;
    CHECK(f_lambda(1.0, q) == doctest::Approx(q * std::sqrt(q * q + std::sin(q) * std::sin(q)) / (q + std::sin(q))));
    CHECK_THROWS_AS(f_lambda(0.0, 1.0), Error);
    CHECK_THROWS_AS(f_lambda(1.0, 4.0), Error);
}

TEST_CASE("landscape argument checks")
{
    const auto pend = make_pendulum();
    CHECK_THROWS_AS(landscape(pend, -1.0, 1.0, 1), Error);
    CHECK_THROWS_AS(landscape(pend, 1.0, -1.0, 10), Error);
    CHECK_THROWS_AS(landscape(pend, -3.0, 1.0, 10), Error);
    CHECK_THROWS_AS(landscape(make_fishtail(), -1.0, 1.0, 10), Error);
}
