#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "gld/model.hpp"

using namespace gld;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected gld::Error");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("vector field at simple points")
{
    const auto pend = make_pendulum();
    auto v = pend.vector_field(pi, 0.0);
    CHECK(v.dq == 0.0);
    CHECK(v.dp == doctest::Approx(0.0).epsilon(1e-15));
    v = pend.vector_field(0.0, 2.0);
    CHECK(v.dq == 2.0);
    CHECK(v.dp == 0.0);

    v = make_duffing().vector_field(1.0, 0.0);
    CHECK(v.dq == 0.0);
    CHECK(v.dp == 0.0);

    // fish-tail: dq = 2p, dp = -3q(q + 4)
    v = make_fishtail().vector_field(1.0, 0.5);
    CHECK(v.dq == doctest::Approx(1.0));
    CHECK(v.dp == doctest::Approx(-15.0));
}

TEST_CASE("energies and critical values")
{
    const auto pend = make_pendulum();
    CHECK(pend.energy(0.0, 0.0) == -2.0);
    CHECK(pend.energy(pi, 0.0) == doctest::Approx(0.0));
    CHECK(pend.energy(0.0, 2.0) == doctest::Approx(0.0));
    CHECK(pend.critical_energies().minimum == -2.0);
    CHECK(*pend.critical_energies().separatrix == 0.0);
    CHECK(pend.multiplier() == 2);

    const auto duf = make_duffing();
    CHECK(duf.energy(1.0, 0.0) == -0.25);
    CHECK(duf.multiplier() == 4);

    const auto fish = make_fishtail();
    CHECK(fish.energy(-4.0, 0.0) == 0.0);
    CHECK(fish.energy(0.0, 0.0) == -32.0);
    CHECK(fish.needs_truncation());
    CHECK_FALSE(make_fishtail(true).needs_truncation());

    const auto ho = make_harmonic_oscillator();
    CHECK_FALSE(ho.critical_energies().separatrix.has_value());
    CHECK(ho.energy(0.3, 0.4) == doctest::Approx(0.125));

    const auto rep = make_harmonic_repulsor();
    CHECK(rep.multiplier() == 1);
    CHECK(rep.energy(1.0, 2.0) == doctest::Approx(1.5));
}

TEST_CASE("pendulum domains")
{
    const auto pend = make_pendulum();
    auto d = pend.domain(-1.0);
    REQUIRE(d.intervals.size() == 1);
    CHECK(d.intervals[0].lo == doctest::Approx(-pi / 2).epsilon(1e-15));
    CHECK(d.intervals[0].hi == doctest::Approx(pi / 2).epsilon(1e-15));
    CHECK(d.intervals[0].lo_kind == EndpointKind::TurningPoint);

    d = pend.domain(0.5);
    REQUIRE(d.intervals.size() == 1);
    CHECK(d.intervals[0].lo == -pi);
    CHECK(d.intervals[0].hi == pi);
    CHECK(d.intervals[0].hi_kind == EndpointKind::Regular);

    d = pend.domain(0.0);
    CHECK(d.intervals[0].hi_kind == EndpointKind::TurningPoint);

    d = pend.domain(-2.0);
    CHECK((d.empty() || d.intervals[0].width() == 0.0));

    CHECK(code_of([&] { pend.domain(-2.5); }) == ErrorCode::BelowMinimum);
    CHECK(code_of([&] { pend.domain(std::nan("")); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("duffing domains")
{
    const auto duf = make_duffing();
    auto d = duf.domain(-0.1);
    REQUIRE(d.intervals.size() == 1);
    CHECK(d.intervals[0].lo == doctest::Approx(std::sqrt(1.0 - std::sqrt(0.6))).epsilon(1e-14));
    CHECK(d.intervals[0].hi == doctest::Approx(std::sqrt(1.0 + std::sqrt(0.6))).epsilon(1e-14));

    d = duf.domain(0.1);
    REQUIRE(d.intervals.size() == 1);
    CHECK(d.intervals[0].lo == 0.0);
    CHECK(d.intervals[0].lo_kind == EndpointKind::Regular);
    CHECK(d.intervals[0].hi == doctest::Approx(std::sqrt(1.0 + std::sqrt(1.4))).epsilon(1e-14));

    d = duf.domain(0.0);
    CHECK(d.intervals[0].lo_kind == EndpointKind::TurningPoint);
    CHECK(d.intervals[0].hi == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("fish-tail domains and truncation")
{
    const auto fish = make_fishtail();
    const Truncation a{-8.0};
    auto d = fish.domain(-10.0, a);
    REQUIRE(d.intervals.size() == 2);
    CHECK(d.intervals[0].lo == -8.0);
    CHECK(d.intervals[0].lo_kind == EndpointKind::Truncation);
    for (double q : {d.intervals[0].hi, d.intervals[1].lo, d.intervals[1].hi}) {
        CHECK(fish.potential(q) == doctest::Approx(-10.0).epsilon(1e-13));
    }

    d = fish.domain(3.0, a);
    REQUIRE(d.intervals.size() == 1);
    CHECK(fish.potential(d.intervals[0].hi) == doctest::Approx(3.0).epsilon(1e-13));

    CHECK(code_of([&] { fish.domain(-1.0); }) == ErrorCode::TruncationRequired);
    CHECK(code_of([&] { fish.domain(-1.0, Truncation{-4.2}); }) == ErrorCode::TruncationInsideDomain);
    CHECK(code_of([&] { fish.domain(-33.0, a); }) == ErrorCode::BelowMinimum);

    const auto bounded = make_fishtail(true);
    d = bounded.domain(-10.0);
    REQUIRE(d.intervals.size() == 1);
    CHECK(d.intervals[0].lo > -4.0);
    CHECK(code_of([&] { bounded.domain(0.5); }) == ErrorCode::OutsideEnergyRange);
}

TEST_CASE("fish-tail roots near the critical energies")
{
    const auto fish = make_fishtail();
    for (double E : {-1e-12, -1e-8, -1e-4, -0.5, -2.0, -31.5, -32.0 + 1e-6, -32.0 + 1e-10, 1e-10, 1e-4, 10.0}) {
        const auto d = fish.domain(E, Truncation{-20.0});
        for (const auto& iv : d.intervals) {
            for (auto [q, kind] : {std::pair{iv.lo, iv.lo_kind}, std::pair{iv.hi, iv.hi_kind}}) {
                if (kind == EndpointKind::TurningPoint) {
                    // The gap must vanish to within a few ulps of the cubic's scale.
                    CHECK(std::abs(fish.potential(q) - E) <= 1e-12 * 32.0);
                }
            }
        }
    }
}

TEST_CASE("harmonic domains")
{
    auto d = make_harmonic_oscillator().domain(0.5);
    REQUIRE(d.intervals.size() == 1);
    CHECK(d.intervals[0].lo == doctest::Approx(-1.0));
    CHECK(d.intervals[0].hi == doctest::Approx(1.0));

    d = make_harmonic_repulsor().domain(2.0);
    REQUIRE(d.intervals.size() == 1);
    CHECK(d.intervals[0].lo == 0.0);
    CHECK(d.intervals[0].hi == doctest::Approx(2.0 * std::sinh(1.0)));
    CHECK(d.intervals[0].hi_kind == EndpointKind::Truncation);
}

TEST_CASE("branch satisfies the level equation")
{
    std::mt19937_64 rng(7);
    for (const auto& m : {make_pendulum(), make_duffing(), make_harmonic_oscillator()}) {
        const double e_min = m.critical_energies().minimum;
        std::uniform_real_distribution<double> energy(e_min + 1e-3, e_min + 3.0);
        for (int k = 0; k < 50; ++k) {
            const double E = energy(rng);
            for (const auto& iv : m.domain(E).intervals) {
                std::uniform_real_distribution<double> q(iv.lo, iv.hi);
                const double x = q(rng);
                const double p = m.branch(x, E);
                CHECK(p >= 0.0);
                CHECK(m.energy(x, p) == doctest::Approx(E).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("branch errors")
{
    const auto pend = make_pendulum();
    CHECK(code_of([&] { pend.branch(3.0, -1.0); }) == ErrorCode::OutsideDomain);
    const double theta = pend.domain(-1.0).intervals[0].hi;
    CHECK(pend.branch(theta, -1.0) == doctest::Approx(0.0).epsilon(1e-7));
    const auto ho = make_harmonic_oscillator();
    CHECK(ho.branch(1.0, 0.5) == 0.0);
    CHECK(code_of([&] { ho.branch_slope(1.0, 0.5); }) == ErrorCode::TurningPoint);
    // dp/dq = -sin q / p
    CHECK(pend.branch_slope(0.5, 0.0) == doctest::Approx(-std::sin(0.5) / pend.branch(0.5, 0.0)));
}

TEST_CASE("accurate radicand next to turning points")
{
    for (const auto& m : {make_pendulum(), make_duffing(), make_harmonic_oscillator(), make_fishtail(true)}) {
        const double E = m.critical_energies().minimum + 0.3;
        const auto iv = m.domain(E).intervals.back();
        for (double delta : {1e-2, 1e-4}) {
            const double near = m.momentum_squared_near(iv.hi, -delta);
            const double direct = (E - m.potential(iv.hi - delta)) / m.kinetic_coefficient();
            CHECK(near == doctest::Approx(direct).epsilon(1e-8));
        }
        // Tiny offsets stay positive and scale linearly.
        const double a = m.momentum_squared_near(iv.hi, -1e-14);
        const double b = m.momentum_squared_near(iv.hi, -2e-14);
        CHECK(a > 0.0);
        CHECK(b / a == doctest::Approx(2.0).epsilon(1e-6));
    }
}

TEST_CASE("models by name")
{
    for (const auto& name : builtin_model_names()) {
        CHECK(model_from_name(name).name() == name);
    }
    CHECK(code_of([] { model_from_name("rotor"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("custom mechanical pendulum matches the built-in")
{
    MechanicalSystem sys;
    sys.potential = [](double q) { return -std::cos(q) - 1.0; };
    sys.potential_slope = [](double q) { return std::sin(q); };
    sys.search_lo = -pi;
    sys.search_hi = pi;
    sys.separatrix_energy = 0.0;
    sys.saddles = {-pi, pi};
    const auto custom = make_mechanical(sys);
    CHECK(custom.critical_energies().minimum == doctest::Approx(-2.0).epsilon(1e-14));
    const auto pend = make_pendulum();
    for (double E : {-1.9, -1.0, -0.2}) {
        const auto a = custom.domain(E).intervals.at(0);
        const auto b = pend.domain(E).intervals.at(0);
        CHECK(a.lo == doctest::Approx(b.lo).epsilon(1e-13));
        CHECK(a.hi == doctest::Approx(b.hi).epsilon(1e-13));
        CHECK(a.lo_kind == EndpointKind::TurningPoint);
    }
    const auto circ = custom.domain(0.5).intervals.at(0);
    CHECK(circ.lo_kind == EndpointKind::Truncation);

    MechanicalSystem bad;
    CHECK(code_of([&] { make_mechanical(bad); }) == ErrorCode::InvalidArgument);
}
