#pragma once

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "gld/model.hpp"

namespace gld {

struct PhasePoint {
    double q = 0.0;
    double p = 0.0;
};

/// Phase-space state augmented with the arc length s travelled so far.
struct FlowState {
    double q = 0.0;
    double p = 0.0;
    double s = 0.0;
};

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0; ///< 0: unlimited
    std::size_t max_steps = 10'000'000;

    void validate() const;
};

enum class FlowStatus { Ok, BlowUp, StepLimit, StepUnderflow };

std::string_view to_string(FlowStatus status) noexcept;

enum class TimeDirection { Forward, Backward };

struct FlowResult {
    FlowState state;
    double t_reached = 0.0;
    FlowStatus status = FlowStatus::Ok;
    std::size_t steps = 0;
    double est_error = 0.0; ///< accumulated local error estimate of s
};

using FlowObserver = std::function<void(double t, const FlowState&)>;

/// Integrates the Hamiltonian flow (or its time reversal) for |t| time units
/// together with ds/dt = |f(q, p)|. The angle is never wrapped.
FlowResult integrate_flow(const HamiltonianModel& model, PhasePoint x0, double t, TimeDirection direction,
                          const IntegratorConfig& cfg = {}, const FlowObserver& observer = {});

/// Temporal descriptor over [-t, t]: arc length forward (plus) and backward
/// (minus). If either half stops early the partial values are kept and the
/// status says why.
struct TemporalLd {
    double total = 0.0;
    double plus = 0.0;
    double minus = 0.0;
    double est_error = 0.0;
    FlowStatus status = FlowStatus::Ok;
};

TemporalLd temporal_ld(const HamiltonianModel& model, PhasePoint x0, double t, const IntegratorConfig& cfg = {});

enum class LineAxis { FixedQ, FixedP };

/// Initial conditions along a coordinate line: the fixed coordinate holds
/// fixed_value, the other runs over n points of [lo, hi].
struct LineSpec {
    LineAxis fixed = LineAxis::FixedQ;
    double fixed_value = 0.0;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 2;
};

struct LinePoint {
    double coord = 0.0;
    TemporalLd ld;
};

std::vector<LinePoint> ld_landscape_line(const HamiltonianModel& model, const LineSpec& line, double t,
                                         const IntegratorConfig& cfg = {}, unsigned workers = 0);

} // namespace gld
