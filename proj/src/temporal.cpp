#include <array>
#include <cmath>

#include "gld/dopri5.hpp"
#include "gld/error.hpp"
#include "gld/parallel.hpp"
#include "gld/temporal.hpp"

namespace gld {

void IntegratorConfig::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "integrator tolerances must be positive");
    }
    if (!(max_step >= 0.0) || max_steps == 0) {
        throw Error(ErrorCode::InvalidArgument, "integrator step limits must be positive");
    }
}

std::string_view to_string(FlowStatus status) noexcept
{
    switch (status) {
    case FlowStatus::Ok: return "ok";
    case FlowStatus::BlowUp: return "blow-up";
    case FlowStatus::StepLimit: return "step-limit";
    case FlowStatus::StepUnderflow: return "step-underflow";
    }
    return "unknown";
}

namespace {

FlowStatus from_ode(ode::Status s)
{
    switch (s) {
    case ode::Status::Ok: return FlowStatus::Ok;
    case ode::Status::BlowUp: return FlowStatus::BlowUp;
    case ode::Status::StepLimit: return FlowStatus::StepLimit;
    case ode::Status::StepUnderflow: return FlowStatus::StepUnderflow;
    }
    return FlowStatus::StepLimit;
}

// Worse statuses win when combining the two halves.
FlowStatus worst(FlowStatus a, FlowStatus b)
{
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

} // namespace

FlowResult integrate_flow(const HamiltonianModel& model, PhasePoint x0, double t, TimeDirection direction,
                          const IntegratorConfig& cfg, const FlowObserver& observer)
{
    cfg.validate();
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::InvalidArgument, "time horizon must be positive and finite");
    }
    if (!std::isfinite(x0.q) || !std::isfinite(x0.p)) {
        throw Error(ErrorCode::InvalidArgument, "initial condition must be finite");
    }

    const double sign = direction == TimeDirection::Forward ? 1.0 : -1.0;
    auto rhs = [&](const std::array<double, 3>& y) {
        const auto v = model.vector_field(y[0], y[1]);
        return std::array<double, 3>{sign * v.dq, sign * v.dp, std::hypot(v.dq, v.dp)};
    };

    ode::Dopri5Options opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;
    opt.max_step = cfg.max_step;
    opt.max_steps = cfg.max_steps;
    opt.watched = 2;

    FlowResult out;
    std::array<double, 3> y{x0.q, x0.p, 0.0};
    const auto v0 = model.vector_field(x0.q, x0.p);
    if (v0.dq == 0.0 && v0.dp == 0.0) {
        // Equilibrium: the flow stays put.
        out.state = {x0.q, x0.p, 0.0};
        out.t_reached = t;
        if (observer) {
            observer(t, out.state);
        }
        return out;
    }

    const auto rep = ode::dopri5(rhs, y, t, opt, [&](double tt, const std::array<double, 3>& yy) {
        if (observer) {
            observer(tt, FlowState{yy[0], yy[1], yy[2]});
        }
    });
    out.state = {y[0], y[1], y[2]};
    out.t_reached = rep.t;
    out.status = from_ode(rep.status);
    out.steps = rep.accepted + rep.rejected;
    out.est_error = rep.local_error[2];
    return out;
}

TemporalLd temporal_ld(const HamiltonianModel& model, PhasePoint x0, double t, const IntegratorConfig& cfg)
{
    const auto fwd = integrate_flow(model, x0, t, TimeDirection::Forward, cfg);
    const auto bwd = integrate_flow(model, x0, t, TimeDirection::Backward, cfg);
    TemporalLd out;
    out.plus = fwd.state.s;
    out.minus = bwd.state.s;
    out.total = out.plus + out.minus;
    out.est_error = fwd.est_error + bwd.est_error;
    out.status = worst(fwd.status, bwd.status);
    return out;
}

std::vector<LinePoint> ld_landscape_line(const HamiltonianModel& model, const LineSpec& line, double t,
                                         const IntegratorConfig& cfg, unsigned workers)
{
    if (line.n < 2) {
        throw Error(ErrorCode::InvalidArgument, "a line needs at least 2 points");
    }
    if (!(line.lo < line.hi) || !std::isfinite(line.lo) || !std::isfinite(line.hi) ||
        !std::isfinite(line.fixed_value)) {
        throw Error(ErrorCode::InvalidArgument, "line range must satisfy lo < hi");
    }
    cfg.validate();
    std::vector<LinePoint> out(line.n);
    const double step = (line.hi - line.lo) / static_cast<double>(line.n - 1);
    parallel_for(line.n, workers, [&](std::size_t i) {
        const double c = (i + 1 == line.n) ? line.hi : line.lo + static_cast<double>(i) * step;
        const PhasePoint x0 =
            line.fixed == LineAxis::FixedQ ? PhasePoint{line.fixed_value, c} : PhasePoint{c, line.fixed_value};
        out[i] = {c, temporal_ld(model, x0, t, cfg)};
    });
    return out;
}

} // namespace gld
