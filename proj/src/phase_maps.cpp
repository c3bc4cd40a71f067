#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

// Boost 1.74's pchip calls isnan unqualified.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include "gld/error.hpp"
#include "gld/geometric.hpp"
#include "gld/parallel.hpp"
#include "gld/phase_maps.hpp"

namespace gld {

void GridSpec::validate() const
{
    const bool finite = std::isfinite(q_lo) && std::isfinite(q_hi) && std::isfinite(p_lo) && std::isfinite(p_hi);
    if (!finite || !(q_lo < q_hi) || !(p_lo < p_hi)) {
        throw Error(ErrorCode::InvalidArgument, "grid bounds must be finite with lo < hi");
    }
    if (nq < 2 || np < 2) {
        throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 nodes per axis");
    }
}

double GridSpec::q(std::size_t i) const noexcept
{
    return i + 1 == nq ? q_hi : q_lo + static_cast<double>(i) * dq();
}

double GridSpec::p(std::size_t j) const noexcept
{
    return j + 1 == np ? p_hi : p_lo + static_cast<double>(j) * dp();
}

std::string_view to_string(GridQuantity q) noexcept
{
    switch (q) {
    case GridQuantity::Energy: return "energy";
    case GridQuantity::Ell: return "ell";
    case GridQuantity::BNorm: return "bnorm";
    case GridQuantity::Temporal: return "temporal";
    }
    return "unknown";
}

namespace {

GridMap blank(const GridSpec& spec, GridQuantity quantity)
{
    spec.validate();
    GridMap g;
    g.spec = spec;
    g.quantity = quantity;
    g.values.assign(spec.size(), 0.0);
    g.mask.assign(spec.size(), 1);
    return g;
}

double level_length(const HamiltonianModel& model, double E, std::optional<Truncation> trunc,
                    const QuadratureConfig& cfg, bool& converged)
{
    const auto len = ell(model, E, trunc, cfg);
    converged = len.converged;
    return len.value;
}

void fill_exact(GridMap& g, const std::vector<double>& energies, const std::vector<std::size_t>& nodes,
                const HamiltonianModel& model, std::optional<Truncation> trunc, const MapOptions& opt)
{
    // Group nodes of (nearly) equal energy; the group's smallest energy is
    // evaluated once.
    std::vector<std::size_t> order = nodes;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });
    std::vector<std::size_t> starts;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (starts.empty()) {
            starts.push_back(k);
            continue;
        }
        const double head = energies[order[starts.back()]];
        if (energies[order[k]] - head > 1e-12 * std::max(1.0, std::abs(head))) {
            starts.push_back(k);
        }
    }
    starts.push_back(order.size());

    const std::size_t groups = starts.size() - 1;
    std::vector<double> value(groups, 0.0);
    std::vector<std::uint8_t> ok(groups, 1);
    std::vector<std::uint8_t> conv(groups, 1);
    parallel_for(groups, opt.workers, [&](std::size_t gi) {
        const double E = energies[order[starts[gi]]];
        try {
            bool c = true;
            value[gi] = level_length(model, E, trunc, opt.quadrature, c);
            conv[gi] = c ? 1 : 0;
        } catch (const Error&) {
            ok[gi] = 0;
        }
    });
    for (std::size_t gi = 0; gi < groups; ++gi) {
        for (std::size_t k = starts[gi]; k < starts[gi + 1]; ++k) {
            const std::size_t node = order[k];
            g.values[node] = ok[gi] ? value[gi] : 0.0;
            g.mask[node] = ok[gi];
            g.unconverged += (ok[gi] && !conv[gi]) ? 1 : 0;
        }
    }
}

void fill_table(GridMap& g, const std::vector<double>& energies, const std::vector<std::size_t>& nodes,
                const HamiltonianModel& model, std::optional<Truncation> trunc, const MapOptions& opt)
{
    double e_lo = energies[nodes.front()];
    double e_hi = e_lo;
    for (std::size_t n : nodes) {
        e_lo = std::min(e_lo, energies[n]);
        e_hi = std::max(e_hi, energies[n]);
    }
    const std::size_t m = std::max<std::size_t>(opt.table_size, 4);
    if (!(e_lo < e_hi)) {
        fill_exact(g, energies, nodes, model, trunc, opt);
        return;
    }
    std::vector<double> table_e(m);
    for (std::size_t k = 0; k < m; ++k) {
        table_e[k] = k + 1 == m ? e_hi : e_lo + (e_hi - e_lo) * static_cast<double>(k) / static_cast<double>(m - 1);
    }
    if (const auto sep = model.critical_energies().separatrix; sep && *sep > e_lo && *sep < e_hi) {
        const auto pos = std::lower_bound(table_e.begin(), table_e.end(), *sep);
        if (*pos != *sep) {
            table_e.insert(pos, *sep);
        }
    }
    std::vector<double> table_l(table_e.size(), 0.0);
    std::vector<std::uint8_t> ok(table_e.size(), 1);
    std::vector<std::uint8_t> conv(table_e.size(), 1);
    parallel_for(table_e.size(), opt.workers, [&](std::size_t k) {
        try {
            bool c = true;
            table_l[k] = level_length(model, table_e[k], trunc, opt.quadrature, c);
            conv[k] = c ? 1 : 0;
        } catch (const Error&) {
            ok[k] = 0;
        }
    });
    std::vector<double> xs;
    std::vector<double> ys;
    bool all_converged = true;
    for (std::size_t k = 0; k < table_e.size(); ++k) {
        if (ok[k]) {
            xs.push_back(table_e[k]);
            ys.push_back(table_l[k]);
            all_converged = all_converged && conv[k];
        }
    }
    if (xs.size() < 4) {
        for (std::size_t n : nodes) {
            g.mask[n] = 0;
        }
        return;
    }
    const double x_first = xs.front();
    const double x_last = xs.back();
    const boost::math::interpolators::pchip<std::vector<double>> interp(std::move(xs), std::move(ys));
    for (std::size_t n : nodes) {
        const double E = energies[n];
        if (E < x_first || E > x_last) {
            g.mask[n] = 0;
            continue;
        }
        g.values[n] = interp(E);
        g.unconverged += all_converged ? 0 : 1;
    }
}

} // namespace

GridMap energy_map(const HamiltonianModel& model, const GridSpec& spec)
{
    GridMap g = blank(spec, GridQuantity::Energy);
    for (std::size_t j = 0; j < spec.np; ++j) {
        for (std::size_t i = 0; i < spec.nq; ++i) {
            g.values[g.index(i, j)] = model.energy(spec.q(i), spec.p(j));
        }
    }
    return g;
}

GridMap ell_map(const HamiltonianModel& model, const GridSpec& spec, std::optional<Truncation> trunc,
                const MapOptions& opt)
{
    if (model.needs_truncation() && !trunc) {
        throw Error(ErrorCode::TruncationRequired, std::string(model.name()) + " needs a truncation");
    }
    opt.quadrature.validate();
    const GridMap e = energy_map(model, spec);
    GridMap g = blank(spec, GridQuantity::Ell);

    const double e_min = model.critical_energies().minimum;
    std::vector<double> energies = e.values;
    std::vector<std::size_t> nodes;
    nodes.reserve(energies.size());
    for (std::size_t n = 0; n < energies.size(); ++n) {
        double& E = energies[n];
        if (E < e_min && e_min - E <= 1e-12 * std::max(1.0, std::abs(e_min))) {
            E = e_min;
        }
        if (!(E >= e_min)) {
            g.mask[n] = 0;
            continue;
        }
        nodes.push_back(n);
    }
    if (nodes.empty()) {
        return g;
    }
    if (opt.table_mode) {
        fill_table(g, energies, nodes, model, trunc, opt);
    } else {
        fill_exact(g, energies, nodes, model, trunc, opt);
    }
    return g;
}

GridMap b_map(const GridMap& ell_grid)
{
    if (ell_grid.quantity != GridQuantity::Ell) {
        throw Error(ErrorCode::InvalidArgument, "b_map expects an l grid");
    }
    const GridSpec& s = ell_grid.spec;
    GridMap b = blank(s, GridQuantity::BNorm);
    const double dq = s.dq();
    const double dp = s.dp();

    // Returns the derivative along one axis, or nullopt if the stencil hits a
    // masked node.
    auto diff = [&](std::size_t k, std::size_t count, double h, auto&& idx) -> std::optional<double> {
        std::size_t a = k == 0 ? 0 : k - 1;
        std::size_t c = k + 1 == count ? k : k + 1;
        if (!ell_grid.mask[idx(a)] || !ell_grid.mask[idx(c)]) {
            return std::nullopt;
        }
        const double span = static_cast<double>(c - a) * h;
        return (ell_grid.values[idx(c)] - ell_grid.values[idx(a)]) / span;
    };

    for (std::size_t j = 0; j < s.np; ++j) {
        for (std::size_t i = 0; i < s.nq; ++i) {
            const std::size_t n = b.index(i, j);
            if (!ell_grid.mask[n]) {
                b.mask[n] = 0;
                continue;
            }
            const auto gq = diff(i, s.nq, dq, [&](std::size_t k) { return b.index(k, j); });
            const auto gp = diff(j, s.np, dp, [&](std::size_t k) { return b.index(i, k); });
            if (!gq || !gp) {
                b.mask[n] = 0;
                continue;
            }
            b.values[n] = std::hypot(*gq, *gp);
        }
    }
    b.unconverged = ell_grid.unconverged;
    return b;
}

GridMap temporal_map(const HamiltonianModel& model, const GridSpec& spec, double t, const IntegratorConfig& cfg,
                     unsigned workers)
{
    cfg.validate();
    GridMap g = blank(spec, GridQuantity::Temporal);
    parallel_for(spec.size(), workers, [&](std::size_t n) {
        const std::size_t i = n % spec.nq;
        const std::size_t j = n / spec.nq;
        const auto ld = temporal_ld(model, {spec.q(i), spec.p(j)}, t, cfg);
        g.values[n] = ld.total;
        g.mask[n] = ld.status == FlowStatus::Ok ? 1 : 0;
    });
    return g;
}

} // namespace gld
