#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gld/model.hpp"
#include "gld/quadrature.hpp"
#include "gld/temporal.hpp"

namespace gld {

struct GridSpec {
    double q_lo = 0.0;
    double q_hi = 1.0;
    double p_lo = 0.0;
    double p_hi = 1.0;
    std::size_t nq = 2;
    std::size_t np = 2;

    void validate() const;
    /// Node coordinates; the last node sits exactly on the upper bound.
    double q(std::size_t i) const noexcept;
    double p(std::size_t j) const noexcept;
    double dq() const noexcept { return (q_hi - q_lo) / static_cast<double>(nq - 1); }
    double dp() const noexcept { return (p_hi - p_lo) / static_cast<double>(np - 1); }
    std::size_t size() const noexcept { return nq * np; }
};

enum class GridQuantity { Energy, Ell, BNorm, Temporal };

std::string_view to_string(GridQuantity q) noexcept;

/// Scalar field on a GridSpec. Storage is row-major with p outer and q inner:
/// node (i, j) lives at j * nq + i.
struct GridMap {
    GridSpec spec;
    GridQuantity quantity = GridQuantity::Energy;
    std::vector<double> values;
    std::vector<std::uint8_t> mask; ///< 1 where values holds a valid number
    std::size_t unconverged = 0;

    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * spec.nq + i; }
    double at(std::size_t i, std::size_t j) const noexcept { return values[index(i, j)]; }
    bool valid(std::size_t i, std::size_t j) const noexcept { return mask[index(i, j)] != 0; }
};

GridMap energy_map(const HamiltonianModel& model, const GridSpec& spec);

struct MapOptions {
    unsigned workers = 0;
    QuadratureConfig quadrature{};
    /// Interpolate l from a dense 1-D energy table instead of integrating at
    /// every node.
    bool table_mode = false;
    std::size_t table_size = 4096;
};

/// l(E(q, p)) per node. Nodes whose energies agree within 1e-12 share one
/// evaluation. Nodes where the energy is out of range or the level set cannot
/// be measured are masked.
GridMap ell_map(const HamiltonianModel& model, const GridSpec& spec, std::optional<Truncation> trunc = std::nullopt,
                const MapOptions& opt = {});

/// Gradient norm of an l grid computed on the same mesh: central differences
/// inside, one-sided differences on the edges. A node is masked when any value
/// its stencil touches is masked.
GridMap b_map(const GridMap& ell_grid);

/// Temporal descriptor total per node; nodes whose integration stopped early
/// are masked.
GridMap temporal_map(const HamiltonianModel& model, const GridSpec& spec, double t, const IntegratorConfig& cfg = {},
                     unsigned workers = 0);

} // namespace gld
