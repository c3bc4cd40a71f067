#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>

#include "gld/error.hpp"
#include "gld/grid_io.hpp"

namespace gld {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out) {
        throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
    }
}

} // namespace

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    if (text == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw Error(ErrorCode::Parse, "not a number: '" + std::string(text) + "'");
    }
    return v;
}

void write_landscape_csv(const Landscape& land, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << (land.derivs ? "E,ell,dell_dE\n" : "E,ell\n");
    for (std::size_t k = 0; k < land.energies.size(); ++k) {
        out << format_double(land.energies[k]) << ',' << format_double(land.lengths[k]);
        if (land.derivs) {
            out << ',' << format_double((*land.derivs)[k]);
        }
        out << '\n';
    }
    finish(out, path);
}

void write_grid_csv(const GridMap& grid, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << "q,p,value,mask\n";
    for (std::size_t j = 0; j < grid.spec.np; ++j) {
        const std::string p = format_double(grid.spec.p(j));
        for (std::size_t i = 0; i < grid.spec.nq; ++i) {
            out << format_double(grid.spec.q(i)) << ',' << p << ',';
            if (grid.valid(i, j)) {
                out << format_double(grid.at(i, j)) << ",1\n";
            } else {
                out << ",0\n";
            }
        }
    }
    finish(out, path);
}

void write_line_csv(const std::vector<LinePoint>& line, const std::filesystem::path& path)
{
    auto out = open_out(path);
    out << "coord,ld,ld_plus,ld_minus,status\n";
    for (const auto& pt : line) {
        out << format_double(pt.coord) << ',' << format_double(pt.ld.total) << ',' << format_double(pt.ld.plus)
            << ',' << format_double(pt.ld.minus) << ',' << to_string(pt.ld.status) << '\n';
    }
    finish(out, path);
}

GridMap read_grid_csv(const std::filesystem::path& path, GridQuantity quantity)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
    }
    std::string line;
    if (!std::getline(in, line) || line != "q,p,value,mask") {
        throw Error(ErrorCode::Parse, path.string() + ": expected header 'q,p,value,mask'");
    }
    std::vector<double> qs;
    std::vector<double> ps;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        std::string_view rest(line);
        std::string_view fields[4];
        for (int f = 0; f < 4; ++f) {
            const auto comma = rest.find(',');
            if ((comma == std::string_view::npos) != (f == 3)) {
                throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(row) + ": expected 4 fields");
            }
            fields[f] = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        try {
            qs.push_back(parse_double(fields[0]));
            ps.push_back(parse_double(fields[1]));
            if (fields[3] == "1") {
                values.push_back(parse_double(fields[2]));
                mask.push_back(1);
            } else if (fields[3] == "0") {
                values.push_back(0.0);
                mask.push_back(0);
            } else {
                throw Error(ErrorCode::Parse, "mask must be 0 or 1");
            }
        } catch (const Error& err) {
            throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(row) + ": " + err.what());
        }
    }

    // Node order is p outer, q inner: nq is the length of the first run of
    // constant p.
    std::size_t nq = 0;
    while (nq < ps.size() && ps[nq] == ps.front()) {
        ++nq;
    }
    if (nq < 2 || ps.size() % nq != 0 || ps.size() / nq < 2) {
        throw Error(ErrorCode::Parse, path.string() + ": node list is not a rectangular grid");
    }
    GridMap g;
    g.spec = {qs.front(), qs[nq - 1], ps.front(), ps.back(), nq, ps.size() / nq};
    g.spec.validate();
    for (std::size_t n = 0; n < qs.size(); ++n) {
        const std::size_t i = n % nq;
        const std::size_t j = n / nq;
        if (qs[n] != g.spec.q(i) || ps[n] != g.spec.p(j)) {
            throw Error(ErrorCode::Parse, path.string() + ": node " + std::to_string(n) + " is off the uniform grid");
        }
    }
    g.quantity = quantity;
    g.values = std::move(values);
    g.mask = std::move(mask);
    return g;
}

void write_pgm(const GridMap& grid, const std::filesystem::path& path)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t n = 0; n < grid.values.size(); ++n) {
        if (grid.mask[n] && std::isfinite(grid.values[n])) {
            lo = std::min(lo, grid.values[n]);
            hi = std::max(hi, grid.values[n]);
        }
    }
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out << "P5\n" << grid.spec.nq << ' ' << grid.spec.np << "\n65535\n";
    std::string pixels;
    pixels.reserve(2 * grid.values.size());
    for (std::size_t n = 0; n < grid.values.size(); ++n) {
        std::uint16_t level = 0;
        if (grid.mask[n] && std::isfinite(grid.values[n])) {
            const double frac = hi > lo ? (grid.values[n] - lo) / (hi - lo) : 0.0;
            level = static_cast<std::uint16_t>(std::lround(std::clamp(frac, 0.0, 1.0) * 65535.0));
        }
        pixels.push_back(static_cast<char>(level >> 8));
        pixels.push_back(static_cast<char>(level & 0xff));
    }
    out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
    finish(out, path);
}

} // namespace gld
