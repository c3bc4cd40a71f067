#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli.hpp"
#include "gld/error.hpp"
#include "gld/geometric.hpp"
#include "gld/grid_io.hpp"
#include "gld/phase_maps.hpp"
#include "gld/rates.hpp"
#include "gld/temporal.hpp"

namespace gld::cli {

namespace {

// Thrown for malformed option values that CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelArgs {
    std::string model;
    double trunc = 0.0;
    CLI::Option* trunc_opt = nullptr;
    bool bounded_librations = false;

    HamiltonianModel resolve() const
    {
        std::string name = model;
        if (bounded_librations) {
            if (name != "fishtail") {
                throw UsageError("--bounded-librations only applies to the fishtail model");
            }
            name = "fishtail-bounded";
        }
        return model_from_name(name);
    }

    std::optional<Truncation> truncation(const HamiltonianModel& m) const
    {
        if (trunc_opt->count() == 0) {
            if (m.needs_truncation()) {
                throw Error(ErrorCode::TruncationRequired, std::string(m.name()) + " needs --trunc");
            }
            return std::nullopt;
        }
        return Truncation{trunc};
    }
};

void add_model_args(CLI::App* sub, ModelArgs& a, bool with_trunc)
{
    std::string names;
    for (auto n : builtin_model_names()) {
        names += (names.empty() ? "" : ", ") + std::string(n);
    }
    sub->add_option("--model", a.model, "Model: " + names)->required();
    if (with_trunc) {
        a.trunc_opt = sub->add_option("--trunc", a.trunc, "Truncation coordinate a for unbounded branches");
        sub->add_flag("--bounded-librations", a.bounded_librations,
                      "Fish-tail: measure only the bounded libration ovals");
    }
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

double number(std::string_view text, const std::string& what)
{
    try {
        const double v = parse_double(text);
        if (!std::isfinite(v)) {
            throw UsageError(what + ": value must be finite");
        }
        return v;
    } catch (const Error&) {
        throw UsageError(what + ": '" + std::string(text) + "' is not a number");
    }
}

std::size_t count(std::string_view text, const std::string& what)
{
    std::size_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw UsageError(what + ": '" + std::string(text) + "' is not a count");
    }
    return v;
}

GridSpec parse_grid(const std::string& bounds, const std::string& grid)
{
    const auto b = split(bounds, ',');
    if (b.size() != 4) {
        throw UsageError("--bounds expects qlo,qhi,plo,phi");
    }
    const auto g = split(grid, 'x');
    if (g.size() != 2) {
        throw UsageError("--grid expects NQxNP");
    }
    GridSpec spec{number(b[0], "--bounds"), number(b[1], "--bounds"), number(b[2], "--bounds"),
                  number(b[3], "--bounds"), count(g[0], "--grid"), count(g[1], "--grid")};
    try {
        spec.validate();
    } catch (const Error& e) {
        throw UsageError(std::string("--bounds/--grid: ") + e.what());
    }
    return spec;
}

// fixed=q:VALUE,range=LO:HI:N
LineSpec parse_line(const std::string& text)
{
    LineSpec line;
    bool have_fixed = false;
    bool have_range = false;
    for (auto part : split(text, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError("--line: expected key=value, got '" + std::string(part) + "'");
        }
        const auto key = part.substr(0, eq);
        const auto fields = split(part.substr(eq + 1), ':');
        if (key == "fixed" && fields.size() == 2 && (fields[0] == "q" || fields[0] == "p")) {
            line.fixed = fields[0] == "q" ? LineAxis::FixedQ : LineAxis::FixedP;
            line.fixed_value = number(fields[1], "--line fixed");
            have_fixed = true;
        } else if (key == "range" && fields.size() == 3) {
            line.lo = number(fields[0], "--line range");
            line.hi = number(fields[1], "--line range");
            line.n = count(fields[2], "--line range");
            have_range = true;
        } else {
            throw UsageError("--line: cannot read '" + std::string(part) + "'");
        }
    }
    if (!have_fixed || !have_range) {
        throw UsageError("--line expects fixed=q|p:VALUE,range=LO:HI:N");
    }
    if (line.n < 2 || !(line.lo < line.hi)) {
        throw UsageError("--line range needs LO < HI and N >= 2");
    }
    return line;
}

bool usage_code(ErrorCode c)
{
    switch (c) {
    case ErrorCode::NoConvergence:
    case ErrorCode::StraddlesCritical:
    case ErrorCode::EmptyLadder:
    case ErrorCode::DegenerateFit:
    case ErrorCode::TooFewSamples:
        return false;
    default:
        return true;
    }
}

nlohmann::json number_or_null(std::optional<double> v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Geometric and temporal Lagrangian descriptors for one degree-of-freedom Hamiltonians", "gld"};
    app.require_subcommand(1);
    unsigned threads = 0;
    bool best_effort = false;
    app.add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("--best-effort", best_effort, "Exit 0 even when some values failed to converge");

    ModelArgs land_m;
    double emin = 0.0, emax = 0.0;
    std::size_t n = 0;
    bool derivs = false;
    std::string land_out;
    auto* land = app.add_subcommand("landscape", "Sample l(E) on a uniform energy grid");
    add_model_args(land, land_m, true);
    land->add_option("--emin", emin, "Lowest energy")->required();
    land->add_option("--emax", emax, "Highest energy")->required();
    land->add_option("--n", n, "Number of samples")->required();
    land->add_flag("--derivs", derivs, "Also write dl/dE");
    land->add_option("--out", land_out, "Output CSV")->required();

    ModelArgs map_m;
    std::string bounds, grid, quantity = "ell", map_out, map_pgm;
    double map_t = 20.0;
    bool table_mode = false;
    auto* map = app.add_subcommand("map", "Evaluate energy, l or the temporal descriptor on a phase-space mesh");
    add_model_args(map, map_m, true);
    map->add_option("--bounds", bounds, "qlo,qhi,plo,phi")->required();
    map->add_option("--grid", grid, "NQxNP")->required();
    map->add_option("--quantity", quantity, "ell, energy or temporal")
        ->check(CLI::IsMember({"ell", "energy", "temporal"}));
    map->add_option("--t", map_t, "Time horizon for the temporal quantity")->check(CLI::PositiveNumber);
    map->add_flag("--table-mode", table_mode, "Interpolate l from a dense energy table");
    map->add_option("--out", map_out, "Output CSV")->required();
    map->add_option("--pgm", map_pgm, "16-bit PGM preview");

    std::string b_in, b_out, b_pgm;
    auto* bmap = app.add_subcommand("bmap", "Gradient norm B of an l map written by 'map'");
    bmap->add_option("--in", b_in, "l map CSV")->required();
    bmap->add_option("--out", b_out, "Output CSV")->required();
    bmap->add_option("--pgm", b_pgm, "16-bit PGM preview");

    ModelArgs tmp_m;
    double tmp_t = 20.0;
    std::string line_text, tmp_out;
    auto* temporal = app.add_subcommand("temporal", "Temporal descriptor along a line of initial conditions");
    add_model_args(temporal, tmp_m, false);
    temporal->add_option("--t", tmp_t, "Time horizon")->check(CLI::PositiveNumber);
    temporal->add_option("--line", line_text, "fixed=q|p:VALUE,range=LO:HI:N")->required();
    temporal->add_option("--out", tmp_out, "Output CSV")->required();

    ModelArgs rate_m;
    std::string critical = "all", side = "both", rate_out;
    RateOptions rate_opt;
    auto* rates = app.add_subcommand("rates", "Fit power laws to |dl/dE| near critical energies");
    add_model_args(rates, rate_m, true);
    rates->add_option("--critical", critical, "separatrix, elliptic or all")
        ->check(CLI::IsMember({"separatrix", "elliptic", "all"}));
    rates->add_option("--side", side, "below, above or both")->check(CLI::IsMember({"below", "above", "both"}));
    rates->add_option("--eps-hi", rate_opt.eps_hi, "Largest distance to the critical energy")
        ->check(CLI::PositiveNumber);
    rates->add_option("--eps-lo", rate_opt.eps_lo, "Smallest distance to the critical energy")
        ->check(CLI::PositiveNumber);
    rates->add_option("--per-decade", rate_opt.pts_per_decade, "Ladder points per decade");
    rates->add_option("--out", rate_out, "Output JSON")->required();

    auto* models = app.add_subcommand("models", "List built-in models");

    std::vector<const char*> argv{"gld"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    auto numeric_failure = [&](const std::string& what) {
        err << "gld: " << what << (best_effort ? " (ignored: --best-effort)\n" : "\n");
        return best_effort ? 0 : 2;
    };

    try {
        if (*land) {
            const auto m = land_m.resolve();
            LandscapeOptions opt;
            opt.with_derivs = derivs;
            opt.workers = threads;
            const auto l = landscape(m, emin, emax, n, land_m.truncation(m), opt);
            write_landscape_csv(l, land_out);
            if (l.unconverged > 0) {
                return numeric_failure(std::to_string(l.unconverged) + " samples did not converge");
            }
            return 0;
        }
        if (*map) {
            const auto m = map_m.resolve();
            const auto spec = parse_grid(bounds, grid);
            GridMap g;
            if (quantity == "energy") {
                g = energy_map(m, spec);
            } else if (quantity == "ell") {
                MapOptions opt;
                opt.workers = threads;
                opt.table_mode = table_mode;
                g = ell_map(m, spec, map_m.truncation(m), opt);
            } else {
                g = temporal_map(m, spec, map_t, {}, threads);
            }
            write_grid_csv(g, map_out);
            if (!map_pgm.empty()) {
                write_pgm(g, map_pgm);
            }
            std::size_t masked = 0;
            for (auto v : g.mask) {
                masked += v ? 0 : 1;
            }
            if (masked > 0) {
                err << "gld: " << masked << " nodes masked\n";
            }
            if (g.unconverged > 0) {
                return numeric_failure(std::to_string(g.unconverged) + " nodes did not converge");
            }
            return 0;
        }
        if (*bmap) {
            const auto b = b_map(read_grid_csv(b_in, GridQuantity::Ell));
            write_grid_csv(b, b_out);
            if (!b_pgm.empty()) {
                write_pgm(b, b_pgm);
            }
            return 0;
        }
        if (*temporal) {
            const auto m = tmp_m.resolve();
            const auto line = parse_line(line_text);
            const auto pts = ld_landscape_line(m, line, tmp_t, {}, threads);
            write_line_csv(pts, tmp_out);
            std::size_t stopped = 0;
            for (const auto& p : pts) {
                stopped += p.ld.status == FlowStatus::Ok ? 0 : 1;
            }
            if (stopped > 0) {
                return numeric_failure(std::to_string(stopped) + " trajectories stopped before the horizon");
            }
            return 0;
        }
        if (*rates) {
            const auto m = rate_m.resolve();
            const auto trunc = rate_m.truncation(m);
            rate_opt.workers = threads;
            std::optional<CriticalKind> only_c;
            if (critical != "all") {
                only_c = critical == "separatrix" ? CriticalKind::Separatrix : CriticalKind::Elliptic;
            }
            std::optional<Side> only_s;
            if (side != "both") {
                only_s = side == "below" ? Side::Below : Side::Above;
            }
            const auto report = rate_report(m, trunc, rate_opt, only_c, only_s);
            nlohmann::json doc;
            doc["model"] = std::string(m.name());
            doc["truncation"] = number_or_null(trunc ? std::optional<double>(trunc->a) : std::nullopt);
            doc["fits"] = nlohmann::json::array();
            std::size_t failed = 0;
            for (const auto& e : report) {
                nlohmann::json f;
                f["critical"] = std::string(to_string(e.critical));
                f["side"] = std::string(to_string(e.side));
                f["exponent"] = number_or_null(e.fit ? std::optional(e.fit->exponent) : std::nullopt);
                f["intercept"] = number_or_null(e.fit ? std::optional(e.fit->intercept) : std::nullopt);
                f["r2"] = number_or_null(e.fit ? std::optional(e.fit->r_squared) : std::nullopt);
                f["n_samples"] = e.n_samples;
                if (!e.fit) {
                    f["error"] = e.error;
                    ++failed;
                }
                doc["fits"].push_back(f);
            }
            std::ofstream f(rate_out);
            if (!f) {
                throw Error(ErrorCode::Io, "cannot open '" + rate_out + "' for writing");
            }
            f << doc.dump(2) << '\n';
            if (!f.flush()) {
                throw Error(ErrorCode::Io, "write to '" + rate_out + "' failed");
            }
            if (report.empty()) {
                throw UsageError("no approach matches --critical/--side for " + std::string(m.name()));
            }
            if (failed > 0) {
                return numeric_failure(std::to_string(failed) + " fits failed");
            }
            return 0;
        }
        if (*models) {
            out << std::left << std::setw(20) << "model" << std::setw(6) << "m" << std::setw(14) << "E_min"
                << std::setw(14) << "E_sx"
                << "truncation\n";
            for (auto name : builtin_model_names()) {
                const auto m = model_from_name(name);
                const auto c = m.critical_energies();
                out << std::setw(20) << name << std::setw(6) << m.multiplier() << std::setw(14) << c.minimum;
                if (c.separatrix) {
                    out << std::setw(14) << *c.separatrix;
                } else {
                    out << std::setw(14) << "-";
                }
                out << (m.needs_truncation() ? "required" : "-") << '\n';
            }
            return 0;
        }
    } catch (const UsageError& e) {
        err << "gld: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << "gld: " << e.what() << '\n';
        return usage_code(e.code()) ? 1 : 2;
    }
    return 1;
}

} // namespace gld::cli
