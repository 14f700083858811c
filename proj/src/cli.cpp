#include "dorlicz/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "json.hpp"

#include "dorlicz/config.hpp"
#include "dorlicz/digest.hpp"
#include "dorlicz/error.hpp"
#include "dorlicz/functionals.hpp"
#include "dorlicz/verify.hpp"

#ifndef DORLICZ_VERSION
#define DORLICZ_VERSION "unknown"
#endif

namespace dorlicz {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_cell(const std::optional<double>& x) { return x ? fmt_double(*x) : std::string(); }

// Collects output files and writes the manifest last.
class Run {
public:
    struct Start {
        std::string utc = utc_now();
        std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    };

    Run(const RunConfig& config, Start start) : config_(config), started_(start.utc), t0_(start.t0) {
        fs::create_directories(config.out);
    }

    std::ofstream open(const std::string& name) {
        outputs_.push_back(name);
        std::ofstream f(fs::path(config_.out) / name, std::ios::binary);
        if (!f) throw ConfigError("out: cannot write '" + (fs::path(config_.out) / name).string() + "'");
        return f;
    }
    void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }

    void finish(int status) {
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        json m;
        m["command"] = to_string(config_.command);
        m["config"] = config_.effective;
        m["config_digest"] = hex_digest(config_.effective.dump());
        m["seed"] = config_.seed;
        m["versions"] = {{"dorlicz", DORLICZ_VERSION},
                         {"compiler", __VERSION__},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                       "." + std::to_string(EIGEN_MINOR_VERSION)},
                         {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                               std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                               std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                         {"cli11", CLI11_VERSION}};
        m["started_utc"] = started_;
        m["finished_utc"] = utc_now();
        m["elapsed_seconds"] = elapsed;
        m["outputs"] = outputs_;
        m["exit_status"] = status;
        std::ofstream f(fs::path(config_.out) / "manifest.json", std::ios::binary);
        f << m.dump(2) << '\n';
    }

private:
    const RunConfig& config_;
    std::string started_;
    std::chrono::steady_clock::time_point t0_;
    std::vector<std::string> outputs_;
};

std::vector<OrliczFunction> function_list(const RunConfig& c, std::size_t expected) {
    if (!c.phis.is_array()) throw ConfigError("phis: missing list of functions");
    if (expected && c.phis.size() != expected)
        throw ConfigError("phis: expected " + std::to_string(expected) + " functions, got " + std::to_string(c.phis.size()));
    std::vector<OrliczFunction> out;
    for (std::size_t i = 0; i < c.phis.size(); ++i) out.push_back(make_function(c.phis[i], "phis[" + std::to_string(i) + "]"));
    return out;
}

std::vector<StarBody> body_list(const RunConfig& c, const json& list, const std::string& name, const GridPtr& grid,
                                std::uint64_t stream) {
    if (!list.is_array()) throw ConfigError(name + ": missing list of bodies");
    if (static_cast<int>(list.size()) != c.grid.dimension)
        throw ConfigError(name + ": expected " + std::to_string(c.grid.dimension) + " bodies, one per slot");
    std::vector<StarBody> out;
    for (std::size_t i = 0; i < list.size(); ++i)
        out.push_back(make_body(list[i], name + "[" + std::to_string(i) + "]", c, grid, stream + i));
    return out;
}

// ------------------------------------------------------------ compute

FunctionalValue evaluate(const std::string& functional, const RunConfig& c, const GridPtr& grid,
                         const std::optional<OrliczFunction>& phi_override = std::nullopt) {
    auto phi = [&] { return phi_override ? *phi_override : make_function(c.phi, "phi"); };
    auto k = [&] { return make_body(c.k, "K", c, grid, 0); };
    auto l = [&] { return make_body(c.l, "L", c, grid, 1); };
    if (functional == "volume") return volume(k(), grid);
    if (functional == "vrad") {
        const StarBody body = k();
        FunctionalValue v;
        v.value = vrad(body, grid);
        v.quadrature_estimate_error = std::abs(v.value - vrad(body, coarsen(*grid)));
        v.digest = hex_digest("vrad|" + body.digest() + "|" + grid->digest());
        return v;
    }
    if (functional == "dual-mixed") return dual_mixed_volume(phi(), k(), l(), grid);
    if (functional == "dual-surface") return dual_surface_area(phi(), k(), grid);
    if (functional == "dual-mean-radius") return dual_mean_radius(phi(), k(), grid);
    if (functional == "primal-mixed") return primal_mixed_volume(phi(), k(), l(), grid);
    if (functional == "multi-dual")
        return multi_dual_mixed_volume(function_list(c, static_cast<std::size_t>(c.grid.dimension)),
                                       body_list(c, c.bodies, "bodies", grid, 10),
                                       body_list(c, c.targets, "targets", grid, 20), grid);
    if (functional == "ith-dual") {
        const auto f = function_list(c, 2);
        return ith_dual_mixed_volume(f[0], f[1], c.i, k(), l(), make_body(c.q1, "Q1", c, grid, 2),
                                     make_body(c.q2, "Q2", c, grid, 3), grid);
    }
    throw ConfigError("functional: expected volume, vrad, dual-mixed, dual-surface, dual-mean-radius, primal-mixed, "
                      "multi-dual or ith-dual, got '" + functional + "'");
}

int cmd_compute(const RunConfig& c, std::ostream& out) {
    const Run::Start start;
    const GridPtr grid = make_grid(c);
    Run run(c, start);
    const auto v = evaluate(c.functional, c, grid);
    out << c.functional << " = " << fmt_double(v.value) << " +- " << fmt_double(v.quadrature_estimate_error) << '\n';
    run.write_json("result.json", {{"functional", c.functional},
                                   {"value", num(v.value)},
                                   {"quadrature_error", num(v.quadrature_estimate_error)},
                                   {"digest", v.digest},
                                   {"grid", grid->digest()}});
    run.open("result.csv") << "functional,value,quadrature_error,digest\n"
                           << c.functional << ',' << fmt_double(v.value) << ',' << fmt_double(v.quadrature_estimate_error)
                           << ',' << v.digest << '\n';
    run.finish(kExitOk);
    return kExitOk;
}

// ------------------------------------------------------------ estimate

int cmd_estimate(const RunConfig& c, std::ostream& out) {
    const Run::Start start;
    const GridPtr grid = make_grid(c);
    const std::string kind = c.functional.empty() ? "dual-mixed" : c.functional;
    ExtremalResult r;
    if (kind == "dual-mixed") {
        const OrliczFunction phi = make_function(c.phi, "phi");
        const Sense sense = c.sense.value_or(natural_sense(phi, c.grid.dimension));
        require_sense(phi, c.grid.dimension, sense);
        const ExtremalProblem problem(c.target, sense, phi, make_body(c.k, "K", c, grid, 0), grid, c.search);
        r = c.ellipsoid_restricted ? estimate_ellipsoid_restricted(problem) : estimate(problem);
    } else if (kind == "multi-dual") {
        r = estimate_multi(function_list(c, static_cast<std::size_t>(c.grid.dimension)),
                           body_list(c, c.bodies, "bodies", grid, 10), c.target, grid, c.multi_mode, c.search);
    } else if (kind == "ith-dual") {
        const auto f = function_list(c, 2);
        r = estimate_ith_mixed(f[0], f[1], c.i, make_body(c.k, "K", c, grid, 0), make_body(c.l, "L", c, grid, 1),
                               c.target, grid, c.search);
    } else {
        throw ConfigError("functional: estimate supports dual-mixed, multi-dual or ith-dual, got '" + kind + "'");
    }

    // Validation of the config is complete, so only now touch the output directory.
    Run run(c, start);
    out << "value = " << fmt_double(r.value) << '\n'
        << "converged = " << (r.converged ? "true" : "false") << '\n'
        << "evaluations = " << r.evaluations << '\n'
        << "S~ marker = " << fmt_double(r.markers.s_marker) << '\n';
    if (r.markers.volume_upper) out << "volume upper = " << fmt_double(*r.markers.volume_upper) << '\n';
    if (r.markers.volume_lower) out << "volume lower = " << fmt_double(*r.markers.volume_lower) << '\n';
    if (r.markers.ellipsoid) out << "ellipsoid optimum = " << fmt_double(*r.markers.ellipsoid) << '\n';
    if (!r.note.empty()) out << "note: " << r.note << '\n';

    json restarts = json::array();
    for (double v : r.restart_values) restarts.push_back(num(v));
    run.write_json("result.json", {{"functional", kind},
                                   {"target", to_string(c.target)},
                                   {"value", num(r.value)},
                                   {"converged", r.converged},
                                   {"evaluations", r.evaluations},
                                   {"final_step", num(r.final_step)},
                                   {"restart_values", restarts},
                                   {"markers",
                                    {{"s_marker", num(r.markers.s_marker)},
                                     {"volume_upper", opt_num(r.markers.volume_upper)},
                                     {"volume_lower", opt_num(r.markers.volume_lower)},
                                     {"ellipsoid", opt_num(r.markers.ellipsoid)}}},
                                   {"note", r.note}});
    {
        auto f = run.open("trace.csv");
        f << "evaluation,objective,step,restart\n";
        for (const auto& t : r.trace)
            f << t.evaluation << ',' << fmt_double(t.objective) << ',' << fmt_double(t.step) << ',' << t.restart << '\n';
    }
    {
        auto f = run.open("candidate.csv");
        f << "slot,node";
        for (int d = 0; d < grid->dimension(); ++d) f << ",u" << d;
        f << ",rho\n";
        for (std::size_t s = 0; s < r.candidates.size(); ++s) {
            const auto rho = radial_values(r.candidates[s], grid);
            for (std::size_t i = 0; i < grid->size(); ++i) {
                f << s << ',' << i;
                const auto u = grid->node(i);
                for (int d = 0; d < grid->dimension(); ++d) f << ',' << fmt_double(u[d]);
                f << ',' << fmt_double(rho[i]) << '\n';
            }
        }
    }
    run.finish(kExitOk);
    return kExitOk;
}

// ------------------------------------------------------------ verify

std::vector<std::string> resolve_checks(const std::vector<std::string>& requested) {
    std::vector<std::string> ids;
    const bool all = requested.empty() || std::find(requested.begin(), requested.end(), "all") != requested.end();
    if (all) {
        for (const auto& s : check_registry()) ids.push_back(s.id);
        return ids;
    }
    for (const auto& id : requested) {
        find_check(id);
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
    return ids;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
    const Run::Start start;
    if (c.grid.dimension != 2) throw ConfigError("grid.dimension: the check suite runs at n = 2");
    if (!c.grid.scheme.empty() && parse_grid_scheme(c.grid.scheme) != GridScheme::UniformAngle)
        throw ConfigError("grid.scheme: the check suite uses the uniform-angle grid");
    const auto ids = resolve_checks(c.checks);
    VerifyOptions opt;
    opt.trials = c.trials;
    opt.seed = c.seed;
    opt.resolution = c.grid.resolution;
    opt.tolerance_override = c.tolerance;
    Run run(c, start);
    const auto reports = run_checks(ids, opt);
    {
        auto f = run.open("trials.csv");
        write_trials_csv(f, reports);
    }
    const json summary = summary_json(reports);
    run.write_json("summary.json", summary);

    out << std::left << std::setw(4) << "#" << std::setw(26) << "check" << std::setw(9) << "verdict" << std::setw(8)
        << "rows" << std::setw(8) << "errors" << "min margin\n";
    for (const auto& r : reports)
        out << std::setw(4) << r.number << std::setw(26) << r.check_id << std::setw(9) << r.verdict << std::setw(8)
            << r.records.size() << std::setw(8) << r.erroring_trials << fmt_double(r.min_margin) << '\n';
    for (const auto& r : reports)
        for (const auto& f : r.failures)
            out << "FAIL " << r.check_id << " [" << f.input_digest << "] " << f.label << ": lhs " << fmt_double(f.lhs)
                << " rhs " << fmt_double(f.rhs) << " margin " << fmt_double(f.margin) << '\n';
    const int status = summary["all_exact_pass"].get<bool>() ? kExitOk : kExitFailure;
    run.finish(status);
    return status;
}

// ------------------------------------------------------------ sweep

struct SweepRow {
    double value = 0.0;
    double error = 0.0;
    std::optional<double> reference;
    std::string expected;
};

SweepRow sweep_point(const RunConfig& c, const GridPtr& grid, std::optional<OrliczFunction> phi) {
    const int n = c.grid.dimension;
    SweepRow row;
    if (c.functional == "dual-surface-ratio") {
        const StarBody k = make_body(c.k, "K", c, grid, 0);
        const OrliczFunction f = phi ? *phi : make_function(c.phi, "phi");
        const auto s = dual_surface_area(f, k, grid);
        const double sb = dual_surface_area(f, StarBody::ball(n), grid).value;
        row.value = s.value / sb;
        row.error = s.quadrature_estimate_error / sb;
        if (f.is_power()) {
            const double p = f.exponent();
            row.reference = std::pow(volume(k, grid).value / unit_ball_volume(n), (n - p) / n);
            row.expected = (p == 0.0 || p == n) ? "=" : (p > 0.0 && p < n) ? "<=" : ">=";
        }
        return row;
    }
    if (c.functional == "santalo-product") {
        const StarBody k = make_body(c.k, "K", c, grid, 0);
        const StarBody kp = polar(k, grid);
        row.value = vrad(k, grid) * vrad(kp, grid);
        const GridPtr half = coarsen(*grid);
        row.error = std::abs(row.value - vrad(k, half) * vrad(polar(k, half), half));
        row.reference = 1.0;
        row.expected = "<=";
        return row;
    }
    const auto v = evaluate(c.functional, c, grid, phi);
    row.value = v.value;
    row.error = v.quadrature_estimate_error;
    if (c.functional == "volume") {
        const StarBody k = make_body(c.k, "K", c, grid, 0);
        switch (k.kind()) {
            case BodyKind::Ball: row.reference = unit_ball_volume(n) * std::pow(k.ball_radius(), n); break;
            case BodyKind::Ellipsoid:
                row.reference = unit_ball_volume(n) * std::abs(k.ellipsoid_matrix().determinant());
                break;
            case BodyKind::Polytope: row.reference = k.polytope_data().volume; break;
            default: break;
        }
        if (row.reference) row.expected = "=";
    }
    return row;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
    const Run::Start start;
    if (c.values.empty()) throw ConfigError("sweep.values: empty sweep range");
    if (c.parameter != "p" && c.parameter != "resolution" && c.parameter != "roughness")
        throw ConfigError("sweep.parameter: expected p, resolution or roughness, got '" + c.parameter + "'");
    for (std::size_t i = 0; i < c.values.size(); ++i) {
        const double v = c.values[i];
        const std::string field = "sweep.values[" + std::to_string(i) + "]";
        if (c.parameter == "resolution" && (v != std::floor(v) || v < 8)) throw ConfigError(field + ": expected an integer >= 8");
        if (c.parameter == "roughness" && (v < 0.0 || v >= 1.0)) throw ConfigError(field + ": roughness lies in [0, 1)");
    }
    if (c.parameter == "roughness" && (!c.k.is_object() || c.k.value("kind", "") != "random" ||
                                       c.k.value("shape", "star") != "star"))
        throw ConfigError("K: a roughness sweep needs a random star body");
    if (c.parameter == "p" && (c.functional == "volume" || c.functional == "vrad" || c.functional == "santalo-product"))
        throw ConfigError("functional: '" + c.functional + "' does not depend on phi");

    constexpr double kTol = 1e-3;
    std::vector<std::pair<double, SweepRow>> rows;
    for (double v : c.values) {
        RunConfig point = c;
        std::optional<OrliczFunction> phi;
        if (c.parameter == "p") phi = OrliczFunction::power(v);
        if (c.parameter == "resolution") point.grid.resolution = static_cast<int>(v);
        if (c.parameter == "roughness") point.k["roughness"] = v;
        rows.emplace_back(v, sweep_point(point, make_grid(point), phi));
    }

    Run run(c, start);
    auto f = run.open("sweep.csv");
    f << "parameter,value,quadrature_error,reference,relative_error,expected,holds\n";
    out << c.parameter << "  " << c.functional << '\n';
    for (const auto& [p, r] : rows) {
        std::optional<double> rel;
        std::string holds;
        if (r.reference) {
            rel = std::abs(r.value - *r.reference) / std::abs(*r.reference);
            if (!r.expected.empty()) {
                const Relation relation = r.expected == "<=" ? Relation::Leq : r.expected == ">=" ? Relation::Geq : Relation::Eq;
                holds = relative_margin(relation, r.value, *r.reference) >= -kTol ? "true" : "false";
            }
        }
        f << fmt_double(p) << ',' << fmt_double(r.value) << ',' << fmt_double(r.error) << ',' << csv_cell(r.reference)
          << ',' << csv_cell(rel) << ',' << r.expected << ',' << holds << '\n';
        out << fmt_double(p) << "  " << fmt_double(r.value);
        if (r.reference) out << "  " << r.expected << ' ' << fmt_double(*r.reference) << "  " << holds;
        out << '\n';
    }
    f.close();
    run.finish(kExitOk);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual Orlicz functionals: compute, estimate, verify, sweep"};
    app.set_version_flag("--version", DORLICZ_VERSION);
    std::string command, config_path;
    Overrides o;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::vector<std::string> checks;
    int trials = 0, grid = 0;
    app.add_option("command", command, "compute, estimate, verify or sweep; overrides the config")
        ->check(CLI::IsMember({"compute", "estimate", "verify", "sweep"}));
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    auto* o_out = app.add_option("--out", out_dir, "output directory");
    auto* o_seed = app.add_option("--seed", seed, "root seed, overrides the config");
    auto* o_checks = app.add_option("--checks", checks, "comma-separated check ids, or all")->delimiter(',');
    auto* o_trials = app.add_option("--trials", trials, "trials per check")->check(CLI::PositiveNumber);
    auto* o_grid = app.add_option("--grid", grid, "grid resolution")->check(CLI::Range(8, 10000000));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (e.get_name() == "CallForVersion" ? std::string(DORLICZ_VERSION) + "\n" : app.help());
            return kExitOk;
        }
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) {
            config = load_config(config_path);
        } else if (!command.empty()) {
            config = parse_config(json{{"command", command}}.dump());
        } else {
            err << "usage error: give a command or --config\n" << app.help();
            return kExitUsage;
        }
        if (!command.empty()) o.command = command;
        if (*o_out) o.out = out_dir;
        if (*o_seed) o.seed = seed;
        if (*o_checks) o.checks = checks;
        if (*o_trials) o.trials = trials;
        if (*o_grid) o.grid = grid;
        apply_overrides(config, o);

        switch (config.command) {
            case Command::Compute: return cmd_compute(config, out);
            case Command::Estimate: return cmd_estimate(config, out);
            case Command::Verify: return cmd_verify(config, out);
            case Command::Sweep: return cmd_sweep(config, out);
        }
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ContractError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalDomainError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace dorlicz
