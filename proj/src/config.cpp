#include "dorlicz/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "dorlicz/digest.hpp"
#include "dorlicz/error.hpp"

namespace dorlicz {

using nlohmann::json;

std::string to_string(Command c) {
    switch (c) {
        case Command::Compute: return "compute";
        case Command::Estimate: return "estimate";
        case Command::Verify: return "verify";
        case Command::Sweep: return "sweep";
    }
    return "?";
}

namespace {

Command parse_command(const std::string& s) {
    for (Command c : {Command::Compute, Command::Estimate, Command::Verify, Command::Sweep})
        if (to_string(c) == s) return c;
    throw ConfigError("command: expected compute, estimate, verify or sweep, got '" + s + "'");
}

[[noreturn]] void bad(const std::string& field, const std::string& what) { throw ConfigError(field + ": " + what); }

void only_keys(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad(field.empty() ? "config" : field, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) bad(field.empty() ? key : field + "." + key, "unknown field");
}

std::string path(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

double get_double(const json& j, const std::string& key, const std::string& field, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) bad(path(field, key), "expected a number");
    return j[key].get<double>();
}

double need_double(const json& j, const std::string& key, const std::string& field) {
    if (!j.contains(key)) bad(path(field, key), "missing");
    return get_double(j, key, field, 0.0);
}

int get_int(const json& j, const std::string& key, const std::string& field, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) bad(path(field, key), "expected an integer");
    return j[key].get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& key, const std::string& field, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned()) bad(path(field, key), "expected a non-negative integer");
    return j[key].get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& key, const std::string& field, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) bad(path(field, key), "expected true or false");
    return j[key].get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& field, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) bad(path(field, key), "expected a string");
    return j[key].get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& key, const std::string& field) {
    const std::string f = path(field, key);
    if (!j.contains(key)) bad(f, "missing");
    if (!j[key].is_array()) bad(f, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j[key].size(); ++i) {
        if (!j[key][i].is_number()) bad(f + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(j[key][i].get<double>());
    }
    return out;
}

json get_list(const json& j, const std::string& key) {
    if (!j.contains(key)) return json();
    if (!j[key].is_array()) bad(key, "expected a list");
    return j[key];
}

RunConfig from_json(const json& j) {
    only_keys(j, "", {"command", "seed", "out", "grid", "functional", "phi", "phis", "K", "L", "Q1", "Q2", "bodies",
                      "targets", "i", "estimate", "verify", "sweep"});
    RunConfig c;
    c.effective = j;
    if (!j.contains("command")) bad("command", "missing");
    c.command = parse_command(get_string(j, "command", "", ""));
    c.seed = get_u64(j, "seed", "", 1);
    c.out = get_string(j, "out", "", "out");

    if (j.contains("grid")) {
        const json& g = j["grid"];
        only_keys(g, "grid", {"dimension", "resolution", "scheme"});
        c.grid.dimension = get_int(g, "dimension", "grid", 2);
        c.grid.resolution = get_int(g, "resolution", "grid", 512);
        c.grid.scheme = get_string(g, "scheme", "grid", "");
        if (c.grid.dimension < 2) bad("grid.dimension", "must be at least 2");
        if (c.grid.resolution < 8) bad("grid.resolution", "must be at least 8");
    }

    c.functional = get_string(j, "functional", "", "");
    c.phi = j.value("phi", json());
    c.phis = get_list(j, "phis");
    c.k = j.value("K", json());
    c.l = j.value("L", json());
    c.q1 = j.value("Q1", json());
    c.q2 = j.value("Q2", json());
    c.bodies = get_list(j, "bodies");
    c.targets = get_list(j, "targets");
    c.i = get_double(j, "i", "", 0.0);

    c.search.seed = c.seed;
    if (j.contains("estimate")) {
        const json& e = j["estimate"];
        only_keys(e, "estimate", {"target", "sense", "ellipsoid_restricted", "mode", "budget", "restarts", "harmonics",
                                  "refine_nodes", "initial_step", "min_step"});
        try {
            c.target = parse_target(get_string(e, "target", "estimate", "affine"));
            if (e.contains("sense")) c.sense = parse_sense(get_string(e, "sense", "estimate", ""));
        } catch (const ConfigError& err) {
            bad("estimate", err.what());
        }
        c.ellipsoid_restricted = get_bool(e, "ellipsoid_restricted", "estimate", false);
        const std::string mode = get_string(e, "mode", "estimate", "joint");
        if (mode == "joint") c.multi_mode = MultiMode::Joint;
        else if (mode == "per-slot") c.multi_mode = MultiMode::PerSlot;
        else bad("estimate.mode", "expected joint or per-slot");
        c.search.budget = get_int(e, "budget", "estimate", c.search.budget);
        c.search.restarts = get_int(e, "restarts", "estimate", c.search.restarts);
        c.search.harmonics = get_int(e, "harmonics", "estimate", c.search.harmonics);
        c.search.refine_nodes = get_bool(e, "refine_nodes", "estimate", c.search.refine_nodes);
        c.search.initial_step = get_double(e, "initial_step", "estimate", c.search.initial_step);
        c.search.min_step = get_double(e, "min_step", "estimate", c.search.min_step);
        if (c.search.budget < 1) bad("estimate.budget", "must be positive");
    }

    if (j.contains("verify")) {
        const json& v = j["verify"];
        only_keys(v, "verify", {"checks", "trials", "tolerance"});
        if (v.contains("checks")) {
            if (v["checks"].is_string()) {
                c.checks = {v["checks"].get<std::string>()};
            } else if (v["checks"].is_array()) {
                for (std::size_t i = 0; i < v["checks"].size(); ++i) {
                    if (!v["checks"][i].is_string())
                        bad("verify.checks[" + std::to_string(i) + "]", "expected a check id");
                    c.checks.push_back(v["checks"][i].get<std::string>());
                }
            } else {
                bad("verify.checks", "expected a check id or a list of them");
            }
        }
        c.trials = get_int(v, "trials", "verify", 100);
        c.tolerance = get_double(v, "tolerance", "verify", 0.0);
        if (c.trials < 1) bad("verify.trials", "must be positive");
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        only_keys(s, "sweep", {"parameter", "values"});
        c.parameter = get_string(s, "parameter", "sweep", "");
        c.values = get_numbers(s, "values", "sweep");
    }
    return c;
}

std::uint64_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::uint64_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) +
                          ": malformed config (" + e.what() + ")");
    }
    return from_json(j);
}

RunConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file '" + file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_overrides(RunConfig& config, const Overrides& o) {
    json j = config.effective;
    if (o.command) j["command"] = *o.command;
    if (o.out) j["out"] = *o.out;
    if (o.seed) j["seed"] = *o.seed;
    if (o.checks) j["verify"]["checks"] = *o.checks;
    if (o.trials) j["verify"]["trials"] = *o.trials;
    if (o.grid) j["grid"]["resolution"] = *o.grid;
    config = from_json(j);
}

GridPtr make_grid(const RunConfig& config) {
    const auto& g = config.grid;
    if (g.scheme.empty()) return build_default_grid(g.dimension, g.resolution, config.seed);
    const GridScheme scheme = parse_grid_scheme(g.scheme);
    return build_grid(g.dimension, g.resolution, scheme,
                      scheme == GridScheme::MonteCarlo ? std::optional<std::uint64_t>(config.seed) : std::nullopt);
}

OrliczFunction make_function(const json& spec, const std::string& field) {
    static const std::regex power_re(R"(\s*t\s*(\^\s*([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?))?\s*)");
    try {
        if (spec.is_number()) return OrliczFunction::constant(spec.get<double>());
        if (spec.is_string()) {
            const std::string text = spec.get<std::string>();
            std::smatch m;
            if (std::regex_match(text, m, power_re))
                return OrliczFunction::power(m[2].matched ? std::stod(m[2].str()) : 1.0);
            return OrliczFunction::expression(text);
        }
        if (spec.is_object()) {
            only_keys(spec, field, {"power", "constant", "expression"});
            if (spec.size() != 1) bad(field, "give exactly one of power, constant, expression");
            if (spec.contains("power")) return OrliczFunction::power(need_double(spec, "power", field));
            if (spec.contains("constant")) return OrliczFunction::constant(need_double(spec, "constant", field));
            return OrliczFunction::expression(get_string(spec, "expression", field, ""));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        bad(field, e.what());
    }
    if (spec.is_null()) bad(field, "missing");
    bad(field, "expected a number, an expression string or an object");
}

StarBody make_body(const json& spec, const std::string& field, const RunConfig& config, const GridPtr& grid,
                   std::uint64_t stream) {
    if (spec.is_null()) bad(field, "missing");
    if (!spec.is_object()) bad(field, "expected an object with a kind");
    const int n = config.grid.dimension;
    const std::string kind = get_string(spec, "kind", field, "");
    auto body = [&]() -> StarBody {
        if (kind == "ball") {
            only_keys(spec, field, {"kind", "radius", "scale"});
            return StarBody::ball(n, get_double(spec, "radius", field, 1.0));
        }
        if (kind == "ellipsoid") {
            only_keys(spec, field, {"kind", "semi_axes", "matrix", "scale"});
            if (spec.contains("semi_axes")) {
                auto axes = get_numbers(spec, "semi_axes", field);
                if (static_cast<int>(axes.size()) != n) bad(path(field, "semi_axes"), "needs one entry per dimension");
                return StarBody::ellipsoid_axes(axes);
            }
            if (!spec.contains("matrix") || !spec["matrix"].is_array() || static_cast<int>(spec["matrix"].size()) != n)
                bad(path(field, "matrix"), "expected an n x n list of rows");
            Mat a(n, n);
            for (int r = 0; r < n; ++r) {
                const json& row = spec["matrix"][static_cast<std::size_t>(r)];
                const std::string rf = path(field, "matrix") + "[" + std::to_string(r) + "]";
                if (!row.is_array() || static_cast<int>(row.size()) != n) bad(rf, "expected " + std::to_string(n) + " numbers");
                for (int col = 0; col < n; ++col) {
                    if (!row[static_cast<std::size_t>(col)].is_number()) bad(rf, "expected numbers");
                    a(r, col) = row[static_cast<std::size_t>(col)].get<double>();
                }
            }
            return StarBody::ellipsoid(a);
        }
        if (kind == "lp-ball") {
            only_keys(spec, field, {"kind", "p", "scale"});
            return StarBody::lp_ball(n, need_double(spec, "p", field));
        }
        if (kind == "cube") {
            only_keys(spec, field, {"kind", "half_width", "scale"});
            return StarBody::cube(n, get_double(spec, "half_width", field, 1.0));
        }
        if (kind == "polytope") {
            only_keys(spec, field, {"kind", "facets", "scale"});
            if (!spec.contains("facets") || !spec["facets"].is_array()) bad(path(field, "facets"), "expected a list");
            std::vector<Facet> facets;
            for (std::size_t i = 0; i < spec["facets"].size(); ++i) {
                const json& f = spec["facets"][i];
                const std::string ff = path(field, "facets") + "[" + std::to_string(i) + "]";
                only_keys(f, ff, {"normal", "offset"});
                const auto normal = get_numbers(f, "normal", ff);
                if (static_cast<int>(normal.size()) != n) bad(path(ff, "normal"), "needs one entry per dimension");
                Facet facet;
                facet.normal = Vec::Map(normal.data(), n);
                facet.offset = need_double(f, "offset", ff);
                facets.push_back(facet);
            }
            return StarBody::polytope(n, std::move(facets));
        }
        if (kind == "grid") {
            only_keys(spec, field, {"kind", "values", "scale"});
            auto values = get_numbers(spec, "values", field);
            if (values.size() != grid->size())
                bad(path(field, "values"), "expected " + std::to_string(grid->size()) + " values, one per grid node");
            return StarBody::grid_sampled(grid, std::move(values));
        }
        if (kind == "random") {
            only_keys(spec, field, {"kind", "shape", "roughness", "symmetric", "pairs", "max_ratio", "seed", "scale"});
            const std::uint64_t seed = get_u64(spec, "seed", field, mix_seed(config.seed, 100 + stream));
            const std::string shape = get_string(spec, "shape", field, "star");
            if (shape == "star")
                return make_random_star(n, seed, get_double(spec, "roughness", field, 0.2),
                                        get_bool(spec, "symmetric", field, true));
            if (shape == "polytope") return make_random_polytope(n, seed, get_int(spec, "pairs", field, 5));
            if (shape == "ellipsoid") return make_random_ellipsoid(n, seed, get_double(spec, "max_ratio", field, 3.0));
            bad(path(field, "shape"), "expected star, polytope or ellipsoid");
        }
        bad(path(field, "kind"), "expected ball, ellipsoid, lp-ball, cube, polytope, grid or random, got '" + kind + "'");
    };
    try {
        StarBody b = body();
        const double scale = get_double(spec, "scale", field, 1.0);
        return scale == 1.0 ? b : b.scaled(scale);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        bad(field, e.what());
    }
}

}  // namespace dorlicz
