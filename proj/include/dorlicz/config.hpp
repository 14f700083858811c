#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dorlicz/bodies.hpp"
#include "dorlicz/extremal.hpp"
#include "dorlicz/orlicz.hpp"
#include "dorlicz/sphgrid.hpp"

namespace dorlicz {

enum class Command { Compute, Estimate, Verify, Sweep };
std::string to_string(Command c);

struct GridSpec {
    int dimension = 2;
    int resolution = 512;
    /// Empty selects the default scheme for the dimension.
    std::string scheme;
};

/// Parsed run configuration. Bodies and functions stay in their JSON form so
/// the config digest covers exactly what the user wrote after overrides;
/// make_body/make_function realize them.
struct RunConfig {
    Command command = Command::Compute;
    std::uint64_t seed = 1;
    GridSpec grid;
    std::string out = "out";

    // compute / sweep
    std::string functional;
    nlohmann::json phi;               // single function
    nlohmann::json phis;              // list, multi-dual
    nlohmann::json k, l, q1, q2;      // bodies
    nlohmann::json bodies, targets;   // lists, multi-dual
    double i = 0.0;

    // estimate
    Target target = Target::Affine;
    std::optional<Sense> sense;
    bool ellipsoid_restricted = false;
    MultiMode multi_mode = MultiMode::Joint;
    SearchOptions search;

    // verify
    std::vector<std::string> checks;
    int trials = 100;
    double tolerance = 0.0;

    // sweep
    std::string parameter;
    std::vector<double> values;

    /// Canonical JSON of the effective config, input to the manifest digest.
    nlohmann::json effective;
};

/// Parses config text. Errors are ConfigError with a line number for syntax
/// errors and a dotted field path for bad values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Command-line overrides, applied after parsing so the effective config
/// (and its digest) records them.
struct Overrides {
    std::optional<std::string> command;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<std::string>> checks;
    std::optional<int> trials;
    std::optional<int> grid;
};
void apply_overrides(RunConfig& config, const Overrides& o);

GridPtr make_grid(const RunConfig& config);

/// Function spec: a number (constant), a string ("t^p" for the exact power
/// family, anything else an expression in t), or an object with one of the
/// keys power, constant, expression.
OrliczFunction make_function(const nlohmann::json& spec, const std::string& field);

/// Body spec: an object with a "kind" key.
///   ball        radius (1)
///   ellipsoid   semi_axes [..] or matrix [[..], ..]
///   lp-ball     p
///   cube        half_width (1)
///   polytope    facets [{normal: [..], offset: b}, ..]
///   grid        values [..], one per grid node
///   random      shape (star | polytope | ellipsoid), roughness, symmetric,
///               pairs, max_ratio, seed
/// Any kind accepts "scale". Random bodies without a seed derive one from the
/// root seed and `stream`.
StarBody make_body(const nlohmann::json& spec, const std::string& field, const RunConfig& config,
                   const GridPtr& grid, std::uint64_t stream);

}  // namespace dorlicz
