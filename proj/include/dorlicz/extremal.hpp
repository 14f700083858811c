#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dorlicz/bodies.hpp"
#include "dorlicz/orlicz.hpp"
#include "dorlicz/sphgrid.hpp"

namespace dorlicz {

/// Affine optimizes over star bodies, geominimal over convex bodies.
enum class Target { Affine, Geominimal };
/// inf for Phi~ functions, sup for Psi~ functions.
enum class Sense { Inf, Sup };

std::string to_string(Target t);
std::string to_string(Sense s);
Target parse_target(const std::string& text);
Sense parse_sense(const std::string& text);

/// inf for Phi~ (constants included), sup for Psi~. Throws ContractError when
/// phi belongs to neither class in dimension n.
Sense natural_sense(const OrliczFunction& phi, int n);
/// Throws ContractError unless `sense` is admissible for the class of phi.
void require_sense(const OrliczFunction& phi, int n, Sense sense);

struct SearchOptions {
    /// Maximum objective evaluations over all stages and restarts.
    int budget = 20000;
    /// Start bodies: B, K (or its hull), the ellipsoid optimum, then seeded
    /// random symmetric bodies. Fewer than 3 drops from the end of that list.
    int restarts = 5;
    /// Smooth basis on the circle: cos(2k theta), sin(2k theta), k <= harmonics.
    int harmonics = 8;
    /// Second stage on circle grids: pattern search over node log-radii of the
    /// best smooth candidate.
    bool refine_nodes = true;
    double initial_step = 0.25;
    double min_step = 1e-4;
    std::uint64_t seed = 1;
    /// Additional start bodies tried after the standard ones. i-th mixed
    /// estimates read them as (Q1, Q2) pairs, multi-body joint estimates as
    /// groups of n, one body per slot.
    std::vector<StarBody> extra_starts;
};

struct ExtremalProblem {
    ExtremalProblem(Target target, Sense sense, OrliczFunction phi, StarBody k, GridPtr grid,
                    SearchOptions options = {});

    Target target;
    Sense sense;
    OrliczFunction phi;
    StarBody k;
    GridPtr grid;
    SearchOptions options;
};

struct TracePoint {
    int evaluation = 0;
    double objective = 0.0;
    double step = 0.0;
    int restart = 0;
};

/// Closed-form reference values reported next to an estimate.
struct BoundMarkers {
    /// Objective at L = B, the dual surface area S~_phi(K).
    double s_marker = 0.0;
    /// phi(vrad K°) n|K| and phi(1/vrad K) n|K| arranged by direction for the
    /// class of phi; absent where the bound does not apply.
    std::optional<double> volume_upper;
    std::optional<double> volume_lower;
    /// Best value over origin-symmetric ellipsoids.
    std::optional<double> ellipsoid;
};

struct ExtremalResult {
    double value = 0.0;
    /// Optimizing bodies, normalized to |L°| = omega_n. One entry for single-body
    /// estimates, two for i-th mixed ones, n for multi-body ones.
    std::vector<StarBody> candidates;
    std::vector<TracePoint> trace;
    BoundMarkers markers;
    bool converged = false;
    int evaluations = 0;
    double final_step = 0.0;
    /// Best value reached from each start before node refinement.
    std::vector<double> restart_values;
    std::string note;

    const StarBody& candidate() const { return candidates.front(); }
};

/// vrad(L°) L, whose polar has the volume of the unit ball.
StarBody normalize_polar_volume(const StarBody& l, const GridPtr& grid);

/// n Ṽ_phi(K, vrad(L°) L). L is used as given; geominimal callers pass a
/// convex body.
double objective(const ExtremalProblem& problem, const StarBody& l);

/// Multi-start pattern search over origin-symmetric candidates. The value is
/// an upper bound of the infimum (lower bound of the supremum) over the full
/// class, since non-symmetric bodies are never tried.
ExtremalResult estimate(const ExtremalProblem& problem);

/// The same optimization restricted to ellipsoids exp(S) B with S symmetric
/// and traceless, so |L°| = omega_n holds exactly.
ExtremalResult estimate_ellipsoid_restricted(const ExtremalProblem& problem);

/// Joint search over (Q1, Q2) of n Ṽ_{phi1,phi2,i}(K, L; Q1, Q2). Both
/// functions must share a class; inf for Phi~, sup for Psi~.
ExtremalResult estimate_ith_mixed(const OrliczFunction& phi1, const OrliczFunction& phi2, double i,
                                  const StarBody& k, const StarBody& l, Target target, const GridPtr& grid,
                                  const SearchOptions& options = {});

enum class MultiMode { Joint, PerSlot };
std::string to_string(MultiMode m);

/// Multi-body estimate for n in {2, 3}. Slots with the same (phi, K) share a
/// candidate. Joint searches all distinct candidates together; PerSlot takes
/// each slot's single-body optimizer and evaluates the multi-body functional
/// there. Throws UnsupportedError for n > 3.
ExtremalResult estimate_multi(const std::vector<OrliczFunction>& phis, const std::vector<StarBody>& ks,
                              Target target, const GridPtr& grid, MultiMode mode,
                              const SearchOptions& options = {});

}  // namespace dorlicz
