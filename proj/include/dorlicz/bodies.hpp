#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dorlicz/sphgrid.hpp"

namespace dorlicz {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class BodyKind { Ball, Ellipsoid, LpBall, Polytope, GridSampled, Custom };
enum class Flag { No, Yes, Unknown };

std::string to_string(BodyKind kind);

/// Invertible linear map with cached inverse and |det|.
class LinearMap {
public:
    /// Throws ConfigError when the matrix is not square or is singular.
    explicit LinearMap(Mat matrix);

    static LinearMap identity(int n) { return LinearMap(Mat::Identity(n, n)); }
    static LinearMap scaling(int n, double factor) { return LinearMap(factor * Mat::Identity(n, n)); }

    int dimension() const noexcept { return static_cast<int>(matrix_.rows()); }
    const Mat& matrix() const noexcept { return matrix_; }
    const Mat& inverse() const noexcept { return inverse_; }
    double det_abs() const noexcept { return det_abs_; }
    /// Returns the scale factor when the map is a positive multiple of the identity.
    std::optional<double> as_scalar() const;

    LinearMap operator*(const LinearMap& rhs) const { return LinearMap(matrix_ * rhs.matrix_); }

private:
    Mat matrix_;
    Mat inverse_;
    double det_abs_ = 0.0;
};

/// Half-space <normal, x> <= offset. Stored with a unit normal.
struct Facet {
    Vec normal;
    double offset = 0.0;
};

/// H-representation plus derived vertex data. Built once per polytope.
struct PolytopeData {
    std::vector<Facet> facets;
    std::vector<Vec> vertices;
    std::vector<std::vector<int>> facet_vertices;  // vertex indices on each facet
    std::vector<double> facet_areas;               // (n-1)-volume of each facet
    double volume = 0.0;                           // exact, (1/n) sum b_j area_j
};

/// Builds PolytopeData: normalizes facets, enumerates vertices, and computes
/// facet areas. Throws InvalidBodyError if an offset is non-positive or the
/// intersection is unbounded.
std::shared_ptr<const PolytopeData> make_polytope_data(int n, std::vector<Facet> facets);

/// A star body about the origin, described by its radial function. Bodies are
/// immutable and cheap to copy; analytic kinds evaluate closed forms, grid
/// sampled ones interpolate their node values.
class StarBody {
public:
    using DirectionFn = std::function<double(std::span<const double>)>;

    static StarBody ball(int n, double radius = 1.0);
    /// The image A * B of the unit ball.
    static StarBody ellipsoid(const Mat& a);
    static StarBody ellipsoid_axes(const std::vector<double>& semi_axes);
    /// {x : ||x||_p <= 1}; p may be +inf. Convex iff p >= 1.
    static StarBody lp_ball(int n, double p);
    static StarBody polytope(int n, std::vector<Facet> facets);
    static StarBody cube(int n, double half_width = 1.0);
    /// Radial values at the nodes of `grid`. n = 2 interpolates linearly in
    /// angle; n >= 3 falls back to the nearest node, which costs one order of
    /// accuracy after a transform.
    static StarBody grid_sampled(GridPtr grid, std::vector<double> rho, Flag symmetric = Flag::Unknown,
                                 Flag convex = Flag::Unknown);
    /// Analytic body from a radial evaluator; `support` is optional.
    static StarBody from_function(int n, DirectionFn radial, std::string descriptor, Flag symmetric,
                                  Flag convex, DirectionFn support = {});

    int dimension() const noexcept;
    BodyKind kind() const noexcept;
    Flag symmetry() const noexcept;
    Flag convexity() const noexcept;
    const std::string& descriptor() const noexcept;
    std::string digest() const;

    double radial(std::span<const double> u) const;
    double radial(const Vec& u) const { return radial(std::span<const double>(u.data(), u.size())); }
    bool has_analytic_support() const noexcept;
    /// Closed-form support function; throws UnsupportedError without one.
    double support(std::span<const double> u) const;
    double support(const Vec& u) const { return support(std::span<const double>(u.data(), u.size())); }

    /// Kind-specific payloads. Each throws UnsupportedError on the wrong kind.
    double ball_radius() const;
    const Mat& ellipsoid_matrix() const;
    double lp_exponent() const;
    const PolytopeData& polytope_data() const;
    const GridPtr& sample_grid() const;
    const std::vector<double>& sample_values() const;

    /// Dilate lambda * K. Cheaper than a general transform and keeps grid
    /// samples on their grid.
    StarBody scaled(double lambda) const;

    /// Same body with its convexity/symmetry metadata replaced.
    StarBody with_flags(Flag symmetric, Flag convex) const;

    struct Impl;

private:
    explicit StarBody(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Radial (and, when cheap, support) samples of a body on a grid.
struct BodyOnGrid {
    StarBody body;
    GridPtr grid;
    std::vector<double> rho;
    std::optional<std::vector<double>> support;
};

/// rho_i = rho_K(u_i). Throws InvalidBodyError on a non-positive or non-finite
/// value.
BodyOnGrid radial_eval(const StarBody& body, const GridPtr& grid);
std::vector<double> radial_values(const StarBody& body, const GridPtr& grid);

/// h_K(u_i) from the closed form when one exists, otherwise the support of
/// the sampled point cloud {rho_K(u_j) u_j}.
GridFunction support_eval(const StarBody& body, const GridPtr& grid);
std::vector<double> support_values(const StarBody& body, const GridPtr& grid);

/// max_j rho_j <u_j, u_i> for every node u_i. Uses a hull sweep on circle
/// grids and brute force elsewhere.
std::vector<double> point_cloud_support(const SphericalGrid& grid, std::span<const double> rho);
/// Radial values of the convex hull of the point cloud {rho_i u_i} at the
/// nodes. Exact polygon hull on circle grids; the double point-cloud polar
/// 1 / h(1 / h(rho)) elsewhere.
std::vector<double> hull_radial_values(const SphericalGrid& grid, std::span<const double> rho);
/// The same maximum for a single arbitrary direction.
double point_cloud_support_at(const SphericalGrid& grid, std::span<const double> rho,
                              std::span<const double> u);

/// Polar body K°, rho_{K°} = 1 / h_K. Closed form for balls, ellipsoids,
/// lp-balls and polytopes; grid samples otherwise.
StarBody polar(const StarBody& body, const GridPtr& grid);

/// Convex hull as the bipolar (K°)°. Returns the body itself when it is
/// already flagged convex.
StarBody convex_hull(const StarBody& body, const GridPtr& grid);

/// The image T K, rho_{TK}(v) = rho_K(w / |w|) / |w| with w = T^{-1} v.
StarBody transform(const LinearMap& map, const StarBody& body);

/// Centroid from the polar-coordinate moment (1/(n+1)) int rho^{n+1} u dsigma.
Vec centroid(const StarBody& body, const GridPtr& grid);

/// Centroid at the origin within tol * vrad(K) (class K_c).
bool has_centroid_at_origin(const StarBody& body, const GridPtr& grid, double tol = 1e-3);
/// Santaló point at the origin: the polar has its centroid there (class K_s).
bool has_santalo_point_at_origin(const StarBody& body, const GridPtr& grid, double tol = 1e-3);

/// rho(u) = 1 + roughness * g(u) with a smooth seeded perturbation,
/// sup |g| <= 1. With `symmetric` the perturbation is even.
StarBody make_random_star(int n, std::uint64_t seed, double roughness, bool symmetric = true);

/// Origin-symmetric polytope with `pairs` random facet pairs (n = 2: sorted
/// angles, offsets in [0.7, 1.3]).
StarBody make_random_polytope(int n, std::uint64_t seed, int pairs);

/// Origin-symmetric ellipsoid with semi-axis ratio at most `max_ratio`.
StarBody make_random_ellipsoid(int n, std::uint64_t seed, double max_ratio);

}  // namespace dorlicz
