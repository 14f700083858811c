#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dorlicz {

enum class GridScheme { UniformAngle, Fibonacci, MonteCarlo };

std::string to_string(GridScheme scheme);
GridScheme parse_grid_scheme(const std::string& name);

/// Volume of the Euclidean unit ball in R^n, pi^{n/2} / Gamma(n/2 + 1).
double unit_ball_volume(int n);

/// Spherical measure of S^{n-1}, which is n times the unit ball volume.
inline double sphere_measure(int n) { return n * unit_ball_volume(n); }

/// Quadrature nodes on S^{n-1} with positive weights summing to the sphere
/// measure. Immutable once built; share through GridPtr.
class SphericalGrid {
public:
    int dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return weights_.size(); }
    GridScheme scheme() const noexcept { return scheme_; }
    int resolution() const noexcept { return resolution_; }
    std::optional<std::uint64_t> seed() const noexcept { return seed_; }

    std::span<const double> node(std::size_t i) const {
        return {nodes_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> flat_nodes() const noexcept { return nodes_; }

    /// Angle of node i on a uniform-angle circle grid.
    double angle(std::size_t i) const;

    /// Nodes are sorted by polar angle in [0, 2pi) (uniform-angle only).
    bool angularly_sorted() const noexcept { return scheme_ == GridScheme::UniformAngle; }

    /// Stable identifier of (scheme, dimension, resolution, seed).
    const std::string& digest() const noexcept { return digest_; }

private:
    friend std::shared_ptr<const SphericalGrid> build_grid(int, int, GridScheme,
                                                           std::optional<std::uint64_t>);
    SphericalGrid() = default;

    int dim_ = 0;
    int resolution_ = 0;
    GridScheme scheme_ = GridScheme::UniformAngle;
    std::optional<std::uint64_t> seed_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::string digest_;
};

using GridPtr = std::shared_ptr<const SphericalGrid>;

/// Builds a grid. Uniform-angle requires n = 2, Fibonacci n = 3; Monte Carlo
/// works for any n >= 2 and needs a seed. Throws ConfigError otherwise.
GridPtr build_grid(int dimension, int resolution, GridScheme scheme,
                   std::optional<std::uint64_t> seed = std::nullopt);

/// Default scheme for a dimension: uniform-angle, Fibonacci, then Monte Carlo.
GridPtr build_default_grid(int dimension, int resolution, std::uint64_t seed = 1);

/// Half-resolution companion grid used for the quadrature error estimate:
/// every other node on the circle, a regenerated grid otherwise.
GridPtr coarsen(const SphericalGrid& grid);

/// Values of a function at the nodes of one grid.
struct GridFunction {
    GridPtr grid;
    std::vector<double> values;

    GridFunction(GridPtr g, std::vector<double> v);
};

/// Sum of w_i f(u_i). Throws NumericalDomainError naming the first
/// non-finite node.
double integrate(const GridFunction& f);
double integrate(const SphericalGrid& grid, std::span<const double> values);

}  // namespace dorlicz
