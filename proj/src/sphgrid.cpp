#include "dorlicz/sphgrid.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "dorlicz/digest.hpp"
#include "dorlicz/error.hpp"

namespace dorlicz {

std::string to_string(GridScheme scheme) {
    switch (scheme) {
        case GridScheme::UniformAngle: return "uniform-angle";
        case GridScheme::Fibonacci: return "fibonacci";
        case GridScheme::MonteCarlo: return "monte-carlo";
    }
    return "unknown";
}

GridScheme parse_grid_scheme(const std::string& name) {
    if (name == "uniform-angle") return GridScheme::UniformAngle;
    if (name == "fibonacci") return GridScheme::Fibonacci;
    if (name == "monte-carlo") return GridScheme::MonteCarlo;
    throw ConfigError("unknown grid scheme '" + name + "'");
}

double unit_ball_volume(int n) {
    if (n < 1) throw ConfigError("dimension must be positive");
    const double half = 0.5 * n;
    return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double SphericalGrid::angle(std::size_t i) const {
    if (scheme_ != GridScheme::UniformAngle) throw UnsupportedError("angle() needs a uniform-angle grid");
    return 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(size());
}

GridPtr build_grid(int dimension, int resolution, GridScheme scheme,
                   std::optional<std::uint64_t> seed) {
    if (dimension < 2) throw ConfigError("grid dimension must be >= 2");
    if (resolution < 4) throw ConfigError("grid resolution must be >= 4");
    if (scheme == GridScheme::UniformAngle && dimension != 2)
        throw ConfigError("uniform-angle grids exist only for n = 2");
    if (scheme == GridScheme::Fibonacci && dimension != 3)
        throw ConfigError("fibonacci grids exist only for n = 3");
    if (scheme == GridScheme::MonteCarlo && !seed)
        throw ConfigError("monte-carlo grids need a seed");
    if (scheme != GridScheme::MonteCarlo && seed)
        seed.reset();  // deterministic schemes ignore it

    std::shared_ptr<SphericalGrid> g(new SphericalGrid());
    g->dim_ = dimension;
    g->resolution_ = resolution;
    g->scheme_ = scheme;
    g->seed_ = seed;
    const auto count = static_cast<std::size_t>(resolution);
    const auto n = static_cast<std::size_t>(dimension);
    g->nodes_.resize(count * n);
    const double each = sphere_measure(dimension) / static_cast<double>(count);
    g->weights_.assign(count, each);

    switch (scheme) {
        case GridScheme::UniformAngle:
            for (std::size_t i = 0; i < count; ++i) {
                const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
                g->nodes_[2 * i] = std::cos(a);
                g->nodes_[2 * i + 1] = std::sin(a);
            }
            break;
        case GridScheme::Fibonacci: {
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            for (std::size_t i = 0; i < count; ++i) {
                const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double a = golden * static_cast<double>(i);
                g->nodes_[3 * i] = r * std::cos(a);
                g->nodes_[3 * i + 1] = r * std::sin(a);
                g->nodes_[3 * i + 2] = z;
            }
            break;
        }
        case GridScheme::MonteCarlo: {
            std::mt19937_64 rng(*seed);
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (std::size_t i = 0; i < count; ++i) {
                double norm2 = 0.0;
                do {
                    norm2 = 0.0;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double x = gauss(rng);
                        g->nodes_[i * n + k] = x;
                        norm2 += x * x;
                    }
                } while (norm2 < 1e-24);
                const double inv = 1.0 / std::sqrt(norm2);
                for (std::size_t k = 0; k < n; ++k) g->nodes_[i * n + k] *= inv;
            }
            break;
        }
    }
    g->digest_ = to_string(scheme) + ":n=" + std::to_string(dimension) + ":N=" + std::to_string(resolution) +
                 (seed ? ":seed=" + std::to_string(*seed) : std::string());
    return g;
}

GridPtr build_default_grid(int dimension, int resolution, std::uint64_t seed) {
    switch (dimension) {
        case 2: return build_grid(2, resolution, GridScheme::UniformAngle);
        case 3: return build_grid(3, resolution, GridScheme::Fibonacci);
        default: return build_grid(dimension, resolution, GridScheme::MonteCarlo, seed);
    }
}

GridPtr coarsen(const SphericalGrid& grid) {
    const int half = std::max(4, grid.resolution() / 2);
    return build_grid(grid.dimension(), half, grid.scheme(), grid.seed());
}

GridFunction::GridFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw ConfigError("grid function without a grid");
    if (values.size() != grid->size())
        throw ConfigError("grid function has " + std::to_string(values.size()) + " values for " +
                          std::to_string(grid->size()) + " nodes");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i])) throw NumericalDomainError("non-finite grid function value", i);
}

double integrate(const SphericalGrid& grid, std::span<const double> values) {
    if (values.size() != grid.size()) throw ConfigError("integrand length does not match grid size");
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw NumericalDomainError("non-finite integrand", i);
        sum += grid.weight(i) * values[i];
    }
    return sum;
}

double integrate(const GridFunction& f) { return integrate(*f.grid, f.values); }

}  // namespace dorlicz
