#include "dorlicz/functionals.hpp"

#include <cmath>

#include "dorlicz/digest.hpp"
#include "dorlicz/error.hpp"

namespace dorlicz {
namespace raw {

double volume(const SphericalGrid& grid, std::span<const double> rho) {
    const int n = grid.dimension();
    double sum = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double v = std::pow(rho[i], n);
        if (!std::isfinite(v)) throw NumericalDomainError("radial value overflows in volume", i);
        sum += grid.weight(i) * v;
    }
    return sum / n;
}

double vrad(const SphericalGrid& grid, std::span<const double> rho) {
    const int n = grid.dimension();
    return std::pow(volume(grid, rho) / unit_ball_volume(n), 1.0 / n);
}

void dual_mixed_integrand(const OrliczFunction& phi, const SphericalGrid& grid, std::span<const double> rho_k,
                          std::span<const double> rho_l, std::span<double> out) {
    const int n = grid.dimension();
    for (std::size_t i = 0; i < rho_k.size(); ++i) {
        const double ratio = rho_l[i] / rho_k[i];
        if (!(ratio >= kMinRatio && ratio <= kMaxRatio))
            throw NumericalDomainError("radial ratio " + fmt_double(ratio) + " outside [1e-12, 1e12]", i);
        const double f = phi(ratio);
        const double v = f * std::pow(rho_k[i], n);
        if (!std::isfinite(v) || f < 0.0)
            throw NumericalDomainError("'" + phi.label() + "' failed at ratio " + fmt_double(ratio), i);
        out[i] = v;
    }
}

double dual_mixed_volume(const OrliczFunction& phi, const SphericalGrid& grid, std::span<const double> rho_k,
                         std::span<const double> rho_l) {
    const int n = grid.dimension();
    double sum = 0.0;
    for (std::size_t i = 0; i < rho_k.size(); ++i) {
        const double ratio = rho_l[i] / rho_k[i];
        if (!(ratio >= kMinRatio && ratio <= kMaxRatio))
            throw NumericalDomainError("radial ratio " + fmt_double(ratio) + " outside [1e-12, 1e12]", i);
        const double r = rho_k[i];
        const double rn = n == 2 ? r * r : n == 3 ? r * r * r : std::pow(r, n);
        const double v = phi(ratio) * rn;
        if (!std::isfinite(v) || v < 0.0)
            throw NumericalDomainError("'" + phi.label() + "' failed at ratio " + fmt_double(ratio), i);
        sum += grid.weight(i) * v;
    }
    return sum / n;
}

double multi_from_terms(const SphericalGrid& grid, const std::vector<std::vector<double>>& terms) {
    const int n = grid.dimension();
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double prod = 1.0;
        for (const auto& t : terms) {
            if (!(t[i] > 0.0)) throw NumericalDomainError("non-positive factor under the n-th root", i);
            prod *= std::pow(t[i], 1.0 / n);
        }
        sum += grid.weight(i) * prod;
    }
    return sum / n;
}

double ith_from_terms(const SphericalGrid& grid, double i_index, std::span<const double> a,
                      std::span<const double> b) {
    const int n = grid.dimension();
    const double ea = (n - i_index) / n;
    const double eb = i_index / n;
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(a[i] > 0.0) || !(b[i] > 0.0)) throw NumericalDomainError("non-positive factor in i-th mixed volume", i);
        const double v = std::pow(a[i], ea) * std::pow(b[i], eb);
        if (!std::isfinite(v)) throw NumericalDomainError("i-th mixed integrand overflows", i);
        sum += grid.weight(i) * v;
    }
    return sum / n;
}

}  // namespace raw

namespace {

template <class Eval>
FunctionalValue with_error(const GridPtr& grid, std::string digest_text, Eval eval) {
    FunctionalValue out;
    out.value = eval(grid);
    const GridPtr coarse = coarsen(*grid);
    out.quadrature_estimate_error = std::abs(out.value - eval(coarse));
    out.digest = hex_digest(digest_text + "|" + grid->digest());
    return out;
}

void require_same_dimension(const StarBody& a, const GridPtr& grid) {
    if (a.dimension() != grid->dimension())
        throw ConfigError("body dimension " + std::to_string(a.dimension()) + " differs from grid dimension " +
                          std::to_string(grid->dimension()));
}

std::vector<double> integrand_terms(const OrliczFunction& phi, const StarBody& k, const StarBody& l,
                                    const GridPtr& g) {
    const auto rk = radial_values(k, g);
    const auto rl = radial_values(l, g);
    std::vector<double> out(g->size());
    raw::dual_mixed_integrand(phi, *g, rk, rl, out);
    return out;
}

}  // namespace

FunctionalValue volume(const StarBody& k, const GridPtr& grid) {
    require_same_dimension(k, grid);
    return with_error(grid, "volume|" + k.digest(),
                      [&](const GridPtr& g) { return raw::volume(*g, radial_values(k, g)); });
}

double vrad(const StarBody& k, const GridPtr& grid) {
    require_same_dimension(k, grid);
    return raw::vrad(*grid, radial_values(k, grid));
}

FunctionalValue dual_mixed_volume(const OrliczFunction& phi, const StarBody& k, const StarBody& l,
                                  const GridPtr& grid) {
    require_same_dimension(k, grid);
    require_same_dimension(l, grid);
    return with_error(grid, "dual-mixed|" + phi.label() + "|" + k.digest() + "|" + l.digest(), [&](const GridPtr& g) {
        return raw::dual_mixed_volume(phi, *g, radial_values(k, g), radial_values(l, g));
    });
}

FunctionalValue dual_surface_area(const OrliczFunction& phi, const StarBody& k, const GridPtr& grid) {
    require_same_dimension(k, grid);
    const int n = k.dimension();
    return with_error(grid, "dual-surface|" + phi.label() + "|" + k.digest(), [&](const GridPtr& g) {
        const auto rk = radial_values(k, g);
        const std::vector<double> one(g->size(), 1.0);
        return n * raw::dual_mixed_volume(phi, *g, rk, one);
    });
}

FunctionalValue dual_mean_radius(const OrliczFunction& phi, const StarBody& k, const GridPtr& grid) {
    require_same_dimension(k, grid);
    const int n = k.dimension();
    return with_error(grid, "dual-mean-radius|" + phi.label() + "|" + k.digest(), [&](const GridPtr& g) {
        const auto rk = radial_values(k, g);
        std::vector<double> f(rk.size());
        for (std::size_t i = 0; i < rk.size(); ++i) f[i] = phi(rk[i]);
        return integrate(*g, f) / sphere_measure(n);
    });
}

FunctionalValue primal_mixed_volume(const OrliczFunction& phi, const StarBody& k, const StarBody& q,
                                    const GridPtr& grid) {
    require_same_dimension(k, grid);
    require_same_dimension(q, grid);
    if (q.convexity() != Flag::Yes) throw ContractError("primal mixed volume needs a convex second body");
    const int n = k.dimension();
    auto h_q = [&](const GridPtr& g, std::span<const double> u, const std::vector<double>* rho_q) {
        if (q.has_analytic_support()) return q.support(u);
        return point_cloud_support_at(*g, *rho_q, u);
    };
    const std::string text = "primal-mixed|" + phi.label() + "|" + k.digest() + "|" + q.digest();
    if (k.kind() == BodyKind::Polytope) {
        return with_error(grid, text, [&](const GridPtr& g) {
            std::vector<double> rho_q;
            if (!q.has_analytic_support()) rho_q = radial_values(q, g);
            const auto& data = k.polytope_data();
            double sum = 0.0;
            for (std::size_t j = 0; j < data.facets.size(); ++j) {
                if (data.facet_areas[j] == 0.0) continue;
                const Vec& a = data.facets[j].normal;
                const double b = data.facets[j].offset;
                const double ratio = h_q(g, std::span<const double>(a.data(), a.size()), &rho_q) / b;
                if (!(ratio >= kMinRatio && ratio <= kMaxRatio))
                    throw NumericalDomainError("support ratio outside [1e-12, 1e12] on facet " + std::to_string(j));
                sum += phi(ratio) * b * data.facet_areas[j];
            }
            return sum / n;
        });
    }
    if (k.kind() == BodyKind::Ball) {
        const double r = k.ball_radius();
        return with_error(grid, text, [&](const GridPtr& g) {
            std::vector<double> rho_q;
            if (!q.has_analytic_support()) rho_q = radial_values(q, g);
            double sum = 0.0;
            for (std::size_t i = 0; i < g->size(); ++i) {
                const double ratio = h_q(g, g->node(i), &rho_q) / r;
                if (!(ratio >= kMinRatio && ratio <= kMaxRatio))
                    throw NumericalDomainError("support ratio outside [1e-12, 1e12]", i);
                sum += g->weight(i) * phi(ratio) * std::pow(r, n);
            }
            return sum / n;
        });
    }
    throw UnsupportedError("primal mixed volume needs a polytope or ball, got " + to_string(k.kind()));
}

FunctionalValue primal_surface_area(const OrliczFunction& phi, const StarBody& k, const GridPtr& grid) {
    auto v = primal_mixed_volume(phi, k, StarBody::ball(k.dimension()), grid);
    const double n = k.dimension();
    v.value *= n;
    v.quadrature_estimate_error *= n;
    return v;
}

FunctionalValue primal_mean_width(const OrliczFunction& phi, const StarBody& k, const GridPtr& grid) {
    require_same_dimension(k, grid);
    if (k.convexity() != Flag::Yes) throw ContractError("mean width needs a convex body");
    const int n = k.dimension();
    return with_error(grid, "primal-mean-width|" + phi.label() + "|" + k.digest(), [&](const GridPtr& g) {
        const auto h = support_values(k, g);
        std::vector<double> f(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) f[i] = phi(h[i]);
        return integrate(*g, f) / sphere_measure(n);
    });
}

FunctionalValue multi_dual_mixed_volume(const std::vector<OrliczFunction>& phis, const std::vector<StarBody>& ks,
                                        const std::vector<StarBody>& ls, const GridPtr& grid) {
    const auto n = static_cast<std::size_t>(grid->dimension());
    if (phis.size() != n || ks.size() != n || ls.size() != n)
        throw ConfigError("multi-body dual mixed volume needs exactly n functions and n bodies per list");
    std::string text = "multi-dual";
    for (std::size_t k = 0; k < n; ++k) {
        require_same_dimension(ks[k], grid);
        require_same_dimension(ls[k], grid);
        text += "|" + phis[k].label() + "," + ks[k].digest() + "," + ls[k].digest();
    }
    return with_error(grid, text, [&](const GridPtr& g) {
        std::vector<std::vector<double>> terms;
        for (std::size_t k = 0; k < n; ++k) terms.push_back(integrand_terms(phis[k], ks[k], ls[k], g));
        return raw::multi_from_terms(*g, terms);
    });
}

FunctionalValue ith_dual_mixed_volume(const OrliczFunction& phi1, const OrliczFunction& phi2, double i,
                                      const StarBody& k, const StarBody& l, const StarBody& q1, const StarBody& q2,
                                      const GridPtr& grid) {
    if (!std::isfinite(i)) throw ConfigError("index i must be finite");
    for (const auto* b : {&k, &l, &q1, &q2}) require_same_dimension(*b, grid);
    const std::string text = "ith-dual|" + phi1.label() + "|" + phi2.label() + "|" + fmt_double(i) + "|" +
                             k.digest() + "|" + l.digest() + "|" + q1.digest() + "|" + q2.digest();
    return with_error(grid, text, [&](const GridPtr& g) {
        const auto a = integrand_terms(phi1, k, q1, g);
        const auto b = integrand_terms(phi2, l, q2, g);
        return raw::ith_from_terms(*g, i, a, b);
    });
}

}  // namespace dorlicz
