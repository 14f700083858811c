#pragma once

#include <span>
#include <string>
#include <vector>

#include "dorlicz/bodies.hpp"
#include "dorlicz/orlicz.hpp"
#include "dorlicz/sphgrid.hpp"

namespace dorlicz {

/// A functional value with |full - half resolution| as its quadrature error.
struct FunctionalValue {
    double value = 0.0;
    double quadrature_estimate_error = 0.0;
    std::string digest;
};

// Integrands take ratios rho_L / rho_K inside these bounds; anything outside
// signals a corrupted representation rather than a legitimate input.
inline constexpr double kMinRatio = 1e-12;
inline constexpr double kMaxRatio = 1e12;

FunctionalValue volume(const StarBody& k, const GridPtr& grid);
/// (|K| / omega_n)^{1/n}.
double vrad(const StarBody& k, const GridPtr& grid);

/// (1/n) int phi(rho_L / rho_K) rho_K^n dsigma.
FunctionalValue dual_mixed_volume(const OrliczFunction& phi, const StarBody& k, const StarBody& l,
                                  const GridPtr& grid);
/// n * dual_mixed_volume(phi, K, B).
FunctionalValue dual_surface_area(const OrliczFunction& phi, const StarBody& k, const GridPtr& grid);
/// (1 / n omega_n) int phi(rho_K) dsigma.
FunctionalValue dual_mean_radius(const OrliczFunction& phi, const StarBody& k, const GridPtr& grid);

/// (1/n) int phi(h_Q / h_K) h_K dS(K, .) for a polytope or ball K. Polytopes
/// use exact facet areas, so the quadrature error is zero unless Q itself is
/// grid-sampled. Throws UnsupportedError for any other kind of K.
FunctionalValue primal_mixed_volume(const OrliczFunction& phi, const StarBody& k, const StarBody& q,
                                    const GridPtr& grid);
/// n * V_phi(K, B).
FunctionalValue primal_surface_area(const OrliczFunction& phi, const StarBody& k, const GridPtr& grid);
/// (1 / n omega_n) int phi(h_K) dsigma.
FunctionalValue primal_mean_width(const OrliczFunction& phi, const StarBody& k, const GridPtr& grid);

/// (1/n) int prod_k [phi_k(rho_{L_k} / rho_{K_k}) rho_{K_k}^n]^{1/n} dsigma.
/// All three lists must have length n.
FunctionalValue multi_dual_mixed_volume(const std::vector<OrliczFunction>& phis, const std::vector<StarBody>& ks,
                                        const std::vector<StarBody>& ls, const GridPtr& grid);

/// (1/n) int [phi1(rho_Q1/rho_K) rho_K^n]^{(n-i)/n} [phi2(rho_Q2/rho_L) rho_L^n]^{i/n} dsigma.
FunctionalValue ith_dual_mixed_volume(const OrliczFunction& phi1, const OrliczFunction& phi2, double i,
                                      const StarBody& k, const StarBody& l, const StarBody& q1, const StarBody& q2,
                                      const GridPtr& grid);

/// Sample-level kernels shared by the functionals above and the optimizer.
/// Arrays are radial values on the nodes of `grid`.
namespace raw {

double volume(const SphericalGrid& grid, std::span<const double> rho);
double vrad(const SphericalGrid& grid, std::span<const double> rho);
/// Per-node integrand phi(rho_L / rho_K) rho_K^n, with the ratio checks.
void dual_mixed_integrand(const OrliczFunction& phi, const SphericalGrid& grid, std::span<const double> rho_k,
                          std::span<const double> rho_l, std::span<double> out);
double dual_mixed_volume(const OrliczFunction& phi, const SphericalGrid& grid, std::span<const double> rho_k,
                         std::span<const double> rho_l);
/// `terms[k]` holds the per-node values phi_k(rho_Lk / rho_Kk) rho_Kk^n.
double multi_from_terms(const SphericalGrid& grid, const std::vector<std::vector<double>>& terms);
/// (1/n) sum w a^{(n-i)/n} b^{i/n}, with a and b per-node integrands.
double ith_from_terms(const SphericalGrid& grid, double i, std::span<const double> a, std::span<const double> b);

}  // namespace raw

}  // namespace dorlicz
