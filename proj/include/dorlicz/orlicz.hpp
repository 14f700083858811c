#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dorlicz {

enum class Monotonicity { Increasing, Decreasing, Constant, Mixed };
std::string to_string(Monotonicity m);

/// Membership in the classes Phi~ (F = phi(t^{1/n}) constant or strictly
/// convex), Psi~ (constant or increasing strictly concave) and Phi~_1
/// (constant or decreasing strictly convex), relative to a dimension n.
struct Classification {
    bool phi = false;
    bool psi = false;
    bool phi1 = false;
    bool constant = false;
    /// Set for t^n, which the theory excludes.
    bool excluded = false;
    std::string diagnostic;

    bool empty() const { return !phi && !psi && !phi1; }
    std::string to_string() const;
};

/// A positive continuous function on (0, inf).
class OrliczFunction {
public:
    static OrliczFunction power(double p);
    static OrliczFunction constant(double alpha);
    /// Arbitrary evaluator; `label` must identify it uniquely for digests.
    static OrliczFunction custom(std::string label, std::function<double(double)> f);
    /// Parses an expression over t (see compile_expression). Pure powers such
    /// as "t^-1" are not recognized; use power() for the exact catalogue.
    static OrliczFunction expression(const std::string& text);

    double operator()(double t) const { return is_power_ ? pow_eval(t) : f_(t); }

    bool is_power() const noexcept { return is_power_; }
    /// Exponent of a power function; throws UnsupportedError otherwise.
    double exponent() const;
    bool is_constant() const noexcept { return constant_.has_value(); }
    /// Value of a constant function (power 0 included).
    std::optional<double> constant_value() const noexcept { return constant_; }
    const std::string& label() const noexcept { return label_; }

    /// Monotonicity probed on t in [1e-6, 1e6].
    Monotonicity monotonicity() const;
    /// Closed-form catalogue for powers, numeric probe of F otherwise.
    Classification classify(int n) const;

    /// x with phi(x) = y for strictly monotone phi. Exact for powers,
    /// log-space bisection otherwise. Throws NumericalDomainError when y lies
    /// outside the range reachable on [1e-300, 1e300].
    double inverse(double y) const;

private:
    double pow_eval(double t) const;

    std::function<double(double)> f_;
    std::string label_;
    bool is_power_ = false;
    double p_ = 0.0;
    std::optional<double> constant_;
};

/// Numeric probe of F(t) = phi(t^{1/n}) on t = 10^{linspace(-4, 4, 161)}
/// with threshold tau on normalized second differences.
Classification probe_classification(const OrliczFunction& phi, int n, double tau = 1e-9);

/// H = phi o psi^{-1} with shape flags probed at t = psi(x) on the probe grid.
/// Convexity flags are non-strict, so the identity is both convex and concave.
struct Composition {
    OrliczFunction phi;
    OrliczFunction psi;
    bool increasing = false;
    bool decreasing = false;
    bool convex = false;
    bool concave = false;

    double operator()(double t) const { return phi(psi.inverse(t)); }
};

/// Throws InvalidCompositionError if psi is not strictly monotone.
Composition compose_H(const OrliczFunction& phi, const OrliczFunction& psi);

/// A case (a)-(f) of the cyclic theorem that applies to (phi, psi).
/// `leq` is the direction of  X_phi / n|K| <= H(X_psi / n|K|); false means >=.
/// Cases (a)-(c) need K in the constrained class (centroid or Santalo point at
/// the origin); (d)-(f) hold for all star bodies.
struct CyclicCase {
    char label = '?';
    bool leq = true;
    bool needs_centered_body = false;
};

std::vector<CyclicCase> cyclic_cases(const Composition& h, int n);

}  // namespace dorlicz
