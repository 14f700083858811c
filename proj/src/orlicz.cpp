#include "dorlicz/orlicz.hpp"

#include <algorithm>
#include <cmath>

#include "dorlicz/digest.hpp"
#include "dorlicz/error.hpp"
#include "dorlicz/expr.hpp"

namespace dorlicz {

std::string to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Increasing: return "increasing";
        case Monotonicity::Decreasing: return "decreasing";
        case Monotonicity::Constant: return "constant";
        case Monotonicity::Mixed: return "mixed";
    }
    return "unknown";
}

std::string Classification::to_string() const {
    if (excluded) return "excluded";
    std::string out;
    auto add = [&](const char* name) { out += out.empty() ? name : std::string("|") + name; };
    if (constant) add("constant");
    if (phi) add("Phi");
    if (psi) add("Psi");
    if (phi1) add("Phi1");
    return out.empty() ? "none" : out;
}

namespace {

std::vector<double> probe_grid() {
    std::vector<double> t(161);
    for (int k = 0; k < 161; ++k) t[static_cast<std::size_t>(k)] = std::pow(10.0, -4.0 + 8.0 * k / 160.0);
    return t;
}

}  // namespace

OrliczFunction OrliczFunction::power(double p) {
    if (!std::isfinite(p)) throw ConfigError("power exponent must be finite");
    OrliczFunction f;
    f.is_power_ = true;
    f.p_ = p;
    f.label_ = "t^" + fmt_double(p);
    if (p == 0.0) f.constant_ = 1.0;
    return f;
}

OrliczFunction OrliczFunction::constant(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("constant Orlicz function must be positive");
    OrliczFunction f;
    f.f_ = [alpha](double) { return alpha; };
    f.label_ = "const:" + fmt_double(alpha);
    f.constant_ = alpha;
    return f;
}

OrliczFunction OrliczFunction::custom(std::string label, std::function<double(double)> fn) {
    if (!fn) throw ConfigError("custom Orlicz function needs an evaluator");
    OrliczFunction f;
    f.f_ = std::move(fn);
    f.label_ = std::move(label);
    const auto grid = probe_grid();
    const double first = f.f_(grid.front());
    bool flat = std::isfinite(first);
    for (double t : grid) {
        const double v = f.f_(t);
        // Overflow (exp(1/t) near 0) is tolerated here; NaN and non-positive values are not.
        if (!(v > 0.0))
            throw NumericalDomainError("Orlicz function '" + f.label_ + "' is not positive at t=" + fmt_double(t));
        flat = flat && std::abs(v - first) <= 1e-12 * std::abs(first);
    }
    if (flat) f.constant_ = first;
    return f;
}

OrliczFunction OrliczFunction::expression(const std::string& text) {
    return custom("expr:" + text, compile_expression(text));
}

double OrliczFunction::exponent() const {
    if (!is_power_) throw UnsupportedError("'" + label_ + "' is not a power function");
    return p_;
}

double OrliczFunction::pow_eval(double t) const {
    if (p_ == 1.0) return t;
    if (p_ == -1.0) return 1.0 / t;
    if (p_ == 2.0) return t * t;
    if (p_ == 3.0) return t * t * t;
    if (p_ == -2.0) return 1.0 / (t * t);
    if (p_ == 0.5) return std::sqrt(t);
    if (p_ == 0.0) return 1.0;
    return std::pow(t, p_);
}

Monotonicity OrliczFunction::monotonicity() const {
    if (constant_) return Monotonicity::Constant;
    if (is_power_) return p_ > 0.0 ? Monotonicity::Increasing : Monotonicity::Decreasing;
    bool up = true, down = true;
    double prev = (*this)(1e-6);
    for (int k = 1; k <= 240; ++k) {
        const double v = (*this)(std::pow(10.0, -6.0 + 12.0 * k / 240.0));
        up = up && v > prev;
        down = down && v < prev;
        prev = v;
    }
    if (up) return Monotonicity::Increasing;
    if (down) return Monotonicity::Decreasing;
    return Monotonicity::Mixed;
}

Classification probe_classification(const OrliczFunction& phi, int n, double tau) {
    Classification c;
    const auto t = probe_grid();
    std::vector<double> f(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        f[k] = phi(std::pow(t[k], 1.0 / n));
        if (!std::isfinite(f[k]))
            throw NumericalDomainError("Orlicz function '" + phi.label() + "' is not finite at t=" +
                                       fmt_double(std::pow(t[k], 1.0 / n)));
    }
    bool flat = true;
    for (double v : f) flat = flat && std::abs(v - f[0]) <= 1e-12 * std::abs(f[0]);
    if (flat) {
        c.constant = c.phi = c.psi = c.phi1 = true;
        return c;
    }
    std::vector<double> slope(t.size() - 1);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) slope[k] = (f[k + 1] - f[k]) / (t[k + 1] - t[k]);
    const bool increasing = std::all_of(slope.begin(), slope.end(), [](double s) { return s > 0.0; });
    const bool decreasing = std::all_of(slope.begin(), slope.end(), [](double s) { return s < 0.0; });
    bool convex = true, concave = true;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < slope.size(); ++k) {
        const double scale = 0.5 * (std::abs(slope[k]) + std::abs(slope[k + 1]));
        const double d = scale > 0.0 ? (slope[k + 1] - slope[k]) / scale : 0.0;
        convex = convex && d > tau;
        concave = concave && d < -tau;
        worst = k == 0 ? std::abs(d) : std::min(worst, std::abs(d));
    }
    c.phi = convex;
    c.psi = increasing && concave;
    c.phi1 = decreasing && convex;
    if (c.empty())
        c.diagnostic = std::string("F is ") + (increasing ? "increasing" : decreasing ? "decreasing" : "not monotone") +
                       (convex ? ", strictly convex" : concave ? ", strictly concave" : ", neither strictly convex nor strictly concave") +
                       "; smallest |normalized second difference| " + fmt_double(worst);
    return c;
}

Classification OrliczFunction::classify(int n) const {
    if (n < 2) throw ConfigError("dimension must be >= 2");
    if (!is_power_) return probe_classification(*this, n);
    Classification c;
    const double dn = n;
    if (p_ == 0.0) {
        c.constant = c.phi = c.psi = c.phi1 = true;
    } else if (p_ == dn) {
        c.excluded = true;
        c.diagnostic = "t^n is excluded (F is linear)";
    } else if (p_ < 0.0) {
        c.phi = c.phi1 = true;
    } else if (p_ < dn) {
        c.psi = true;
    } else {
        c.phi = true;
    }
    return c;
}

double OrliczFunction::inverse(double y) const {
    if (!(y > 0.0) || !std::isfinite(y)) throw NumericalDomainError("inverse needs a positive finite argument");
    if (constant_) throw InvalidCompositionError("'" + label_ + "' is constant and has no inverse");
    if (is_power_) return std::pow(y, 1.0 / p_);
    // Bisection on log x; the function must be strictly monotone.
    double lo = -690.0, hi = 690.0;
    const double f_lo = (*this)(std::exp(lo));
    const double f_hi = (*this)(std::exp(hi));
    const bool up = f_hi > f_lo;
    if (up ? (y < f_lo || y > f_hi) : (y > f_lo || y < f_hi))
        throw NumericalDomainError("value " + fmt_double(y) + " is outside the range of '" + label_ + "'");
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = (*this)(std::exp(mid));
        if ((v < y) == up) lo = mid;
        else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

Composition compose_H(const OrliczFunction& phi, const OrliczFunction& psi) {
    const auto x = probe_grid();
    std::vector<std::pair<double, double>> pts;
    for (double xk : x) {
        const double a = psi(xk), b = phi(xk);
        if (std::isfinite(a) && std::isfinite(b)) pts.emplace_back(a, b);
    }
    if (pts.size() < 16) throw InvalidCompositionError("too few finite probe values for H");
    bool up = true, down = true;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        up = up && pts[k + 1].first > pts[k].first;
        down = down && pts[k + 1].first < pts[k].first;
    }
    if (!up && !down)
        throw InvalidCompositionError("'" + psi.label() + "' is not strictly monotone on the probe range");
    if (down) std::reverse(pts.begin(), pts.end());

    Composition h{phi, psi};
    std::vector<double> slope(pts.size() - 1);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        slope[k] = (pts[k + 1].second - pts[k].second) / (pts[k + 1].first - pts[k].first);
    h.increasing = std::all_of(slope.begin(), slope.end(), [](double s) { return s > 0.0; });
    h.decreasing = std::all_of(slope.begin(), slope.end(), [](double s) { return s < 0.0; });
    h.convex = h.concave = true;
    constexpr double kTol = 1e-7;
    for (std::size_t k = 0; k + 1 < slope.size(); ++k) {
        const double scale = std::abs(slope[k]) + std::abs(slope[k + 1]);
        const double d = slope[k + 1] - slope[k];
        h.convex = h.convex && d >= -kTol * scale;
        h.concave = h.concave && d <= kTol * scale;
    }
    return h;
}

std::vector<CyclicCase> cyclic_cases(const Composition& h, int n) {
    const auto a = h.phi.classify(n);
    const auto b = h.psi.classify(n);
    const bool both_phi = a.phi && b.phi;
    const bool both_psi = a.psi && b.psi;
    std::vector<CyclicCase> out;
    if (a.phi && b.psi && h.increasing) out.push_back({'a', true, true});
    if (both_phi && h.decreasing) out.push_back({'b', true, true});
    if (a.psi && b.phi && h.increasing) out.push_back({'c', false, true});
    if (h.concave && h.increasing && (both_phi || both_psi)) out.push_back({'d', true, false});
    if (h.convex && h.decreasing && ((a.phi && b.psi) || (a.psi && b.phi))) out.push_back({'e', false, false});
    if (h.convex && h.increasing && (both_phi || both_psi)) out.push_back({'f', false, false});
    return out;
}

}  // namespace dorlicz
