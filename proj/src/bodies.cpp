#include "dorlicz/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "dorlicz/digest.hpp"
#include "dorlicz/error.hpp"

namespace dorlicz {

std::string to_string(BodyKind kind) {
    switch (kind) {
        case BodyKind::Ball: return "ball";
        case BodyKind::Ellipsoid: return "ellipsoid";
        case BodyKind::LpBall: return "lp-ball";
        case BodyKind::Polytope: return "polytope";
        case BodyKind::GridSampled: return "grid-sampled";
        case BodyKind::Custom: return "custom";
    }
    return "unknown";
}

// ---------------------------------------------------------------- LinearMap

LinearMap::LinearMap(Mat matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
        throw ConfigError("linear map must be a non-empty square matrix");
    if (!matrix_.allFinite()) throw ConfigError("linear map has non-finite entries");
    det_abs_ = std::abs(matrix_.determinant());
    const double scale = std::pow(matrix_.norm() / std::sqrt(static_cast<double>(matrix_.rows())),
                                  static_cast<double>(matrix_.rows()));
    if (!(det_abs_ > 1e-12 * std::max(scale, 1e-300))) throw ConfigError("linear map is singular");
    inverse_ = matrix_.inverse();
}

std::optional<double> LinearMap::as_scalar() const {
    const double s = matrix_(0, 0);
    if (!(s > 0.0)) return std::nullopt;
    if ((matrix_ - s * Mat::Identity(matrix_.rows(), matrix_.cols())).cwiseAbs().maxCoeff() > 0.0) return std::nullopt;
    return s;
}

// ----------------------------------------------------------------- StarBody

struct StarBody::Impl {
    BodyKind kind = BodyKind::Custom;
    int n = 0;
    Flag symmetric = Flag::Unknown;
    Flag convex = Flag::Unknown;
    std::string descriptor;

    double radius = 1.0;
    Mat a;
    Mat a_inv;
    double p = 2.0;
    std::shared_ptr<const PolytopeData> poly;
    GridPtr grid;
    std::vector<double> values;
    DirectionFn radial_fn;
    DirectionFn support_fn;
};

namespace {

double norm2(std::span<const double> u) {
    double s = 0.0;
    for (double x : u) s += x * x;
    return std::sqrt(s);
}

double lp_norm(std::span<const double> u, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : u) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0.0;
    for (double x : u) s += std::pow(std::abs(x), p);
    return std::pow(s, 1.0 / p);
}

Vec to_vec(std::span<const double> u) {
    Vec v(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) v[static_cast<Eigen::Index>(i)] = u[i];
    return v;
}

std::string mat_text(const Mat& m) {
    std::ostringstream out;
    out << '[';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r) out << ';';
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << fmt_double(m(r, c));
    }
    out << ']';
    return out.str();
}

double interpolate_samples(const StarBody::Impl& s, std::span<const double> u) {
    const SphericalGrid& g = *s.grid;
    const std::size_t count = g.size();
    if (g.dimension() == 2 && g.angularly_sorted()) {
        double theta = std::atan2(u[1], u[0]);
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
        const double pos = theta / (2.0 * std::numbers::pi) * static_cast<double>(count);
        auto i0 = static_cast<std::size_t>(std::floor(pos)) % count;
        const double frac = pos - std::floor(pos);
        const std::size_t i1 = (i0 + 1) % count;
        return (1.0 - frac) * s.values[i0] + frac * s.values[i1];
    }
    std::size_t best = 0;
    double best_dot = -2.0;
    for (std::size_t i = 0; i < count; ++i) {
        const auto node = g.node(i);
        double d = 0.0;
        for (std::size_t k = 0; k < node.size(); ++k) d += node[k] * u[k];
        if (d > best_dot) {
            best_dot = d;
            best = i;
        }
    }
    return s.values[best];
}

}  // namespace

StarBody StarBody::ball(int n, double radius) {
    if (n < 2) throw ConfigError("dimension must be >= 2");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidBodyError("ball radius must be positive");
    auto s = std::make_shared<Impl>();
    s->kind = BodyKind::Ball;
    s->n = n;
    s->symmetric = Flag::Yes;
    s->convex = Flag::Yes;
    s->radius = radius;
    s->descriptor = "ball(n=" + std::to_string(n) + ",r=" + fmt_double(radius) + ")";
    return StarBody(std::move(s));
}

StarBody StarBody::ellipsoid(const Mat& a) {
    const LinearMap map(a);
    auto s = std::make_shared<Impl>();
    s->kind = BodyKind::Ellipsoid;
    s->n = map.dimension();
    if (s->n < 2) throw ConfigError("dimension must be >= 2");
    s->symmetric = Flag::Yes;
    s->convex = Flag::Yes;
    s->a = map.matrix();
    s->a_inv = map.inverse();
    s->descriptor = "ellipsoid(" + mat_text(s->a) + ")";
    return StarBody(std::move(s));
}

StarBody StarBody::ellipsoid_axes(const std::vector<double>& semi_axes) {
    Mat a = Mat::Zero(static_cast<Eigen::Index>(semi_axes.size()), static_cast<Eigen::Index>(semi_axes.size()));
    for (std::size_t i = 0; i < semi_axes.size(); ++i) {
        if (!(semi_axes[i] > 0.0)) throw InvalidBodyError("semi-axes must be positive");
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = semi_axes[i];
    }
    return ellipsoid(a);
}

StarBody StarBody::lp_ball(int n, double p) {
    if (n < 2) throw ConfigError("dimension must be >= 2");
    if (!(p > 0.0)) throw InvalidBodyError("lp-ball needs p > 0");
    auto s = std::make_shared<Impl>();
    s->kind = BodyKind::LpBall;
    s->n = n;
    s->symmetric = Flag::Yes;
    s->convex = p >= 1.0 ? Flag::Yes : Flag::No;
    s->p = p;
    s->descriptor = "lp-ball(n=" + std::to_string(n) + ",p=" + fmt_double(p) + ")";
    return StarBody(std::move(s));
}

StarBody StarBody::polytope(int n, std::vector<Facet> facets) {
    auto s = std::make_shared<Impl>();
    s->kind = BodyKind::Polytope;
    s->n = n;
    s->poly = make_polytope_data(n, std::move(facets));
    s->convex = Flag::Yes;
    // Symmetric when every facet has its mirror image.
    bool sym = true;
    for (const auto& f : s->poly->facets) {
        bool found = false;
        for (const auto& g : s->poly->facets)
            if ((f.normal + g.normal).norm() < 1e-12 && std::abs(f.offset - g.offset) < 1e-12) found = true;
        sym = sym && found;
    }
    s->symmetric = sym ? Flag::Yes : Flag::No;
    std::ostringstream d;
    d << "polytope(n=" << n;
    for (const auto& f : s->poly->facets) {
        d << ";[";
        for (Eigen::Index k = 0; k < f.normal.size(); ++k) d << (k ? "," : "") << fmt_double(f.normal[k]);
        d << "]<=" << fmt_double(f.offset);
    }
    d << ')';
    s->descriptor = d.str();
    return StarBody(std::move(s));
}

StarBody StarBody::cube(int n, double half_width) {
    std::vector<Facet> facets;
    for (int k = 0; k < n; ++k) {
        facets.push_back({Vec::Unit(n, k), half_width});
        facets.push_back({-Vec::Unit(n, k), half_width});
    }
    return polytope(n, std::move(facets));
}

StarBody StarBody::grid_sampled(GridPtr grid, std::vector<double> rho, Flag symmetric, Flag convex) {
    if (!grid) throw ConfigError("grid-sampled body needs a grid");
    if (rho.size() != grid->size()) throw ConfigError("grid-sampled body: value count differs from grid size");
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (!(rho[i] > 0.0) || !std::isfinite(rho[i]))
            throw InvalidBodyError("grid-sampled radial value must be positive and finite at node " +
                                   std::to_string(i));
    auto s = std::make_shared<Impl>();
    s->kind = BodyKind::GridSampled;
    s->n = grid->dimension();
    s->symmetric = symmetric;
    s->convex = convex;
    s->grid = std::move(grid);
    s->values = std::move(rho);
    std::string all;
    all.reserve(s->values.size() * 8);
    for (double v : s->values) all += fmt_double(v) + ",";
    s->descriptor = "grid-sampled(" + s->grid->digest() + ",#" + hex_digest(all) + ")";
    return StarBody(std::move(s));
}

StarBody StarBody::from_function(int n, DirectionFn radial, std::string descriptor, Flag symmetric, Flag convex,
                                 DirectionFn support) {
    if (n < 2) throw ConfigError("dimension must be >= 2");
    if (!radial) throw ConfigError("custom body needs a radial evaluator");
    auto s = std::make_shared<Impl>();
    s->kind = BodyKind::Custom;
    s->n = n;
    s->symmetric = symmetric;
    s->convex = convex;
    s->radial_fn = std::move(radial);
    s->support_fn = std::move(support);
    s->descriptor = std::move(descriptor);
    return StarBody(std::move(s));
}

int StarBody::dimension() const noexcept { return impl_->n; }
BodyKind StarBody::kind() const noexcept { return impl_->kind; }
Flag StarBody::symmetry() const noexcept { return impl_->symmetric; }
Flag StarBody::convexity() const noexcept { return impl_->convex; }
const std::string& StarBody::descriptor() const noexcept { return impl_->descriptor; }
std::string StarBody::digest() const { return hex_digest(impl_->descriptor); }

double StarBody::radial(std::span<const double> u) const {
    const Impl& s = *impl_;
    switch (s.kind) {
        case BodyKind::Ball: return s.radius;
        case BodyKind::Ellipsoid: return 1.0 / (s.a_inv * to_vec(u)).norm();
        case BodyKind::LpBall: return 1.0 / lp_norm(u, s.p);
        case BodyKind::Polytope: {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& f : s.poly->facets) {
                double d = 0.0;
                for (std::size_t k = 0; k < u.size(); ++k) d += f.normal[static_cast<Eigen::Index>(k)] * u[k];
                if (d > 0.0) best = std::min(best, f.offset / d);
            }
            return best;
        }
        case BodyKind::GridSampled: return interpolate_samples(s, u);
        case BodyKind::Custom: return s.radial_fn(u);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

bool StarBody::has_analytic_support() const noexcept {
    switch (impl_->kind) {
        case BodyKind::GridSampled: return false;
        case BodyKind::Custom: return static_cast<bool>(impl_->support_fn);
        default: return true;
    }
}

double StarBody::support(std::span<const double> u) const {
    const Impl& s = *impl_;
    switch (s.kind) {
        case BodyKind::Ball: return s.radius * norm2(u);
        case BodyKind::Ellipsoid: return (s.a.transpose() * to_vec(u)).norm();
        case BodyKind::LpBall: {
            if (s.p < 1.0) return lp_norm(u, std::numeric_limits<double>::infinity());
            if (std::isinf(s.p)) return lp_norm(u, 1.0);
            if (s.p == 1.0) return lp_norm(u, std::numeric_limits<double>::infinity());
            return lp_norm(u, s.p / (s.p - 1.0));
        }
        case BodyKind::Polytope: {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& v : s.poly->vertices) {
                double d = 0.0;
                for (std::size_t k = 0; k < u.size(); ++k) d += v[static_cast<Eigen::Index>(k)] * u[k];
                best = std::max(best, d);
            }
            return best;
        }
        case BodyKind::Custom:
            if (s.support_fn) return s.support_fn(u);
            break;
        case BodyKind::GridSampled: break;
    }
    throw UnsupportedError("no closed-form support function for " + to_string(s.kind) + " body");
}

double StarBody::ball_radius() const {
    if (impl_->kind != BodyKind::Ball) throw UnsupportedError("not a ball");
    return impl_->radius;
}
const Mat& StarBody::ellipsoid_matrix() const {
    if (impl_->kind != BodyKind::Ellipsoid) throw UnsupportedError("not an ellipsoid");
    return impl_->a;
}
double StarBody::lp_exponent() const {
    if (impl_->kind != BodyKind::LpBall) throw UnsupportedError("not an lp-ball");
    return impl_->p;
}
const PolytopeData& StarBody::polytope_data() const {
    if (impl_->kind != BodyKind::Polytope) throw UnsupportedError("not a polytope");
    return *impl_->poly;
}
const GridPtr& StarBody::sample_grid() const {
    if (impl_->kind != BodyKind::GridSampled) throw UnsupportedError("not grid-sampled");
    return impl_->grid;
}
const std::vector<double>& StarBody::sample_values() const {
    if (impl_->kind != BodyKind::GridSampled) throw UnsupportedError("not grid-sampled");
    return impl_->values;
}

StarBody StarBody::scaled(double lambda) const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("dilation factor must be positive");
    const Impl& s = *impl_;
    switch (s.kind) {
        case BodyKind::Ball: return ball(s.n, lambda * s.radius);
        case BodyKind::Ellipsoid: return ellipsoid(lambda * s.a);
        case BodyKind::Polytope: {
            auto facets = s.poly->facets;
            for (auto& f : facets) f.offset *= lambda;
            return polytope(s.n, std::move(facets));
        }
        case BodyKind::GridSampled: {
            auto values = s.values;
            for (double& v : values) v *= lambda;
            return grid_sampled(s.grid, std::move(values), s.symmetric, s.convex);
        }
        default: {
            const StarBody parent = *this;
            DirectionFn support;
            if (has_analytic_support()) support = [parent, lambda](std::span<const double> u) { return lambda * parent.support(u); };
            return from_function(
                s.n, [parent, lambda](std::span<const double> u) { return lambda * parent.radial(u); },
                fmt_double(lambda) + "*" + s.descriptor, s.symmetric, s.convex, std::move(support));
        }
    }
}

StarBody StarBody::with_flags(Flag symmetric, Flag convex) const {
    auto copy = std::make_shared<Impl>(*impl_);
    copy->symmetric = symmetric;
    copy->convex = convex;
    return StarBody(std::move(copy));
}

// --------------------------------------------------------- grid evaluation

std::vector<double> radial_values(const StarBody& body, const GridPtr& grid) {
    if (body.dimension() != grid->dimension())
        throw ConfigError("body dimension " + std::to_string(body.dimension()) + " does not match grid dimension " +
                          std::to_string(grid->dimension()));
    std::vector<double> rho;
    if (body.kind() == BodyKind::GridSampled && body.sample_grid()->digest() == grid->digest()) {
        rho = body.sample_values();
    } else {
        rho.resize(grid->size());
        for (std::size_t i = 0; i < grid->size(); ++i) rho[i] = body.radial(grid->node(i));
    }
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (!(rho[i] > 0.0) || !std::isfinite(rho[i]))
            throw InvalidBodyError("radial value " + fmt_double(rho[i]) + " at node " + std::to_string(i) +
                                   " of " + body.descriptor());
    return rho;
}

BodyOnGrid radial_eval(const StarBody& body, const GridPtr& grid) {
    BodyOnGrid out{body, grid, radial_values(body, grid), std::nullopt};
    if (body.has_analytic_support()) out.support = support_values(body, grid);
    return out;
}

namespace {

struct P2 {
    double x, y;
    std::size_t id;
};

double cross(const P2& o, const P2& a, const P2& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Andrew's monotone chain; counter-clockwise without collinear points.
std::vector<P2> hull2d(std::vector<P2> pts) {
    std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    if (pts.size() < 3) return pts;
    std::vector<P2> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

}  // namespace

std::vector<double> point_cloud_support(const SphericalGrid& grid, std::span<const double> rho) {
    const std::size_t count = grid.size();
    const auto n = static_cast<std::size_t>(grid.dimension());
    std::vector<double> out(count);
    if (n == 2 && grid.angularly_sorted()) {
        std::vector<P2> pts(count);
        for (std::size_t i = 0; i < count; ++i) {
            const auto u = grid.node(i);
            pts[i] = {rho[i] * u[0], rho[i] * u[1], i};
        }
        const auto hull = hull2d(std::move(pts));
        const std::size_t h = hull.size();
        auto dot = [&](std::size_t k, std::span<const double> u) { return hull[k].x * u[0] + hull[k].y * u[1]; };
        std::size_t k = 0;
        const auto u0 = grid.node(0);
        for (std::size_t j = 1; j < h; ++j)
            if (dot(j, u0) > dot(k, u0)) k = j;
        for (std::size_t i = 0; i < count; ++i) {
            const auto u = grid.node(i);
            for (std::size_t steps = 0; steps < h; ++steps) {
                const std::size_t next = (k + 1) % h;
                if (dot(next, u) > dot(k, u)) k = next;
                else break;
            }
            out[i] = dot(k, u);
        }
        return out;
    }
    const auto flat = grid.flat_nodes();
    for (std::size_t i = 0; i < count; ++i) {
        const double* ui = flat.data() + i * n;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < count; ++j) {
            const double* uj = flat.data() + j * n;
            double d = 0.0;
            for (std::size_t k = 0; k < n; ++k) d += ui[k] * uj[k];
            best = std::max(best, rho[j] * d);
        }
        out[i] = best;
    }
    return out;
}

std::vector<double> hull_radial_values(const SphericalGrid& grid, std::span<const double> rho) {
    const std::size_t count = grid.size();
    if (grid.dimension() == 2 && grid.angularly_sorted() && count >= 3) {
        std::vector<P2> pts(count);
        for (std::size_t i = 0; i < count; ++i) {
            const auto u = grid.node(i);
            pts[i] = {rho[i] * u[0], rho[i] * u[1], i};
        }
        auto hull = hull2d(std::move(pts));
        // Counter-clockwise order is increasing angle up to a rotation.
        const auto first = std::min_element(hull.begin(), hull.end(), [](const P2& a, const P2& b) { return a.id < b.id; });
        std::rotate(hull.begin(), first, hull.end());
        std::vector<double> out(count);
        const std::size_t h = hull.size();
        for (std::size_t k = 0; k < h; ++k) {
            const P2& a = hull[k];
            const P2& b = hull[(k + 1) % h];
            const double ex = b.x - a.x, ey = b.y - a.y;
            const double num = a.x * ey - a.y * ex;
            out[a.id] = rho[a.id];
            for (std::size_t i = (a.id + 1) % count; i != b.id; i = (i + 1) % count) {
                const auto u = grid.node(i);
                out[i] = std::max(rho[i], num / (u[0] * ey - u[1] * ex));
            }
        }
        return out;
    }
    auto h = point_cloud_support(grid, rho);
    for (std::size_t i = 0; i < count; ++i) {
        if (!(h[i] > 0.0)) throw InvalidBodyError("support vanishes at node " + std::to_string(i) + "; origin not interior");
        h[i] = 1.0 / h[i];
    }
    auto g = point_cloud_support(grid, h);
    for (auto& v : g) v = 1.0 / v;
    return g;
}

double point_cloud_support_at(const SphericalGrid& grid, std::span<const double> rho, std::span<const double> u) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto uj = grid.node(j);
        double d = 0.0;
        for (std::size_t k = 0; k < uj.size(); ++k) d += uj[k] * u[k];
        best = std::max(best, rho[j] * d);
    }
    return best;
}

std::vector<double> support_values(const StarBody& body, const GridPtr& grid) {
    if (body.dimension() != grid->dimension()) throw ConfigError("body and grid dimensions differ");
    std::vector<double> h(grid->size());
    if (body.has_analytic_support()) {
        for (std::size_t i = 0; i < grid->size(); ++i) h[i] = body.support(grid->node(i));
    } else {
        h = point_cloud_support(*grid, radial_values(body, grid));
    }
    return h;
}

GridFunction support_eval(const StarBody& body, const GridPtr& grid) {
    return GridFunction(grid, support_values(body, grid));
}

// ------------------------------------------------------------ polar & hull

StarBody polar(const StarBody& body, const GridPtr& grid) {
    const int n = body.dimension();
    switch (body.kind()) {
        case BodyKind::Ball: return StarBody::ball(n, 1.0 / body.ball_radius());
        case BodyKind::Ellipsoid: return StarBody::ellipsoid(body.ellipsoid_matrix().inverse().transpose());
        case BodyKind::LpBall: {
            const double p = body.lp_exponent();
            const double inf = std::numeric_limits<double>::infinity();
            if (p < 1.0 || p == 1.0) return StarBody::lp_ball(n, inf);
            if (std::isinf(p)) return StarBody::lp_ball(n, 1.0);
            return StarBody::lp_ball(n, p / (p - 1.0));
        }
        case BodyKind::Polytope: {
            std::vector<Facet> facets;
            for (const auto& v : body.polytope_data().vertices) {
                const double len = v.norm();
                if (!(len > 0.0)) throw InvalidBodyError("polytope vertex at the origin");
                facets.push_back({v / len, 1.0 / len});
            }
            return StarBody::polytope(n, std::move(facets));
        }
        default: break;
    }
    if (body.has_analytic_support()) {
        // For convex K the polar's support is 1 / rho_K.
        StarBody::DirectionFn support;
        if (body.convexity() == Flag::Yes)
            support = [body](std::span<const double> u) { return norm2(u) / body.radial(u); };
        return StarBody::from_function(
            n,
            [body](std::span<const double> u) {
                const double h = body.support(u);
                if (!(h > 0.0)) throw InvalidBodyError("support is not positive; origin not interior");
                return 1.0 / h;
            },
            "polar(" + body.descriptor() + ")", body.symmetry(), Flag::Yes, std::move(support));
    }
    const auto h = support_values(body, grid);
    std::vector<double> rho(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0)) throw InvalidBodyError("support vanishes at node " + std::to_string(i) + "; origin not interior");
        rho[i] = 1.0 / h[i];
    }
    return StarBody::grid_sampled(grid, std::move(rho), body.symmetry(), Flag::Yes);
}

StarBody convex_hull(const StarBody& body, const GridPtr& grid) {
    if (body.convexity() == Flag::Yes) return body;
    if (!body.has_analytic_support())
        return StarBody::grid_sampled(grid, hull_radial_values(*grid, radial_values(body, grid)), body.symmetry(), Flag::Yes);
    return polar(polar(body, grid), grid);
}

StarBody transform(const LinearMap& map, const StarBody& body) {
    const int n = body.dimension();
    if (map.dimension() != n) throw ConfigError("linear map dimension does not match body");
    if (const auto s = map.as_scalar()) return body.scaled(*s);
    switch (body.kind()) {
        case BodyKind::Ball: return StarBody::ellipsoid(body.ball_radius() * map.matrix());
        case BodyKind::Ellipsoid: return StarBody::ellipsoid(map.matrix() * body.ellipsoid_matrix());
        case BodyKind::Polytope: {
            auto facets = body.polytope_data().facets;
            const Mat inv_t = map.inverse().transpose();
            for (auto& f : facets) f.normal = inv_t * f.normal;
            return StarBody::polytope(n, std::move(facets));
        }
        default: break;
    }
    const Mat t = map.matrix();
    const Mat t_inv = map.inverse();
    StarBody::DirectionFn support;
    if (body.has_analytic_support())
        support = [body, t](std::span<const double> u) {
            const Vec w = t.transpose() * to_vec(u);
            return body.support(w);
        };
    return StarBody::from_function(
        n,
        [body, t_inv](std::span<const double> v) {
            const Vec w = t_inv * to_vec(v);
            const double len = w.norm();
            const Vec dir = w / len;
            return body.radial(dir) / len;
        },
        "T" + mat_text(t) + "(" + body.descriptor() + ")", body.symmetry(), body.convexity(), std::move(support));
}

Vec centroid(const StarBody& body, const GridPtr& grid) {
    const int n = body.dimension();
    const auto rho = radial_values(body, grid);
    Vec moment = Vec::Zero(n);
    double volume = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const auto u = grid->node(i);
        const double w = grid->weight(i);
        const double rn = std::pow(rho[i], n);
        volume += w * rn / n;
        for (int k = 0; k < n; ++k) moment[k] += w * rn * rho[i] * u[static_cast<std::size_t>(k)] / (n + 1);
    }
    return moment / volume;
}

namespace {
double quick_vrad(const StarBody& body, const GridPtr& grid) {
    const auto rho = radial_values(body, grid);
    const int n = body.dimension();
    double vol = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) vol += grid->weight(i) * std::pow(rho[i], n) / n;
    return std::pow(vol / unit_ball_volume(n), 1.0 / n);
}
}  // namespace

bool has_centroid_at_origin(const StarBody& body, const GridPtr& grid, double tol) {
    return centroid(body, grid).norm() <= tol * quick_vrad(body, grid);
}

bool has_santalo_point_at_origin(const StarBody& body, const GridPtr& grid, double tol) {
    return has_centroid_at_origin(polar(body, grid), grid, tol);
}

// --------------------------------------------------------------- generators

StarBody make_random_star(int n, std::uint64_t seed, double roughness, bool symmetric) {
    if (!(roughness >= 0.0 && roughness < 1.0)) throw ConfigError("roughness must lie in [0, 1)");
    if (roughness == 0.0) return StarBody::ball(n, 1.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss;
    constexpr int kTerms = 4;
    struct Term {
        Vec dir;
        double freq, phase, amp;
    };
    std::vector<Term> terms;
    double amp_total = 0.0;
    for (int t = 0; t < kTerms; ++t) {
        Vec d(n);
        for (int k = 0; k < n; ++k) d[k] = gauss(rng);
        d.normalize();
        const double freq = 1.0 + 3.0 * unit(rng);
        const double phase = 2.0 * std::numbers::pi * unit(rng);
        const double amp = 0.2 + unit(rng);
        terms.push_back({d, freq, symmetric ? 0.0 : phase, amp});
        amp_total += amp;
    }
    for (auto& t : terms) t.amp /= amp_total;
    auto radial = [terms, roughness](std::span<const double> u) {
        double g = 0.0;
        for (const auto& t : terms) {
            double d = 0.0;
            for (std::size_t k = 0; k < u.size(); ++k) d += t.dir[static_cast<Eigen::Index>(k)] * u[k];
            g += t.amp * std::cos(t.freq * d + t.phase);
        }
        return 1.0 + roughness * g;
    };
    const std::string desc = "random-star(n=" + std::to_string(n) + ",seed=" + std::to_string(seed) +
                             ",r=" + fmt_double(roughness) + (symmetric ? ",sym" : "") + ")";
    return StarBody::from_function(n, radial, desc, symmetric ? Flag::Yes : Flag::Unknown, Flag::Unknown);
}

StarBody make_random_polytope(int n, std::uint64_t seed, int pairs) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss;
    pairs = std::max(pairs, n);
    std::vector<Facet> facets;
    for (int j = 0; j < pairs; ++j) {
        Vec a(n);
        if (n == 2) {
            const double angle = (j + 0.2 + 0.6 * unit(rng)) * std::numbers::pi / pairs;
            a << std::cos(angle), std::sin(angle);
        } else {
            for (int k = 0; k < n; ++k) a[k] = gauss(rng);
            a.normalize();
        }
        const double b = 0.7 + 0.6 * unit(rng);
        facets.push_back({a, b});
        facets.push_back({-a, b});
    }
    return StarBody::polytope(n, std::move(facets));
}

StarBody make_random_ellipsoid(int n, std::uint64_t seed, double max_ratio) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss;
    Mat g(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) g(r, c) = gauss(rng);
    const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
    const double scale = 0.7 + 0.8 * unit(rng);
    Vec axes(n);
    for (int k = 0; k < n; ++k) axes[k] = scale * std::exp((unit(rng) - 0.5) * std::log(max_ratio));
    return StarBody::ellipsoid(q * axes.asDiagonal() * q.transpose());
}

}  // namespace dorlicz
