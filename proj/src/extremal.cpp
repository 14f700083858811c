#include "dorlicz/extremal.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "dorlicz/digest.hpp"
#include "dorlicz/error.hpp"
#include "dorlicz/functionals.hpp"

namespace dorlicz {

std::string to_string(Target t) { return t == Target::Affine ? "affine" : "geominimal"; }
std::string to_string(Sense s) { return s == Sense::Inf ? "inf" : "sup"; }
std::string to_string(MultiMode m) { return m == MultiMode::Joint ? "joint" : "per-slot"; }

Target parse_target(const std::string& text) {
    if (text == "affine") return Target::Affine;
    if (text == "geominimal") return Target::Geominimal;
    throw ConfigError("unknown target '" + text + "' (expected affine or geominimal)");
}

Sense parse_sense(const std::string& text) {
    if (text == "inf") return Sense::Inf;
    if (text == "sup") return Sense::Sup;
    throw ConfigError("unknown sense '" + text + "' (expected inf or sup)");
}

Sense natural_sense(const OrliczFunction& phi, int n) {
    const auto c = phi.classify(n);
    if (c.phi) return Sense::Inf;
    if (c.psi) return Sense::Sup;
    throw ContractError("'" + phi.label() + "' is in neither Phi~ nor Psi~ for n=" + std::to_string(n) +
                        (c.diagnostic.empty() ? "" : ": " + c.diagnostic));
}

void require_sense(const OrliczFunction& phi, int n, Sense sense) {
    const auto c = phi.classify(n);
    if (sense == Sense::Inf && !c.phi)
        throw ContractError("sense inf needs phi in Phi~, but '" + phi.label() + "' is " + c.to_string());
    if (sense == Sense::Sup && !c.psi)
        throw ContractError("sense sup needs phi in Psi~, but '" + phi.label() + "' is " + c.to_string());
}

ExtremalProblem::ExtremalProblem(Target target_, Sense sense_, OrliczFunction phi_, StarBody k_, GridPtr grid_,
                                 SearchOptions options_)
    : target(target_),
      sense(sense_),
      phi(std::move(phi_)),
      k(std::move(k_)),
      grid(std::move(grid_)),
      options(std::move(options_)) {}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const char* const kBiasNote =
    "candidates are origin-symmetric: an inf estimate bounds the true value from above, a sup estimate from below";

using Samples = std::vector<std::vector<double>>;
using ValueFn = std::function<double(const Samples&)>;

// Rescales samples so that the polar of their point cloud has the volume of
// the unit ball, after replacing them by their hull for convex targets.
void normalize_samples(const SphericalGrid& grid, std::vector<double>& rho, bool hull) {
    if (hull) rho = hull_radial_values(grid, rho);
    auto h = point_cloud_support(grid, rho);
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0)) throw InvalidBodyError("candidate support vanishes at node " + std::to_string(i));
        h[i] = 1.0 / h[i];
    }
    const double lambda = raw::vrad(grid, h);
    for (auto& v : rho) v *= lambda;
}

std::vector<double> log_of(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::log(v[i]);
    return out;
}

// Even functions on the sphere, orthonormal in the grid's weighted inner
// product and orthogonal to constants (scaling is normalized away anyway).
Mat smooth_basis(const SphericalGrid& grid, int harmonics) {
    const int n = grid.dimension();
    const auto count = static_cast<Eigen::Index>(grid.size());
    std::vector<Vec> raw_cols;
    if (n == 2) {
        for (int k = 1; k <= harmonics; ++k) {
            Vec c(count), s(count);
            for (Eigen::Index i = 0; i < count; ++i) {
                const auto u = grid.node(static_cast<std::size_t>(i));
                const double t = std::atan2(u[1], u[0]);
                c[i] = std::cos(2.0 * k * t);
                s[i] = std::sin(2.0 * k * t);
            }
            raw_cols.push_back(c);
            raw_cols.push_back(s);
        }
    } else {
        // Monomials of total degree 2 and 4.
        for (int degree : {2, 4}) {
            std::vector<int> e(static_cast<std::size_t>(n), 0);
            std::function<void(int, int)> rec = [&](int pos, int left) {
                if (pos == n - 1) {
                    e[static_cast<std::size_t>(pos)] = left;
                    Vec col(count);
                    for (Eigen::Index i = 0; i < count; ++i) {
                        const auto u = grid.node(static_cast<std::size_t>(i));
                        double v = 1.0;
                        for (int d = 0; d < n; ++d) v *= std::pow(u[static_cast<std::size_t>(d)], e[static_cast<std::size_t>(d)]);
                        col[i] = v;
                    }
                    raw_cols.push_back(col);
                    return;
                }
                for (int a = left; a >= 0; --a) {
                    e[static_cast<std::size_t>(pos)] = a;
                    rec(pos + 1, left - a);
                }
            };
            rec(0, degree);
        }
    }
    Vec w(count);
    for (Eigen::Index i = 0; i < count; ++i) w[i] = grid.weight(static_cast<std::size_t>(i));
    const double total = w.sum();
    auto inner = [&](const Vec& a, const Vec& b) { return (w.array() * a.array() * b.array()).sum() / total; };
    std::vector<Vec> ortho{Vec::Ones(count)};
    std::vector<Vec> kept;
    for (Vec col : raw_cols) {
        for (const auto& q : ortho) col -= inner(col, q) * q;
        for (const auto& q : ortho) col -= inner(col, q) * q;
        const double norm = std::sqrt(inner(col, col));
        if (norm < 1e-8) continue;
        col /= norm;
        ortho.push_back(col);
        kept.push_back(col);
        if (kept.size() == 64) break;
    }
    Mat basis(count, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = kept[j];
    return basis;
}

// Shared evaluation counter, trace and objective for one estimate.
class Search {
public:
    Search(GridPtr grid, bool hull, Sense sense, ValueFn value, int budget)
        : grid_(std::move(grid)), hull_(hull), sign_(sense == Sense::Inf ? 1.0 : -1.0), value_(std::move(value)),
          budget_(budget) {}

    bool exhausted() const { return evals_ >= budget_; }
    int evaluations() const { return evals_; }
    int budget() const { return budget_; }
    const SphericalGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::vector<TracePoint>& trace() { return trace_; }
    double sign() const { return sign_; }
    bool successful() const { return successes_ > 0; }

    // Sign-adjusted score of candidates given by log-radii; +inf on failure.
    double score(const Samples& logs, Samples* realized = nullptr) {
        ++evals_;
        Samples rho(logs.size());
        try {
            for (std::size_t s = 0; s < logs.size(); ++s) {
                rho[s].resize(logs[s].size());
                for (std::size_t i = 0; i < logs[s].size(); ++i) rho[s][i] = std::exp(logs[s][i]);
                normalize_samples(*grid_, rho[s], hull_);
            }
            const double v = value_(rho);
            if (!std::isfinite(v)) return kInf;
            ++successes_;
            if (realized) *realized = std::move(rho);
            return sign_ * v;
        } catch (const Error&) {
            return kInf;
        }
    }

    // Counts an evaluation made outside score(), e.g. an analytic ellipsoid.
    void tick(bool ok) {
        ++evals_;
        if (ok) ++successes_;
    }

    void record(double score, double step, int restart) {
        trace_.push_back({evals_, sign_ * score, step, restart});
    }

private:
    GridPtr grid_;
    bool hull_;
    double sign_;
    ValueFn value_;
    int budget_;
    int evals_ = 0;
    int successes_ = 0;
    std::vector<TracePoint> trace_;
};

struct PatternOutcome {
    std::vector<double> x;
    double f = kInf;
    double step = 0.0;
};

// Compass search with step halving. Stops when the step drops below
// min_step or when `limit` evaluations of the shared counter are reached.
PatternOutcome pattern_search(Search& search, const std::function<double(const std::vector<double>&)>& f,
                              std::vector<double> x, double step, double min_step, int limit, int restart) {
    PatternOutcome out;
    out.f = f(x);
    search.record(out.f, step, restart);
    auto stop = [&] { return search.exhausted() || search.evaluations() >= limit; };
    while (step >= min_step && !stop()) {
        bool improved = false;
        for (std::size_t i = 0; i < x.size() && !stop(); ++i) {
            for (double dir : {1.0, -1.0}) {
                if (stop()) break;
                x[i] += dir * step;
                const double v = f(x);
                if (v < out.f) {
                    out.f = v;
                    improved = true;
                    search.record(v, step, restart);
                    break;
                }
                x[i] -= dir * step;
            }
        }
        if (!improved && !stop()) step *= 0.5;
    }
    out.x = std::move(x);
    out.step = step;
    return out;
}

// ------------------------------------------------------------ ellipsoids

int sym_params(int n) { return n * (n + 1) / 2 - 1; }

Mat sym_from_params(int n, const std::vector<double>& x) {
    Mat s = Mat::Zero(n, n);
    std::size_t k = 0;
    double trace = 0.0;
    for (int d = 0; d + 1 < n; ++d) {
        s(d, d) = x[k++];
        trace += s(d, d);
    }
    s(n - 1, n - 1) = -trace;
    for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) s(r, c) = s(c, r) = x[k++];
    return s;
}

std::vector<double> params_from_sym(const Mat& s) {
    const int n = static_cast<int>(s.rows());
    std::vector<double> x;
    const double mean = s.trace() / n;
    for (int d = 0; d + 1 < n; ++d) x.push_back(s(d, d) - mean);
    for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) x.push_back(s(r, c));
    return x;
}

Mat sym_function(const Mat& s, double (*fn)(double)) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(s);
    Vec d = eig.eigenvalues();
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = fn(d[i]);
    return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

double neg_exp(double v) { return std::exp(-v); }
double pos_exp(double v) { return std::exp(v); }
double safe_log(double v) { return std::log(std::max(v, 1e-300)); }

std::vector<double> ellipsoid_rho(const SphericalGrid& grid, const Mat& s) {
    const Mat inv = sym_function(s, neg_exp);
    const int n = grid.dimension();
    std::vector<double> rho(grid.size());
    Vec u(n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto node = grid.node(i);
        for (int d = 0; d < n; ++d) u[d] = node[static_cast<std::size_t>(d)];
        rho[i] = 1.0 / (inv * u).norm();
    }
    return rho;
}

// Traceless half-log of the second moment of K, exact for ellipsoids.
std::vector<double> moment_start(const SphericalGrid& grid, const std::vector<double>& rho_k) {
    const int n = grid.dimension();
    Mat m = Mat::Zero(n, n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto u = grid.node(i);
        const double w = grid.weight(i) * std::pow(rho_k[i], n + 2);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) += w * u[static_cast<std::size_t>(r)] * u[static_cast<std::size_t>(c)];
    }
    return params_from_sym(0.5 * sym_function(m, safe_log));
}

struct EllipsoidFit {
    Mat s;
    double value = 0.0;  // natural sign
    bool converged = false;
    std::vector<double> start_values;
    double step = 0.0;
};

// Pattern search over exp(S) B for a per-sample value function of one slot.
EllipsoidFit fit_ellipsoid(Search& search, const std::vector<double>& rho_k, const std::function<double(const std::vector<double>&)>& value,
                           int limit, int restart) {
    const auto& grid = search.grid();
    const int n = grid.dimension();
    auto f = [&](const std::vector<double>& x) -> double {
        if (search.exhausted()) return kInf;
        try {
            const auto rho = ellipsoid_rho(grid, sym_from_params(n, x));
            const double v = value(rho);
            search.tick(std::isfinite(v));
            return std::isfinite(v) ? search.sign() * v : kInf;
        } catch (const Error&) {
            search.tick(false);
            return kInf;
        }
    };
    const std::vector<std::vector<double>> starts{std::vector<double>(static_cast<std::size_t>(sym_params(n)), 0.0),
                                                  moment_start(grid, rho_k)};
    EllipsoidFit fit;
    fit.value = kInf;
    PatternOutcome best;
    const int per = std::max(1, (limit - search.evaluations()) / static_cast<int>(starts.size()));
    for (std::size_t r = 0; r < starts.size(); ++r) {
        const int cap = r + 1 == starts.size() ? limit : search.evaluations() + per;
        auto out = pattern_search(search, f, starts[r], 0.3, 1e-7, cap, restart);
        fit.start_values.push_back(search.sign() * out.f);
        if (r == 0 || out.f < best.f) best = out;
    }
    fit.s = sym_from_params(n, best.x);
    fit.value = search.sign() * best.f;
    fit.step = best.step;
    const double a = fit.start_values[0], b = fit.start_values[1];
    fit.converged = best.step < 1e-6 && std::abs(a - b) <= 1e-3 * std::max(std::abs(a), std::abs(b));
    return fit;
}

// --------------------------------------------------------------- engine

struct Start {
    std::vector<std::vector<double>> logs;  // one base log-radius array per slot
};

struct EngineResult {
    double score = kInf;
    Samples best;
    double step = 0.0;
    std::vector<double> restart_values;
    bool agree = false;
    bool any = false;
};

// Stage A (smooth basis on every start) then, on circle grids, stage B (node
// log-radii of the best candidate).
EngineResult run_engine(Search& search, const std::vector<Start>& starts, const SearchOptions& opt) {
    const auto& grid = search.grid();
    const Mat basis = smooth_basis(grid, opt.harmonics);
    const auto p = static_cast<std::size_t>(basis.cols());
    const std::size_t slots = starts.front().logs.size();
    const std::size_t count = grid.size();
    const bool stage_b = opt.refine_nodes && grid.dimension() == 2 && grid.angularly_sorted() && count % 2 == 0;

    EngineResult res;
    const int remaining = search.budget() - search.evaluations();
    const int stage_a_total = stage_b ? remaining / 2 : remaining;
    const int per_start = std::max(1, stage_a_total / static_cast<int>(starts.size()));

    double best_score = kInf;
    Samples best_logs;
    double best_step = 0.0;
    for (std::size_t r = 0; r < starts.size(); ++r) {
        const auto& base = starts[r].logs;
        auto f = [&](const std::vector<double>& x) {
            Samples logs = base;
            for (std::size_t s = 0; s < slots; ++s) {
                Eigen::Map<const Vec> c(x.data() + s * p, static_cast<Eigen::Index>(p));
                const Vec add = basis * c;
                for (std::size_t i = 0; i < count; ++i) logs[s][i] += add[static_cast<Eigen::Index>(i)];
            }
            return search.score(logs);
        };
        const int cap = search.evaluations() + per_start;
        auto out = pattern_search(search, f, std::vector<double>(slots * p, 0.0), opt.initial_step, opt.min_step, cap,
                                  static_cast<int>(r));
        res.restart_values.push_back(search.sign() * out.f);
        if (out.f < best_score) {
            best_score = out.f;
            best_step = out.step;
            best_logs = base;
            for (std::size_t s = 0; s < slots; ++s) {
                Eigen::Map<const Vec> c(out.x.data() + s * p, static_cast<Eigen::Index>(p));
                const Vec add = basis * c;
                for (std::size_t i = 0; i < count; ++i) best_logs[s][i] += add[static_cast<Eigen::Index>(i)];
            }
        }
    }
    if (!std::isfinite(best_score)) return res;

    // Stage A values sorted by quality decide agreement between restarts.
    std::vector<double> sorted;
    for (double v : res.restart_values)
        if (std::isfinite(v)) sorted.push_back(search.sign() * v);
    std::sort(sorted.begin(), sorted.end());
    res.agree = sorted.size() >= 2 && std::abs(sorted[1] - sorted[0]) <= 1e-3 * std::abs(sorted[0]);

    if (stage_b && !search.exhausted()) {
        // Base from the realized (hulled, normalized) best candidate.
        Samples realized;
        search.score(best_logs, &realized);
        Samples base(slots);
        for (std::size_t s = 0; s < slots; ++s) base[s] = log_of(realized[s]);
        const std::size_t half = count / 2;
        auto f = [&](const std::vector<double>& x) {
            Samples logs = base;
            for (std::size_t s = 0; s < slots; ++s)
                for (std::size_t j = 0; j < half; ++j) {
                    logs[s][j] += x[s * half + j];
                    logs[s][j + half] += x[s * half + j];
                }
            return search.score(logs);
        };
        auto out = pattern_search(search, f, std::vector<double>(slots * half, 0.0), 0.02, opt.min_step,
                                  search.budget(), static_cast<int>(starts.size()));
        if (out.f <= best_score) {
            best_score = out.f;
            best_step = out.step;
            best_logs = base;
            for (std::size_t s = 0; s < slots; ++s)
                for (std::size_t j = 0; j < half; ++j) {
                    best_logs[s][j] += out.x[s * half + j];
                    best_logs[s][j + half] += out.x[s * half + j];
                }
        }
    }
    Samples realized;
    res.score = search.score(best_logs, &realized);
    res.best = std::move(realized);
    res.step = best_step;
    res.any = std::isfinite(res.score);
    return res;
}

std::vector<double> random_start(int n, const GridPtr& grid, std::uint64_t seed) {
    return log_of(radial_values(make_random_star(n, seed, 0.3, true), grid));
}

void check_options(const SearchOptions& opt) {
    if (opt.budget < 1) throw ConfigError("budget must be positive");
    if (opt.restarts < 1) throw ConfigError("restarts must be at least 1");
    if (opt.harmonics < 1) throw ConfigError("harmonics must be at least 1");
    if (!(opt.initial_step > 0.0) || !(opt.min_step > 0.0)) throw ConfigError("pattern steps must be positive");
}

StarBody candidate_body(const GridPtr& grid, std::vector<double> rho, Target target) {
    return StarBody::grid_sampled(grid, std::move(rho), Flag::Yes, target == Target::Geominimal ? Flag::Yes : Flag::Unknown);
}

BoundMarkers volume_markers(const OrliczFunction& phi, const StarBody& k, const GridPtr& grid,
                            const std::vector<double>& rho_k) {
    const int n = grid->dimension();
    BoundMarkers m;
    const std::vector<double> ones(grid->size(), 1.0);
    try {
        m.s_marker = n * raw::dual_mixed_volume(phi, *grid, rho_k, ones);
    } catch (const NumericalDomainError&) {
        m.s_marker = std::numeric_limits<double>::quiet_NaN();
    }
    const auto c = phi.classify(n);
    const double vol = raw::volume(*grid, rho_k);
    const double inner = phi(1.0 / raw::vrad(*grid, rho_k)) * n * vol;
    std::optional<double> outer;
    if (k.symmetry() == Flag::Yes) {
        try {
            outer = phi(vrad(polar(k, grid), grid)) * n * vol;
        } catch (const Error&) {
        }
    }
    if (c.phi) {
        m.volume_upper = outer;
        if (c.phi1) m.volume_lower = inner;
    } else if (c.psi) {
        m.volume_upper = inner;
        m.volume_lower = outer;
    }
    return m;
}

}  // namespace

// --------------------------------------------------------------- public

StarBody normalize_polar_volume(const StarBody& l, const GridPtr& grid) {
    return l.scaled(vrad(polar(l, grid), grid));
}

double objective(const ExtremalProblem& problem, const StarBody& l) {
    const auto& g = problem.grid;
    const StarBody normalized = normalize_polar_volume(l, g);
    return g->dimension() * raw::dual_mixed_volume(problem.phi, *g, radial_values(problem.k, g), radial_values(normalized, g));
}

ExtremalResult estimate_ellipsoid_restricted(const ExtremalProblem& problem) {
    const auto& grid = problem.grid;
    const int n = grid->dimension();
    if (problem.k.dimension() != n) throw ConfigError("body and grid dimensions differ");
    check_options(problem.options);
    require_sense(problem.phi, n, problem.sense);
    const auto rho_k = radial_values(problem.k, grid);

    ExtremalResult res;
    res.markers = volume_markers(problem.phi, problem.k, grid, rho_k);
    res.note = "ellipsoid-restricted; " + std::string(kBiasNote);
    if (problem.phi.is_constant()) {
        res.value = *problem.phi.constant_value() * n * raw::volume(*grid, rho_k);
        res.candidates = {StarBody::ball(n)};
        res.converged = true;
        res.markers.ellipsoid = res.value;
        return res;
    }
    Search search(grid, false, problem.sense, {}, problem.options.budget);
    auto value = [&](const std::vector<double>& rho) { return n * raw::dual_mixed_volume(problem.phi, *grid, rho_k, rho); };
    const auto fit = fit_ellipsoid(search, rho_k, value, problem.options.budget, 0);
    if (!std::isfinite(fit.value)) throw OptimizationError("no successful evaluation within the budget");
    res.value = fit.value;
    res.candidates = {StarBody::ellipsoid(sym_function(fit.s, pos_exp))};
    res.trace = std::move(search.trace());
    res.evaluations = search.evaluations();
    res.final_step = fit.step;
    res.restart_values = fit.start_values;
    res.converged = fit.converged;
    res.markers.ellipsoid = fit.value;
    return res;
}

ExtremalResult estimate(const ExtremalProblem& problem) {
    const auto& grid = problem.grid;
    const int n = grid->dimension();
    if (problem.k.dimension() != n) throw ConfigError("body and grid dimensions differ");
    const auto& opt = problem.options;
    check_options(opt);
    require_sense(problem.phi, n, problem.sense);
    const auto rho_k = radial_values(problem.k, grid);

    ExtremalResult res;
    res.markers = volume_markers(problem.phi, problem.k, grid, rho_k);
    res.note = std::string(kBiasNote);
    if (problem.phi.is_constant()) {
        res.value = *problem.phi.constant_value() * n * raw::volume(*grid, rho_k);
        res.candidates = {StarBody::ball(n)};
        res.converged = true;
        return res;
    }

    const bool hull = problem.target == Target::Geominimal;
    Search search(grid, hull, problem.sense, [&](const Samples& rho) {
        return n * raw::dual_mixed_volume(problem.phi, *grid, rho_k, rho[0]);
    }, opt.budget);

    // Ellipsoid stage: marker and warm start.
    auto value = [&](const std::vector<double>& rho) { return n * raw::dual_mixed_volume(problem.phi, *grid, rho_k, rho); };
    const int ell_limit = std::max(1, std::min(2000, opt.budget / 10));
    const auto fit = fit_ellipsoid(search, rho_k, value, ell_limit, -1);
    if (std::isfinite(fit.value)) res.markers.ellipsoid = fit.value;

    std::vector<Start> starts;
    starts.push_back({{std::vector<double>(grid->size(), 0.0)}});
    if (opt.restarts >= 2) starts.push_back({{log_of(rho_k)}});
    if (opt.restarts >= 3) starts.push_back({{log_of(ellipsoid_rho(*grid, fit.s))}});
    for (int r = 3; r < opt.restarts; ++r)
        starts.push_back({{random_start(n, grid, mix_seed(opt.seed, static_cast<std::uint64_t>(r)))}});
    for (const auto& extra : opt.extra_starts) starts.push_back({{log_of(radial_values(extra, grid))}});

    const auto out = run_engine(search, starts, opt);
    if (!out.any) throw OptimizationError("no successful evaluation within the budget of " + std::to_string(opt.budget));
    res.value = search.sign() * out.score;
    res.candidates = {candidate_body(grid, out.best[0], problem.target)};
    res.trace = std::move(search.trace());
    res.evaluations = search.evaluations();
    res.final_step = out.step;
    res.restart_values = out.restart_values;
    res.converged = out.step < 1e-4 && out.agree;
    return res;
}

ExtremalResult estimate_ith_mixed(const OrliczFunction& phi1, const OrliczFunction& phi2, double i,
                                  const StarBody& k, const StarBody& l, Target target, const GridPtr& grid,
                                  const SearchOptions& opt) {
    const int n = grid->dimension();
    if (!std::isfinite(i)) throw ConfigError("index i must be finite");
    if (k.dimension() != n || l.dimension() != n) throw ConfigError("body and grid dimensions differ");
    check_options(opt);
    const auto c1 = phi1.classify(n), c2 = phi2.classify(n);
    Sense sense;
    if (c1.phi && c2.phi) sense = Sense::Inf;
    else if (c1.psi && c2.psi) sense = Sense::Sup;
    else throw ContractError("'" + phi1.label() + "' and '" + phi2.label() + "' are not in a common class");

    const auto rho_k = radial_values(k, grid);
    const auto rho_l = radial_values(l, grid);
    auto value = [&](const Samples& q) {
        std::vector<double> a(grid->size()), b(grid->size());
        raw::dual_mixed_integrand(phi1, *grid, rho_k, q[0], a);
        raw::dual_mixed_integrand(phi2, *grid, rho_l, q[1], b);
        return n * raw::ith_from_terms(*grid, i, a, b);
    };

    ExtremalResult res;
    res.note = std::string(kBiasNote);
    const std::vector<double> ones(grid->size(), 1.0);
    res.markers.s_marker = value({ones, ones});
    if (phi1.is_constant() && phi2.is_constant()) {
        res.value = res.markers.s_marker;
        res.candidates = {StarBody::ball(n), StarBody::ball(n)};
        res.converged = true;
        return res;
    }

    const bool hull = target == Target::Geominimal;
    Search search(grid, hull, sense, value, opt.budget);
    const int ell_limit = std::max(2, std::min(2000, opt.budget / 10));
    auto single = [&](const OrliczFunction& phi, const std::vector<double>& rho) {
        return [&phi, &rho, grid, n](const std::vector<double>& q) { return n * raw::dual_mixed_volume(phi, *grid, rho, q); };
    };
    const auto fit1 = fit_ellipsoid(search, rho_k, single(phi1, rho_k), ell_limit / 2, -1);
    const auto fit2 = fit_ellipsoid(search, rho_l, single(phi2, rho_l), ell_limit, -1);

    std::vector<Start> starts;
    starts.push_back({{std::vector<double>(grid->size(), 0.0), std::vector<double>(grid->size(), 0.0)}});
    if (opt.restarts >= 2) starts.push_back({{log_of(rho_k), log_of(rho_l)}});
    if (opt.restarts >= 3)
        starts.push_back({{log_of(ellipsoid_rho(*grid, fit1.s)), log_of(ellipsoid_rho(*grid, fit2.s))}});
    for (int r = 3; r < opt.restarts; ++r) {
        const auto s = mix_seed(opt.seed, static_cast<std::uint64_t>(r));
        starts.push_back({{random_start(n, grid, s), random_start(n, grid, mix_seed(s, 1))}});
    }
    if (opt.extra_starts.size() % 2 != 0) throw ConfigError("i-th mixed extra starts come in (Q1, Q2) pairs");
    for (std::size_t e = 0; e < opt.extra_starts.size(); e += 2)
        starts.push_back({{log_of(radial_values(opt.extra_starts[e], grid)),
                           log_of(radial_values(opt.extra_starts[e + 1], grid))}});
    SearchOptions smooth = opt;
    smooth.refine_nodes = false;
    const auto out = run_engine(search, starts, smooth);
    if (!out.any) throw OptimizationError("no successful evaluation within the budget of " + std::to_string(opt.budget));
    res.value = search.sign() * out.score;
    res.candidates = {candidate_body(grid, out.best[0], target), candidate_body(grid, out.best[1], target)};
    res.trace = std::move(search.trace());
    res.evaluations = search.evaluations();
    res.final_step = out.step;
    res.restart_values = out.restart_values;
    res.converged = out.step < 1e-4 && out.agree;
    return res;
}

ExtremalResult estimate_multi(const std::vector<OrliczFunction>& phis, const std::vector<StarBody>& ks, Target target,
                              const GridPtr& grid, MultiMode mode, const SearchOptions& opt) {
    const int n = grid->dimension();
    if (n > 3) throw UnsupportedError("multi-body estimates are implemented for n = 2 and n = 3 only");
    const auto un = static_cast<std::size_t>(n);
    if (phis.size() != un || ks.size() != un)
        throw ConfigError("multi-body estimate needs exactly n functions and n bodies");
    check_options(opt);
    if (opt.extra_starts.size() % un != 0) throw ConfigError("multi-body extra starts come in groups of n bodies");
    bool all_phi = true, all_psi = true;
    for (const auto& phi : phis) {
        const auto c = phi.classify(n);
        all_phi = all_phi && c.phi;
        all_psi = all_psi && c.psi;
    }
    if (!all_phi && !all_psi) throw ContractError("multi-body functions are not in a common class");
    const Sense sense = all_phi ? Sense::Inf : Sense::Sup;

    // Distinct (phi, K) pairs share one candidate.
    std::map<std::string, std::size_t> index;
    std::vector<std::size_t> slot_of(un);
    std::vector<std::size_t> first_of;
    for (std::size_t j = 0; j < un; ++j) {
        if (ks[j].dimension() != n) throw ConfigError("body and grid dimensions differ");
        const std::string key = phis[j].label() + "|" + ks[j].digest();
        auto [it, inserted] = index.emplace(key, first_of.size());
        if (inserted) first_of.push_back(j);
        slot_of[j] = it->second;
    }
    std::vector<std::vector<double>> rho_k(un);
    for (std::size_t j = 0; j < un; ++j) rho_k[j] = radial_values(ks[j], grid);
    auto value = [&](const Samples& q) {
        std::vector<std::vector<double>> terms(un, std::vector<double>(grid->size()));
        for (std::size_t j = 0; j < un; ++j) raw::dual_mixed_integrand(phis[j], *grid, rho_k[j], q[slot_of[j]], terms[j]);
        return n * raw::multi_from_terms(*grid, terms);
    };

    ExtremalResult res;
    res.note = to_string(mode) + "; " + kBiasNote;
    const std::vector<double> ones(grid->size(), 1.0);
    res.markers.s_marker = value(Samples(first_of.size(), ones));
    bool all_constant = true;
    for (const auto& phi : phis) all_constant = all_constant && phi.is_constant();
    if (all_constant) {
        res.value = res.markers.s_marker;
        res.candidates.assign(un, StarBody::ball(n));
        res.converged = true;
        return res;
    }

    const bool hull = target == Target::Geominimal;
    auto expand = [&](const Samples& best) {
        std::vector<StarBody> out;
        for (std::size_t j = 0; j < un; ++j) out.push_back(candidate_body(grid, best[slot_of[j]], target));
        return out;
    };

    if (mode == MultiMode::PerSlot) {
        SearchOptions each = opt;
        each.budget = std::max(1, opt.budget / static_cast<int>(first_of.size()));
        Samples best;
        bool converged = true;
        for (std::size_t s = 0; s < first_of.size(); ++s) {
            const std::size_t j = first_of[s];
            each.extra_starts.clear();
            for (std::size_t e = j; e < opt.extra_starts.size(); e += un) each.extra_starts.push_back(opt.extra_starts[e]);
            const auto single = estimate(ExtremalProblem(target, sense, phis[j], ks[j], grid, each));
            best.push_back(radial_values(single.candidate(), grid));
            converged = converged && single.converged;
            res.evaluations += single.evaluations;
            res.restart_values.push_back(single.value);
            for (auto t : single.trace) {
                t.restart = static_cast<int>(s);
                res.trace.push_back(t);
            }
            res.final_step = std::max(res.final_step, single.final_step);
        }
        res.value = value(best);
        res.candidates = expand(best);
        res.converged = converged;
        return res;
    }

    Search search(grid, hull, sense, value, opt.budget);
    const int ell_limit = std::max(1, std::min(2000, opt.budget / 10));
    std::vector<std::vector<double>> ell(first_of.size());
    for (std::size_t s = 0; s < first_of.size(); ++s) {
        const std::size_t j = first_of[s];
        auto single = [&, j](const std::vector<double>& q) { return n * raw::dual_mixed_volume(phis[j], *grid, rho_k[j], q); };
        const int cap = search.evaluations() + ell_limit / static_cast<int>(first_of.size());
        const auto fit = fit_ellipsoid(search, rho_k[j], single, cap, -1);
        ell[s] = log_of(ellipsoid_rho(*grid, fit.s));
    }
    std::vector<Start> starts;
    const std::size_t m = first_of.size();
    starts.push_back({Samples(m, std::vector<double>(grid->size(), 0.0))});
    if (opt.restarts >= 2) {
        Start s;
        for (std::size_t t = 0; t < m; ++t) s.logs.push_back(log_of(rho_k[first_of[t]]));
        starts.push_back(s);
    }
    if (opt.restarts >= 3) starts.push_back({ell});
    for (int r = 3; r < opt.restarts; ++r) {
        Start s;
        for (std::size_t t = 0; t < m; ++t)
            s.logs.push_back(random_start(n, grid, mix_seed(opt.seed, static_cast<std::uint64_t>(r) * 16 + t)));
        starts.push_back(s);
    }
    for (std::size_t e = 0; e < opt.extra_starts.size(); e += un) {
        Start s;
        for (std::size_t t = 0; t < m; ++t) s.logs.push_back(log_of(radial_values(opt.extra_starts[e + first_of[t]], grid)));
        starts.push_back(s);
    }
    SearchOptions smooth = opt;
    smooth.refine_nodes = false;
    const auto out = run_engine(search, starts, smooth);
    if (!out.any) throw OptimizationError("no successful evaluation within the budget of " + std::to_string(opt.budget));
    res.value = search.sign() * out.score;
    res.candidates = expand(out.best);
    res.trace = std::move(search.trace());
    res.evaluations = search.evaluations();
    res.final_step = out.step;
    res.restart_values = out.restart_values;
    res.converged = out.step < 1e-4 && out.agree;
    return res;
}

}  // namespace dorlicz
