// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dorlicz/bodies.hpp"
#include "dorlicz/digest.hpp"
#include "dorlicz/extremal.hpp"
#include "dorlicz/functionals.hpp"
#include "dorlicz/verify.hpp"

using namespace dorlicz;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Tracks the worst case of a criterion and the first few violations.
struct Tally {
    bool pass = true;
    double worst = 0.0;
    std::vector<std::string> notes;
    void fail(const std::string& what) {
        pass = false;
        if (notes.size() < 5) notes.push_back(what);
    }
    std::string notes_text() const {
        std::string s;
        for (const auto& n : notes) s += "; " + n;
        return s;
    }
};

std::string fmt(double x, int digits = 3) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

StarBody rotated_ellipse(double a, double b, double angle) {
    Mat r(2, 2), d = Mat::Zero(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    d(0, 0) = a;
    d(1, 1) = b;
    return StarBody::ellipsoid(r * d);
}

// ------------------------------------------------------------ 1

Outcome quadrature() {
    Outcome o;
    struct Case {
        int n, resolution;
        GridScheme scheme;
        double tol;
    };
    for (const Case& c : {Case{2, 512, GridScheme::UniformAngle, 1e-4}, Case{3, 20000, GridScheme::Fibonacci, 1e-2}}) {
        const auto t0 = Clock::now();
        const GridPtr grid = build_grid(c.n, c.resolution, c.scheme);
        const double v = volume(StarBody::ball(c.n), grid).value;
        const double dt = seconds_since(t0);
        const double err = rel(v, unit_ball_volume(c.n));
        o.pass = o.pass && err <= c.tol && dt < 1.0;
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(c.n) + " rel err " + fmt(err) +
                    " (tol " + fmt(c.tol) + ", " + fmt(dt) + " s)";
    }
    return o;
}

// ------------------------------------------------------------ 2

Outcome dilate_identity() {
    // 8192 nodes keep the square's corner quadrature error below the 1e-6
    // target; the closed-form volumes are the reference.
    const auto t0 = Clock::now();
    const GridPtr grid = build_grid(2, 8192, GridScheme::UniformAngle);
    const std::vector<std::pair<StarBody, double>> bodies{{StarBody::ball(2, 1.3), M_PI * 1.3 * 1.3},
                                                         {rotated_ellipse(2.0, 0.7, 0.4), M_PI * 2.0 * 0.7},
                                                         {StarBody::cube(2), 4.0}};
    Tally t;
    for (const auto& [k, vol] : bodies)
        for (double p : {-1.0, 0.5, 3.0})
            for (double lambda : {0.5, 1.0, 2.0}) {
                const auto phi = OrliczFunction::power(p);
                const double v = dual_mixed_volume(phi, k, k.scaled(lambda), grid).value;
                const double err = rel(v, phi(lambda) * vol);
                t.worst = std::max(t.worst, err);
                if (err > 1e-6) t.fail(k.descriptor() + " p=" + fmt(p) + " lambda=" + fmt(lambda));
            }
    const double dt = seconds_since(t0);
    if (dt >= 1.0) t.fail("runtime " + fmt(dt) + " s");
    return {t.pass, "27 cases, worst rel err " + fmt(t.worst) + ", " + fmt(dt) + " s" + t.notes_text()};
}

// ------------------------------------------------------------ 3

Outcome homogeneity() {
    Tally t;
    int cases = 0;
    for (int n : {2, 3}) {
        const GridPtr grid = n == 2 ? build_grid(2, 512, GridScheme::UniformAngle)
                                    : build_grid(3, 20000, GridScheme::Fibonacci);
        const std::vector<StarBody> bodies{make_random_star(n, 11, 0.3, true), make_random_star(n, 12, 0.3, false),
                                           make_random_ellipsoid(n, 13, 3.0)};
        for (const auto& k : bodies)
            for (double p : {-1.0, 1.0, n + 1.0})
                for (double lambda : {0.5, 2.0}) {
                    const auto phi = OrliczFunction::power(p);
                    const double a = dual_surface_area(phi, k.scaled(lambda), grid).value;
                    const double b = std::pow(lambda, n - p) * dual_surface_area(phi, k, grid).value;
                    const double err = rel(a, b);
                    t.worst = std::max(t.worst, err);
                    ++cases;
                    if (err > 1e-6) t.fail("n=" + std::to_string(n) + " p=" + fmt(p) + " lambda=" + fmt(lambda));
                }
    }
    return {t.pass, std::to_string(cases) + " cases (n=2 and n=3), worst rel err " + fmt(t.worst) + t.notes_text()};
}

// ------------------------------------------------------------ 4

Outcome ellipsoid_closed_form() {
    const GridPtr grid = build_grid(2, 512, GridScheme::UniformAngle);
    struct E {
        double a, b, angle;
    };
    Tally t;
    double slowest = 0.0;
    int cases = 0;
    for (const E& e : {E{1.0, 1.0, 0.0}, E{1.6, 0.8, 0.3}, E{2.0, 0.5, 1.1}}) {
        const StarBody body = rotated_ellipse(e.a, e.b, e.angle);
        const double vol = M_PI * e.a * e.b;
        const double vr = std::sqrt(vol / M_PI);
        for (double p : {-1.0, 0.5}) {
            const auto phi = OrliczFunction::power(p);
            const double closed = phi(1.0 / vr) * 2.0 * vol;
            for (Target target : {Target::Affine, Target::Geominimal})
                for (bool restricted : {true, false}) {
                    SearchOptions opt;
                    opt.budget = 20000;
                    const ExtremalProblem problem(target, natural_sense(phi, 2), phi, body, grid, opt);
                    const auto t0 = Clock::now();
                    const auto r = restricted ? estimate_ellipsoid_restricted(problem) : estimate(problem);
                    const double dt = seconds_since(t0);
                    slowest = std::max(slowest, dt);
                    const double err = rel(r.value, closed);
                    t.worst = std::max(t.worst, err);
                    ++cases;
                    const std::string what = "axes " + fmt(e.a) + "x" + fmt(e.b) + " p=" + fmt(p) + " " +
                                             to_string(target) + (restricted ? " restricted" : " full");
                    if (err > 1e-2) t.fail(what + " rel err " + fmt(err));
                    if (r.evaluations > 20000) t.fail(what + " used " + std::to_string(r.evaluations) + " evaluations");
                    if (dt >= 60.0) t.fail(what + " took " + fmt(dt) + " s");
                }
        }
    }
    return {t.pass, std::to_string(cases) + " cases up to axis ratio 4, worst rel err " + fmt(t.worst) +
                        ", slowest " + fmt(slowest) + " s" + t.notes_text()};
}

// ------------------------------------------------------------ 5

Outcome bound_sandwich() {
    const auto t0 = Clock::now();
    const GridPtr grid = build_grid(2, 512, GridScheme::UniformAngle);
    const auto phi = OrliczFunction::power(-1.0);
    constexpr double eps = 3e-2;
    Tally t;
    double worst_margin = INFINITY;
    for (int i = 0; i < 50; ++i) {
        const double roughness = 0.4 * (i % 5 + 1) / 5.0;
        const StarBody k = make_random_star(2, mix_seed(5, static_cast<std::uint64_t>(i)), roughness, true);
        const auto rk = radial_values(k, grid);
        const double lower = phi(1.0 / raw::vrad(*grid, rk)) * 2.0 * raw::volume(*grid, rk);
        SearchOptions opt;
        opt.seed = mix_seed(6, static_cast<std::uint64_t>(i));
        const auto g = estimate(ExtremalProblem(Target::Geominimal, Sense::Inf, phi, k, grid, opt));
        opt.extra_starts = g.candidates;
        const auto a = estimate(ExtremalProblem(Target::Affine, Sense::Inf, phi, k, grid, opt));
        const double upper = g.markers.s_marker;
        const double m1 = relative_margin(Relation::Leq, lower, a.value);
        const double m2 = relative_margin(Relation::Leq, a.value, g.value);
        const double m3 = relative_margin(Relation::Leq, g.value, upper);
        worst_margin = std::min({worst_margin, m1, m2, m3});
        if (std::min({m1, m2, m3}) < -eps) t.fail("body " + std::to_string(i) + " margins " + fmt(m1) + ", " + fmt(m2) + ", " + fmt(m3));
    }
    const double dt = seconds_since(t0);
    if (dt >= 1800.0) t.fail("runtime " + fmt(dt) + " s");
    return {t.pass, "50 stars, worst margin " + fmt(worst_margin) + " (tol " + fmt(eps) + "), " + fmt(dt) + " s" +
                        t.notes_text()};
}

// ------------------------------------------------------------ 6-8 share one suite run

Outcome inequality_suite(const std::vector<CheckReport>& reports, double runtime, int trials) {
    Tally t;
    int exact = 0, monitors = 0;
    for (const auto& r : reports) {
        if (r.verdict == "fail") t.fail(r.check_id + " (" + std::to_string(r.failures.size()) + " failing rows, " +
                                        std::to_string(r.erroring_trials) + " erroring trials)");
        if (r.mode == CheckMode::Exact) ++exact;
        if (r.monitor_records > 0) ++monitors;
        if (r.trials != trials) t.fail(r.check_id + " ran " + std::to_string(r.trials) + " trials");
    }
    if (reports.size() != 22) t.fail(std::to_string(reports.size()) + " checks ran");
    for (const char* id : {"santalo-products", "cyclic-powers", "cyclic-powers-multi"}) {
        const auto it = std::find_if(reports.begin(), reports.end(), [&](const CheckReport& r) { return r.check_id == id; });
        if (it == reports.end() || it->monitor_records == 0) t.fail(std::string(id) + " has an empty monitor log");
    }
    if (runtime >= 7200.0) t.fail("runtime " + fmt(runtime) + " s");
    return {t.pass, std::to_string(exact) + " exact checks x " + std::to_string(trials) + " trials, " +
                        std::to_string(monitors) + " with monitor logs, " + fmt(runtime, 4) + " s" + t.notes_text()};
}

// Hoelder-type kernel inequalities on several grids, plus the matching rows
// of the suite.
Outcome exact_discrete(const std::vector<CheckReport>& reports) {
    Tally t;
    double worst = INFINITY;
    int rows = 0;
    auto record = [&](const std::string& what, double margin) {
        ++rows;
        worst = std::min(worst, margin);
        if (!(margin >= -1e-12)) t.fail(what + " margin " + fmt(margin));
    };
    const std::vector<GridPtr> grids{build_grid(2, 64, GridScheme::UniformAngle),
                                     build_grid(2, 512, GridScheme::UniformAngle),
                                     build_grid(2, 4096, GridScheme::UniformAngle),
                                     build_grid(3, 2000, GridScheme::Fibonacci),
                                     build_grid(3, 3000, GridScheme::MonteCarlo, 17)};
    const std::vector<std::array<double, 3>> triples{{-2, -1, 1}, {0.5, 1, 1.5}, {1, 3, 4}, {-1, 0.5, 1}, {-3, 2, 5}};
    for (const auto& grid : grids) {
        const int n = grid->dimension();
        const std::string g = grid->digest();
        for (int trial = 0; trial < 10; ++trial) {
            auto star = [&](int k) { return radial_values(make_random_star(n, mix_seed(trial, k), 0.4, k % 2 == 0), grid); };
            const auto rk = star(1), rq = star(2);
            for (const auto& [s, r, q] : triples) {
                double v[3];
                const double e[3] = {s, r, q};
                for (int j = 0; j < 3; ++j) v[j] = raw::dual_mixed_volume(OrliczFunction::power(e[j]), *grid, rk, rq);
                const double rhs = std::pow(v[2], (r - s) / (q - s)) * std::pow(v[0], (q - r) / (q - s));
                record("cyclic kernel on " + g, relative_margin(Relation::Leq, v[1], rhs));
            }
            // Alexander-Fenchel kernel with one function per slot.
            const std::vector<OrliczFunction> phis{OrliczFunction::power(-1.0), OrliczFunction::power(0.5),
                                                   OrliczFunction::expression("log(1+t)")};
            std::vector<std::vector<double>> terms;
            double prod = 1.0;
            for (int j = 0; j < n; ++j) {
                const auto kj = star(10 + j), lj = star(20 + j);
                std::vector<double> term(grid->size());
                raw::dual_mixed_integrand(phis[static_cast<std::size_t>(j)], *grid, kj, lj, term);
                terms.push_back(std::move(term));
                prod *= raw::dual_mixed_volume(phis[static_cast<std::size_t>(j)], *grid, kj, lj);
            }
            record("AF kernel on " + g, relative_margin(Relation::Leq, std::pow(raw::multi_from_terms(*grid, terms), n), prod));
            // Log-convexity in i of the i-th mixed kernel.
            std::vector<double> a(grid->size()), b(grid->size());
            raw::dual_mixed_integrand(OrliczFunction::power(0.5), *grid, star(30), star(31), a);
            raw::dual_mixed_integrand(OrliczFunction::power(1.5), *grid, star(32), star(33), b);
            for (const auto& [i, j, k] : std::vector<std::array<double, 3>>{{0, 1, 2}, {-1, 0.5, 3}, {0.5, 1, 1.5}}) {
                const double vi = raw::ith_from_terms(*grid, i, a, b), vj = raw::ith_from_terms(*grid, j, a, b),
                             vk = raw::ith_from_terms(*grid, k, a, b);
                record("i-th kernel on " + g, relative_margin(Relation::Leq, std::pow(vj, k - i),
                                                             std::pow(vi, k - j) * std::pow(vk, j - i)));
            }
        }
    }
    int suite_rows = 0;
    for (const auto& rep : reports) {
        const bool all_rows = rep.check_id == "cyclic-powers" || rep.check_id == "ith-cyclic";
        if (!all_rows && rep.check_id != "mixed-af") continue;
        for (const auto& r : rep.records) {
            if (r.mode != CheckMode::Exact) continue;
            if (!all_rows && r.label.rfind("kernel", 0) != 0) continue;
            ++suite_rows;
            record(rep.check_id + " trial " + std::to_string(r.trial), r.margin);
        }
    }
    return {t.pass, std::to_string(rows - suite_rows) + " kernel rows on 5 grids and " + std::to_string(suite_rows) +
                        " suite rows, worst margin " + fmt(worst) + t.notes_text()};
}

Outcome affine_invariance(const std::vector<CheckReport>& reports) {
    const GridPtr grid = build_grid(2, 512, GridScheme::UniformAngle);
    std::vector<Mat> maps(3, Mat(2, 2));
    maps[0] << std::sqrt(3.0), 0.0, 0.0, 1.0 / std::sqrt(3.0);
    Mat r(2, 2), d = Mat::Zero(2, 2);
    r << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
    d(0, 0) = 1.5;
    d(1, 1) = 1.0 / 1.5;
    maps[1] = r * d * r.transpose();
    maps[2] << 1.0, 0.8, 0.0, 1.0;
    constexpr double tol = 5e-2;
    Tally t;
    int cases = 0;
    for (int b = 0; b < 3; ++b) {
        const StarBody k = make_random_star(2, mix_seed(21, static_cast<std::uint64_t>(b)), 0.3, true);
        for (double p : {-1.0, 0.5}) {
            const auto phi = OrliczFunction::power(p);
            for (Target target : {Target::Affine, Target::Geominimal}) {
                SearchOptions opt;
                opt.seed = mix_seed(22, static_cast<std::uint64_t>(b));
                const double base = estimate(ExtremalProblem(target, natural_sense(phi, 2), phi, k, grid, opt)).value;
                for (std::size_t m = 0; m < maps.size(); ++m) {
                    const StarBody tk = transform(LinearMap(maps[m]), k);
                    const double v = estimate(ExtremalProblem(target, natural_sense(phi, 2), phi, tk, grid, opt)).value;
                    const double err = rel(v, base);
                    t.worst = std::max(t.worst, err);
                    ++cases;
                    if (err > tol) t.fail(to_string(target) + " p=" + fmt(p) + " map " + std::to_string(m) + " rel " + fmt(err));
                }
            }
        }
    }
    double suite_worst = 0.0;
    for (const auto& rep : reports) {
        if (rep.check_id != "affine-invariance") continue;
        for (const auto& row : rep.records) {
            const double err = std::isfinite(row.margin) ? -row.margin : INFINITY;
            suite_worst = std::max(suite_worst, err);
            if (err > tol) t.fail("suite trial " + std::to_string(row.trial) + " rel " + fmt(err));
        }
    }
    return {t.pass, std::to_string(cases) + " full-budget comparisons, worst rel diff " + fmt(t.worst) +
                        "; suite rows worst " + fmt(suite_worst) + " (tol " + fmt(tol) + ")" + t.notes_text()};
}

// ------------------------------------------------------------ 9

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(const std::string& tool, const fs::path& work) {
    using nlohmann::json;
    const std::vector<std::pair<std::string, json>> configs{
        {"compute", {{"command", "compute"}, {"functional", "dual-surface"}, {"phi", "t^-1"},
                     {"K", {{"kind", "random"}, {"roughness", 0.3}}}}},
        {"estimate", {{"command", "estimate"}, {"phi", "t^0.5"}, {"K", {{"kind", "random"}, {"roughness", 0.3}}},
                      {"estimate", {{"budget", 4000}}}}},
        {"verify", {{"command", "verify"},
                    {"verify", {{"checks", {"ordering-chain", "cyclic-h", "dual-orlicz-minkowski"}}, {"trials", 3}}}}},
        {"sweep", {{"command", "sweep"}, {"functional", "santalo-product"}, {"K", {{"kind", "random"}, {"roughness", 0}}},
                   {"sweep", {{"parameter", "roughness"}, {"values", {0, 0.2, 0.4}}}}}}};
    Tally t;
    int files = 0;
    for (const auto& [name, config] : configs) {
        const fs::path dir = work / name;
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::ofstream(dir / "config.json") << config.dump(2);
        for (const char* run : {"a", "b"}) {
            const std::string cmd = "\"" + tool + "\" --config \"" + (dir / "config.json").string() + "\" --seed 7 --out \"" +
                                    (dir / run).string() + "\" > \"" + (dir / run).string() + ".log\" 2>&1";
            const int status = std::system(cmd.c_str());
            if (status != 0) t.fail(name + " run " + run + " exited with " + std::to_string(status));
        }
        int csvs = 0;
        for (const auto& entry : fs::directory_iterator(dir / "a")) {
            if (entry.path().extension() != ".csv") continue;
            ++csvs;
            ++files;
            const auto other = dir / "b" / entry.path().filename();
            if (!fs::exists(other) || slurp(entry.path()) != slurp(other))
                t.fail(name + "/" + entry.path().filename().string() + " differs");
        }
        if (csvs == 0) t.fail(name + " wrote no CSV");
    }
    return {t.pass, "4 commands run twice, " + std::to_string(files) + " CSVs compared byte for byte" + t.notes_text()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    int trials = 100;
    std::string tool = DORLICZ_TOOL;
    std::string work = (fs::temp_directory_path() / "dorlicz_acceptance").string();
    app.add_option("--only", only, "criteria to run (default: all)")->delimiter(',')->check(CLI::Range(1, 9));
    app.add_option("--trials", trials, "trials per check for the inequality suite")->check(CLI::PositiveNumber);
    app.add_option("--tool", tool, "path of the dorlicz executable");
    app.add_option("--work", work, "scratch directory; the suite CSV and summary land here");
    CLI11_PARSE(app, argc, argv);
    auto wanted = [&](int c) { return only.empty() || std::find(only.begin(), only.end(), c) != only.end(); };
    fs::create_directories(work);

    std::vector<CheckReport> reports;
    double suite_runtime = 0.0;
    if (wanted(6) || wanted(7) || wanted(8)) {
        VerifyOptions opt;
        opt.trials = trials;
        opt.seed = 1;
        std::vector<std::string> ids;
        for (const auto& s : check_registry()) ids.push_back(s.id);
        const auto t0 = Clock::now();
        reports = run_checks(ids, opt);
        suite_runtime = seconds_since(t0);
        std::ofstream csv(fs::path(work) / "suite_trials.csv", std::ios::binary);
        write_trials_csv(csv, reports);
        std::ofstream(fs::path(work) / "suite_summary.json") << summary_json(reports).dump(2) << '\n';
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"quadrature", quadrature},
        {"dilate identity", dilate_identity},
        {"homogeneity", homogeneity},
        {"ellipsoid closed form", ellipsoid_closed_form},
        {"bound sandwich", bound_sandwich},
        {"inequality suite", [&] { return inequality_suite(reports, suite_runtime, trials); }},
        {"exact discrete identities", [&] { return exact_discrete(reports); }},
        {"affine invariance", [&] { return affine_invariance(reports); }},
        {"determinism", [&] { return determinism(tool, fs::path(work) / "determinism"); }},
    };
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!wanted(number)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << "criterion " << number << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
                  << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
