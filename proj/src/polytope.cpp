// Vertex enumeration and facet areas for H-polytopes containing the origin.
// Sizes here are small (tens of facets), so brute-force enumeration of
// n-subsets of facets is adequate.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "dorlicz/bodies.hpp"
#include "dorlicz/error.hpp"

namespace dorlicz {
namespace {

constexpr double kTightTol = 1e-9;

int affine_rank(const std::vector<Vec>& verts, const std::vector<int>& idx) {
    if (idx.size() <= 1) return 0;
    const auto n = verts[idx[0]].size();
    Mat diff(n, static_cast<Eigen::Index>(idx.size() - 1));
    for (std::size_t k = 1; k < idx.size(); ++k) diff.col(static_cast<Eigen::Index>(k - 1)) = verts[idx[k]] - verts[idx[0]];
    Eigen::FullPivLU<Mat> lu(diff);
    lu.setThreshold(1e-9);
    return static_cast<int>(lu.rank());
}

double distance_to_affine_hull(const Vec& point, const std::vector<Vec>& verts, const std::vector<int>& idx) {
    const Vec origin = verts[idx[0]];
    const Vec offset = point - origin;
    if (idx.size() == 1) return offset.norm();
    const auto n = origin.size();
    Mat diff(n, static_cast<Eigen::Index>(idx.size() - 1));
    for (std::size_t k = 1; k < idx.size(); ++k) diff.col(static_cast<Eigen::Index>(k - 1)) = verts[idx[k]] - origin;
    Eigen::ColPivHouseholderQR<Mat> qr(diff);
    qr.setThreshold(1e-9);
    const auto rank = qr.rank();
    const Mat q = qr.householderQ() * Mat::Identity(n, rank);
    const Vec residual = offset - q * (q.transpose() * offset);
    return residual.norm();
}

// d-dimensional volume of the face spanned by vertex indices `face`, by
// pyramid decomposition over its (d-1)-faces.
double face_volume(const std::vector<Vec>& verts, const std::vector<std::vector<int>>& facet_vertices,
                   const std::vector<int>& face, int d) {
    if (d == 0) return 1.0;
    if (d == 1) {
        double best = 0.0;
        for (std::size_t a = 0; a < face.size(); ++a)
            for (std::size_t b = a + 1; b < face.size(); ++b)
                best = std::max(best, (verts[face[a]] - verts[face[b]]).norm());
        return best;
    }
    Vec center = Vec::Zero(verts[face[0]].size());
    for (int v : face) center += verts[v];
    center /= static_cast<double>(face.size());

    std::vector<std::vector<int>> subfaces;
    for (const auto& fv : facet_vertices) {
        std::vector<int> common;
        std::set_intersection(face.begin(), face.end(), fv.begin(), fv.end(), std::back_inserter(common));
        if (static_cast<int>(common.size()) < d || common.size() == face.size()) continue;
        if (affine_rank(verts, common) != d - 1) continue;
        subfaces.push_back(std::move(common));
    }
    std::sort(subfaces.begin(), subfaces.end());
    subfaces.erase(std::unique(subfaces.begin(), subfaces.end()), subfaces.end());
    // Keep maximal sets only.
    std::vector<std::vector<int>> maximal;
    for (std::size_t i = 0; i < subfaces.size(); ++i) {
        bool contained = false;
        for (std::size_t j = 0; j < subfaces.size() && !contained; ++j) {
            if (i == j || subfaces[j].size() <= subfaces[i].size()) continue;
            contained = std::includes(subfaces[j].begin(), subfaces[j].end(), subfaces[i].begin(), subfaces[i].end());
        }
        if (!contained) maximal.push_back(subfaces[i]);
    }
    double total = 0.0;
    for (const auto& sub : maximal)
        total += distance_to_affine_hull(center, verts, sub) * face_volume(verts, facet_vertices, sub, d - 1);
    return total / d;
}

void for_each_subset(int m, int k, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        visit(idx);
        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
        if (pos < 0) return;
        ++idx[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

bool positively_spanning(int n, const std::vector<Facet>& facets) {
    // Every probe direction must leave through some facet.
    std::vector<Vec> probes;
    for (int k = 0; k < n; ++k) {
        probes.push_back(Vec::Unit(n, k));
        probes.push_back(-Vec::Unit(n, k));
    }
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> gauss;
    for (int s = 0; s < 4096; ++s) {
        Vec v(n);
        for (int k = 0; k < n; ++k) v[k] = gauss(rng);
        probes.push_back(v.normalized());
    }
    for (const auto& facet : facets) probes.push_back(-facet.normal);
    for (const auto& u : probes) {
        bool exits = false;
        for (const auto& f : facets)
            if (f.normal.dot(u) > 1e-12) {
                exits = true;
                break;
            }
        if (!exits) return false;
    }
    return true;
}

}  // namespace

std::shared_ptr<const PolytopeData> make_polytope_data(int n, std::vector<Facet> facets) {
    if (static_cast<int>(facets.size()) < n + 1)
        throw InvalidBodyError("a bounded polytope needs at least n + 1 facets");
    for (auto& f : facets) {
        if (f.normal.size() != n) throw ConfigError("facet normal has the wrong dimension");
        const double len = f.normal.norm();
        if (!(len > 0.0) || !std::isfinite(len)) throw InvalidBodyError("facet normal must be nonzero");
        f.normal /= len;
        f.offset /= len;
        if (!(f.offset > 0.0)) throw InvalidBodyError("facet offsets must be positive (origin interior)");
    }
    if (!positively_spanning(n, facets)) throw InvalidBodyError("facets do not bound a polytope");

    auto data = std::make_shared<PolytopeData>();
    data->facets = std::move(facets);
    const auto& fs = data->facets;
    const int m = static_cast<int>(fs.size());

    for_each_subset(m, n, [&](const std::vector<int>& pick) {
        Mat a(n, n);
        Vec b(n);
        for (int r = 0; r < n; ++r) {
            a.row(r) = fs[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].normal.transpose();
            b[r] = fs[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].offset;
        }
        Eigen::FullPivLU<Mat> lu(a);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) return;
        const Vec x = lu.solve(b);
        for (const auto& f : fs)
            if (f.normal.dot(x) > f.offset + kTightTol * (1.0 + std::abs(f.offset))) return;
        for (const auto& v : data->vertices)
            if ((v - x).norm() < 1e-9) return;
        data->vertices.push_back(x);
    });
    if (data->vertices.empty()) throw InvalidBodyError("polytope has no vertices");

    data->facet_vertices.resize(fs.size());
    for (std::size_t j = 0; j < fs.size(); ++j)
        for (std::size_t v = 0; v < data->vertices.size(); ++v)
            if (std::abs(fs[j].normal.dot(data->vertices[v]) - fs[j].offset) < 1e-8 * (1.0 + fs[j].offset))
                data->facet_vertices[j].push_back(static_cast<int>(v));

    data->facet_areas.assign(fs.size(), 0.0);
    double volume = 0.0;
    for (std::size_t j = 0; j < fs.size(); ++j) {
        const auto& fv = data->facet_vertices[j];
        if (static_cast<int>(fv.size()) < n || affine_rank(data->vertices, fv) != n - 1) continue;
        data->facet_areas[j] = face_volume(data->vertices, data->facet_vertices, fv, n - 1);
        volume += fs[j].offset * data->facet_areas[j];
    }
    data->volume = volume / n;
    return data;
}

}  // namespace dorlicz
