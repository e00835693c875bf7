#include "mls/setops.hpp"

#include <algorithm>
#include <cmath>

namespace mls::setops {

using geometry::ManifoldKind;
using geometry::Sym2;

std::size_t GridSubset::count() const {
    std::size_t c = 0;
    for (std::uint8_t m : mask) c += m ? 1 : 0;
    return c;
}

std::vector<std::size_t> GridSubset::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(i);
    return out;
}

std::vector<Vec3> GridSubset::points() const {
    if (!grid) throw domain_error("subset has no grid");
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(grid->points[i]);
    return out;
}

GridSubset level_set(const DensityField& field, double lambda) {
    if (!field.grid) throw domain_error("level_set requires a field bound to a grid");
    if (!(lambda > 0.0)) throw domain_error("level must be positive");
    GridSubset s;
    s.grid = field.grid;
    s.mask.resize(field.values.size());
    for (std::size_t i = 0; i < field.values.size(); ++i)
        s.mask[i] = field.values[i] >= lambda ? 1 : 0;
    return s;
}

GridSubset boundary_of(const GridSubset& subset) {
    const EvaluationGrid* g = subset.grid;
    if (!g) throw domain_error("boundary_of requires a subset bound to a grid");
    if (subset.mask.size() != g->size()) throw domain_error("mask length does not match the grid");
    if (g->adjacency.size() != g->size()) throw domain_error("grid adjacency unavailable");
    GridSubset b;
    b.grid = g;
    b.mask.assign(g->size(), 0);
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (!subset.mask[i]) continue;
        for (int j : g->adjacency[i])
            if (!subset.mask[static_cast<std::size_t>(j)]) {
                b.mask[i] = 1;
                break;
            }
    }
    return b;
}

namespace {

// Directed sup-inf distance under ambient Euclidean metric via squared
// distances; sqrt deferred to the end.
double directed_euclidean(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    double worst2 = 0.0;
    for (const Vec3& a : from) {
        double best2 = kInf;
        for (const Vec3& b : to) best2 = std::min(best2, norm2(a - b));
        worst2 = std::max(worst2, best2);
    }
    return std::sqrt(worst2);
}

double directed_geodesic(const geometry::ManifoldSpec& spec, const std::vector<Vec3>& from,
                         const std::vector<Vec3>& to) {
    double worst = 0.0;
    for (const Vec3& a : from) {
        double best = kInf;
        for (const Vec3& b : to) best = std::min(best, geometry::geodesic_distance(spec, a, b));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

double hausdorff(const FinitePointSet& A, const FinitePointSet& B) {
    if (A.points.empty() || B.points.empty()) throw domain_error("hausdorff requires nonempty operands");
    if (A.metric != B.metric) throw domain_error("hausdorff operands must share a metric");
    if (A.metric == Metric::AmbientEuclidean)
        return std::max(directed_euclidean(A.points, B.points), directed_euclidean(B.points, A.points));
    if (A.spec.kind != B.spec.kind) throw domain_error("hausdorff operands must share a manifold");
    return std::max(directed_geodesic(A.spec, A.points, B.points),
                    directed_geodesic(A.spec, B.points, A.points));
}

double distance_in_measure(const GridSubset& A, const GridSubset& B) {
    if (!A.grid || A.grid != B.grid) throw domain_error("distance_in_measure requires subsets of the same grid");
    if (A.mask.size() != B.mask.size()) throw domain_error("mask length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < A.mask.size(); ++i)
        if ((A.mask[i] != 0) != (B.mask[i] != 0)) total += A.grid->weights[i];
    return total;
}

namespace {

Sym2 sym2_of(const Vec3& p) { return Sym2{p[0], p[1], p[2]}; }

}  // namespace

GridSubset r_convex_hull(const FinitePointSet& A, const EvaluationGrid& grid, double r, std::string* warning) {
    if (A.points.empty()) throw domain_error("r_convex_hull requires a nonempty point set");
    if (!(r > 0.0)) throw domain_error("hull radius must be positive");
    const std::size_t N = grid.size();
    if (N == 0) throw domain_error("r_convex_hull requires a nonempty grid");
    if (warning) {
        warning->clear();
        if (r < 2.0 * grid.spacing)
            *warning = "hull radius " + fmt_g17(r) + " is below twice the grid spacing " +
                       fmt_g17(grid.spacing) + "; the hull degenerates to the immediate neighborhood of the input set";
    }

    std::vector<std::uint8_t> excluded(N, 0);

    if (grid.spec.kind == ManifoldKind::EmbeddedTorus) {
        geometry::GeodesicGraph g = geometry::build_knn_graph(grid.points, 8);
        std::vector<int> sources;
        for (const Vec3& a : A.points) {
            std::size_t best = 0;
            double best2 = kInf;
            for (std::size_t i = 0; i < N; ++i) {
                double d2 = norm2(a - grid.points[i]);
                if (d2 < best2) {
                    best2 = d2;
                    best = i;
                }
            }
            sources.push_back(static_cast<int>(best));
        }
        std::sort(sources.begin(), sources.end());
        sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
        std::vector<double> dA = geometry::dijkstra_multi(g, sources);
        for (std::size_t c = 0; c < N; ++c) {
            if (dA[c] < r) continue;
            std::vector<double> dc = geometry::dijkstra(g, static_cast<int>(c));
            for (std::size_t i = 0; i < N; ++i)
                if (dc[i] < r) excluded[i] = 1;
        }
    } else if (grid.spec.kind == ManifoldKind::SpdCone2) {
        std::vector<Sym2> pts(N);
        for (std::size_t i = 0; i < N; ++i) pts[i] = sym2_of(grid.points[i]);
        std::vector<Sym2> apts;
        for (const Vec3& a : A.points) apts.push_back(sym2_of(a));
        std::vector<double> dA(N);
        for (std::size_t c = 0; c < N; ++c) {
            double best = kInf;
            for (const Sym2& a : apts) best = std::min(best, geometry::spd_distance(pts[c], a));
            dA[c] = best;
        }
        for (std::size_t c = 0; c < N; ++c) {
            if (dA[c] < r) continue;
            for (std::size_t i = 0; i < N; ++i)
                if (!excluded[i] && geometry::spd_distance(pts[c], pts[i]) < r) excluded[i] = 1;
        }
    } else {
        // Great-circle balls: arc < r iff squared chord < (2 sin(r/2))^2.
        double chord = 2.0 * std::sin(std::min(r, kPi) / 2.0);
        double chord2 = chord * chord;
        std::vector<double> dA2(N);
        for (std::size_t c = 0; c < N; ++c) {
            double best2 = kInf;
            for (const Vec3& a : A.points) best2 = std::min(best2, norm2(grid.points[c] - a));
            dA2[c] = best2;
        }
        for (std::size_t c = 0; c < N; ++c) {
            if (r <= kPi && dA2[c] < chord2) continue;
            if (r > kPi) continue;  // a ball of radius > pi covers the sphere, so it meets A
            for (std::size_t i = 0; i < N; ++i)
                if (!excluded[i] && norm2(grid.points[c] - grid.points[i]) < chord2) excluded[i] = 1;
        }
    }

    GridSubset hull;
    hull.grid = &grid;
    hull.mask.resize(N);
    for (std::size_t i = 0; i < N; ++i) hull.mask[i] = excluded[i] ? 0 : 1;
    return hull;
}

FinitePointSet sample_filter(const std::vector<Vec3>& sample,
                             const std::function<double(const Vec3&)>& evaluator, double lambda) {
    if (!evaluator) throw domain_error("sample_filter requires an evaluator");
    FinitePointSet out;
    for (const Vec3& x : sample)
        if (evaluator(x) > lambda) out.points.push_back(x);
    return out;
}

}  // namespace mls::setops
