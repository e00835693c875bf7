#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "mls/geometry.hpp"
#include "mls/graph.hpp"
#include "mls/rng.hpp"
#include "mls/setops.hpp"
#include "mls/truth.hpp"

using namespace mls;
using namespace mls::setops;
using geometry::EvaluationGrid;
using geometry::GridOptions;
using geometry::ManifoldKind;
using geometry::ManifoldSpec;

namespace {

EvaluationGrid small_sphere(int n = 500) {
    GridOptions opt;
    opt.fibonacci_n = n;
    return geometry::make_grid(ManifoldSpec{ManifoldKind::Sphere}, opt);
}

DensityField constant_field(const EvaluationGrid& grid, double c) {
    DensityField f;
    f.grid = &grid;
    f.values.assign(grid.size(), c);
    return f;
}

FinitePointSet euclidean_set(std::vector<Vec3> pts) {
    FinitePointSet s;
    s.points = std::move(pts);
    s.metric = Metric::AmbientEuclidean;
    return s;
}

Vec3 random_unit(Rng& rng) {
    while (true) {
        Vec3 v{rng.gaussian(), rng.gaussian(), rng.gaussian()};
        if (norm(v) > 1e-6) return normalized(v);
    }
}

double polar_angle(const Vec3& x) { return std::acos(std::clamp(x[2], -1.0, 1.0)); }

// Definitional hull scan used as a local oracle on small grids.
std::vector<std::uint8_t> brute_force_sphere_hull(const EvaluationGrid& grid, const std::vector<Vec3>& A,
                                                  double r) {
    const std::size_t N = grid.size();
    std::vector<std::uint8_t> mask(N, 1);
    for (std::size_t c = 0; c < N; ++c) {
        double dA = kInf;
        for (const Vec3& a : A) dA = std::min(dA, geometry::geodesic_distance(grid.spec, grid.points[c], a));
        if (dA < r) continue;
        for (std::size_t i = 0; i < N; ++i)
            if (geometry::geodesic_distance(grid.spec, grid.points[c], grid.points[i]) < r) mask[i] = 0;
    }
    return mask;
}

}  // namespace

TEST_CASE("level sets are closed and nested") {
    EvaluationGrid grid = small_sphere(128);
    DensityField f = constant_field(grid, 0.25);
    CHECK(level_set(f, 0.25).count() == grid.size());  // ties included
    CHECK(level_set(f, 0.2500001).count() == 0);
    CHECK_THROWS_AS(level_set(f, 0.0), domain_error);

    for (std::size_t i = 0; i < grid.size(); ++i) f.values[i] = static_cast<double>(i % 17) + 0.5;
    GridSubset lo = level_set(f, 4.0);
    GridSubset hi = level_set(f, 9.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (hi.mask[i]) CHECK(lo.mask[i]);

    CHECK(level_set(f, 4.0).indices().size() == level_set(f, 4.0).count());
    CHECK(level_set(f, 4.0).points().size() == level_set(f, 4.0).count());
}

TEST_CASE("boundary_of trivial masks") {
    EvaluationGrid grid = small_sphere(256);
    GridSubset full;
    full.grid = &grid;
    full.mask.assign(grid.size(), 1);
    CHECK(boundary_of(full).count() == 0);

    GridSubset empty;
    empty.grid = &grid;
    empty.mask.assign(grid.size(), 0);
    CHECK(boundary_of(empty).count() == 0);

    GridSubset single = empty;
    single.mask[37] = 1;
    GridSubset b = boundary_of(single);
    CHECK(b.count() == 1);
    CHECK(b.mask[37] == 1);
}

TEST_CASE("boundary of a geodesic disk is a thin ring inside the mask") {
    GridOptions opt;
    opt.res_u = 64;
    opt.res_v = 64;
    opt.sphere_kind = geometry::SphereGridKind::LatLong;
    EvaluationGrid grid = geometry::make_grid(ManifoldSpec{ManifoldKind::Sphere}, opt);

    // Pole-centered disk: the ring is one lattice row, two ring neighbors each.
    GridSubset disk;
    disk.grid = &grid;
    disk.mask.assign(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (polar_angle(grid.points[i]) < 0.8) disk.mask[i] = 1;
    GridSubset ring = boundary_of(disk);
    CHECK(ring.count() > 0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (ring.mask[i]) CHECK(disk.mask[i]);

    std::size_t exceptions = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!ring.mask[i]) continue;
        std::size_t ring_neighbors = 0;
        for (int j : grid.adjacency[i])
            if (ring.mask[static_cast<std::size_t>(j)]) ++ring_neighbors;
        if (ring_neighbors != 2) ++exceptions;
    }
    CHECK(exceptions <= ring.count() / 20);

    // Off-axis disk: the staircase ring must hug the analytic circle to
    // within a lattice step or so on either side.
    Vec3 center = geometry::embed(grid.spec, {1.0, 1.1, 0.0});
    GridSubset disk2;
    disk2.grid = &grid;
    disk2.mask.assign(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (geometry::geodesic_distance(grid.spec, grid.points[i], center) < 0.8) disk2.mask[i] = 1;
    GridSubset ring2 = boundary_of(disk2);
    CHECK(ring2.count() > 20);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!ring2.mask[i]) continue;
        CHECK(disk2.mask[i]);
        CHECK(std::fabs(geometry::geodesic_distance(grid.spec, grid.points[i], center) - 0.8) < 0.13);
    }
}

TEST_CASE("hausdorff closed-form cases") {
    Vec3 p{0, 0, 0}, q{1, 0, 0}, s{2, 0, 0};
    CHECK(hausdorff(euclidean_set({p, q}), euclidean_set({p, q})) == 0.0);
    CHECK(hausdorff(euclidean_set({p}), euclidean_set({q})) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hausdorff(euclidean_set({p}), euclidean_set({q, s})) == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS(hausdorff(euclidean_set({}), euclidean_set({p})), domain_error);
    FinitePointSet geo;
    geo.points = {Vec3{0, 0, 1}};
    geo.metric = Metric::Geodesic;
    geo.spec = ManifoldSpec{ManifoldKind::Sphere};
    CHECK_THROWS_AS(hausdorff(euclidean_set({p}), geo), domain_error);
}

TEST_CASE("hausdorff satisfies metric axioms on random finite sets") {
    Rng rng(20260814);
    auto random_set = [&](Metric metric) {
        FinitePointSet s;
        s.metric = metric;
        s.spec = ManifoldSpec{ManifoldKind::Sphere};
        int k = 3 + static_cast<int>(rng.next_u64() % 8);
        for (int i = 0; i < k; ++i) s.points.push_back(random_unit(rng));
        return s;
    };
    for (int trial = 0; trial < 100; ++trial) {
        Metric metric = trial % 2 == 0 ? Metric::AmbientEuclidean : Metric::Geodesic;
        FinitePointSet A = random_set(metric), B = random_set(metric), C = random_set(metric);
        double ab = hausdorff(A, B);
        CHECK(ab == hausdorff(B, A));
        CHECK(hausdorff(A, A) == 0.0);
        CHECK(hausdorff(A, C) <= ab + hausdorff(B, C) + 1e-9);
    }
}

TEST_CASE("distance in measure basics and axioms") {
    EvaluationGrid grid = small_sphere(400);
    Rng rng(5);
    auto random_subset = [&]() {
        GridSubset s;
        s.grid = &grid;
        s.mask.resize(grid.size());
        for (auto& m : s.mask) m = rng.uniform() < 0.4 ? 1 : 0;
        return s;
    };
    GridSubset A = random_subset();
    CHECK(distance_in_measure(A, A) == 0.0);

    GridSubset empty;
    empty.grid = &grid;
    empty.mask.assign(grid.size(), 0);
    double volA = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (A.mask[i]) volA += grid.weights[i];
    CHECK(distance_in_measure(A, empty) == doctest::Approx(volA).epsilon(1e-15));

    GridSubset complement = A;
    for (auto& m : complement.mask) m = m ? 0 : 1;
    CHECK(distance_in_measure(A, complement) == doctest::Approx(grid.total_volume()).epsilon(1e-12));

    for (int trial = 0; trial < 50; ++trial) {
        GridSubset X = random_subset(), Y = random_subset(), Z = random_subset();
        double xy = distance_in_measure(X, Y);
        CHECK(xy == distance_in_measure(Y, X));
        CHECK(distance_in_measure(X, Z) <= xy + distance_in_measure(Y, Z) + 1e-12);
    }

    EvaluationGrid other = small_sphere(400);
    GridSubset B;
    B.grid = &other;
    B.mask.assign(other.size(), 0);
    CHECK_THROWS_AS(distance_in_measure(A, B), domain_error);
}

TEST_CASE("r-convex hull trivial and containment properties") {
    EvaluationGrid grid = small_sphere(300);
    FinitePointSet all = euclidean_set(grid.points);
    GridSubset full_hull = r_convex_hull(all, grid, 0.5);
    CHECK(full_hull.count() == grid.size());

    Rng rng(20260814);
    FinitePointSet A;
    std::vector<std::size_t> a_idx;
    for (int i = 0; i < 12; ++i) {
        std::size_t idx = rng.next_u64() % grid.size();
        a_idx.push_back(idx);
        A.points.push_back(grid.points[idx]);
    }
    GridSubset hull = r_convex_hull(A, grid, 0.6);
    for (std::size_t idx : a_idx) CHECK(hull.mask[idx] == 1);

    // Radius above pi: every open ball covers the sphere and meets A.
    CHECK(r_convex_hull(A, grid, 4.0).count() == grid.size());

    CHECK_THROWS_AS(r_convex_hull(FinitePointSet{}, grid, 0.5), domain_error);
    CHECK_THROWS_AS(r_convex_hull(A, grid, 0.0), domain_error);
}

TEST_CASE("r-convex hull warning below twice the spacing") {
    EvaluationGrid grid = small_sphere(300);
    FinitePointSet A = euclidean_set({grid.points[0], grid.points[10]});
    std::string warning = "stale";
    r_convex_hull(A, grid, 2.5 * grid.spacing, &warning);
    CHECK(warning.empty());
    r_convex_hull(A, grid, 1.5 * grid.spacing, &warning);
    CHECK(!warning.empty());
    CHECK(warning.find("spacing") != std::string::npos);
}

TEST_CASE("sphere hull matches the brute-force definition on a disk sample") {
    EvaluationGrid grid = small_sphere(500);
    FinitePointSet A;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (polar_angle(grid.points[i]) <= 0.5) A.points.push_back(grid.points[i]);
    REQUIRE(A.points.size() > 10);

    const double r = 0.3;
    GridSubset hull = r_convex_hull(A, grid, r);
    std::vector<std::uint8_t> oracle = brute_force_sphere_hull(grid, A.points, r);
    CHECK(hull.mask == oracle);

    for (std::size_t i = 0; i < grid.size(); ++i)
        if (hull.mask[i]) CHECK(polar_angle(grid.points[i]) <= 0.5 + 1.5 * grid.spacing);
}

TEST_CASE("hull is idempotent and monotone in A") {
    EvaluationGrid grid = small_sphere(300);
    Rng rng(99);
    FinitePointSet A;
    for (int i = 0; i < 8; ++i) A.points.push_back(grid.points[rng.next_u64() % grid.size()]);
    const double r = 0.7;

    GridSubset h1 = r_convex_hull(A, grid, r);
    FinitePointSet again = euclidean_set(h1.points());
    GridSubset h2 = r_convex_hull(again, grid, r);
    CHECK(h1.mask == h2.mask);

    FinitePointSet bigger = A;
    for (int i = 0; i < 8; ++i) bigger.points.push_back(grid.points[rng.next_u64() % grid.size()]);
    GridSubset hb = r_convex_hull(bigger, grid, r);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (h1.mask[i]) CHECK(hb.mask[i]);
}

TEST_CASE("torus hull follows the snapped grid-graph convention") {
    ManifoldSpec torus{ManifoldKind::EmbeddedTorus};
    GridOptions opt;
    opt.res_u = 16;
    opt.res_v = 16;
    EvaluationGrid grid = geometry::make_grid(torus, opt);

    Rng rng(17);
    FinitePointSet A;
    std::vector<std::size_t> a_idx;
    for (int i = 0; i < 6; ++i) {
        std::size_t idx = rng.next_u64() % grid.size();
        a_idx.push_back(idx);
        A.points.push_back(grid.points[idx]);
    }
    const double r = 2.0;
    GridSubset hull = r_convex_hull(A, grid, r);
    for (std::size_t idx : a_idx) CHECK(hull.mask[idx] == 1);

    geometry::GeodesicGraph g = geometry::build_knn_graph(grid.points, 8);
    std::vector<std::uint8_t> oracle(grid.size(), 1);
    for (std::size_t c = 0; c < grid.size(); ++c) {
        std::vector<double> dc = geometry::dijkstra(g, static_cast<int>(c));
        double dA = kInf;
        for (std::size_t idx : a_idx) dA = std::min(dA, dc[idx]);
        if (dA < r) continue;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (dc[i] < r) oracle[i] = 0;
    }
    CHECK(hull.mask == oracle);
}

TEST_CASE("spd hull keeps its inputs") {
    ManifoldSpec spd{ManifoldKind::SpdCone2};
    GridOptions opt;
    opt.spd_ac_count = 8;
    opt.spd_b_count = 8;
    opt.spd_ac_min = 0.2;
    opt.spd_ac_max = 2.0;
    opt.spd_b_min = -0.8;
    opt.spd_b_max = 0.8;
    EvaluationGrid grid = geometry::make_grid(spd, opt);
    FinitePointSet A = euclidean_set({grid.points[0], grid.points[grid.size() / 2]});
    GridSubset hull = r_convex_hull(A, grid, 0.8);
    CHECK(hull.mask[0] == 1);
    CHECK(hull.mask[grid.size() / 2] == 1);
    CHECK(hull.count() <= grid.size());
}

TEST_CASE("sample filter keeps strictly-above-level points") {
    EvaluationGrid grid = small_sphere(400);
    truth::TargetLaw law;
    law.kind = truth::LawKind::VonMisesFisher;
    law.vmf_mu = {0, 0, 1};
    law.vmf_kappa = 4.0;
    auto evaluator = [&](const Vec3& x) { return truth::vmf_density(x, law.vmf_mu, law.vmf_kappa); };

    FinitePointSet everything = sample_filter(grid.points, evaluator, 0.0);
    CHECK(everything.points.size() == grid.size());

    double maxv = 0.0;
    for (const Vec3& p : grid.points) maxv = std::max(maxv, evaluator(p));
    CHECK(sample_filter(grid.points, evaluator, maxv).points.empty());  // strict inequality

    DensityField f = truth::true_density_field(law, grid);
    const double lambda = 0.1;
    GridSubset mask = level_set(f, lambda);
    FinitePointSet kept = sample_filter(grid.points, evaluator, lambda);
    for (const Vec3& p : kept.points) {
        std::size_t idx = 0;
        double best = kInf;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double d = norm2(grid.points[i] - p);
            if (d < best) {
                best = d;
                idx = i;
            }
        }
        CHECK(mask.mask[idx] == 1);
    }
}
