#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mls/density.hpp"
#include "mls/geometry.hpp"
#include "mls/rng.hpp"

using namespace mls;
using namespace mls::density;
using geometry::EvaluationGrid;
using geometry::GridOptions;
using geometry::ManifoldKind;
using geometry::ManifoldSpec;

namespace {

ManifoldSpec sphere_spec() { return ManifoldSpec{ManifoldKind::Sphere}; }
ManifoldSpec hemisphere_spec() { return ManifoldSpec{ManifoldKind::Hemisphere}; }

Vec3 random_unit(Rng& rng) {
    while (true) {
        Vec3 v{rng.gaussian(), rng.gaussian(), rng.gaussian()};
        if (norm(v) > 1e-6) return normalized(v);
    }
}

Vec3 random_hemisphere_point(Rng& rng) {
    Vec3 v = random_unit(rng);
    if (v[2] < 0.0) v[2] = -v[2];
    return v;
}

}  // namespace

TEST_CASE("gaussian kernel values") {
    CHECK(gaussian_kernel(0.0, 2) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
    CHECK(gaussian_kernel(0.0, 3) == doctest::Approx(std::pow(kPi, -1.5)).epsilon(1e-14));
    CHECK(gaussian_kernel(1.0, 2) == doctest::Approx(std::exp(-1.0) / kPi).epsilon(1e-14));
    CHECK_THROWS_AS(gaussian_kernel(-0.5, 2), domain_error);
}

TEST_CASE("boundary correction factor m0") {
    CHECK(m0(kInf, 0.2) == 1.0);
    CHECK(m0(0.0, 0.2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m0(0.2, 0.2) == doctest::Approx(0.92135).epsilon(1e-5));
    CHECK(m0(1.2, 0.2) > 1.0 - 1e-12);  // b/h = 6

    double prev = 0.0;
    for (double b = 0.0; b <= 3.0; b += 0.05) {
        double v = m0(b, 0.5);
        CHECK(v >= prev);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
    CHECK_THROWS_AS(m0(0.1, 0.0), domain_error);
}

TEST_CASE("bias coefficient m1") {
    CHECK(bias_coefficient_m1(0.0, 0.3) == doctest::Approx(0.28209).epsilon(1e-4));
    CHECK(bias_coefficient_m1(kInf, 0.3) == 0.0);
    CHECK(bias_coefficient_m1(0.3, 0.3) == doctest::Approx(0.10378).epsilon(1e-4));
}

TEST_CASE("pointwise kde closed-form cases") {
    const double h = 0.3;
    Vec3 x{0.0, 0.0, 1.0};

    std::vector<Vec3> one{x};
    CHECK(kde_corrected(x, one, h, sphere_spec()) == doctest::Approx(1.0 / (kPi * h * h)).epsilon(1e-12));

    std::vector<Vec3> two{x, Vec3{0.0, h, 1.0}};
    double expected = (1.0 + std::exp(-1.0)) / (2.0 * kPi * h * h);
    CHECK(kde_corrected(x, two, h, sphere_spec()) == doctest::Approx(expected).epsilon(1e-12));

    Vec3 rim{1.0, 0.0, 0.0};
    std::vector<Vec3> at_rim{rim};
    CHECK(kde_corrected(rim, at_rim, h, hemisphere_spec()) == doctest::Approx(2.0 / (kPi * h * h)).epsilon(1e-12));
    CHECK(kde_uncorrected(rim, at_rim, h, hemisphere_spec()) == doctest::Approx(1.0 / (kPi * h * h)).epsilon(1e-12));

    CHECK_THROWS_AS(kde_corrected(x, std::vector<Vec3>{}, h, sphere_spec()), domain_error);
    CHECK_THROWS_AS(kde_corrected(x, one, -0.1, sphere_spec()), domain_error);
}

TEST_CASE("uncorrected equals m0 times corrected") {
    Rng rng(20260814);
    ManifoldSpec spec = hemisphere_spec();
    std::vector<Vec3> sample;
    for (int i = 0; i < 40; ++i) sample.push_back(random_hemisphere_point(rng));
    for (int trial = 0; trial < 30; ++trial) {
        Vec3 x = random_hemisphere_point(rng);
        double h = 0.15 + 0.3 * rng.uniform();
        double lhs = kde_uncorrected(x, sample, h, spec);
        double rhs = m0(geometry::boundary_distance(spec, x), h) * kde_corrected(x, sample, h, spec);
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(lhs, 1e-300));
    }
}

TEST_CASE("corrected and uncorrected fields coincide off-boundary") {
    Rng rng(3);
    std::vector<Vec3> sample;
    for (int i = 0; i < 200; ++i) sample.push_back(random_unit(rng));
    GridOptions opt;
    opt.fibonacci_n = 400;
    EvaluationGrid grid = geometry::make_grid(sphere_spec(), opt);
    DensityField a = evaluate_field(sample, 0.25, grid, true);
    DensityField b = evaluate_field(sample, 0.25, grid, false);
    CHECK(a.values == b.values);
    CHECK(a.provenance == Provenance::KdeCorrected);
    CHECK(b.provenance == Provenance::KdeUncorrected);
}

TEST_CASE("kernel mass over the sphere is close to one") {
    Rng rng(20260814);
    std::vector<Vec3> sample;
    for (int i = 0; i < 5000; ++i) sample.push_back(random_unit(rng));
    GridOptions opt;
    opt.fibonacci_n = 2000;
    EvaluationGrid grid = geometry::make_grid(sphere_spec(), opt);
    DensityField f = evaluate_field(sample, 0.2, grid, true);
    double mass = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) mass += f.values[i] * grid.weights[i];
    CHECK(mass >= 0.98);
    CHECK(mass <= 1.02);
}

TEST_CASE("single-sample field peaks at the nearest grid point") {
    GridOptions opt;
    opt.fibonacci_n = 500;
    EvaluationGrid grid = geometry::make_grid(sphere_spec(), opt);
    Vec3 p = geometry::embed(sphere_spec(), {0.3, 1.0, 0.0});
    DensityField f = evaluate_field({p}, 0.2, grid, true);
    std::size_t argmax = 0, nearest = 0;
    double best_v = -1.0, best_d = kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (f.values[i] > best_v) {
            best_v = f.values[i];
            argmax = i;
        }
        double d = norm2(grid.points[i] - p);
        if (d < best_d) {
            best_d = d;
            nearest = i;
        }
    }
    CHECK(argmax == nearest);
}

TEST_CASE("field evaluation is exactly permutation invariant") {
    Rng rng(17);
    std::vector<Vec3> sample;
    for (int i = 0; i < 300; ++i) sample.push_back(random_unit(rng));
    GridOptions opt;
    opt.fibonacci_n = 300;
    EvaluationGrid grid = geometry::make_grid(sphere_spec(), opt);
    DensityField base = evaluate_field(sample, 0.2, grid, true);

    std::vector<Vec3> shuffled = sample;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.next_u64() % i]);
    DensityField again = evaluate_field(shuffled, 0.2, grid, true);
    CHECK(base.values == again.values);

    Vec3 x{0, 0, 1};
    CHECK(kde_corrected(x, sample, 0.2, sphere_spec()) == kde_corrected(x, shuffled, 0.2, sphere_spec()));
}

TEST_CASE("cell-list accelerator matches naive summation") {
    Rng rng(23);
    std::vector<Vec3> sample;
    for (int i = 0; i < 800; ++i) sample.push_back(random_unit(rng));
    GridOptions opt;
    opt.fibonacci_n = 400;
    EvaluationGrid grid = geometry::make_grid(sphere_spec(), opt);
    for (double h : {0.05, 0.2, 0.6}) {
        DensityField fast = evaluate_field(sample, h, grid, true);
        DensityField slow = evaluate_field_naive(sample, h, grid, true);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double scale = std::max(std::fabs(slow.values[i]), 1e-300);
            CHECK(std::fabs(fast.values[i] - slow.values[i]) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("field values do not depend on the thread count") {
    Rng rng(29);
    std::vector<Vec3> sample;
    for (int i = 0; i < 500; ++i) sample.push_back(random_unit(rng));
    GridOptions opt;
    opt.fibonacci_n = 600;
    EvaluationGrid grid = geometry::make_grid(sphere_spec(), opt);
    DensityField one = evaluate_field(sample, 0.2, grid, true, 1);
    DensityField four = evaluate_field(sample, 0.2, grid, true, 4);
    CHECK(one.values == four.values);
}

TEST_CASE("sup_error basics") {
    GridOptions opt;
    opt.fibonacci_n = 128;
    EvaluationGrid grid = geometry::make_grid(sphere_spec(), opt);
    DensityField a;
    a.grid = &grid;
    a.values.assign(grid.size(), 0.25);
    DensityField b = a;
    std::vector<std::uint8_t> full(grid.size(), 1);
    CHECK(sup_error(a, b, full) == 0.0);

    for (double& v : b.values) v += 0.125;
    CHECK(sup_error(a, b, full) == doctest::Approx(0.125).epsilon(1e-15));

    std::vector<std::uint8_t> empty(grid.size(), 0);
    CHECK_THROWS_AS(sup_error(a, b, empty), domain_error);
    std::vector<std::uint8_t> short_mask(grid.size() - 1, 1);
    CHECK_THROWS_AS(sup_error(a, b, short_mask), domain_error);
}

TEST_CASE("default bandwidth shrinks with n") {
    Rng rng(31);
    std::vector<Vec3> small, large;
    for (int i = 0; i < 100; ++i) small.push_back(random_unit(rng));
    large = small;
    for (int i = 0; i < 900; ++i) large.push_back(random_unit(rng));
    double hs = default_bandwidth(small, 2);
    double hl = default_bandwidth(large, 2);
    CHECK(hs > 0.0);
    CHECK(hl < hs);
    CHECK_THROWS_AS(default_bandwidth({}, 2), domain_error);
}
