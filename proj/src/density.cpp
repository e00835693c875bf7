#include "mls/density.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace mls::density {

namespace {
constexpr double kCutoffFactor = 8.0;  // kernel contributions past 8h are dropped
}

double gaussian_kernel(double t, int intrinsic_dim) {
    if (t < 0.0) throw domain_error("kernel argument must be nonnegative");
    return std::pow(kPi, -0.5 * intrinsic_dim) * std::exp(-t * t);
}

double m0(double boundary_dist, double h) {
    if (!(h > 0.0)) throw domain_error("bandwidth must be positive");
    if (std::isinf(boundary_dist)) return 1.0;
    return 0.5 * (1.0 + std::erf(boundary_dist / h));
}

double bias_coefficient_m1(double boundary_dist, double h) {
    if (!(h > 0.0)) throw domain_error("bandwidth must be positive");
    if (std::isinf(boundary_dist)) return 0.0;
    double z = boundary_dist / h;
    return std::exp(-z * z) / (2.0 * std::sqrt(kPi));
}

namespace {

double kernel_sum(const Vec3& x, const std::vector<Vec3>& sample, double h) {
    const double cutoff2 = kCutoffFactor * kCutoffFactor * h * h;
    double s = 0.0;
    for (const Vec3& p : sample) {
        double d2 = norm2(x - p);
        if (d2 > cutoff2) continue;
        s += std::exp(-d2 / (h * h));
    }
    return s;
}

// Canonical summation order makes estimates exactly invariant under sample
// permutation.
std::vector<Vec3> sorted_copy(const std::vector<Vec3>& sample) {
    std::vector<Vec3> s = sample;
    std::sort(s.begin(), s.end());
    return s;
}

double kde_value(const Vec3& x, const std::vector<Vec3>& sample, double h, const ManifoldSpec& spec,
                 bool corrected) {
    if (sample.empty()) throw domain_error("kde requires a nonempty sample");
    if (!(h > 0.0)) throw domain_error("bandwidth must be positive");
    const int dp = spec.intrinsic_dim();
    double corr = corrected ? m0(geometry::boundary_distance(spec, x), h) : 1.0;
    double norm_const = static_cast<double>(sample.size()) * corr * std::pow(h, dp) *
                        std::pow(kPi, 0.5 * dp);
    return kernel_sum(x, sorted_copy(sample), h) / norm_const;
}

// Uniform cell lists over the sample's bounding box, cell edge = cutoff.
struct CellIndex {
    double cell = 1.0;
    Vec3 lo{0, 0, 0};
    int nx = 1, ny = 1, nz = 1;
    std::vector<std::vector<int>> cells;

    CellIndex(const std::vector<Vec3>& pts, double cutoff) {
        cell = cutoff;
        Vec3 hi = pts[0];
        lo = pts[0];
        for (const Vec3& p : pts)
            for (int d = 0; d < 3; ++d) {
                lo[d] = std::min(lo[d], p[d]);
                hi[d] = std::max(hi[d], p[d]);
            }
        nx = std::max(1, static_cast<int>((hi[0] - lo[0]) / cell) + 1);
        ny = std::max(1, static_cast<int>((hi[1] - lo[1]) / cell) + 1);
        nz = std::max(1, static_cast<int>((hi[2] - lo[2]) / cell) + 1);
        cells.assign(static_cast<std::size_t>(nx) * ny * nz, {});
        for (int i = 0; i < static_cast<int>(pts.size()); ++i)
            cells[flat_of(pts[static_cast<std::size_t>(i)])].push_back(i);
    }

    int coord(double v, double base, int n) const {
        int c = static_cast<int>(std::floor((v - base) / cell));
        return std::clamp(c, -1000000, n + 1000000);
    }
    std::size_t flat(int cx, int cy, int cz) const {
        return (static_cast<std::size_t>(cx) * ny + cy) * nz + cz;
    }
    std::size_t flat_of(const Vec3& p) const {
        return flat(std::min(coord(p[0], lo[0], nx), nx - 1), std::min(coord(p[1], lo[1], ny), ny - 1),
                    std::min(coord(p[2], lo[2], nz), nz - 1));
    }

    // Fixed iteration order over the 27 neighbor cells keeps per-point sums
    // deterministic independent of threading.
    double kernel_sum(const Vec3& x, const std::vector<Vec3>& pts, double h) const {
        const double cutoff2 = cell * cell;
        const double inv_h2 = 1.0 / (h * h);
        int cx = coord(x[0], lo[0], nx);
        int cy = coord(x[1], lo[1], ny);
        int cz = coord(x[2], lo[2], nz);
        double s = 0.0;
        for (int dx = -1; dx <= 1; ++dx) {
            int ix = cx + dx;
            if (ix < 0 || ix >= nx) continue;
            for (int dy = -1; dy <= 1; ++dy) {
                int iy = cy + dy;
                if (iy < 0 || iy >= ny) continue;
                for (int dz = -1; dz <= 1; ++dz) {
                    int iz = cz + dz;
                    if (iz < 0 || iz >= nz) continue;
                    for (int i : cells[flat(ix, iy, iz)]) {
                        double d2 = norm2(x - pts[static_cast<std::size_t>(i)]);
                        if (d2 > cutoff2) continue;
                        s += std::exp(-d2 * inv_h2);
                    }
                }
            }
        }
        return s;
    }
};

DensityField make_field(const std::vector<Vec3>& sample, double h, const EvaluationGrid& grid,
                        bool corrected, int threads, bool accelerated) {
    if (sample.empty()) throw domain_error("kde requires a nonempty sample");
    if (!(h > 0.0)) throw domain_error("bandwidth must be positive");
    DensityField f;
    f.grid = &grid;
    f.h = h;
    f.provenance = corrected ? Provenance::KdeCorrected : Provenance::KdeUncorrected;
    f.values.assign(grid.size(), 0.0);

    const std::vector<Vec3> pts = sorted_copy(sample);
    const int dp = grid.spec.intrinsic_dim();
    const double base_norm = static_cast<double>(sample.size()) * std::pow(h, dp) * std::pow(kPi, 0.5 * dp);
    const double cutoff = kCutoffFactor * h;
    const CellIndex* index = nullptr;
    CellIndex built(pts, cutoff);
    if (accelerated) index = &built;

    auto eval_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double s = index ? index->kernel_sum(grid.points[i], pts, h)
                             : kernel_sum(grid.points[i], pts, h);
            double corr = corrected ? m0(geometry::boundary_distance(grid.spec, grid.points[i]), h) : 1.0;
            f.values[i] = s / (base_norm * corr);
        }
    };

    threads = std::max(1, threads);
    if (threads == 1 || grid.size() < 256) {
        eval_range(0, grid.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (grid.size() + threads - 1) / static_cast<std::size_t>(threads);
        for (int t = 0; t < threads; ++t) {
            std::size_t b = static_cast<std::size_t>(t) * chunk;
            std::size_t e = std::min(grid.size(), b + chunk);
            if (b >= e) break;
            pool.emplace_back(eval_range, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return f;
}

}  // namespace

double kde_corrected(const Vec3& x, const std::vector<Vec3>& sample, double h, const ManifoldSpec& spec) {
    return kde_value(x, sample, h, spec, true);
}

double kde_uncorrected(const Vec3& x, const std::vector<Vec3>& sample, double h, const ManifoldSpec& spec) {
    return kde_value(x, sample, h, spec, false);
}

DensityField evaluate_field(const std::vector<Vec3>& sample, double h, const EvaluationGrid& grid,
                            bool corrected, int threads) {
    return make_field(sample, h, grid, corrected, threads, true);
}

DensityField evaluate_field_naive(const std::vector<Vec3>& sample, double h, const EvaluationGrid& grid,
                                  bool corrected) {
    return make_field(sample, h, grid, corrected, 1, false);
}

double sup_error(const DensityField& estimate, const DensityField& truth, const std::vector<std::uint8_t>& mask) {
    if (estimate.values.size() != truth.values.size() || mask.size() != estimate.values.size())
        throw domain_error("sup_error requires fields and mask on the same grid");
    double best = -1.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        best = std::max(best, std::fabs(estimate.values[i] - truth.values[i]));
    }
    if (best < 0.0) throw domain_error("sup_error over an empty mask");
    return best;
}

double default_bandwidth(const std::vector<Vec3>& sample, int intrinsic_dim) {
    if (sample.empty()) throw domain_error("default_bandwidth requires a nonempty sample");
    Vec3 lo = sample[0], hi = sample[0];
    for (const Vec3& p : sample)
        for (int d = 0; d < 3; ++d) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }
    double diameter = dist(lo, hi);
    double n = static_cast<double>(sample.size());
    return std::pow(n, -1.0 / (intrinsic_dim + 4)) * diameter / 4.0;
}

}  // namespace mls::density
