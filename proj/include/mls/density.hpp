#pragma once

#include <cstddef>
#include <vector>

#include "mls/common.hpp"
#include "mls/geometry.hpp"

namespace mls::density {

using geometry::EvaluationGrid;
using geometry::ManifoldSpec;

enum class Provenance { TrueDensity, KdeCorrected, KdeUncorrected };

// Density values over an evaluation grid, in units of 1/(intrinsic volume).
struct DensityField {
    const EvaluationGrid* grid = nullptr;
    std::vector<double> values;
    Provenance provenance = Provenance::TrueDensity;
    double h = 0.0;  // bandwidth; 0 for true densities
};

double gaussian_kernel(double t, int intrinsic_dim);

// Boundary-correction factor; exactly 1 when b is +inf.
double m0(double boundary_dist, double h);

// Leading boundary-bias coefficient (diagnostic).
double bias_coefficient_m1(double boundary_dist, double h);

double kde_corrected(const Vec3& x, const std::vector<Vec3>& sample, double h, const ManifoldSpec& spec);
double kde_uncorrected(const Vec3& x, const std::vector<Vec3>& sample, double h, const ManifoldSpec& spec);

// Batch evaluation over a grid with a cell-list accelerator. Results are
// deterministic: each grid point's kernel sum uses a fixed summation order
// regardless of thread count.
DensityField evaluate_field(const std::vector<Vec3>& sample, double h, const EvaluationGrid& grid,
                            bool corrected, int threads = 1);

// Reference path without the accelerator (tests compare against this).
DensityField evaluate_field_naive(const std::vector<Vec3>& sample, double h, const EvaluationGrid& grid,
                                  bool corrected);

// Max absolute deviation over masked grid points.
double sup_error(const DensityField& estimate, const DensityField& truth, const std::vector<std::uint8_t>& mask);

// Rule-of-thumb bandwidth used when none is configured: n^{-1/(d'+4)}
// scaled by a quarter of the sample's bounding-box diameter.
double default_bandwidth(const std::vector<Vec3>& sample, int intrinsic_dim);

}  // namespace mls::density
