#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mls/common.hpp"
#include "mls/density.hpp"
#include "mls/geometry.hpp"
#include "mls/graph.hpp"

namespace mls::setops {

using density::DensityField;
using geometry::EvaluationGrid;

struct GridSubset {
    const EvaluationGrid* grid = nullptr;
    std::vector<std::uint8_t> mask;

    std::size_t count() const;
    std::vector<std::size_t> indices() const;
    std::vector<Vec3> points() const;
};

enum class Metric { AmbientEuclidean, Geodesic };

struct FinitePointSet {
    std::vector<Vec3> points;
    Metric metric = Metric::AmbientEuclidean;
    geometry::ManifoldSpec spec;  // interprets the geodesic metric
};

// Closed superlevel set {value >= lambda}.
GridSubset level_set(const DensityField& field, double lambda);

// Masked points with at least one grid neighbor outside the mask.
GridSubset boundary_of(const GridSubset& subset);

// max of the two directed sup-inf distances; operands must share a metric.
double hausdorff(const FinitePointSet& A, const FinitePointSet& B);

// Total weight of the symmetric difference; subsets must share a grid.
double distance_in_measure(const GridSubset& A, const GridSubset& B);

// Geodesic r-convex hull with ball centers restricted to grid points: a grid
// point g is excluded iff some center c has rho(c,g) < r and rho(c,A) >= r.
// On the embedded torus rho is the shortest-path distance on the 8-nearest-
// neighbor graph over grid points, with off-grid points of A snapped to the
// closest grid point. When r < 2 * grid spacing the hull degenerates to
// near-A; that condition is reported through `warning` rather than an error.
GridSubset r_convex_hull(const FinitePointSet& A, const EvaluationGrid& grid, double r,
                         std::string* warning = nullptr);

// Sample points whose evaluated density is strictly above lambda.
FinitePointSet sample_filter(const std::vector<Vec3>& sample,
                             const std::function<double(const Vec3&)>& evaluator, double lambda);

}  // namespace mls::setops
