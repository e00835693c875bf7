#pragma once

#include <cstddef>
#include <vector>

#include "mls/common.hpp"

namespace mls::geometry {

// k-nearest-neighbor graph under ambient Euclidean distance, used to
// approximate geodesics where no closed form exists (embedded torus).
struct GeodesicGraph {
    std::vector<int> offsets;        // CSR offsets, size = n+1
    std::vector<int> targets;        // neighbor indices
    std::vector<double> lengths;     // Euclidean edge lengths
    std::size_t size() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

// Builds the symmetrized k-NN graph and verifies connectivity; a
// disconnected graph raises an error naming the smallest component.
GeodesicGraph build_knn_graph(const std::vector<Vec3>& points, int k);

// Single-source shortest-path distances.
std::vector<double> dijkstra(const GeodesicGraph& g, int source);

// Multi-source variant: distance from each node to the nearest source.
std::vector<double> dijkstra_multi(const GeodesicGraph& g, const std::vector<int>& sources);

// Point-to-point query (early-exit Dijkstra).
double graph_distance(const GeodesicGraph& g, int a, int b);

}  // namespace mls::geometry
