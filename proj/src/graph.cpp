#include "mls/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace mls::geometry {

GeodesicGraph build_knn_graph(const std::vector<Vec3>& points, int k) {
    const int n = static_cast<int>(points.size());
    if (n == 0) throw domain_error("cannot build a graph on an empty grid");
    k = std::min(k, n - 1);
    if (k < 1) throw domain_error("graph needs at least two points");

    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
    std::vector<std::pair<double, int>> cand;
    for (int i = 0; i < n; ++i) {
        cand.clear();
        cand.reserve(static_cast<std::size_t>(n) - 1);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            cand.emplace_back(norm2(points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)]), j);
        }
        std::nth_element(cand.begin(), cand.begin() + k, cand.end());
        for (int t = 0; t < k; ++t) {
            int j = cand[static_cast<std::size_t>(t)].second;
            adj[static_cast<std::size_t>(i)].emplace_back(j, std::sqrt(cand[static_cast<std::size_t>(t)].first));
        }
    }
    // Symmetrize and deduplicate.
    for (int i = 0; i < n; ++i) {
        for (auto [j, w] : std::vector<std::pair<int, double>>(adj[static_cast<std::size_t>(i)])) {
            auto& back = adj[static_cast<std::size_t>(j)];
            bool present = false;
            for (auto& [t, _] : back)
                if (t == i) { present = true; break; }
            if (!present) back.emplace_back(i, w);
        }
    }
    GeodesicGraph g;
    g.offsets.reserve(static_cast<std::size_t>(n) + 1);
    g.offsets.push_back(0);
    for (int i = 0; i < n; ++i) {
        auto& lst = adj[static_cast<std::size_t>(i)];
        std::sort(lst.begin(), lst.end());
        for (auto& [j, w] : lst) {
            g.targets.push_back(j);
            g.lengths.push_back(w);
        }
        g.offsets.push_back(static_cast<int>(g.targets.size()));
    }

    // Connectivity check: label components, report the smallest one.
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    int n_comp = 0;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        stack.assign(1, s);
        comp[static_cast<std::size_t>(s)] = n_comp;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int e = g.offsets[static_cast<std::size_t>(u)]; e < g.offsets[static_cast<std::size_t>(u) + 1]; ++e) {
                int v = g.targets[static_cast<std::size_t>(e)];
                if (comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = n_comp;
                    stack.push_back(v);
                }
            }
        }
        ++n_comp;
    }
    if (n_comp > 1) {
        std::vector<int> sizes(static_cast<std::size_t>(n_comp), 0);
        for (int c : comp) ++sizes[static_cast<std::size_t>(c)];
        int smallest = static_cast<int>(std::min_element(sizes.begin(), sizes.end()) - sizes.begin());
        std::string members;
        int shown = 0;
        for (int i = 0; i < n && shown < 5; ++i) {
            if (comp[static_cast<std::size_t>(i)] == smallest) {
                members += (shown ? "," : "") + std::to_string(i);
                ++shown;
            }
        }
        throw domain_error("k-NN graph is disconnected: smallest component has " +
                           std::to_string(sizes[static_cast<std::size_t>(smallest)]) + " nodes (e.g. indices " +
                           members + "); increase k or the grid resolution");
    }
    return g;
}

namespace {

std::vector<double> run_dijkstra(const GeodesicGraph& g, const std::vector<int>& sources, int stop_at) {
    std::vector<double> dist(g.size(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (int s : sources) {
        if (s < 0 || static_cast<std::size_t>(s) >= g.size()) throw domain_error("dijkstra source out of range");
        dist[static_cast<std::size_t>(s)] = 0.0;
        heap.emplace(0.0, s);
    }
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        if (u == stop_at) break;
        for (int e = g.offsets[static_cast<std::size_t>(u)]; e < g.offsets[static_cast<std::size_t>(u) + 1]; ++e) {
            int v = g.targets[static_cast<std::size_t>(e)];
            double nd = d + g.lengths[static_cast<std::size_t>(e)];
            if (nd < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

}  // namespace

std::vector<double> dijkstra(const GeodesicGraph& g, int source) { return run_dijkstra(g, {source}, -1); }

std::vector<double> dijkstra_multi(const GeodesicGraph& g, const std::vector<int>& sources) {
    if (sources.empty()) throw domain_error("dijkstra_multi requires at least one source");
    return run_dijkstra(g, sources, -1);
}

double graph_distance(const GeodesicGraph& g, int a, int b) {
    auto dist = run_dijkstra(g, {a}, b);
    return dist[static_cast<std::size_t>(b)];
}

}  // namespace mls::geometry
