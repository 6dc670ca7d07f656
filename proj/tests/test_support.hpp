#ifndef SGFRWT_TEST_SUPPORT_HPP
#define SGFRWT_TEST_SUPPORT_HPP

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Core>

#include "sgfrwt/graph.hpp"

namespace sgfrwt::testsupport {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Random connected weighted graph: spanning tree plus extra density,
/// weights in [0.5, 1.5].
inline Graph random_connected_graph(int n, std::uint64_t seed, double extra_density = 0.05) {
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    std::set<std::pair<int, int>> seen;
    for (int v = 1; v < n; ++v) {
        const int u = static_cast<int>(uniform01(rng) * v);
        edges.push_back({u, v, 0.5 + uniform01(rng)});
        seen.insert({u, v});
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (uniform01(rng) < extra_density && !seen.count({i, j})) {
                edges.push_back({i, j, 0.5 + uniform01(rng)});
            }
        }
    }
    return Graph::from_edges(n, edges);
}

inline Eigen::VectorXd random_signal(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f[i] = gauss(rng);
    return f;
}

inline Eigen::VectorXcd random_complex_signal(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd f(n);
    for (int i = 0; i < n; ++i) f[i] = {gauss(rng), gauss(rng)};
    return f;
}

/// Path graph with unit weights.
inline Graph path_graph(int n) {
    std::vector<Edge> edges;
    for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, 1.0});
    return Graph::from_edges(n, edges);
}

} // namespace sgfrwt::testsupport

#endif
