#ifndef SGFRWT_GRAPH_HPP
#define SGFRWT_GRAPH_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sgfrwt/errors.hpp"

namespace sgfrwt {

/// One undirected edge, stored once with i < j.
struct Edge {
    int i;
    int j;
    double w;
};

/// Immutable undirected weighted graph. Edges are kept sorted by (i, j) so
/// that iteration order, and everything assembled from it, is deterministic.
class Graph {
public:
    Graph() = default;

    /// Builds a graph from an arbitrary edge list. Input pairs may appear in
    /// either orientation; (i,j) and (j,i) with the same weight are merged,
    /// conflicting weights are rejected.
    static Graph from_edges(int n_vertices, const std::vector<Edge>& edge_list);

    int n_vertices() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }

    int connected_components() const;
    bool is_connected() const { return n_ > 0 && connected_components() == 1; }

    /// L = D - W, dense symmetric, zero row sums.
    Eigen::MatrixXd laplacian() const;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
};

/// Sparsification rule for point-cloud graphs. The default keeps every pair
/// (the weighting function is strictly positive, so the graph is complete).
struct SparsifyRule {
    enum class Mode { Dense, Threshold, KnnSym };
    Mode mode = Mode::Dense;
    double epsilon = 0.0; // Threshold: drop weights < epsilon
    int k = 8;            // KnnSym: keep union of k nearest neighbours
};

/// Gaussian-kernel graph on a point cloud: w_ij = exp(-|x_i - x_j|^2 / 2 sigma^2).
/// points is n x d (one row per point).
Graph gaussian_point_cloud_graph(const Eigen::MatrixXd& points, double sigma,
                                 const SparsifyRule& rule = {});

/// Lattice graph of an H x W image: pixels are vertices, pairs within
/// Euclidean distance `cutoff` on the pixel grid are connected with
/// w = exp(-dist^2 / 2 theta_w^2). cutoff = 1 gives the 4-neighbour lattice.
/// Vertex index of pixel (row, col) is row * W + col.
Graph image_grid_graph(const Eigen::MatrixXd& image, double theta_w, double cutoff);

/// Edge-list text format: required header "#vertices N", then one edge per
/// line "i<TAB>j<TAB>w" (0-based, weight as decimal float). '#' lines are
/// comments.
Graph read_edge_list(const std::string& path);
void write_edge_list(const Graph& g, const std::string& path);

} // namespace sgfrwt

#endif // SGFRWT_GRAPH_HPP
