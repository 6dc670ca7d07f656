#include "sgfrwt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace sgfrwt {

Graph Graph::from_edges(int n_vertices, const std::vector<Edge>& edge_list) {
    if (n_vertices <= 0) {
        throw InvalidParameter("graph needs at least one vertex");
    }
    std::vector<Edge> norm;
    norm.reserve(edge_list.size());
    for (const Edge& e : edge_list) {
        if (e.i < 0 || e.i >= n_vertices || e.j < 0 || e.j >= n_vertices) {
            throw IndexOutOfRange("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                                  ") outside vertex range [0," + std::to_string(n_vertices) + ")");
        }
        if (e.i == e.j) {
            throw SelfLoop("self loop at vertex " + std::to_string(e.i));
        }
        if (!(e.w > 0.0) || !std::isfinite(e.w)) {
            throw NonPositiveWeight("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                                    ") has non-positive weight");
        }
        norm.push_back(e.i < e.j ? e : Edge{e.j, e.i, e.w});
    }
    std::sort(norm.begin(), norm.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    std::vector<Edge> dedup;
    dedup.reserve(norm.size());
    for (const Edge& e : norm) {
        if (!dedup.empty() && dedup.back().i == e.i && dedup.back().j == e.j) {
            if (dedup.back().w != e.w) {
                throw ConflictingDuplicateEdge("edge (" + std::to_string(e.i) + "," +
                                               std::to_string(e.j) + ") listed twice with different weights");
            }
            continue;
        }
        dedup.push_back(e);
    }
    Graph g;
    g.n_ = n_vertices;
    g.edges_ = std::move(dedup);
    return g;
}

int Graph::connected_components() const {
    std::vector<int> parent(n_);
    for (int v = 0; v < n_; ++v) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    int components = n_;
    for (const Edge& e : edges_) {
        int a = find(e.i), b = find(e.j);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components;
}

Eigen::MatrixXd Graph::laplacian() const {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n_, n_);
    for (const Edge& e : edges_) {
        l(e.i, e.j) -= e.w;
        l(e.j, e.i) -= e.w;
        l(e.i, e.i) += e.w;
        l(e.j, e.j) += e.w;
    }
    return l;
}

Graph gaussian_point_cloud_graph(const Eigen::MatrixXd& points, double sigma,
                                 const SparsifyRule& rule) {
    const int n = static_cast<int>(points.rows());
    if (n < 2) {
        throw DegenerateInput("point-cloud graph needs at least 2 points");
    }
    if (!(sigma > 0.0)) {
        throw InvalidParameter("sigma must be positive");
    }
    const double inv = 1.0 / (2.0 * sigma * sigma);

    auto weight = [&](int i, int j) {
        const double d2 = (points.row(i) - points.row(j)).squaredNorm();
        return std::exp(-d2 * inv);
    };

    std::vector<Edge> edges;
    switch (rule.mode) {
    case SparsifyRule::Mode::Dense:
    case SparsifyRule::Mode::Threshold: {
        const double cut = rule.mode == SparsifyRule::Mode::Threshold ? rule.epsilon : 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double w = weight(i, j);
                if (w > 0.0 && w >= cut) edges.push_back({i, j, w});
            }
        }
        break;
    }
    case SparsifyRule::Mode::KnnSym: {
        const int k = std::min(std::max(rule.k, 1), n - 1);
        std::vector<std::pair<double, int>> order(n);
        for (int i = 0; i < n; ++i) {
            order.clear();
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                order.push_back({(points.row(i) - points.row(j)).squaredNorm(), j});
            }
            std::partial_sort(order.begin(), order.begin() + k, order.end());
            for (int m = 0; m < k; ++m) {
                const int j = order[m].second;
                const double w = weight(i, j);
                if (w > 0.0) edges.push_back({std::min(i, j), std::max(i, j), w});
            }
        }
        break;
    }
    }
    if (edges.empty()) {
        throw EmptyGraph("sparsification removed every edge");
    }
    return Graph::from_edges(n, edges);
}

Graph image_grid_graph(const Eigen::MatrixXd& image, double theta_w, double cutoff) {
    const int h = static_cast<int>(image.rows());
    const int w = static_cast<int>(image.cols());
    if (h < 2 || w < 2) {
        throw DegenerateInput("image grid graph needs at least a 2x2 image");
    }
    if (!(theta_w > 0.0)) {
        throw InvalidParameter("theta_w must be positive");
    }
    if (cutoff < 1.0) {
        throw EmptyGraph("no lattice pair lies within the distance cutoff");
    }
    const double inv = 1.0 / (2.0 * theta_w * theta_w);
    const double cut2 = cutoff * cutoff;
    const int reach = static_cast<int>(std::floor(cutoff));

    // Enumerate offsets (dr, dc) with 0 < dr^2+dc^2 <= cutoff^2, each
    // unordered pair once: dr > 0, or dr == 0 and dc > 0.
    std::vector<std::pair<int, int>> offsets;
    for (int dr = 0; dr <= reach; ++dr) {
        for (int dc = -reach; dc <= reach; ++dc) {
            if (dr == 0 && dc <= 0) continue;
            const double d2 = double(dr) * dr + double(dc) * dc;
            if (d2 <= cut2) offsets.push_back({dr, dc});
        }
    }

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(h) * w * offsets.size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const int v = r * w + c;
            for (const auto& [dr, dc] : offsets) {
                const int r2 = r + dr, c2 = c + dc;
                if (r2 < 0 || r2 >= h || c2 < 0 || c2 >= w) continue;
                const double d2 = double(dr) * dr + double(dc) * dc;
                const int u = r2 * w + c2;
                edges.push_back({std::min(v, u), std::max(v, u), std::exp(-d2 * inv)});
            }
        }
    }
    return Graph::from_edges(h * w, edges);
}

Graph read_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open edge list " + path);
    std::string line;
    int n = -1;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            if (hs >> key && key == "vertices") {
                if (!(hs >> n)) throw UnsupportedFormat("malformed #vertices header in " + path);
            }
            continue;
        }
        if (n < 0) throw UnsupportedFormat("edge list " + path + " is missing the #vertices header");
        std::istringstream ls(line);
        Edge e;
        if (!(ls >> e.i >> e.j >> e.w)) throw UnsupportedFormat("malformed edge line: " + line);
        edges.push_back(e);
    }
    if (n < 0) throw UnsupportedFormat("edge list " + path + " is missing the #vertices header");
    return Graph::from_edges(n, edges);
}

void write_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write edge list " + path);
    out << "#vertices " << g.n_vertices() << "\n";
    out.precision(17);
    for (const Edge& e : g.edges()) {
        out << e.i << "\t" << e.j << "\t" << e.w << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

} // namespace sgfrwt
