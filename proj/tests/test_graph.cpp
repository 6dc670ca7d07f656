#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "sgfrwt/graph.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace sgfrwt;
namespace ts = sgfrwt::testsupport;

TEST_CASE("build_graph: minimal graph and symmetric duplicate merging") {
    const Graph g = Graph::from_edges(2, {{0, 1, 1.0}});
    CHECK(g.n_vertices() == 2);
    CHECK(g.edges().size() == 1);

    // (0,1) and (1,0) with the same weight collapse to one edge
    const Graph h = Graph::from_edges(3, {{0, 1, 1.0}, {1, 0, 1.0}});
    CHECK(h.edges().size() == 1);
    CHECK(h.edges()[0].i == 0);
    CHECK(h.edges()[0].j == 1);
}

TEST_CASE("build_graph: rejected inputs") {
    CHECK_THROWS_AS(Graph::from_edges(3, {{0, 0, 1.0}}), SelfLoop);
    CHECK_THROWS_AS(Graph::from_edges(3, {{0, 3, 1.0}}), IndexOutOfRange);
    CHECK_THROWS_AS(Graph::from_edges(3, {{-1, 1, 1.0}}), IndexOutOfRange);
    CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1, 0.0}}), NonPositiveWeight);
    CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1, -2.0}}), NonPositiveWeight);
    CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1, 1.0}, {1, 0, 2.0}}),
                    ConflictingDuplicateEdge);
}

TEST_CASE("laplacian: path graphs against hand-computed matrices") {
    const Eigen::MatrixXd l2 = ts::path_graph(2).laplacian();
    Eigen::MatrixXd want2(2, 2);
    want2 << 1, -1, -1, 1;
    CHECK((l2 - want2).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::MatrixXd l3 = ts::path_graph(3).laplacian();
    Eigen::MatrixXd want3(3, 3);
    want3 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK((l3 - want3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian: P3 spectrum {0,1,3} from the Jacobi oracle") {
    // char poly of P3's Laplacian factors as -l(l-1)(l-3); the Jacobi
    // eigensolve reproduces exactly those roots.
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    oracles::jacobi_eig(ts::path_graph(3).laplacian(), values, vectors);
    CHECK(values[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(values[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(values[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("laplacian properties on random graphs") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const Graph g = ts::random_connected_graph(24, seed, 0.1);
        const Eigen::MatrixXd l = g.laplacian();
        CHECK((l - l.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
        oracles::jacobi_eig(l, values, vectors);
        CHECK(values[0] >= -1e-10);
    }
}

TEST_CASE("zero eigenvalue count equals connected component count") {
    // two components: P3 + P2, then three components
    Graph two = Graph::from_edges(5, {{0, 1, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}});
    CHECK(two.connected_components() == 2);
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    oracles::jacobi_eig(two.laplacian(), values, vectors);
    int zeros = 0;
    for (int i = 0; i < values.size(); ++i)
        if (std::abs(values[i]) < 1e-9) ++zeros;
    CHECK(zeros == 2);

    Graph three = Graph::from_edges(6, {{0, 1, 2.0}, {2, 3, 1.0}, {4, 5, 0.5}});
    CHECK(three.connected_components() == 3);
    oracles::jacobi_eig(three.laplacian(), values, vectors);
    zeros = 0;
    for (int i = 0; i < values.size(); ++i)
        if (std::abs(values[i]) < 1e-9) ++zeros;
    CHECK(zeros == 3);
}

TEST_CASE("gaussian point cloud weights") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0.0, 0.0,
           0.0, 0.0,                  // duplicate location
           0.2 * std::sqrt(2.0), 0.0; // distance sigma*sqrt(2) for sigma=0.2
    const Graph g = gaussian_point_cloud_graph(pts, 0.2, {});
    double w01 = 0, w02 = 0;
    for (const Edge& e : g.edges()) {
        if (e.i == 0 && e.j == 1) w01 = e.w;
        if (e.i == 0 && e.j == 2) w02 = e.w;
    }
    CHECK(w01 == doctest::Approx(1.0).epsilon(1e-15));            // zero distance
    CHECK(w02 == doctest::Approx(std::exp(-1.0)).epsilon(1e-12)); // |x| = sigma sqrt(2)

    for (const Edge& e : g.edges()) {
        CHECK(e.w > 0.0);
        CHECK(e.w <= 1.0);
    }

    CHECK_THROWS_AS(gaussian_point_cloud_graph(pts.topRows(1), 0.2, {}), DegenerateInput);
    CHECK_THROWS_AS(gaussian_point_cloud_graph(pts, 0.0, {}), InvalidParameter);
}

TEST_CASE("gaussian point cloud: weight 1 only at distance 0") {
    std::mt19937_64 rng(77);
    Eigen::MatrixXd pts(20, 3);
    for (int i = 0; i < pts.rows(); ++i)
        for (int j = 0; j < 3; ++j) pts(i, j) = ts::uniform01(rng);
    const Graph g = gaussian_point_cloud_graph(pts, 0.5, {});
    for (const Edge& e : g.edges()) {
        const double d = (pts.row(e.i) - pts.row(e.j)).norm();
        if (d > 0) CHECK(e.w < 1.0);
    }
}

TEST_CASE("gaussian point cloud sparsification modes") {
    std::mt19937_64 rng(5);
    Eigen::MatrixXd pts(30, 2);
    for (int i = 0; i < 30; ++i) {
        pts(i, 0) = ts::uniform01(rng);
        pts(i, 1) = ts::uniform01(rng);
    }
    const Graph dense = gaussian_point_cloud_graph(pts, 0.3, {});
    CHECK(dense.edges().size() == 30 * 29 / 2);

    SparsifyRule thr;
    thr.mode = SparsifyRule::Mode::Threshold;
    thr.epsilon = 0.5;
    const Graph sparse = gaussian_point_cloud_graph(pts, 0.3, thr);
    CHECK(sparse.edges().size() < dense.edges().size());
    for (const Edge& e : sparse.edges()) CHECK(e.w >= 0.5);

    SparsifyRule knn;
    knn.mode = SparsifyRule::Mode::KnnSym;
    knn.k = 3;
    const Graph kg = gaussian_point_cloud_graph(pts, 0.3, knn);
    // union of 3-NN lists: between 3n/2 and 3n edges
    CHECK(kg.edges().size() <= 3u * 30u);
    CHECK(kg.edges().size() >= 45u);
}

TEST_CASE("image grid graph: 2x2 lattice") {
    const double theta_w = 0.7;
    const Graph g = image_grid_graph(Eigen::MatrixXd::Zero(2, 2), theta_w, 1.0);
    CHECK(g.n_vertices() == 4);
    CHECK(g.edges().size() == 4); // 2 horizontal + 2 vertical
    const double want = std::exp(-1.0 / (2.0 * theta_w * theta_w));
    for (const Edge& e : g.edges()) CHECK(e.w == doctest::Approx(want).epsilon(1e-15));
    CHECK(g.is_connected());
}

TEST_CASE("image grid graph: cutoff below lattice spacing is empty") {
    CHECK_THROWS_AS(image_grid_graph(Eigen::MatrixXd::Zero(2, 2), 1.0, 0.5), EmptyGraph);
}

TEST_CASE("image grid graph: cutoff sqrt(2) adds diagonals") {
    const Graph g = image_grid_graph(Eigen::MatrixXd::Zero(2, 2), 1.0, std::sqrt(2.0) + 1e-12);
    CHECK(g.edges().size() == 6); // 4 sides + 2 diagonals
}

TEST_CASE("image grid graph: 64x64 image gives 4096 vertices") {
    const Graph g = image_grid_graph(Eigen::MatrixXd::Zero(64, 64), 1.0, 1.0);
    CHECK(g.n_vertices() == 4096);
    CHECK(g.edges().size() == 2u * 64u * 63u);
    CHECK(g.is_connected());
    CHECK_THROWS_AS(image_grid_graph(Eigen::MatrixXd::Zero(1, 5), 1.0, 1.0), DegenerateInput);
}

TEST_CASE("edge list round trip and format errors") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sgfrwt_graph_test";
    fs::create_directories(dir);

    const Graph g = ts::random_connected_graph(17, 99, 0.2);
    const std::string path = (dir / "g.edges").string();
    write_edge_list(g, path);
    const Graph back = read_edge_list(path);
    CHECK(back.n_vertices() == g.n_vertices());
    REQUIRE(back.edges().size() == g.edges().size());
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        CHECK(back.edges()[i].i == g.edges()[i].i);
        CHECK(back.edges()[i].j == g.edges()[i].j);
        CHECK(back.edges()[i].w == g.edges()[i].w); // full precision round trip
    }

    const std::string no_header = (dir / "broken.edges").string();
    {
        std::FILE* f = std::fopen(no_header.c_str(), "w");
        std::fputs("0\t1\t1.0\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(read_edge_list(no_header), UnsupportedFormat);
    CHECK_THROWS_AS(read_edge_list((dir / "missing.edges").string()), IoError);
    fs::remove_all(dir);
}
