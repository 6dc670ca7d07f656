#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "sgfrwt/data_io.hpp"
#include "sgfrwt/graph.hpp"
#include "sgfrwt/transform.hpp"

using namespace sgfrwt;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int rc = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SGFRWT_CLI_PATH) + " " + args + " 2>&1";
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    while (std::fgets(buf.data(), buf.size(), pipe)) res.out += buf.data();
    const int status = pclose(pipe);
    res.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "sgfrwt_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string value_of(const std::string& stdout_text, const std::string& key) {
    const auto pos = stdout_text.find(key + "=");
    REQUIRE(pos != std::string::npos);
    const auto end = stdout_text.find_first_of(" \n", pos);
    return stdout_text.substr(pos + key.size() + 1, end - pos - key.size() - 1);
}

void write_signal(const fs::path& path, int n, unsigned seed) {
    std::ofstream out(path);
    unsigned state = seed;
    for (int i = 0; i < n; ++i) {
        state = state * 1664525u + 1013904223u;
        out << (state / double(1u << 31) - 1.0) << "\n";
    }
}

} // namespace

TEST_CASE("build-graph: swiss roll source, stats line, exit codes") {
    const fs::path dir = work_dir();
    const std::string edges = (dir / "roll.edges").string();
    const RunResult res =
        run_cli("build-graph --swiss-roll 80 --seed 5 --sigma 0.1 -o " + edges);
    CHECK(res.rc == 0);
    CHECK(value_of(res.out, "vertices") == "80");
    CHECK(value_of(res.out, "connected") == "yes");
    CHECK(read_edge_list(edges).n_vertices() == 80);

    // an aggressive threshold disconnects the cloud: warning + exit 2
    const RunResult warn = run_cli(
        "build-graph --swiss-roll 80 --seed 5 --sigma 0.1 --sparsify threshold --epsilon 0.9 -o " +
        (dir / "sparse.edges").string());
    CHECK(warn.rc == 2);
    CHECK(warn.out.find("disconnected") != std::string::npos);

    // usage errors exit 1
    CHECK(run_cli("build-graph -o " + (dir / "x.edges").string()).rc == 1);
    CHECK(run_cli("transform --graph missing.edges --signal missing.csv -o x.csv").rc == 1);
    CHECK(run_cli("no-such-command").rc == 1);
}

TEST_CASE("build-graph: pixel grid from a PGM image") {
    const fs::path dir = work_dir();
    Eigen::MatrixXd img(64, 64);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) img(r, c) = ((3 * r + 5 * c) % 256) / 255.0;
    write_pgm(img, (dir / "img.pgm").string());
    const RunResult res = run_cli("build-graph --pgm " + (dir / "img.pgm").string() +
                                  " --theta-w 1.0 -o " + (dir / "grid.edges").string());
    CHECK(res.rc == 0);
    CHECK(value_of(res.out, "vertices") == "4096");
    CHECK(value_of(res.out, "connected") == "yes");
}

TEST_CASE("transform: coefficient counts, fast-vs-exact agreement, complex output") {
    const fs::path dir = work_dir();
    const std::string edges = (dir / "g.edges").string();
    REQUIRE(run_cli("build-graph --swiss-roll 40 --seed 9 --sigma 0.2 -o " + edges).rc == 0);
    write_signal(dir / "f.csv", 40, 1);

    const std::string exact_csv = (dir / "exact.csv").string();
    const std::string fast_csv = (dir / "fast.csv").string();
    REQUIRE(run_cli("transform --graph " + edges + " --signal " + (dir / "f.csv").string() +
                    " --theta 1.0 --J 4 -o " + exact_csv)
                .rc == 0);
    REQUIRE(run_cli("transform --graph " + edges + " --signal " + (dir / "f.csv").string() +
                    " --theta 1.0 --J 4 --backend fast --M 50 -o " + fast_csv)
                .rc == 0);

    const CoefficientPyramid pe = read_pyramid_csv(exact_csv);
    const CoefficientPyramid pf = read_pyramid_csv(fast_csv);
    CHECK(pe.total_coefficients() == 40u * 5u);
    CHECK(pf.total_coefficients() == 40u * 5u);

    // reported sup bounds from the fast run's header cap the deviation
    std::map<int, double> bounds;
    std::ifstream in(fast_csv);
    std::string line;
    while (std::getline(in, line) && line[0] == '#') {
        const auto eq = line.find('=');
        if (line.rfind("# B_", 0) == 0) {
            bounds[std::stoi(line.substr(4, eq - 4))] = std::stod(line.substr(eq + 1));
        }
    }
    REQUIRE(bounds.size() == 5);
    double f_norm = 0.0;
    {
        std::ifstream fs_in(dir / "f.csv");
        double v;
        while (fs_in >> v) f_norm += v * v;
        f_norm = std::sqrt(f_norm);
    }
    for (int b = 0; b < 5; ++b) {
        const double dev = (pe.bands[b] - pf.bands[b]).cwiseAbs().maxCoeff();
        CHECK(dev <= bounds[b] * f_norm + 1e-12);
    }

    // a graph whose eigenvector matrix has a -1 eigenvalue yields genuinely
    // complex coefficients at fractional orders (P2 is the canonical case)
    {
        std::ofstream p2(dir / "p2.edges");
        p2 << "#vertices 2\n0\t1\t1.0\n";
    }
    write_signal(dir / "f2.csv", 2, 3);
    const std::string frac_csv = (dir / "frac.csv").string();
    REQUIRE(run_cli("transform --graph " + (dir / "p2.edges").string() + " --signal " +
                    (dir / "f2.csv").string() + " --theta 0.3 --J 2 -o " + frac_csv)
                .rc == 0);
    const CoefficientPyramid pc = read_pyramid_csv(frac_csv);
    double max_imag = 0.0;
    for (const auto& band : pc.bands) {
        max_imag = std::max(max_imag, band.imag().cwiseAbs().maxCoeff());
    }
    CHECK(max_imag > 1e-6);
}

TEST_CASE("atoms: theta-by-scale grid of CSV files") {
    const fs::path dir = work_dir();
    const std::string edges = (dir / "at.edges").string();
    REQUIRE(run_cli("build-graph --swiss-roll 50 --seed 11 --sigma 0.15 -o " + edges).rc == 0);

    const std::string out_dir = (dir / "atoms").string();
    const RunResult res = run_cli("atoms --graph " + edges +
                                  " --thetas 0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0 --J 4 "
                                  "--center 7 -o " +
                                  out_dir);
    CHECK(res.rc == 0);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(out_dir)) {
        ++files;
        (void)entry;
    }
    CHECK(files == 10 * 5); // 10 orders x (J+1) bands

    // at theta = 1 atoms are real, so the phase column is 0 (mod pi)
    std::ifstream in(fs::path(out_dir) / "atom_theta1.00_band2.csv");
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_done) {
            header_done = true;
            continue;
        }
        const auto last = line.rfind(',');
        const double phase = std::stod(line.substr(last + 1));
        // arg() of a real atom entry with ~1e-18 imaginary residue wobbles at
        // the (imag / |value|) level, so the tolerance is loose
        const double mod = std::abs(std::remainder(phase, std::acos(-1.0)));
        CHECK(mod <= 1e-6);
    }
    CHECK(run_cli("atoms --graph " + edges + " --thetas 1.0 --center 99 -o " + out_dir).rc == 1);
}

TEST_CASE("reconstruct: fast round trip, operator cache, forced non-convergence") {
    const fs::path dir = work_dir();
    const std::string edges = (dir / "rc.edges").string();
    REQUIRE(run_cli("build-graph --swiss-roll 48 --seed 21 --sigma 0.2 -o " + edges).rc == 0);
    write_signal(dir / "rf.csv", 48, 5);

    const std::string cache = (dir / "op.fgw").string();
    const std::string pyr = (dir / "rp.csv").string();
    REQUIRE(run_cli("transform --graph " + edges + " --signal " + (dir / "rf.csv").string() +
                    " --theta 0.5 --J 4 --backend fast --M 40 --cache " + cache + " -o " + pyr)
                .rc == 0);
    CHECK(fs::exists(cache));

    // reconstruct straight from the cache (no graph needed)
    const RunResult res = run_cli("reconstruct --pyramid " + pyr + " --cache " + cache +
                                  " --J 4 --M 40 --tol 1e-10 --max-iter 200 -o " +
                                  (dir / "rec.csv").string() + " --reference " +
                                  (dir / "rf.csv").string());
    CHECK(res.rc == 0);
    CHECK(value_of(res.out, "converged") == "yes");
    CHECK(std::stod(value_of(res.out, "relative_error")) <= 1e-6);

    // zero pyramid reconstructs to zero in zero iterations
    {
        CoefficientPyramid zero = read_pyramid_csv(pyr);
        for (auto& band : zero.bands) band.setZero();
        write_pyramid_csv(zero, (dir / "zp.csv").string());
    }
    const RunResult zres = run_cli("reconstruct --pyramid " + (dir / "zp.csv").string() +
                                   " --cache " + cache + " --J 4 --M 40 -o " +
                                   (dir / "zrec.csv").string());
    CHECK(zres.rc == 0);
    CHECK(value_of(zres.out, "iterations") == "0");

    // forced failure: one iteration at an unreachable tolerance
    const RunResult bad = run_cli("reconstruct --pyramid " + pyr + " --cache " + cache +
                                  " --J 4 --M 40 --tol 1e-14 --max-iter 1 -o " +
                                  (dir / "bad.csv").string());
    CHECK(bad.rc == 3);
    CHECK(fs::exists(dir / "bad.csv")); // result still written
}

TEST_CASE("augment: dataset arithmetic from the command line") {
    const fs::path dir = work_dir();
    ImageDataset ds;
    ds.height = 8;
    ds.width = 8;
    for (int i = 0; i < 5; ++i) {
        std::vector<std::uint8_t> img(64);
        for (int p = 0; p < 64; ++p) img[p] = static_cast<std::uint8_t>((i * 19 + p) % 256);
        ds.images.push_back(std::move(img));
        ds.labels.push_back(static_cast<std::uint8_t>(i));
    }
    write_idx_images(ds, (dir / "in.idx").string());
    write_idx_labels(ds.labels, (dir / "in_labels.idx").string());

    const RunResult res = run_cli("augment --images " + (dir / "in.idx").string() + " --labels " +
                                  (dir / "in_labels.idx").string() +
                                  " --thetas 0.2,0.4,0.6,0.8,1.0 --J 5 -o " +
                                  (dir / "aug").string());
    CHECK(res.rc == 0);
    CHECK(value_of(res.out, "outputs") == "150"); // 5 x 5 x 6
}

TEST_CASE("bench: matvec counter column equals 2M") {
    const fs::path dir = work_dir();
    const std::string csv = (dir / "bench.csv").string();
    const RunResult res =
        run_cli("bench --sizes 24,32 --orders 5,10 --signals 2 --theta 0.7 --J 3 -o " + csv);
    CHECK(res.rc == 0);

    std::ifstream in(csv);
    std::string line;
    std::getline(in, line); // header
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        REQUIRE(cols.size() == 21);
        const int m = std::stoi(cols[6]);
        CHECK(std::stoi(cols[14]) == 2 * m);
        ++rows;
    }
    CHECK(rows == 4);
}

TEST_CASE("command output is byte-deterministic for a fixed configuration") {
    const fs::path dir = work_dir();
    const std::string edges = (dir / "det.edges").string();
    REQUIRE(run_cli("build-graph --swiss-roll 24 --seed 6 --sigma 0.2 -o " + edges).rc == 0);
    write_signal(dir / "df.csv", 24, 4);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    };
    for (int run = 0; run < 2; ++run) {
        REQUIRE(run_cli("transform --graph " + edges + " --signal " + (dir / "df.csv").string() +
                        " --theta 0.7 --J 3 --backend fast --M 20 -o " +
                        (dir / ("d" + std::to_string(run) + ".csv")).string())
                    .rc == 0);
    }
    CHECK(slurp(dir / "d0.csv") == slurp(dir / "d1.csv"));

    const std::string edges2 = (dir / "det2.edges").string();
    REQUIRE(run_cli("build-graph --swiss-roll 24 --seed 6 --sigma 0.2 -o " + edges2).rc == 0);
    CHECK(slurp(edges) == slurp(edges2));
}

TEST_CASE("config file supplies defaults, flags win") {
    const fs::path dir = work_dir();
    {
        std::ofstream cfg(dir / "t.cfg");
        cfg << "J=3\ntheta=0.5\n";
    }
    const std::string edges = (dir / "cfg.edges").string();
    REQUIRE(run_cli("build-graph --swiss-roll 30 --seed 2 --sigma 0.2 -o " + edges).rc == 0);
    write_signal(dir / "cf.csv", 30, 9);

    // J comes from the file (3 scales + scaling band = 4)
    const RunResult from_file =
        run_cli("transform --graph " + edges + " --signal " + (dir / "cf.csv").string() +
                " --config " + (dir / "t.cfg").string() + " -o " + (dir / "c1.csv").string());
    CHECK(from_file.rc == 0);
    CHECK(value_of(from_file.out, "bands") == "4");

    // an explicit flag overrides the file
    const RunResult flag_wins =
        run_cli("transform --graph " + edges + " --signal " + (dir / "cf.csv").string() +
                " --config " + (dir / "t.cfg").string() + " --J 2 -o " +
                (dir / "c2.csv").string());
    CHECK(flag_wins.rc == 0);
    CHECK(value_of(flag_wins.out, "bands") == "3");
}
