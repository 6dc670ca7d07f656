// sgfrwt: spectral graph fractional wavelet transform toolbox.
//
// Subcommands: build-graph, transform, atoms, reconstruct, augment, bench.
// Exit codes: 0 success, 1 usage/validation error, 2 graph-quality warning,
// 3 non-convergence (output is still written).

#include <chrono>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgfrwt/data_io.hpp"
#include "sgfrwt/fast.hpp"
#include "sgfrwt/graph.hpp"
#include "sgfrwt/kernels.hpp"
#include "sgfrwt/spectral.hpp"
#include "sgfrwt/transform.hpp"

namespace {

using namespace sgfrwt;
namespace fs = std::filesystem;
using KV = std::vector<std::pair<std::string, std::string>>;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::vector<double> parse_theta_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw InvalidParameter("empty theta list");
    return out;
}

Eigen::VectorXd read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open signal " + path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        vals.push_back(std::stod(line));
    }
    Eigen::VectorXd f(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) f[i] = vals[i];
    return f;
}

void write_signal_csv(const Eigen::VectorXd& f, const std::string& path, const KV& header) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write signal " + path);
    out << std::setprecision(17);
    for (const auto& [k, v] : header) out << "# " << k << "=" << v << "\n";
    for (int i = 0; i < f.size(); ++i) out << f[i] << "\n";
}

// Shared kernel/transform parameters mirrored by several subcommands.
struct TransformParams {
    double theta = 1.0;
    int J = 5;
    double K = 20.0;
    int alpha = 2, beta = 2;
    double x1 = 1.0, x2 = 2.0;
    int M = 40;
    std::string backend = "exact";
    std::string scales_csv; // explicit scales override the log-spaced rule

    void attach(CLI::App* cmd, bool with_theta = true) {
        if (with_theta) {
            cmd->add_option("--theta", theta, "fractional order in (0,1]")
                ->check(CLI::Range(0.0, 1.0));
        }
        cmd->add_option("--J", J, "number of wavelet scales")->check(CLI::PositiveNumber);
        cmd->add_option("--K", K, "spectrum-ratio design parameter");
        cmd->add_option("--alpha", alpha, "kernel rise exponent");
        cmd->add_option("--beta", beta, "kernel decay exponent");
        cmd->add_option("--x1", x1, "kernel transition start");
        cmd->add_option("--x2", x2, "kernel transition end");
        cmd->add_option("--M", M, "Fourier truncation order (fast backend)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--backend", backend, "exact | fast")
            ->check(CLI::IsMember({"exact", "fast"}));
        cmd->add_option("--scales", scales_csv,
                        "comma-separated explicit wavelet scales (decreasing; overrides --J)");
    }

    KV provenance(bool with_theta = true) const {
        KV kv;
        if (with_theta) kv.push_back({"theta", fmt(theta)});
        kv.push_back({"J", std::to_string(J)});
        kv.push_back({"K", fmt(K)});
        kv.push_back({"alpha", std::to_string(alpha)});
        kv.push_back({"beta", std::to_string(beta)});
        kv.push_back({"x1", fmt(x1)});
        kv.push_back({"x2", fmt(x2)});
        kv.push_back({"M", std::to_string(M)});
        kv.push_back({"backend", backend});
        return kv;
    }

    FilterBank bank(double r_max) const {
        if (!scales_csv.empty()) {
            return make_filter_bank_with_scales(r_max, K, parse_theta_list(scales_csv), alpha,
                                                beta, x1, x2);
        }
        return make_filter_bank(r_max, J, K, alpha, beta, x1, x2);
    }
};

struct LoadedOperator {
    std::optional<SpectralDecomposition> dec;
    std::optional<FractionalOperator> op;
};

// Operator from --graph (computed, optionally cached to --cache) or straight
// from an existing cache file.
LoadedOperator load_operator(const std::string& graph_path, const std::string& cache_path,
                             double theta) {
    LoadedOperator out;
    if (!cache_path.empty() && fs::exists(cache_path) && graph_path.empty()) {
        out.op = FractionalOperator::load(cache_path);
        if (std::abs(out.op->theta() - theta) > 1e-12) {
            throw InvalidParameter("cached operator has theta=" + fmt(out.op->theta()) +
                                   ", requested " + fmt(theta));
        }
        return out;
    }
    if (graph_path.empty()) {
        throw InvalidParameter("need --graph (or an existing --cache file)");
    }
    const Graph g = read_edge_list(graph_path);
    out.dec = eig_decompose(g.laplacian());
    out.op = fractional_basis(*out.dec, theta);
    if (!cache_path.empty()) out.op->save(cache_path);
    return out;
}

// ---------------------------------------------------------------- build-graph

struct BuildGraphArgs {
    int swiss_roll_n = 0;
    std::uint64_t seed = 0;
    double sigma = 0.1;
    std::string points_path, pgm_path, edges_path;
    double theta_w = 1.0;
    double cutoff = 1.0;
    std::string sparsify = "dense";
    double epsilon = 1e-8;
    int knn = 8;
    std::string out;
};

int run_build_graph(const BuildGraphArgs& a) {
    int sources = (a.swiss_roll_n > 0) + !a.points_path.empty() + !a.pgm_path.empty() +
                  !a.edges_path.empty();
    if (sources != 1) {
        std::cerr << "build-graph: exactly one of --swiss-roll/--points/--pgm/--edges\n";
        return 1;
    }

    Graph g;
    if (a.swiss_roll_n > 0 || !a.points_path.empty()) {
        Eigen::MatrixXd pts;
        if (a.swiss_roll_n > 0) {
            pts = swiss_roll(a.swiss_roll_n, a.seed).points;
        } else {
            std::ifstream in(a.points_path);
            if (!in) throw IoError("cannot open points " + a.points_path);
            std::vector<std::vector<double>> rows;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                std::istringstream ls(line);
                std::string tok;
                std::vector<double> row;
                while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
                if (!row.empty()) rows.push_back(std::move(row));
            }
            if (rows.empty()) throw DegenerateInput("no points in " + a.points_path);
            pts.resize(rows.size(), rows[0].size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].size() != static_cast<std::size_t>(pts.cols())) {
                    throw DimensionMismatch("ragged point rows in " + a.points_path);
                }
                for (std::size_t j = 0; j < rows[i].size(); ++j) pts(i, j) = rows[i][j];
            }
        }
        SparsifyRule rule;
        if (a.sparsify == "threshold") {
            rule.mode = SparsifyRule::Mode::Threshold;
            rule.epsilon = a.epsilon;
        } else if (a.sparsify == "knn") {
            rule.mode = SparsifyRule::Mode::KnnSym;
            rule.k = a.knn;
        }
        g = gaussian_point_cloud_graph(pts, a.sigma, rule);
    } else if (!a.pgm_path.empty()) {
        g = image_grid_graph(read_pgm(a.pgm_path), a.theta_w, a.cutoff);
    } else {
        g = read_edge_list(a.edges_path);
    }

    write_edge_list(g, a.out);
    const int components = g.connected_components();
    std::cout << "vertices=" << g.n_vertices() << " edges=" << g.edges().size()
              << " connected=" << (components == 1 ? "yes" : "no")
              << " components=" << components << "\n";
    if (components != 1) {
        std::cerr << "warning: graph is disconnected; transform pipelines assume one component\n";
        return 2;
    }
    return 0;
}

// ------------------------------------------------------------------ transform

struct TransformArgs {
    std::string graph, signal, cache, out;
    TransformParams params;
};

int run_transform(const TransformArgs& a) {
    const LoadedOperator lo = load_operator(a.graph, a.cache, a.params.theta);
    const FractionalOperator& op = *lo.op;
    const Eigen::VectorXd f = read_signal_csv(a.signal);
    if (f.size() != op.size()) {
        throw DimensionMismatch("signal has " + std::to_string(f.size()) + " values, graph has " +
                                std::to_string(op.size()));
    }
    const FilterBank bank = a.params.bank(op.r_max_bound());

    KV header = a.params.provenance(false); // pyramid CSV already records theta
    header.push_back({"n", std::to_string(op.size())});
    header.push_back({"r_max", fmt(op.r_max_bound())});

    CoefficientPyramid p;
    if (a.params.backend == "fast") {
        const FourierApprox fa = FourierApprox::build(bank, a.params.M);
        const PropagatorPair pp = build_propagators(op);
        p = forward_fast(f, pp, fa, /*conjugate_shortcut=*/op.theta() == 1.0);
        for (int b = 0; b < fa.bands(); ++b) {
            header.push_back({"B_" + std::to_string(b), fmt(fa.sup_error[b])});
        }
        header.push_back({"matvecs", std::to_string(pp.matvec_count())});
    } else {
        p = forward_exact(f, op, bank);
    }
    write_pyramid_csv(p, a.out, header);
    std::cout << "bands=" << p.n_bands() << " vertices=" << p.n_vertices()
              << " coefficients=" << p.total_coefficients() << "\n";
    return 0;
}

// ---------------------------------------------------------------------- atoms

struct AtomsArgs {
    std::string graph, out_dir, thetas = "1.0";
    int center = 0;
    TransformParams params;
};

int run_atoms(const AtomsArgs& a) {
    const std::vector<double> thetas = parse_theta_list(a.thetas);
    const Graph g = read_edge_list(a.graph);
    const SpectralDecomposition dec = eig_decompose(g.laplacian());
    if (a.center < 0 || a.center >= dec.size()) {
        throw IndexOutOfRange("center vertex " + std::to_string(a.center) + " out of range");
    }
    // one factorisation serves the whole theta grid
    BasisFactorization basis;
    bool need_basis = false;
    for (double t : thetas) need_basis |= (t != 0.0);
    if (need_basis) basis = factor_basis(dec);

    fs::create_directories(a.out_dir);
    int atoms_written = 0;
    for (double theta : thetas) {
        const FractionalOperator op =
            theta == 0.0 ? fractional_basis(dec, 0.0) : FractionalOperator(dec, basis, theta);
        const FilterBank bank = a.params.bank(op.r_max_bound());
        for (int band = 0; band < bank.bands(); ++band) {
            const Eigen::VectorXcd psi = atom(op, bank, band, a.center);
            std::ostringstream name;
            name << "atom_theta" << std::fixed << std::setprecision(2) << theta << "_band" << band
                 << ".csv";
            std::ofstream out(fs::path(a.out_dir) / name.str());
            if (!out) throw IoError("cannot write atom CSV in " + a.out_dir);
            out << std::setprecision(17);
            KV header = a.params.provenance();
            header.push_back({"center", std::to_string(a.center)});
            header.push_back({"band", std::to_string(band)});
            for (const auto& [k, v] : header) out << "# " << k << "=" << v << "\n";
            out << "vertex,re,im,magnitude,phase\n";
            for (int i = 0; i < psi.size(); ++i) {
                out << i << "," << psi[i].real() << "," << psi[i].imag() << ","
                    << std::abs(psi[i]) << "," << std::arg(psi[i]) << "\n";
            }
            ++atoms_written;
        }
    }
    std::cout << "atoms=" << atoms_written << " center=" << a.center << "\n";
    return 0;
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructArgs {
    std::string pyramid, graph, cache, out, reference;
    double tol = 1e-10;
    int max_iter = 200;
    TransformParams params;
};

int run_reconstruct(const ReconstructArgs& a) {
    CoefficientPyramid p = read_pyramid_csv(a.pyramid);
    TransformParams params = a.params;
    params.theta = p.theta;

    // theta and scales travel inside the pyramid; the kernel shape parameters
    // do not, so flag a header mismatch instead of silently inverting with a
    // different bank
    {
        std::ifstream in(a.pyramid);
        std::string line;
        while (std::getline(in, line) && !line.empty() && line[0] == '#') {
            const auto eq = line.find('=');
            if (line.rfind("# K=", 0) == 0 && eq != std::string::npos) {
                const double k_used = std::stod(line.substr(eq + 1));
                if (std::abs(k_used - params.K) > 1e-12) {
                    std::cerr << "warning: pyramid was produced with K=" << k_used
                              << " but reconstruction uses K=" << params.K << "\n";
                }
            }
        }
    }
    const LoadedOperator lo = load_operator(a.graph, a.cache, p.theta);
    const FractionalOperator& op = *lo.op;
    if (p.n_vertices() != op.size()) {
        throw DimensionMismatch("pyramid size does not match the operator");
    }

    FilterBank bank = p.scales.empty()
                          ? params.bank(op.r_max_bound())
                          : make_filter_bank_with_scales(op.r_max_bound(), params.K, p.scales,
                                                         params.alpha, params.beta, params.x1,
                                                         params.x2);
    const FourierApprox fa = FourierApprox::build(bank, params.M);
    const PropagatorPair pp = build_propagators(op);
    const CgResult res = reconstruct_cg(p, pp, fa, a.tol, a.max_iter);

    KV header = params.provenance();
    header.push_back({"iterations", std::to_string(res.iterations)});
    header.push_back({"relative_residual", fmt(res.relative_residual)});
    header.push_back({"converged", res.converged ? "yes" : "no"});
    header.push_back({"imag_residue", fmt(res.imag_residue)});
    write_signal_csv(res.signal, a.out, header);

    std::cout << "iterations=" << res.iterations << " residual=" << res.relative_residual
              << " converged=" << (res.converged ? "yes" : "no")
              << " matvecs=" << pp.matvec_count() << "\n";
    if (res.imag_residue > 1e-6 * res.signal.norm()) {
        std::cerr << "warning: imaginary residue " << res.imag_residue
                  << " exceeds 1e-6 of the signal norm (truncation quality degraded)\n";
    }
    if (!a.reference.empty()) {
        const Eigen::VectorXd ref = read_signal_csv(a.reference);
        if (ref.size() == res.signal.size() && ref.norm() > 0) {
            std::cout << "relative_error=" << (res.signal - ref).norm() / ref.norm() << "\n";
        }
    }
    if (!res.converged) {
        std::cerr << "warning: conjugate gradients stopped before reaching tol\n";
        return 3;
    }
    return 0;
}

// -------------------------------------------------------------------- augment

struct AugmentArgs {
    std::string images, labels, out_dir, thetas = "0.2,0.4,0.6,0.8,1.0";
    std::string band_mode = "magnitude";
    bool traditional = false;
    double theta_w = 1.0;
    double cutoff = 1.0;
    int threads = 1;
    std::uint64_t seed = 0;
    int subsample = 0;
    std::uint64_t subsample_seed = 0;
    TransformParams params;
};

int run_augment(const AugmentArgs& a) {
    ImageDataset ds = read_idx_images(a.images);
    if (!a.labels.empty()) ds.labels = read_idx_labels(a.labels);

    AugmentConfig cfg;
    cfg.thetas = parse_theta_list(a.thetas);
    cfg.J = a.params.J;
    cfg.K = a.params.K;
    cfg.alpha = a.params.alpha;
    cfg.beta = a.params.beta;
    cfg.x1 = a.params.x1;
    cfg.x2 = a.params.x2;
    cfg.theta_w = a.theta_w;
    cfg.cutoff = a.cutoff;
    cfg.use_fast = a.params.backend == "fast";
    cfg.fourier_order = a.params.M;
    cfg.write_real_part = a.band_mode == "real";
    cfg.traditional = a.traditional;
    cfg.out_dir = a.out_dir;
    cfg.threads = a.threads;
    cfg.seed = a.seed;
    cfg.subsample = a.subsample;
    cfg.subsample_seed = a.subsample_seed;

    const AugmentResult res = augment_dataset(ds, cfg);
    std::cout << "images=" << ds.count() << " thetas=" << cfg.thetas.size()
              << " bands=" << (cfg.J + 1) << " outputs=" << res.outputs_written
              << " manifest=" << res.manifest_path << "\n";
    return 0;
}

// ----------------------------------------------------------------------- bench

struct BenchArgs {
    std::string sizes = "64,128,256";
    std::string family = "er";
    std::uint64_t seed = 7;
    std::string m_list = "5,10,20,40";
    int signals = 5;
    std::string out;
    TransformParams params;
};

Graph bench_graph(const std::string& family, int n, std::uint64_t seed) {
    if (family == "grid") {
        int side = 2;
        while (side * side < n) ++side;
        return image_grid_graph(Eigen::MatrixXd::Zero(side, side), 1.0, 1.0);
    }
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    std::set<std::pair<int, int>> seen;
    auto u01 = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int v = 1; v < n; ++v) {
        const int u = static_cast<int>(u01() * v);
        edges.push_back({u, v, 0.5 + u01()});
        seen.insert({u, v});
    }
    const double density = std::min(0.05, 8.0 / n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (u01() < density && !seen.count({i, j})) edges.push_back({i, j, 0.5 + u01()});
        }
    }
    return Graph::from_edges(n, edges);
}

int run_bench(const BenchArgs& a) {
    std::vector<int> sizes;
    {
        std::istringstream ss(a.sizes);
        std::string tok;
        while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
    }
    std::vector<int> orders;
    {
        std::istringstream ss(a.m_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) orders.push_back(std::stoi(tok));
    }

    std::ofstream csv;
    if (!a.out.empty()) {
        csv.open(a.out);
        if (!csv) throw IoError("cannot write bench report " + a.out);
    }
    std::ostream& out = a.out.empty() ? std::cout : csv;
    out << "family,n,edges,theta,J,K,M,eig_s,basis_s,power_s,propagator_s,coeff_s,"
           "exact_per_signal_s,fast_per_signal_s,matvecs_per_signal,max_error,"
           "wtw_single_s,wtw_sequential_s,matvec_s,cg_iterations,cg_residual\n";
    out << std::setprecision(6);

    for (int n : sizes) {
        const Graph g = bench_graph(a.family, n, a.seed);
        double t0 = now_seconds();
        const SpectralDecomposition dec = eig_decompose(g.laplacian());
        const double t_eig = now_seconds() - t0;

        t0 = now_seconds();
        const BasisFactorization basis = factor_basis(dec);
        const double t_basis = now_seconds() - t0;

        t0 = now_seconds();
        const FractionalOperator op(dec, basis, a.params.theta);
        op.gamma();
        const double t_power = now_seconds() - t0;

        t0 = now_seconds();
        const PropagatorPair pp = build_propagators(op);
        const double t_prop = now_seconds() - t0;

        const FilterBank bank = a.params.bank(op.r_max_bound());

        std::mt19937_64 rng(a.seed * 1000 + n);
        std::normal_distribution<double> gauss;
        std::vector<Eigen::VectorXd> fs(std::max(1, a.signals));
        for (auto& f : fs) {
            f.resize(g.n_vertices());
            for (int i = 0; i < f.size(); ++i) f[i] = gauss(rng);
        }

        for (int m : orders) {
            t0 = now_seconds();
            const FourierApprox fa = FourierApprox::build(bank, m);
            const double t_coeff = now_seconds() - t0;
            const FourierSeries product = product_coefficients(fa);

            double t_exact = 0.0, t_fast = 0.0, max_err = 0.0;
            std::uint64_t matvecs = 0;
            double t_wtw = 0.0, t_seq = 0.0;
            for (const auto& f : fs) {
                t0 = now_seconds();
                const CoefficientPyramid pe = forward_exact(f, op, bank);
                t_exact += now_seconds() - t0;

                pp.reset_matvec_count();
                t0 = now_seconds();
                const CoefficientPyramid pf = forward_fast(f, pp, fa);
                t_fast += now_seconds() - t0;
                matvecs += pp.matvec_count();

                for (int b = 0; b < bank.bands(); ++b) {
                    max_err = std::max(max_err,
                                       (pf.bands[b] - pe.bands[b]).cwiseAbs().maxCoeff());
                }

                const Eigen::VectorXcd fc = f.cast<std::complex<double>>();
                t0 = now_seconds();
                const Eigen::VectorXcd single = wtw_apply(fc, pp, product);
                t_wtw += now_seconds() - t0;
                t0 = now_seconds();
                const Eigen::VectorXcd seq = adjoint_fast(forward_fast(f, pp, fa).bands, pp, fa);
                t_seq += now_seconds() - t0;
                (void)single;
                (void)seq;
            }
            // CG round trip on the last signal for the report
            const CoefficientPyramid cg_input = forward_fast(fs.back(), pp, fa);
            const CgResult cg = reconstruct_cg(cg_input, pp, fa, 1e-10, 200);

            const double per = 1.0 / fs.size();
            const double per_matvec =
                matvecs > 0 ? t_fast * per / double(matvecs / fs.size()) : 0.0;
            out << a.family << "," << g.n_vertices() << "," << g.edges().size() << ","
                << a.params.theta << "," << a.params.J << "," << a.params.K << "," << m << ","
                << t_eig << "," << t_basis << "," << t_power << "," << t_prop << "," << t_coeff
                << "," << t_exact * per << "," << t_fast * per << "," << matvecs / fs.size() << ","
                << max_err << "," << t_wtw * per << "," << t_seq * per << "," << per_matvec << ","
                << cg.iterations << "," << cg.relative_residual << "\n";

            std::cout << "# n=" << g.n_vertices() << " M=" << m
                      << " matvecs_per_signal=" << matvecs / fs.size()
                      << " max_error=" << std::setprecision(4) << max_err
                      << " wtw_single_s=" << t_wtw * per << " wtw_sequential_s=" << t_seq * per
                      << " cg_iterations=" << cg.iterations
                      << " cg_residual=" << cg.relative_residual << "\n";
            for (int b = 0; b < fa.bands(); ++b) {
                std::cout << "# B_" << b << "=" << fa.sup_error[b] << "\n";
            }
        }
    }
    return 0;
}

} // namespace

namespace {

// Expands "--config FILE" (key=value lines, '#' comments) into command-line
// tokens placed directly after the subcommand, so explicitly passed flags
// override the file under the take-last option policy.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open config file " + config_path);
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        injected.push_back("--" + key);
        injected.push_back(value);
    }
    if (args.empty()) return injected;
    std::vector<std::string> out;
    out.push_back(args[0]); // subcommand name first
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral graph fractional wavelet transforms"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    BuildGraphArgs bg;
    CLI::App* cmd_bg = app.add_subcommand("build-graph", "construct a weighted graph");
    cmd_bg->add_option("--swiss-roll", bg.swiss_roll_n, "sample N swiss-roll points");
    cmd_bg->add_option("--seed", bg.seed, "sampling seed");
    cmd_bg->add_option("--sigma", bg.sigma, "Gaussian kernel width");
    cmd_bg->add_option("--points", bg.points_path, "CSV of point coordinates");
    cmd_bg->add_option("--pgm", bg.pgm_path, "PGM image for a pixel-grid graph");
    cmd_bg->add_option("--edges", bg.edges_path, "existing edge-list file");
    cmd_bg->add_option("--theta-w", bg.theta_w, "grid-graph Gaussian width");
    cmd_bg->add_option("--cutoff", bg.cutoff, "grid-graph distance cutoff");
    cmd_bg->add_option("--sparsify", bg.sparsify, "dense | threshold | knn")
        ->check(CLI::IsMember({"dense", "threshold", "knn"}));
    cmd_bg->add_option("--epsilon", bg.epsilon, "threshold mode: minimum weight");
    cmd_bg->add_option("--knn", bg.knn, "knn mode: neighbours per vertex");
    cmd_bg->add_option("-o,--out", bg.out, "output edge-list path")->required();
    cmd_bg->add_option("--config", "key=value defaults file (explicit flags win)");

    TransformArgs tr;
    CLI::App* cmd_tr = app.add_subcommand("transform", "forward wavelet transform of a signal");
    cmd_tr->add_option("--graph", tr.graph, "edge-list file");
    cmd_tr->add_option("--cache", tr.cache, "operator container to reuse or create");
    cmd_tr->add_option("--signal", tr.signal, "one-column CSV signal")->required();
    cmd_tr->add_option("-o,--out", tr.out, "output pyramid CSV")->required();
    tr.params.attach(cmd_tr);
    cmd_tr->add_option("--config", "key=value defaults file (explicit flags win)");

    AtomsArgs at;
    CLI::App* cmd_at = app.add_subcommand("atoms", "wavelet atoms centred at a vertex");
    cmd_at->add_option("--graph", at.graph, "edge-list file")->required();
    cmd_at->add_option("--thetas", at.thetas, "comma-separated fractional orders");
    cmd_at->add_option("--center", at.center, "center vertex index");
    cmd_at->add_option("-o,--out-dir", at.out_dir, "output directory")->required();
    at.params.attach(cmd_at, false);
    cmd_at->add_option("--config", "key=value defaults file (explicit flags win)");

    ReconstructArgs rc;
    CLI::App* cmd_rc = app.add_subcommand("reconstruct", "conjugate-gradient reconstruction");
    cmd_rc->add_option("--pyramid", rc.pyramid, "pyramid CSV")->required();
    cmd_rc->add_option("--graph", rc.graph, "edge-list file");
    cmd_rc->add_option("--cache", rc.cache, "operator container to reuse or create");
    cmd_rc->add_option("-o,--out", rc.out, "output signal CSV")->required();
    cmd_rc->add_option("--reference", rc.reference, "reference signal for error report");
    cmd_rc->add_option("--tol", rc.tol, "relative residual tolerance");
    cmd_rc->add_option("--max-iter", rc.max_iter, "iteration cap");
    rc.params.attach(cmd_rc, false);
    cmd_rc->add_option("--config", "key=value defaults file (explicit flags win)");

    AugmentArgs au;
    CLI::App* cmd_au = app.add_subcommand("augment", "expand an image dataset into band images");
    cmd_au->add_option("--images", au.images, "IDX image file")->required();
    cmd_au->add_option("--labels", au.labels, "IDX label file");
    cmd_au->add_option("--thetas", au.thetas, "comma-separated fractional orders");
    cmd_au->add_option("--band-mode", au.band_mode, "magnitude | real")
        ->check(CLI::IsMember({"magnitude", "real"}));
    cmd_au->add_flag("--traditional", au.traditional, "classic flips/rotations/noise instead");
    cmd_au->add_option("--theta-w", au.theta_w, "grid-graph Gaussian width");
    cmd_au->add_option("--cutoff", au.cutoff, "grid-graph distance cutoff");
    cmd_au->add_option("--threads", au.threads, "worker threads across images");
    cmd_au->add_option("--seed", au.seed, "noise seed (traditional mode)");
    cmd_au->add_option("--subsample", au.subsample, "keep a random subset of outputs");
    cmd_au->add_option("--subsample-seed", au.subsample_seed, "subset selection seed");
    cmd_au->add_option("-o,--out-dir", au.out_dir, "output directory")->required();
    au.params.attach(cmd_au, false);
    cmd_au->add_option("--config", "key=value defaults file (explicit flags win)");

    BenchArgs be;
    CLI::App* cmd_be = app.add_subcommand("bench", "timing and accuracy sweeps");
    cmd_be->add_option("--sizes", be.sizes, "comma-separated vertex counts");
    cmd_be->add_option("--family", be.family, "er | grid")
        ->check(CLI::IsMember({"er", "grid"}));
    cmd_be->add_option("--seed", be.seed, "graph/signal seed");
    cmd_be->add_option("--orders", be.m_list, "comma-separated truncation orders");
    cmd_be->add_option("--signals", be.signals, "signals per cell");
    cmd_be->add_option("-o,--out", be.out, "report CSV (stdout when omitted)");
    be.params.attach(cmd_be);
    cmd_be->add_option("--config", "key=value defaults file (explicit flags win)");

    try {
        std::vector<std::string> tokens = expand_config(argc, argv);
        std::vector<char*> cargs;
        cargs.push_back(argv[0]);
        for (auto& t : tokens) cargs.push_back(t.data());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
        if (cmd_bg->parsed()) return run_build_graph(bg);
        if (cmd_tr->parsed()) return run_transform(tr);
        if (cmd_at->parsed()) return run_atoms(at);
        if (cmd_rc->parsed()) return run_reconstruct(rc);
        if (cmd_au->parsed()) return run_augment(au);
        if (cmd_be->parsed()) return run_bench(be);
        std::cerr << app.help();
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
