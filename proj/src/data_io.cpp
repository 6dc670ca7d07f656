#include "sgfrwt/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "sgfrwt/fast.hpp"
#include "sgfrwt/graph.hpp"
#include "sgfrwt/kernels.hpp"
#include "sgfrwt/spectral.hpp"
#include "sgfrwt/transform.hpp"

namespace sgfrwt {

using std::numbers::pi;

Eigen::Vector3d swiss_roll_point(double s, double t) {
    return {t * std::cos(t) / (4.0 * pi), s, t * std::sin(t) / (4.0 * pi)};
}

namespace {

// uniform double in [0, 1) with 53 bits, fully pinned by mt19937_64
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

PointCloud swiss_roll(int n, std::uint64_t seed) {
    if (n < 1) throw InvalidParameter("point count must be at least 1");
    PointCloud cloud;
    cloud.seed = seed;
    cloud.points.resize(n, 3);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        const double s = -1.0 + 2.0 * uniform01(rng);
        const double t = pi + 3.0 * pi * uniform01(rng);
        cloud.points.row(i) = swiss_roll_point(s, t).transpose();
    }
    return cloud;
}

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4) throw TruncatedFile("IDX file truncated in " + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be32(std::ofstream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void check_no_trailing(std::ifstream& in, const std::string& path) {
    char extra;
    in.read(&extra, 1);
    if (in.gcount() != 0) {
        throw DimensionMismatch("IDX payload longer than declared dimensions in " + path);
    }
}

} // namespace

ImageDataset read_idx_images(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open IDX file " + path);
    const std::uint32_t magic = read_be32(in, "magic");
    if (magic != 0x00000803u) {
        throw BadMagic("expected uint8 3-D image magic 0x00000803, got " + std::to_string(magic));
    }
    const std::uint32_t count = read_be32(in, "count");
    const std::uint32_t height = read_be32(in, "height");
    const std::uint32_t width = read_be32(in, "width");
    if (height == 0 || width == 0 || height > 65536 || width > 65536) {
        throw UnsupportedFormat("implausible IDX image dimensions");
    }
    ImageDataset ds;
    ds.height = static_cast<int>(height);
    ds.width = static_cast<int>(width);
    ds.images.resize(count);
    const std::size_t px = std::size_t(height) * width;
    for (std::uint32_t i = 0; i < count; ++i) {
        ds.images[i].resize(px);
        in.read(reinterpret_cast<char*>(ds.images[i].data()), static_cast<std::streamsize>(px));
        if (static_cast<std::size_t>(in.gcount()) != px) {
            throw TruncatedFile("IDX payload shorter than declared dimensions in " + path);
        }
    }
    check_no_trailing(in, path);
    return ds;
}

std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open IDX file " + path);
    const std::uint32_t magic = read_be32(in, "magic");
    if (magic != 0x00000801u) {
        throw BadMagic("expected uint8 1-D label magic 0x00000801, got " + std::to_string(magic));
    }
    const std::uint32_t count = read_be32(in, "count");
    std::vector<std::uint8_t> labels(count);
    in.read(reinterpret_cast<char*>(labels.data()), count);
    if (static_cast<std::size_t>(in.gcount()) != count) {
        throw TruncatedFile("IDX payload shorter than declared dimensions in " + path);
    }
    check_no_trailing(in, path);
    return labels;
}

void write_idx_images(const ImageDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write IDX file " + path);
    write_be32(out, 0x00000803u);
    write_be32(out, static_cast<std::uint32_t>(ds.count()));
    write_be32(out, static_cast<std::uint32_t>(ds.height));
    write_be32(out, static_cast<std::uint32_t>(ds.width));
    for (const auto& img : ds.images) {
        out.write(reinterpret_cast<const char*>(img.data()),
                  static_cast<std::streamsize>(img.size()));
    }
    if (!out) throw IoError("write failed for " + path);
}

void write_idx_labels(const std::vector<std::uint8_t>& labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write IDX file " + path);
    write_be32(out, 0x00000801u);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
    if (!out) throw IoError("write failed for " + path);
}

namespace {

int next_pgm_token(std::ifstream& in, std::string& tok) {
    tok.clear();
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return 1;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok.empty() ? 0 : 1;
}

} // namespace

Eigen::MatrixXd read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open PGM file " + path);
    std::string tok;
    if (!next_pgm_token(in, tok)) throw TruncatedFile("empty PGM file " + path);
    if (tok != "P5") throw UnsupportedFormat("only binary PGM (P5) is supported, got " + tok);
    long w = 0, h = 0, maxval = 0;
    for (long* v : {&w, &h, &maxval}) {
        if (!next_pgm_token(in, tok)) throw TruncatedFile("PGM header truncated in " + path);
        *v = std::stol(tok);
    }
    if (w <= 0 || h <= 0) throw UnsupportedFormat("bad PGM dimensions");
    if (maxval <= 0 || maxval > 255) {
        throw UnsupportedFormat("PGM maxval " + std::to_string(maxval) + " unsupported (need <= 255)");
    }
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw TruncatedFile("PGM pixel data truncated in " + path);
    }
    Eigen::MatrixXd img(h, w);
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            img(r, c) = raw[static_cast<std::size_t>(r) * w + c] / double(maxval);
        }
    }
    return img;
}

void write_pgm(const Eigen::MatrixXd& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write PGM file " + path);
    const long h = image.rows(), w = image.cols();
    out << "P5\n" << w << " " << h << "\n255\n";
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h);
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            const double v = std::clamp(image(r, c), 0.0, 1.0);
            raw[static_cast<std::size_t>(r) * w + c] =
                static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed for " + path);
}

Eigen::MatrixXd traditional_augment(const Eigen::MatrixXd& image, int variant,
                                    std::uint64_t seed) {
    if (variant < 0) throw InvalidParameter("variant must be nonnegative");
    const int base = variant % 6;
    Eigen::MatrixXd out;
    switch (base) {
    case 0: out = image; break;
    case 1: out = image.rowwise().reverse(); break;        // horizontal flip
    case 2: out = image.colwise().reverse(); break;        // vertical flip
    case 3: out = image.transpose().colwise().reverse(); break;  // rot90
    case 4: out = image.reverse(); break;                  // rot180
    case 5: out = image.transpose().rowwise().reverse(); break;  // rot270
    default: out = image; break;
    }
    const int cycle = variant / 6;
    if (cycle > 0) {
        const double amplitude = 0.05 * cycle;
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (variant + 1)));
        for (long r = 0; r < out.rows(); ++r) {
            for (long c = 0; c < out.cols(); ++c) {
                const double noise = amplitude * (2.0 * uniform01(rng) - 1.0);
                out(r, c) = std::clamp(out(r, c) + noise, 0.0, 1.0);
            }
        }
    }
    return out;
}

std::size_t augment_output_count(std::size_t images, std::size_t thetas, int J) {
    return images * thetas * static_cast<std::size_t>(J + 1);
}

namespace {

Eigen::MatrixXd band_to_image(const Eigen::VectorXcd& band, int h, int w, bool real_part) {
    Eigen::MatrixXd img(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::complex<double> v = band[r * w + c];
            img(r, c) = real_part ? v.real() : std::abs(v);
        }
    }
    // per-band min-max rescale to the 8-bit range
    const double lo = img.minCoeff(), hi = img.maxCoeff();
    if (hi > lo) {
        img = (img.array() - lo) / (hi - lo);
    } else {
        img.setZero();
    }
    return img;
}

std::string band_file_name(std::size_t src, double theta, int band) {
    std::ostringstream name;
    name << "img" << std::setw(6) << std::setfill('0') << src << "_theta";
    name << std::fixed << std::setprecision(2) << theta << "_band" << band << ".pgm";
    return name.str();
}

} // namespace

AugmentResult augment_dataset(const ImageDataset& ds, const AugmentConfig& cfg) {
    if (ds.count() == 0) throw DegenerateInput("dataset is empty");
    if (!ds.labels.empty() && ds.labels.size() != ds.count()) {
        throw DimensionMismatch("label count does not match image count");
    }
    if (cfg.out_dir.empty()) throw InvalidParameter("output directory is required");
    if (cfg.thetas.empty()) throw InvalidParameter("need at least one fractional order");
    for (double t : cfg.thetas) {
        if (!(t > 0.0) || t > 1.0) throw InvalidOrder("fractional orders must lie in (0, 1]");
    }
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    const int h = ds.height, w = ds.width;
    const int bands = cfg.J + 1;

    struct Row {
        std::size_t src;
        double theta;
        int band;
        int label;
        std::string file;
    };
    std::vector<Row> manifest;
    manifest.reserve(augment_output_count(ds.count(), cfg.thetas.size(), cfg.J));

    auto label_of = [&](std::size_t i) { return ds.labels.empty() ? -1 : int(ds.labels[i]); };

    if (cfg.traditional) {
        // Classic augmentation keeps the output arithmetic of the transform
        // path: |thetas| * (J+1) variants per source image.
        const int variants = static_cast<int>(cfg.thetas.size()) * bands;
        for (std::size_t i = 0; i < ds.count(); ++i) {
            Eigen::MatrixXd img(h, w);
            for (int r = 0; r < h; ++r)
                for (int c = 0; c < w; ++c) img(r, c) = ds.images[i][r * w + c] / 255.0;
            for (int v = 0; v < variants; ++v) {
                const Eigen::MatrixXd aug = traditional_augment(img, v, cfg.seed);
                std::ostringstream name;
                name << "img" << std::setw(6) << std::setfill('0') << i << "_trad" << v << ".pgm";
                write_pgm(aug, (fs::path(cfg.out_dir) / name.str()).string());
                manifest.push_back({i, 0.0, v, label_of(i), name.str()});
            }
        }
    } else {
        // One spectral setup per image shape, shared by every image and order.
        const Graph grid = image_grid_graph(Eigen::MatrixXd::Zero(h, w), cfg.theta_w, cfg.cutoff);
        const SpectralDecomposition dec = eig_decompose(grid.laplacian());
        const BasisFactorization basis = factor_basis(dec);

        for (double theta : cfg.thetas) {
            const FractionalOperator op(dec, basis, theta);
            const FilterBank bank = make_filter_bank(op.r_max_bound(), cfg.J, cfg.K, cfg.alpha,
                                                     cfg.beta, cfg.x1, cfg.x2);
            std::unique_ptr<PropagatorPair> pp;
            std::unique_ptr<FourierApprox> fa;
            if (cfg.use_fast) {
                pp = std::make_unique<PropagatorPair>(op);
                fa = std::make_unique<FourierApprox>(FourierApprox::build(bank, cfg.fourier_order));
            }

            const int threads = std::max(1, cfg.threads);
            std::vector<std::vector<Row>> rows_per_thread(threads);
            auto worker = [&](int tid) {
                for (std::size_t i = tid; i < ds.count(); i += threads) {
                    Eigen::VectorXd f(h * w);
                    for (int pxl = 0; pxl < h * w; ++pxl) f[pxl] = ds.images[i][pxl] / 255.0;
                    const CoefficientPyramid pyr =
                        cfg.use_fast ? forward_fast(f, *pp, *fa, theta == 1.0)
                                     : forward_exact(f, op, bank);
                    for (int b = 0; b < bands; ++b) {
                        const Eigen::MatrixXd img =
                            band_to_image(pyr.bands[b], h, w, cfg.write_real_part);
                        const std::string name = band_file_name(i, theta, b);
                        write_pgm(img, (fs::path(cfg.out_dir) / name).string());
                        rows_per_thread[tid].push_back({i, theta, b, label_of(i), name});
                    }
                }
            };
            if (threads == 1) {
                worker(0);
            } else {
                std::vector<std::thread> pool;
                for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
                for (auto& t : pool) t.join();
            }
            for (auto& rows : rows_per_thread) {
                manifest.insert(manifest.end(), rows.begin(), rows.end());
            }
        }
    }

    // Deterministic manifest order regardless of the thread layout.
    std::sort(manifest.begin(), manifest.end(), [](const Row& a, const Row& b) {
        if (a.src != b.src) return a.src < b.src;
        if (a.theta != b.theta) return a.theta < b.theta;
        return a.band < b.band;
    });

    if (cfg.subsample > 0 && static_cast<std::size_t>(cfg.subsample) < manifest.size()) {
        // Seeded uniform subsample without replacement (partial Fisher-Yates).
        std::mt19937_64 rng(cfg.subsample_seed);
        std::vector<std::size_t> idx(manifest.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (int i = 0; i < cfg.subsample; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform01(rng) * (idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(cfg.subsample);
        std::sort(idx.begin(), idx.end());
        std::vector<Row> kept;
        kept.reserve(idx.size());
        for (std::size_t i : idx) kept.push_back(manifest[i]);
        manifest = std::move(kept);
    }

    const std::string manifest_path = (fs::path(cfg.out_dir) / "manifest.csv").string();
    std::ofstream out(manifest_path);
    if (!out) throw IoError("cannot write manifest " + manifest_path);
    out << "# images=" << ds.count() << "\n";
    out << "# thetas=";
    for (std::size_t i = 0; i < cfg.thetas.size(); ++i) out << (i ? "," : "") << cfg.thetas[i];
    out << "\n# J=" << cfg.J << "\n# subsample_seed=" << cfg.subsample_seed << "\n";
    out << "src_index,theta,band,label,path\n";
    out.precision(17);
    for (const Row& r : manifest) {
        out << r.src << "," << r.theta << "," << r.band << "," << r.label << "," << r.file << "\n";
    }
    if (!out) throw IoError("write failed for " + manifest_path);

    return {manifest.size(), manifest_path};
}

} // namespace sgfrwt
