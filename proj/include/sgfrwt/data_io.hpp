#ifndef SGFRWT_DATA_IO_HPP
#define SGFRWT_DATA_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sgfrwt/errors.hpp"

namespace sgfrwt {

/// Swiss-roll manifold point for parameters (s, t):
/// (t cos(t) / 4pi, s, t sin(t) / 4pi).
Eigen::Vector3d swiss_roll_point(double s, double t);

struct PointCloud {
    Eigen::MatrixXd points; // n x 3
    std::uint64_t seed = 0;
};

/// n points with s ~ U[-1,1], t ~ U[pi,4pi] from a seeded deterministic
/// generator; the same seed always yields the same cloud.
PointCloud swiss_roll(int n, std::uint64_t seed);

/// uint8 image stack (IDX layout), optionally labelled.
struct ImageDataset {
    int height = 0;
    int width = 0;
    std::vector<std::vector<std::uint8_t>> images; // row-major height*width each
    std::vector<std::uint8_t> labels;              // empty or one per image

    std::size_t count() const { return images.size(); }
};

/// IDX containers (big-endian magic 0x00000803 for uint8 image stacks,
/// 0x00000801 for uint8 label vectors). Payload lengths are validated
/// exactly against the declared dimensions.
ImageDataset read_idx_images(const std::string& path);
std::vector<std::uint8_t> read_idx_labels(const std::string& path);
void write_idx_images(const ImageDataset& ds, const std::string& path);
void write_idx_labels(const std::vector<std::uint8_t>& labels, const std::string& path);

/// Binary PGM ("P5", maxval <= 255). Values are normalised to [0,1] on read;
/// write quantises with round(v * 255), so 8-bit data round-trips exactly.
Eigen::MatrixXd read_pgm(const std::string& path);
void write_pgm(const Eigen::MatrixXd& image, const std::string& path);

/// Deterministic classic augmentation: flips, rotations and seeded noise.
/// variant cycles through the transform list; the noise amplitude grows with
/// every full cycle.
Eigen::MatrixXd traditional_augment(const Eigen::MatrixXd& image, int variant,
                                    std::uint64_t seed);

struct AugmentConfig {
    std::vector<double> thetas{0.2, 0.4, 0.6, 0.8, 1.0};
    int J = 5;
    double K = 20.0;
    int alpha = 2, beta = 2;
    double x1 = 1.0, x2 = 2.0;
    double theta_w = 1.0;  // grid-graph Gaussian width
    double cutoff = 1.0;   // grid-graph distance cutoff
    bool use_fast = false; // exact backend by default
    int fourier_order = 40;
    bool write_real_part = false; // magnitude is written unless set
    bool traditional = false;     // classic flips/rotations/noise instead of the transform
    std::string out_dir;
    int threads = 1;
    std::uint64_t seed = 0;   // noise seed for the traditional path
    int subsample = 0;        // keep a random subset of outputs (0 = all)
    std::uint64_t subsample_seed = 0;
};

struct AugmentResult {
    std::size_t outputs_written = 0;
    std::string manifest_path;
};

/// Expands every image into (J+1) band images per fractional order, written
/// as PGM files plus a manifest CSV "src_index,theta,band,label,path".
/// Deterministic for a fixed (dataset, config).
AugmentResult augment_dataset(const ImageDataset& ds, const AugmentConfig& cfg);

/// |images| * |thetas| * (J+1): the dataset-arithmetic formula behind the
/// augmented collection sizes.
std::size_t augment_output_count(std::size_t images, std::size_t thetas, int J);

} // namespace sgfrwt

#endif // SGFRWT_DATA_IO_HPP
