#ifndef SGFRWT_TRANSFORM_HPP
#define SGFRWT_TRANSFORM_HPP

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sgfrwt/kernels.hpp"
#include "sgfrwt/spectral.hpp"

namespace sgfrwt {

/// Wavelet coefficients of one signal: band 0 is the scaling band, bands
/// 1..J the wavelet bands (coarse to fine), N(J+1) complex values in total.
struct CoefficientPyramid {
    double theta = 1.0;
    std::vector<double> scales;
    std::vector<Eigen::VectorXcd> bands;

    int n_vertices() const { return bands.empty() ? 0 : static_cast<int>(bands[0].size()); }
    int n_bands() const { return static_cast<int>(bands.size()); }
    std::size_t total_coefficients() const {
        return static_cast<std::size_t>(n_vertices()) * n_bands();
    }
};

/// Exact transform through the full fractional spectral decomposition:
/// band j = gamma diag(kernel_j(r)) gamma^H f.
CoefficientPyramid forward_exact(const Eigen::VectorXd& f, const FractionalOperator& op,
                                 const FilterBank& bank);
CoefficientPyramid forward_exact(const Eigen::VectorXcd& f, const FractionalOperator& op,
                                 const FilterBank& bank);

/// Wavelet atom (band >= 1) or scaling function (band 0) centred at a vertex;
/// identical to forward_exact applied to the delta signal there.
Eigen::VectorXcd atom(const FractionalOperator& op, const FilterBank& bank, int band, int center);

/// Least-squares reconstruction in the fractional spectral domain:
/// f_hat(l) = sum_b kernel_b(r_l) band_hat_b(l) / G(r_l).
Eigen::VectorXd inverse_exact(const CoefficientPyramid& p, const FractionalOperator& op,
                              const FilterBank& bank);

/// Pyramid CSV: '#' provenance lines, then "band,vertex,re,im" rows.
void write_pyramid_csv(const CoefficientPyramid& p, const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& header = {});
CoefficientPyramid read_pyramid_csv(const std::string& path);

} // namespace sgfrwt

#endif // SGFRWT_TRANSFORM_HPP
