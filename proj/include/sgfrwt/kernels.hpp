#ifndef SGFRWT_KERNELS_HPP
#define SGFRWT_KERNELS_HPP

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "sgfrwt/errors.hpp"

namespace sgfrwt {

/// Band-pass wavelet kernel
///     g(x) = x1^-alpha x^alpha      for x < x1
///            s(x)                   for x1 <= x <= x2
///            x2^beta  x^-beta       for x > x2
/// with the cubic s fixed by s(x1) = s(x2) = 1, s'(x1) = alpha/x1,
/// s'(x2) = -beta/x2. Normalised so g(x1) = g(x2) = 1.
class SplineKernel {
public:
    static SplineKernel make(int alpha, int beta, double x1, double x2);

    double operator()(double x) const;

    int alpha() const { return alpha_; }
    int beta() const { return beta_; }
    double x1() const { return x1_; }
    double x2() const { return x2_; }
    /// Cubic coefficients of s(x) = c0 + c1 x + c2 x^2 + c3 x^3.
    const std::array<double, 4>& spline_coefficients() const { return s_; }

    /// max of g on [0, r_max], located via the closed-form critical points
    /// of the cubic segment.
    double max_on(double r_max) const;

private:
    int alpha_ = 2, beta_ = 2;
    double x1_ = 1.0, x2_ = 2.0;
    std::array<double, 4> s_{};
};

/// Low-pass scaling kernel h(x) = rho exp(-(x / (0.6 lambda_min))^4) with
/// lambda_min = r_max / K.
class ScalingKernel {
public:
    static ScalingKernel make(double r_max, double K, double rho);

    double operator()(double x) const;
    double rho() const { return rho_; }
    double lambda_min() const { return lambda_min_; }

private:
    double rho_ = 1.0;
    double lambda_min_ = 1.0;
};

/// Coarse-to-fine wavelet scales: t_1 = x2 K / r_max down to t_J = x1 / r_max,
/// logarithmically spaced. J = 1 yields just the coarsest scale.
std::vector<double> select_scales(double r_max, int J, double K, double x1, double x2);

/// Wavelet kernel, scaling kernel and scale set for one transform setup.
struct FilterBank {
    SplineKernel g;
    ScalingKernel h;
    std::vector<double> scales; // strictly decreasing, positive
    double r_max = 0.0;
    double K = 0.0;

    int bands() const { return static_cast<int>(scales.size()) + 1; }

    /// Evaluate band kernel: band 0 is h(x), band j >= 1 is g(t_j x).
    double eval_band(int band, double x) const;
};

/// Bank with the standard scale rule and rho = max g on [0, r_max].
FilterBank make_filter_bank(double r_max, int J, double K, int alpha = 2, int beta = 2,
                            double x1 = 1.0, double x2 = 2.0);
/// Same, but with caller-supplied scales (must be positive, strictly decreasing).
FilterBank make_filter_bank_with_scales(double r_max, double K, std::vector<double> scales,
                                        int alpha = 2, int beta = 2, double x1 = 1.0,
                                        double x2 = 2.0);

/// min / max of G(r) = h(r)^2 + sum_j g(t_j r)^2 over a uniform grid on [0, r_max].
std::pair<double, double> frame_bounds(const FilterBank& bank, int grid_points = 1000);

/// Trapezoid value of the admissibility integral int_0^upper g(x)/x^2 dx.
/// The integrand extends continuously to 0 for alpha >= 2; alpha = 1 is
/// rejected (logarithmic divergence).
double admissibility_integral(const SplineKernel& g, double upper, int steps);

namespace detail {
/// Quadrature core shared with tests: integrand(x) must already handle x = 0.
double trapezoid(const std::function<double(double)>& f, double a, double b, int steps);
} // namespace detail

} // namespace sgfrwt

#endif // SGFRWT_KERNELS_HPP
