#include "sgfrwt/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace sgfrwt {

SplineKernel SplineKernel::make(int alpha, int beta, double x1, double x2) {
    if (alpha < 1 || beta < 1) throw InvalidParameter("alpha and beta must be >= 1");
    if (!(0.0 < x1 && x1 <= x2)) throw InvalidParameter("need 0 < x1 < x2");

    // s(x1) = s(x2) = 1, s'(x1) = alpha/x1, s'(x2) = -beta/x2
    Eigen::Matrix4d a;
    a << 1, x1, x1 * x1, x1 * x1 * x1,
         1, x2, x2 * x2, x2 * x2 * x2,
         0, 1, 2 * x1, 3 * x1 * x1,
         0, 1, 2 * x2, 3 * x2 * x2;
    Eigen::Vector4d b(1.0, 1.0, alpha / x1, -beta / x2);
    Eigen::FullPivLU<Eigen::Matrix4d> lu(a);
    if (!lu.isInvertible()) {
        throw SingularSystem("degenerate transition region for spline kernel");
    }
    const Eigen::Vector4d c = lu.solve(b);

    SplineKernel k;
    k.alpha_ = alpha;
    k.beta_ = beta;
    k.x1_ = x1;
    k.x2_ = x2;
    k.s_ = {c[0], c[1], c[2], c[3]};
    return k;
}

double SplineKernel::operator()(double x) const {
    if (x < 0.0) throw NegativeArgument("kernel argument must be nonnegative");
    if (x < x1_) {
        return std::pow(x1_, -alpha_) * std::pow(x, alpha_);
    }
    if (x <= x2_) {
        return s_[0] + x * (s_[1] + x * (s_[2] + x * s_[3]));
    }
    return std::pow(x2_, beta_) * std::pow(x, -beta_);
}

double SplineKernel::max_on(double r_max) const {
    if (!(r_max > 0.0)) throw InvalidParameter("r_max must be positive");
    double best = std::max((*this)(std::min(r_max, x1_)), (*this)(r_max));
    if (r_max > x1_) {
        // interior critical points of the cubic segment
        const double a = 3.0 * s_[3], b = 2.0 * s_[2], c = s_[1];
        const double hi = std::min(r_max, x2_);
        if (a != 0.0) {
            const double disc = b * b - 4.0 * a * c;
            if (disc >= 0.0) {
                for (const double root : {(-b + std::sqrt(disc)) / (2 * a), (-b - std::sqrt(disc)) / (2 * a)}) {
                    if (root > x1_ && root < hi) best = std::max(best, (*this)(root));
                }
            }
        } else if (b != 0.0) {
            const double root = -c / b;
            if (root > x1_ && root < hi) best = std::max(best, (*this)(root));
        }
        best = std::max(best, (*this)(hi));
    }
    return best;
}

ScalingKernel ScalingKernel::make(double r_max, double K, double rho) {
    if (!(r_max > 0.0) || !(K > 1.0)) {
        throw InvalidParameter("scaling kernel needs r_max > 0 and K > 1");
    }
    if (rho < 0.0) throw InvalidParameter("rho must be nonnegative");
    ScalingKernel h;
    h.rho_ = rho;
    h.lambda_min_ = r_max / K;
    return h;
}

double ScalingKernel::operator()(double x) const {
    if (x < 0.0) throw NegativeArgument("kernel argument must be nonnegative");
    const double z = x / (0.6 * lambda_min_);
    const double z2 = z * z;
    return rho_ * std::exp(-z2 * z2);
}

std::vector<double> select_scales(double r_max, int J, double K, double x1, double x2) {
    if (!(r_max > 0.0)) throw InvalidParameter("r_max must be positive");
    if (J < 1) throw InvalidParameter("need at least one scale");
    if (!(K > 1.0)) throw InvalidParameter("K must exceed 1");
    if (!(0.0 < x1 && x1 < x2)) throw InvalidParameter("need 0 < x1 < x2");
    const double t_coarse = x2 * K / r_max;
    const double t_fine = x1 / r_max;
    std::vector<double> scales(J);
    if (J == 1) {
        scales[0] = t_coarse;
        return scales;
    }
    const double log_a = std::log(t_coarse), log_b = std::log(t_fine);
    for (int j = 0; j < J; ++j) {
        scales[j] = std::exp(log_a + (log_b - log_a) * j / double(J - 1));
    }
    return scales;
}

double FilterBank::eval_band(int band, double x) const {
    if (band < 0 || band >= bands()) throw IndexOutOfRange("band index out of range");
    if (band == 0) return h(x);
    return g(scales[band - 1] * x);
}

FilterBank make_filter_bank(double r_max, int J, double K, int alpha, int beta, double x1,
                            double x2) {
    return make_filter_bank_with_scales(r_max, K, select_scales(r_max, J, K, x1, x2), alpha, beta,
                                        x1, x2);
}

FilterBank make_filter_bank_with_scales(double r_max, double K, std::vector<double> scales,
                                        int alpha, int beta, double x1, double x2) {
    if (scales.empty()) throw InvalidParameter("need at least one scale");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0)) throw InvalidParameter("scales must be positive");
        if (i > 0 && !(scales[i] < scales[i - 1])) {
            throw InvalidParameter("scales must be strictly decreasing");
        }
    }
    FilterBank bank;
    bank.g = SplineKernel::make(alpha, beta, x1, x2);
    bank.h = ScalingKernel::make(r_max, K, bank.g.max_on(r_max));
    bank.scales = std::move(scales);
    bank.r_max = r_max;
    bank.K = K;
    return bank;
}

std::pair<double, double> frame_bounds(const FilterBank& bank, int grid_points) {
    if (grid_points < 100) throw InvalidParameter("frame bound grid needs >= 100 points");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int i = 0; i <= grid_points; ++i) {
        const double r = bank.r_max * i / double(grid_points);
        double sum = 0.0;
        for (int b = 0; b < bank.bands(); ++b) {
            const double v = bank.eval_band(b, r);
            sum += v * v;
        }
        lo = std::min(lo, sum);
        hi = std::max(hi, sum);
    }
    return {lo, hi};
}

namespace detail {

double trapezoid(const std::function<double(double)>& f, double a, double b, int steps) {
    if (steps < 1) throw InvalidParameter("quadrature needs at least one step");
    const double h = (b - a) / steps;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < steps; ++i) sum += f(a + h * i);
    return sum * h;
}

} // namespace detail

double admissibility_integral(const SplineKernel& g, double upper, int steps) {
    if (!(upper > g.x2())) throw InvalidParameter("integration range must extend past x2");
    if (g.alpha() < 2) {
        throw NonConvergent("g(x)/x^2 is not integrable at 0 for alpha < 2");
    }
    // Near 0 the integrand is x1^-alpha x^(alpha-2); its limit at 0 is
    // x1^-2 for alpha = 2 and 0 for alpha > 2.
    const double at_zero = g.alpha() == 2 ? std::pow(g.x1(), -2.0) : 0.0;
    auto integrand = [&](double x) {
        if (x == 0.0) return at_zero;
        return g(x) / (x * x);
    };
    return detail::trapezoid(integrand, 0.0, upper, steps);
}

} // namespace sgfrwt
