#ifndef SGFRWT_FAST_HPP
#define SGFRWT_FAST_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "sgfrwt/kernels.hpp"
#include "sgfrwt/spectral.hpp"
#include "sgfrwt/transform.hpp"

namespace sgfrwt {

/// Truncated Fourier series on [0, r_max]: p(x) = sum_{k=-M}^{M} c_k e^{i 2 pi k x / r_max}.
/// The approximated kernels are real, so only k >= 0 is stored and
/// c_{-k} = conj(c_k) is implied.
struct FourierSeries {
    int order = 0;      // M
    double r_max = 0.0; // period
    Eigen::VectorXcd c; // k = 0..M
    int quad_points = 0; // trapezoid panels used to compute c

    double eval(double x) const;
};

/// Fourier coefficients of x -> kernel(t x) on [0, r_max]:
/// c_k = (1/r_max) int_0^r_max kernel(t x) e^{-i 2 pi k x / r_max} dx
/// by trapezoid quadrature. quad_points = 0 selects Q automatically,
/// starting from max(8M, 1024) and doubling until one more doubling moves
/// every coefficient by less than 1e-9.
FourierSeries fourier_coefficients(const std::function<double(double)>& kernel, double t,
                                   double r_max, int order, int quad_points = 0);

/// Sup-norm error of the truncated series against kernel(t x) on a uniform
/// grid over [0, r_max] (the L_inf bound B of the coefficient error lemma).
double error_bound(const FourierSeries& series, const std::function<double(double)>& kernel,
                   double t, int grid = 4000);

/// Per-band truncated series for a whole filter bank, plus the measured
/// sup-error bounds B_j.
struct FourierApprox {
    double r_max = 0.0;
    std::vector<double> scales;       // J wavelet scales (band 0 is the scaling kernel)
    std::vector<FourierSeries> series; // size J+1
    std::vector<double> sup_error;     // B_j, same indexing

    int bands() const { return static_cast<int>(series.size()); }
    int max_order() const;

    static FourierApprox build(const FilterBank& bank, int order, int quad_points = 0);
    static FourierApprox build(const FilterBank& bank, const std::vector<int>& orders,
                               int quad_points = 0);
};

/// The complex exponential propagator F_1(L_theta) = exp(i 2 pi L_theta / r_max)
/// (dense) and its conjugate transpose. Applications are counted so tests and
/// the bench harness can verify the work budget.
class PropagatorPair {
public:
    explicit PropagatorPair(const FractionalOperator& op);
    PropagatorPair(const FractionalOperator& op, double r_max);

    int size() const { return static_cast<int>(f_plus_.rows()); }
    double r_max() const { return r_max_; }
    double theta() const { return theta_; }
    const Eigen::MatrixXcd& f_plus() const { return f_plus_; }

    Eigen::VectorXcd apply_plus(const Eigen::VectorXcd& v) const;
    Eigen::VectorXcd apply_minus(const Eigen::VectorXcd& v) const;

    std::uint64_t matvec_count() const { return matvecs_.load(); }
    void reset_matvec_count() const { matvecs_.store(0); }

private:
    double r_max_ = 0.0;
    double theta_ = 1.0;
    Eigen::MatrixXcd f_plus_;
    mutable std::atomic<std::uint64_t> matvecs_{0};
};

PropagatorPair build_propagators(const FractionalOperator& op);

/// sum_{k=-M}^{M} c_k F_k(L_theta) f via the forward/backward recursions
/// v_k = F_plus v_{k-1}, u_{-k} = F_minus u_{-k+1} (2M propagator products).
Eigen::VectorXcd series_apply(const PropagatorPair& pp, const FourierSeries& series,
                              const Eigen::VectorXcd& f);

/// All bands in one sweep: the recursion is shared up to max_j M_j, so a full
/// pyramid costs exactly 2 max_j(M_j) propagator products. When
/// conjugate_shortcut is set (valid for real L_theta, i.e. theta = 1, and a
/// real input) the backward recursion is folded into a conjugation and the
/// cost halves.
CoefficientPyramid forward_fast(const Eigen::VectorXd& f, const PropagatorPair& pp,
                                const FourierApprox& fa, bool conjugate_shortcut = false);

/// Adjoint of the approximate transform: sum_j p_j^*(L_theta) eta_j, with the
/// conjugated coefficients paired with the opposite propagator direction.
/// Evaluated with two Horner-style recursions (2 max_j(M_j) products).
Eigen::VectorXcd adjoint_fast(const std::vector<Eigen::VectorXcd>& bands,
                              const PropagatorPair& pp, const FourierApprox& fa);

/// Coefficients of P(x) = sum_j |p_j(x)|^2, degree M* = 2 max_j(M_j)
/// (the single-expansion form of the normal operator W*W).
FourierSeries product_coefficients(const FourierApprox& fa);

/// P(L_theta) f for the product series: equals adjoint(forward(f)) up to
/// rounding, at half the recursion passes.
Eigen::VectorXcd wtw_apply(const Eigen::VectorXcd& f, const PropagatorPair& pp,
                           const FourierSeries& product);

struct CgResult {
    Eigen::VectorXd signal;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = true;
    double imag_residue = 0.0;      // norm of the discarded imaginary part
    int non_monotone_steps = 0;     // residual-norm increases observed
};

/// Conjugate-gradient solve of (W*W) f = W* c from a zero start. A
/// non-converged run still returns the iterate, flagged.
CgResult reconstruct_cg(const CoefficientPyramid& p, const PropagatorPair& pp,
                        const FourierApprox& fa, double tol, int max_iter);

/// Cross-validation backend: exp(i 2 pi k L_theta / r_max) v evaluated by
/// scaling and a truncated Taylor series on L_theta, without forming the
/// dense propagator.
Eigen::VectorXcd propagator_action_expm(const FractionalOperator& op, int k, double r_max,
                                        const Eigen::VectorXcd& v);

} // namespace sgfrwt

#endif // SGFRWT_FAST_HPP
