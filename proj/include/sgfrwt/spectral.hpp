#ifndef SGFRWT_SPECTRAL_HPP
#define SGFRWT_SPECTRAL_HPP

#include <complex>
#include <memory>
#include <mutex>
#include <string>

#include <Eigen/Core>

#include "sgfrwt/errors.hpp"

namespace sgfrwt {

/// Eigenpairs of a graph Laplacian: lambda ascending (lambda[0] = 0 on a
/// connected graph), chi orthonormal columns. The basis is made reproducible
/// by a fixed sign convention (the first entry of largest magnitude in each
/// column is positive) and a lexicographic tie-break between columns of
/// equal eigenvalue.
struct SpectralDecomposition {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd chi;

    int size() const { return static_cast<int>(lambda.size()); }
};

/// Dense symmetric eigendecomposition with the basis convention applied.
/// Dense storage caps the usable size; max_n guards against accidental
/// monster inputs.
SpectralDecomposition eig_decompose(const Eigen::MatrixXd& laplacian, int max_n = 5000);

/// Upper bound on lambda_max via power iteration, raised to theta. For
/// workflows that want an r_max bound without a full eigendecomposition.
double estimate_r_max(const Eigen::MatrixXd& laplacian, double theta, int iterations = 100);

/// Unitary diagonalisation chi = U diag(e^{i phi}) U^H of the eigenvector
/// matrix, phi in (-pi, pi]. Independent of theta, so one factorisation
/// serves every fractional order of the same graph.
struct BasisFactorization {
    std::shared_ptr<const Eigen::MatrixXcd> u;
    std::shared_ptr<const Eigen::VectorXd> phi;
};

BasisFactorization factor_basis(const SpectralDecomposition& dec);

/// The fractional basis gamma = chi^theta together with the fractional
/// Laplacian L_theta = gamma R gamma^H it induces, R = Lambda^theta.
///
/// gamma is the principal matrix power: chi = U diag(e^{i phi}) U^H with
/// phi in (-pi, pi], and gamma = U diag(e^{i theta phi}) U^H (an eigenvalue
/// -1 maps to e^{i pi theta} by convention). When chi has repeated
/// eigenvalues the power is not unique; outputs are then reproducible under
/// the fixed basis convention but convention-dependent in substance.
/// Internally the operator keeps the factored form (U, phi) and applies
/// gamma with O(N^2) matrix-vector work; the dense gamma / L_theta matrices
/// are materialised on first use.
class FractionalOperator {
public:
    FractionalOperator(const SpectralDecomposition& dec, double theta);
    FractionalOperator(const SpectralDecomposition& dec, const BasisFactorization& basis,
                       double theta);
    FractionalOperator(FractionalOperator&& other) noexcept;
    FractionalOperator& operator=(FractionalOperator&& other) noexcept;

    double theta() const { return theta_; }
    int size() const { return static_cast<int>(r_.size()); }
    const Eigen::VectorXd& lambda() const { return lambda_; }
    /// r_l = lambda_l^theta (0^theta = 0; for theta = 0 also r at lambda=0 is 0).
    const Eigen::VectorXd& r() const { return r_; }
    double r_max_bound() const { return r_max_bound_; }
    /// True when the theta = 0 identity case with its 0^0 := 0 convention is in effect.
    bool zero_power_convention() const { return theta_ == 0.0; }

    /// gamma^H v
    Eigen::VectorXcd apply_gamma_adjoint(const Eigen::VectorXcd& v) const;
    /// gamma v
    Eigen::VectorXcd apply_gamma(const Eigen::VectorXcd& v) const;
    /// gamma diag(d) gamma^H v  -- the Hermitian filter d(L_theta) applied to v.
    Eigen::VectorXcd apply_filter(const Eigen::VectorXd& d, const Eigen::VectorXcd& v) const;

    const Eigen::MatrixXcd& gamma() const;
    const Eigen::MatrixXcd& l_theta() const;

    /// Serialisation of the factorisation cache ("FGW1" container).
    void save(const std::string& path) const;
    static FractionalOperator load(const std::string& path);

private:
    FractionalOperator() = default;

    double theta_ = 1.0;
    Eigen::VectorXd lambda_;
    Eigen::VectorXd r_;
    double r_max_bound_ = 0.0;

    // factored form (null when loaded from disk, where only the dense
    // matrices are available)
    std::shared_ptr<const Eigen::MatrixXcd> u_;
    std::shared_ptr<const Eigen::VectorXd> phi_;

    mutable std::mutex cache_mutex_;
    mutable std::unique_ptr<Eigen::MatrixXcd> gamma_cache_;
    mutable std::unique_ptr<Eigen::MatrixXcd> l_theta_cache_;
};

/// chi^theta etc. for theta in (0, 1]; theta = 0 is additionally accepted as
/// the trivial identity case. The two-argument form factors chi internally;
/// pass a precomputed BasisFactorization when building several orders.
FractionalOperator fractional_basis(const SpectralDecomposition& dec, double theta);
FractionalOperator fractional_basis(const SpectralDecomposition& dec,
                                    const BasisFactorization& basis, double theta);

/// Forward graph fractional Fourier transform: f_hat = gamma^H f.
Eigen::VectorXcd gfrft(const Eigen::VectorXd& f, const FractionalOperator& op);
Eigen::VectorXcd gfrft(const Eigen::VectorXcd& f, const FractionalOperator& op);

/// Inverse transform: f = gamma f_hat.
Eigen::VectorXcd igfrft(const Eigen::VectorXcd& spectrum, const FractionalOperator& op);

namespace detail {
/// Unitary diagonalisation of a real orthogonal matrix q: q = U diag(e^{i phi}) U^H,
/// phi in (-pi, pi]. Goes through the symmetric matrix (q + q^T)/2, whose
/// eigenspaces split the spectrum by cos(phi), then resolves each invariant
/// subspace with a small real Schur form. U is unitary to machine precision.
void orthogonal_eigendecomposition(const Eigen::MatrixXd& q, Eigen::MatrixXcd& u,
                                   Eigen::VectorXd& phi);

/// Symmetric eigensolver used for all dense decompositions (LAPACK dsyevd
/// when available, Eigen otherwise). Ascending eigenvalues.
void symmetric_eig(const Eigen::MatrixXd& a, Eigen::VectorXd& values, Eigen::MatrixXd& vectors);
} // namespace detail

} // namespace sgfrwt

#endif // SGFRWT_SPECTRAL_HPP
