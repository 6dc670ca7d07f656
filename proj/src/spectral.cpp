#include "sgfrwt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#if defined(SGFRWT_HAVE_LAPACKE)
#include <lapacke.h>
#endif

namespace sgfrwt {
namespace detail {

void symmetric_eig(const Eigen::MatrixXd& a, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
#if defined(SGFRWT_HAVE_LAPACKE)
    const int n = static_cast<int>(a.rows());
    vectors = a;
    values.resize(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, vectors.data(), n,
                                           values.data());
    if (info != 0) {
        throw NumericalFailure("dsyevd failed with info=" + std::to_string(info));
    }
#else
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("symmetric eigensolver did not converge");
    }
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
#endif
}

namespace {

// Sign convention: the first entry of largest magnitude becomes positive.
void normalize_column_sign(Eigen::Ref<Eigen::VectorXd> col) {
    int best = 0;
    double mag = std::abs(col[0]);
    for (int i = 1; i < col.size(); ++i) {
        if (std::abs(col[i]) > mag) {
            mag = std::abs(col[i]);
            best = i;
        }
    }
    if (col[best] < 0.0) col = -col;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

} // namespace

void orthogonal_eigendecomposition(const Eigen::MatrixXd& q, Eigen::MatrixXcd& u,
                                   Eigen::VectorXd& phi) {
    using std::numbers::pi;
    const int n = static_cast<int>(q.rows());
    const Eigen::MatrixXd s = 0.5 * (q + q.transpose());

    Eigen::VectorXd cosines;
    Eigen::MatrixXd v;
    symmetric_eig(s, cosines, v);
    const Eigen::MatrixXd qv = q * v;

    struct Mode {
        double phase;
        Eigen::VectorXcd column;
    };
    std::vector<Mode> modes;
    modes.reserve(n);

    const double cluster_tol = 1e-7;
    int begin = 0;
    while (begin < n) {
        int end = begin + 1;
        while (end < n && cosines[end] - cosines[end - 1] <= cluster_tol) ++end;
        const int k = end - begin;
        const auto vc = v.middleCols(begin, k);

        if (k == 1) {
            const double t = vc.col(0).dot(qv.col(begin));
            if (std::abs(std::abs(t) - 1.0) > 1e-6) {
                throw NumericalFailure("isolated non-unimodular eigenvalue in orthogonal matrix");
            }
            modes.push_back({t >= 0.0 ? 0.0 : pi, vc.col(0).cast<std::complex<double>>()});
        } else {
            // Restriction of q to the invariant subspace; its real Schur form
            // exposes the rotation blocks.
            const Eigen::MatrixXd m = vc.transpose() * qv.middleCols(begin, k);
            Eigen::RealSchur<Eigen::MatrixXd> schur(m);
            if (schur.info() != Eigen::Success) {
                throw NumericalFailure("real Schur decomposition did not converge");
            }
            const Eigen::MatrixXd& t = schur.matrixT();
            const Eigen::MatrixXd z = vc * schur.matrixU();
            int i = 0;
            while (i < k) {
                if (i + 1 < k && std::abs(t(i + 1, i)) > 1e-12) {
                    const double c = 0.5 * (t(i, i) + t(i + 1, i + 1));
                    const double sn = 0.5 * (t(i + 1, i) - t(i, i + 1));
                    const double angle = std::atan2(sn, c);
                    const std::complex<double> im(0.0, 1.0);
                    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
                    Eigen::VectorXcd plus =
                        inv_sqrt2 * (z.col(i).cast<std::complex<double>>() -
                                     im * z.col(i + 1).cast<std::complex<double>>());
                    Eigen::VectorXcd minus =
                        inv_sqrt2 * (z.col(i).cast<std::complex<double>>() +
                                     im * z.col(i + 1).cast<std::complex<double>>());
                    modes.push_back({angle, std::move(plus)});
                    modes.push_back({-angle, std::move(minus)});
                    i += 2;
                } else {
                    const double d = t(i, i);
                    if (std::abs(std::abs(d) - 1.0) > 1e-6) {
                        throw NumericalFailure("non-unimodular Schur block in orthogonal matrix");
                    }
                    modes.push_back({d >= 0.0 ? 0.0 : pi, z.col(i).cast<std::complex<double>>()});
                    i += 1;
                }
            }
        }
        begin = end;
    }

    std::stable_sort(modes.begin(), modes.end(),
                     [](const Mode& a, const Mode& b) { return a.phase < b.phase; });

    u.resize(n, n);
    phi.resize(n);
    for (int c = 0; c < n; ++c) {
        u.col(c) = modes[c].column;
        phi[c] = modes[c].phase;
    }

    // Residual probe: U diag(e^{i phi}) U^H must reproduce q on random vectors.
    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> gauss;
    const Eigen::VectorXcd expphi =
        phi.array().unaryExpr([](double p) { return std::polar(1.0, p); });
    for (int probe = 0; probe < 4; ++probe) {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x[i] = gauss(rng);
        const Eigen::VectorXcd lhs = u * expphi.cwiseProduct(u.adjoint() * x.cast<std::complex<double>>());
        const double err = (lhs - (q * x).cast<std::complex<double>>()).norm() / x.norm();
        if (!(err < 1e-8)) {
            throw NumericalFailure("orthogonal eigendecomposition residual " + std::to_string(err));
        }
    }
}

} // namespace detail

SpectralDecomposition eig_decompose(const Eigen::MatrixXd& laplacian, int max_n) {
    const int n = static_cast<int>(laplacian.rows());
    if (n == 0 || laplacian.cols() != n) {
        throw DimensionMismatch("laplacian must be square and non-empty");
    }
    if (n > max_n) {
        throw InvalidParameter("dense spectral pipeline capped at n=" + std::to_string(max_n) +
                               " (got " + std::to_string(n) + ")");
    }
    if ((laplacian - laplacian.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, laplacian.cwiseAbs().maxCoeff())) {
        throw InvalidParameter("laplacian is not symmetric");
    }

    SpectralDecomposition dec;
    detail::symmetric_eig(laplacian, dec.lambda, dec.chi);

    const double scale = std::max(1.0, std::abs(dec.lambda[dec.lambda.size() - 1]));
    if (dec.lambda[0] < -1e-8 * scale) {
        throw NumericalFailure("laplacian has a significantly negative eigenvalue");
    }
    for (int i = 0; i < dec.lambda.size(); ++i) {
        if (std::abs(dec.lambda[i]) <= 1e-12 * scale) dec.lambda[i] = 0.0;
    }

    for (int c = 0; c < n; ++c) {
        detail::normalize_column_sign(dec.chi.col(c));
    }

    // Tie-break columns of (numerically) equal eigenvalue lexicographically.
    const double tie_tol = 1e-10 * scale;
    int begin = 0;
    while (begin < n) {
        int end = begin + 1;
        while (end < n && dec.lambda[end] - dec.lambda[end - 1] <= tie_tol) ++end;
        if (end - begin > 1) {
            std::vector<int> order(end - begin);
            for (int i = 0; i < end - begin; ++i) order[i] = begin + i;
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return detail::lex_less(dec.chi.col(a), dec.chi.col(b));
            });
            Eigen::MatrixXd block(n, end - begin);
            Eigen::VectorXd vals(end - begin);
            for (int i = 0; i < end - begin; ++i) {
                block.col(i) = dec.chi.col(order[i]);
                vals[i] = dec.lambda[order[i]];
            }
            dec.chi.middleCols(begin, end - begin) = block;
            dec.lambda.segment(begin, end - begin) = vals;
        }
        begin = end;
    }
    return dec;
}

double estimate_r_max(const Eigen::MatrixXd& laplacian, double theta, int iterations) {
    const int n = static_cast<int>(laplacian.rows());
    if (n == 0) throw DimensionMismatch("empty matrix");
    if (theta < 0.0 || theta > 1.0) throw InvalidOrder("theta must lie in [0, 1]");
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    v.normalize();
    double rayleigh = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd w = laplacian * v;
        rayleigh = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) break;
        v = w / norm;
    }
    // Power iteration approaches lambda_max from below; add headroom so the
    // result can serve as an upper bound.
    const double bound = std::max(rayleigh, 0.0) * 1.01;
    return std::pow(bound, theta);
}

BasisFactorization factor_basis(const SpectralDecomposition& dec) {
    const int n = dec.size();
    if (n == 0 || dec.chi.rows() != n || dec.chi.cols() != n) {
        throw DimensionMismatch("decomposition is empty or inconsistent");
    }
    auto u = std::make_shared<Eigen::MatrixXcd>();
    auto phi = std::make_shared<Eigen::VectorXd>();
    detail::orthogonal_eigendecomposition(dec.chi, *u, *phi);
    return {std::move(u), std::move(phi)};
}

FractionalOperator::FractionalOperator(const SpectralDecomposition& dec, double theta)
    : FractionalOperator(dec, theta == 0.0 ? BasisFactorization{} : factor_basis(dec), theta) {}

FractionalOperator::FractionalOperator(FractionalOperator&& other) noexcept
    : theta_(other.theta_),
      lambda_(std::move(other.lambda_)),
      r_(std::move(other.r_)),
      r_max_bound_(other.r_max_bound_),
      u_(std::move(other.u_)),
      phi_(std::move(other.phi_)),
      gamma_cache_(std::move(other.gamma_cache_)),
      l_theta_cache_(std::move(other.l_theta_cache_)) {}

FractionalOperator& FractionalOperator::operator=(FractionalOperator&& other) noexcept {
    if (this != &other) {
        theta_ = other.theta_;
        lambda_ = std::move(other.lambda_);
        r_ = std::move(other.r_);
        r_max_bound_ = other.r_max_bound_;
        u_ = std::move(other.u_);
        phi_ = std::move(other.phi_);
        gamma_cache_ = std::move(other.gamma_cache_);
        l_theta_cache_ = std::move(other.l_theta_cache_);
    }
    return *this;
}

FractionalOperator::FractionalOperator(const SpectralDecomposition& dec,
                                       const BasisFactorization& basis, double theta) {
    if (theta < 0.0 || theta > 1.0) {
        throw InvalidOrder("fractional order must lie in (0, 1] (0 accepted as identity case)");
    }
    const int n = dec.size();
    if (n == 0 || dec.chi.rows() != n || dec.chi.cols() != n) {
        throw DimensionMismatch("decomposition is empty or inconsistent");
    }
    theta_ = theta;
    lambda_ = dec.lambda;
    r_.resize(n);
    for (int i = 0; i < n; ++i) {
        r_[i] = dec.lambda[i] == 0.0 ? 0.0 : std::pow(dec.lambda[i], theta);
    }
    r_max_bound_ = r_.maxCoeff() * (1.0 + 1e-9);

    if (theta_ != 0.0) {
        if (!basis.u || !basis.phi || basis.u->rows() != n) {
            throw DimensionMismatch("basis factorization does not match decomposition");
        }
        u_ = basis.u;
        phi_ = basis.phi;
    }
}

Eigen::VectorXcd FractionalOperator::apply_gamma(const Eigen::VectorXcd& v) const {
    if (v.size() != size()) throw DimensionMismatch("signal length does not match operator size");
    if (theta_ == 0.0) return v;
    if (!u_) return gamma() * v;
    Eigen::VectorXcd w = u_->adjoint() * v;
    w.array() *= (theta_ * phi_->array()).unaryExpr([](double p) { return std::polar(1.0, p); });
    return *u_ * w;
}

Eigen::VectorXcd FractionalOperator::apply_gamma_adjoint(const Eigen::VectorXcd& v) const {
    if (v.size() != size()) throw DimensionMismatch("signal length does not match operator size");
    if (theta_ == 0.0) return v;
    if (!u_) return gamma().adjoint() * v;
    Eigen::VectorXcd w = u_->adjoint() * v;
    w.array() *= (theta_ * phi_->array()).unaryExpr([](double p) { return std::polar(1.0, -p); });
    return *u_ * w;
}

Eigen::VectorXcd FractionalOperator::apply_filter(const Eigen::VectorXd& d,
                                                  const Eigen::VectorXcd& v) const {
    if (d.size() != size()) throw DimensionMismatch("filter length does not match operator size");
    Eigen::VectorXcd w = apply_gamma_adjoint(v);
    w.array() *= d.array();
    return apply_gamma(w);
}

const Eigen::MatrixXcd& FractionalOperator::gamma() const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (!gamma_cache_) {
        const int n = size();
        if (theta_ == 0.0) {
            gamma_cache_ = std::make_unique<Eigen::MatrixXcd>(Eigen::MatrixXcd::Identity(n, n));
        } else {
            Eigen::MatrixXcd scaled = *u_;
            for (int c = 0; c < n; ++c) scaled.col(c) *= std::polar(1.0, theta_ * (*phi_)[c]);
            gamma_cache_ = std::make_unique<Eigen::MatrixXcd>(scaled * u_->adjoint());
        }
    }
    return *gamma_cache_;
}

const Eigen::MatrixXcd& FractionalOperator::l_theta() const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (l_theta_cache_) return *l_theta_cache_;
    }
    const Eigen::MatrixXcd& g = gamma();
    Eigen::MatrixXcd scaled = g;
    for (int c = 0; c < size(); ++c) scaled.col(c) *= r_[c];
    Eigen::MatrixXcd lt = scaled * g.adjoint();
    lt = 0.5 * (lt + lt.adjoint().eval());
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (!l_theta_cache_) l_theta_cache_ = std::make_unique<Eigen::MatrixXcd>(std::move(lt));
    return *l_theta_cache_;
}

FractionalOperator fractional_basis(const SpectralDecomposition& dec, double theta) {
    return FractionalOperator(dec, theta);
}

FractionalOperator fractional_basis(const SpectralDecomposition& dec,
                                    const BasisFactorization& basis, double theta) {
    return FractionalOperator(dec, basis, theta);
}

Eigen::VectorXcd gfrft(const Eigen::VectorXd& f, const FractionalOperator& op) {
    return op.apply_gamma_adjoint(f.cast<std::complex<double>>());
}

Eigen::VectorXcd gfrft(const Eigen::VectorXcd& f, const FractionalOperator& op) {
    return op.apply_gamma_adjoint(f);
}

Eigen::VectorXcd igfrft(const Eigen::VectorXcd& spectrum, const FractionalOperator& op) {
    return op.apply_gamma(spectrum);
}

namespace {

constexpr char kMagic[4] = {'F', 'G', 'W', '1'};

void write_bytes(std::ofstream& out, const void* p, std::size_t bytes) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
}

void read_bytes(std::ifstream& in, void* p, std::size_t bytes, const std::string& what) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) {
        throw TruncatedFile("operator container truncated while reading " + what);
    }
}

} // namespace

void FractionalOperator::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write operator container " + path);
    const std::uint64_t n = static_cast<std::uint64_t>(size());
    write_bytes(out, kMagic, 4);
    write_bytes(out, &n, 8);
    write_bytes(out, &theta_, 8);
    write_bytes(out, &r_max_bound_, 8);
    write_bytes(out, lambda_.data(), n * 8);
    write_bytes(out, r_.data(), n * 8);
    // gamma and l_theta in row-major complex-double order
    const Eigen::MatrixXcd& g = gamma();
    const Eigen::MatrixXcd& lt = l_theta();
    using RowMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMat gr = g;
    write_bytes(out, gr.data(), n * n * 16);
    gr = lt;
    write_bytes(out, gr.data(), n * n * 16);
    if (!out) throw IoError("write failed for " + path);
}

FractionalOperator FractionalOperator::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open operator container " + path);
    char magic[4];
    read_bytes(in, magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw BadMagic("not an FGW1 operator container: " + path);
    }
    std::uint64_t n = 0;
    FractionalOperator op;
    read_bytes(in, &n, 8, "size");
    if (n == 0 || n > (1u << 24)) throw UnsupportedFormat("implausible operator size");
    read_bytes(in, &op.theta_, 8, "theta");
    read_bytes(in, &op.r_max_bound_, 8, "r_max_bound");
    op.lambda_.resize(static_cast<int>(n));
    op.r_.resize(static_cast<int>(n));
    read_bytes(in, op.lambda_.data(), n * 8, "lambda");
    read_bytes(in, op.r_.data(), n * 8, "r");
    using RowMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMat gr(n, n);
    read_bytes(in, gr.data(), n * n * 16, "gamma");
    op.gamma_cache_ = std::make_unique<Eigen::MatrixXcd>(gr);
    read_bytes(in, gr.data(), n * n * 16, "l_theta");
    op.l_theta_cache_ = std::make_unique<Eigen::MatrixXcd>(gr);
    return op;
}

} // namespace sgfrwt
