#include "sgfrwt/fast.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace sgfrwt {

using std::complex;
using std::numbers::pi;

double FourierSeries::eval(double x) const {
    const complex<double> w = std::polar(1.0, 2.0 * pi * x / r_max);
    complex<double> pw = w;
    double acc = c[0].real();
    for (int k = 1; k <= order; ++k) {
        acc += 2.0 * (c[k] * pw).real();
        pw *= w;
    }
    return acc;
}

namespace {

Eigen::VectorXcd coefficients_at(const std::function<double(double)>& kernel, double t,
                                 double r_max, int order, int q) {
    // trapezoid weights: h/2 at the ends, h inside
    const double h = r_max / q;
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(order + 1);
    for (int i = 0; i <= q; ++i) {
        const double x = r_max * i / double(q);
        const double w = (i == 0 || i == q) ? 0.5 * h : h;
        const double kv = kernel(t * x) * w;
        const complex<double> step = std::polar(1.0, -2.0 * pi * x / r_max);
        complex<double> ph(1.0, 0.0);
        for (int k = 0; k <= order; ++k) {
            c[k] += kv * ph;
            ph *= step;
        }
    }
    return c / r_max;
}

} // namespace

FourierSeries fourier_coefficients(const std::function<double(double)>& kernel, double t,
                                   double r_max, int order, int quad_points) {
    if (order < 0) throw InvalidParameter("series order must be nonnegative");
    if (!(r_max > 0.0)) throw InvalidParameter("r_max must be positive");
    if (!(t > 0.0)) throw InvalidParameter("scale must be positive");

    FourierSeries s;
    s.order = order;
    s.r_max = r_max;
    if (quad_points > 0) {
        if (quad_points < 8 * order) {
            throw InvalidParameter("quadrature needs at least 8M panels");
        }
        s.c = coefficients_at(kernel, t, r_max, order, quad_points);
        s.quad_points = quad_points;
        return s;
    }

    // Auto mode: double the panel count until the coefficients are stable to
    // 1e-9 under one further doubling.
    int q = std::max(8 * order, 1024);
    Eigen::VectorXcd prev = coefficients_at(kernel, t, r_max, order, q);
    for (;;) {
        const Eigen::VectorXcd next = coefficients_at(kernel, t, r_max, order, 2 * q);
        const double delta = (next - prev).cwiseAbs().maxCoeff();
        if (delta < 1e-9 || 2 * q >= (1 << 21)) {
            s.c = next;
            s.quad_points = 2 * q;
            return s;
        }
        prev = next;
        q *= 2;
    }
}

double error_bound(const FourierSeries& series, const std::function<double(double)>& kernel,
                   double t, int grid) {
    if (grid < 1000) throw InvalidParameter("error bound grid needs >= 1000 points");
    double sup = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double x = series.r_max * i / double(grid);
        sup = std::max(sup, std::abs(kernel(t * x) - series.eval(x)));
    }
    return sup;
}

int FourierApprox::max_order() const {
    int m = 0;
    for (const auto& s : series) m = std::max(m, s.order);
    return m;
}

FourierApprox FourierApprox::build(const FilterBank& bank, int order, int quad_points) {
    return build(bank, std::vector<int>(bank.bands(), order), quad_points);
}

FourierApprox FourierApprox::build(const FilterBank& bank, const std::vector<int>& orders,
                                   int quad_points) {
    if (static_cast<int>(orders.size()) != bank.bands()) {
        throw DimensionMismatch("need one truncation order per band");
    }
    FourierApprox fa;
    fa.r_max = bank.r_max;
    fa.scales = bank.scales;
    fa.series.reserve(bank.bands());
    fa.sup_error.reserve(bank.bands());
    for (int b = 0; b < bank.bands(); ++b) {
        auto kernel = [&bank, b](double x) { return bank.eval_band(b, x); };
        // eval_band already folds the scale in, so the series sees t = 1.
        fa.series.push_back(fourier_coefficients(kernel, 1.0, bank.r_max, orders[b], quad_points));
        fa.sup_error.push_back(error_bound(fa.series.back(), kernel, 1.0));
    }
    return fa;
}

PropagatorPair::PropagatorPair(const FractionalOperator& op)
    : PropagatorPair(op, op.r_max_bound()) {}

PropagatorPair::PropagatorPair(const FractionalOperator& op, double r_max) {
    if (!(r_max > 0.0)) throw InvalidParameter("propagator needs r_max > 0");
    r_max_ = r_max;
    theta_ = op.theta();
    const int n = op.size();
    const Eigen::MatrixXcd& g = op.gamma();
    Eigen::MatrixXcd scaled = g;
    for (int c = 0; c < n; ++c) {
        scaled.col(c) *= std::polar(1.0, 2.0 * pi * op.r()[c] / r_max_);
    }
    f_plus_ = scaled * g.adjoint();
}

Eigen::VectorXcd PropagatorPair::apply_plus(const Eigen::VectorXcd& v) const {
    if (v.size() != size()) throw DimensionMismatch("vector length does not match propagator");
    matvecs_.fetch_add(1, std::memory_order_relaxed);
    return f_plus_ * v;
}

Eigen::VectorXcd PropagatorPair::apply_minus(const Eigen::VectorXcd& v) const {
    if (v.size() != size()) throw DimensionMismatch("vector length does not match propagator");
    matvecs_.fetch_add(1, std::memory_order_relaxed);
    return f_plus_.adjoint() * v;
}

PropagatorPair build_propagators(const FractionalOperator& op) { return PropagatorPair(op); }

Eigen::VectorXcd series_apply(const PropagatorPair& pp, const FourierSeries& series,
                              const Eigen::VectorXcd& f) {
    if (f.size() != pp.size()) throw DimensionMismatch("signal length does not match propagator");
    Eigen::VectorXcd acc = series.c[0].real() * f;
    if (series.order == 0) return acc;
    Eigen::VectorXcd v = f, u = f;
    for (int k = 1; k <= series.order; ++k) {
        v = pp.apply_plus(v);
        u = pp.apply_minus(u);
        acc += series.c[k] * v + std::conj(series.c[k]) * u;
    }
    return acc;
}

CoefficientPyramid forward_fast(const Eigen::VectorXd& f, const PropagatorPair& pp,
                                const FourierApprox& fa, bool conjugate_shortcut) {
    if (f.size() != pp.size()) throw DimensionMismatch("signal length does not match propagator");
    if (conjugate_shortcut && pp.theta() != 1.0) {
        throw InvalidParameter("conjugation shortcut requires a real operator (theta = 1)");
    }
    const int nb = fa.bands();
    CoefficientPyramid p;
    p.theta = pp.theta();
    p.scales = fa.scales;
    p.bands.reserve(nb);
    const Eigen::VectorXcd fc = f.cast<complex<double>>();
    for (int b = 0; b < nb; ++b) p.bands.push_back(fa.series[b].c[0].real() * fc);

    const int max_m = fa.max_order();
    Eigen::VectorXcd v = fc, u = fc;
    for (int k = 1; k <= max_m; ++k) {
        v = pp.apply_plus(v);
        if (conjugate_shortcut) {
            // F_{-k} f = conj(F_k f) for real L_theta and real f
            for (int b = 0; b < nb; ++b) {
                if (k <= fa.series[b].order) {
                    p.bands[b] += fa.series[b].c[k] * v +
                                  std::conj(fa.series[b].c[k]) * v.conjugate();
                }
            }
        } else {
            u = pp.apply_minus(u);
            for (int b = 0; b < nb; ++b) {
                if (k <= fa.series[b].order) {
                    p.bands[b] += fa.series[b].c[k] * v + std::conj(fa.series[b].c[k]) * u;
                }
            }
        }
    }
    return p;
}

Eigen::VectorXcd adjoint_fast(const std::vector<Eigen::VectorXcd>& bands,
                              const PropagatorPair& pp, const FourierApprox& fa) {
    if (static_cast<int>(bands.size()) != fa.bands()) {
        throw DimensionMismatch("band count does not match approximation");
    }
    const int n = pp.size();
    for (const auto& b : bands) {
        if (b.size() != n) throw DimensionMismatch("band length does not match propagator");
    }
    const int max_m = fa.max_order();

    // sum_j sum_k conj(c_{j,k}) F_{-k} eta_j, grouped per k:
    //   k = 0 : sum_j conj(c_{j,0}) eta_j
    //   k > 0 : F_minus^k x_k,  x_k = sum_j conj(c_{j,k}) eta_j
    //   k < 0 : F_plus^|k| y_|k|, y_k = sum_j c_{j,k} eta_j
    // Each branch is a Horner recursion costing max_m products.
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < fa.bands(); ++j) {
        out += std::conj(fa.series[j].c[0]) * bands[j];
    }
    if (max_m == 0) return out;

    auto gather = [&](int k, bool conjugate) {
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
        for (int j = 0; j < fa.bands(); ++j) {
            if (k <= fa.series[j].order) {
                const complex<double> ck = fa.series[j].c[k];
                x += (conjugate ? std::conj(ck) : ck) * bands[j];
            }
        }
        return x;
    };

    Eigen::VectorXcd w = gather(max_m, true);
    for (int k = max_m - 1; k >= 1; --k) w = pp.apply_minus(w) + gather(k, true);
    out += pp.apply_minus(w);

    w = gather(max_m, false);
    for (int k = max_m - 1; k >= 1; --k) w = pp.apply_plus(w) + gather(k, false);
    out += pp.apply_plus(w);

    return out;
}

FourierSeries product_coefficients(const FourierApprox& fa) {
    const int max_m = fa.max_order();
    const int m_star = 2 * max_m;
    FourierSeries d;
    d.order = m_star;
    d.r_max = fa.r_max;
    d.c = Eigen::VectorXcd::Zero(m_star + 1);

    for (const FourierSeries& s : fa.series) {
        const int m = s.order;
        // full coefficient array c_{-m}..c_{m}
        Eigen::VectorXcd full(2 * m + 1);
        for (int k = -m; k <= m; ++k) {
            full[k + m] = k >= 0 ? s.c[k] : std::conj(s.c[-k]);
        }
        // d_{j,k} = sum_i conj(c_i) c_{k+i} over indices where both exist
        for (int k = 0; k <= 2 * m; ++k) {
            complex<double> acc(0.0, 0.0);
            for (int i = -m; i + k <= m; ++i) {
                acc += std::conj(full[i + m]) * full[i + k + m];
            }
            d.c[k] += acc;
        }
    }
    d.c[0] = complex<double>(d.c[0].real(), 0.0);
    return d;
}

Eigen::VectorXcd wtw_apply(const Eigen::VectorXcd& f, const PropagatorPair& pp,
                           const FourierSeries& product) {
    return series_apply(pp, product, f);
}

CgResult reconstruct_cg(const CoefficientPyramid& p, const PropagatorPair& pp,
                        const FourierApprox& fa, double tol, int max_iter) {
    if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");
    if (max_iter < 0) throw InvalidParameter("max_iter must be nonnegative");

    const FourierSeries product = product_coefficients(fa);
    // Frame validity of the truncated bank: min of the product series on a
    // grid must stay positive, otherwise W*W is singular.
    double gmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2000; ++i) {
        gmin = std::min(gmin, product.eval(fa.r_max * i / 2000.0));
    }
    if (!(gmin > 0.0)) {
        throw FrameFailure("truncated frame function is not positive (min " +
                           std::to_string(gmin) + ")");
    }

    const Eigen::VectorXcd b = adjoint_fast(p.bands, pp, fa);
    const int n = static_cast<int>(b.size());
    const double bnorm = b.norm();

    CgResult res;
    if (bnorm == 0.0) {
        res.signal = Eigen::VectorXd::Zero(n);
        return res;
    }

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd r = b;
    Eigen::VectorXcd dir = r;
    double rho = r.squaredNorm();
    double prev_norm = std::sqrt(rho);
    int it = 0;
    while (it < max_iter && std::sqrt(rho) > tol * bnorm) {
        const Eigen::VectorXcd ap = wtw_apply(dir, pp, product);
        const double denom = dir.dot(ap).real();
        if (!(denom > 0.0)) break; // operator lost positive definiteness numerically
        const double alpha = rho / denom;
        x += alpha * dir;
        r -= alpha * ap;
        const double rho_next = r.squaredNorm();
        const double rnorm = std::sqrt(rho_next);
        if (rnorm > prev_norm * (1.0 + 1e-12)) ++res.non_monotone_steps;
        prev_norm = rnorm;
        dir = r + (rho_next / rho) * dir;
        rho = rho_next;
        ++it;
    }
    res.iterations = it;
    res.relative_residual = std::sqrt(rho) / bnorm;
    res.converged = res.relative_residual <= tol;
    res.imag_residue = x.imag().norm();
    res.signal = x.real();
    return res;
}

Eigen::VectorXcd propagator_action_expm(const FractionalOperator& op, int k, double r_max,
                                        const Eigen::VectorXcd& v) {
    if (v.size() != op.size()) throw DimensionMismatch("vector length does not match operator");
    if (!(r_max > 0.0)) throw InvalidParameter("r_max must be positive");
    const Eigen::MatrixXcd a = (complex<double>(0.0, 2.0 * pi * k / r_max)) * op.l_theta();
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    while (norm1 / std::pow(2.0, squarings) > 0.5) {
        if (++squarings > 24) throw NumericalFailure("propagator norm too large for expm action");
    }
    const Eigen::MatrixXcd as = a / std::pow(2.0, squarings);

    Eigen::VectorXcd w = v;
    for (int s = 0; s < (1 << squarings); ++s) {
        Eigen::VectorXcd term = w;
        Eigen::VectorXcd sum = w;
        for (int j = 1; j <= 64; ++j) {
            term = (as * term) / double(j);
            sum += term;
            if (term.norm() <= 1e-18 * sum.norm()) break;
        }
        w = sum;
    }
    return w;
}

} // namespace sgfrwt
