#include <doctest.h>

#include <cmath>

#include "sgfrwt/kernels.hpp"

using namespace sgfrwt;

namespace {
const SplineKernel& default_kernel() {
    static SplineKernel k = SplineKernel::make(2, 2, 1.0, 2.0);
    return k;
}
// max of the default kernel: interior critical point of the cubic at
// x* = 2 - 1/sqrt(3), value 1 + 2/(3 sqrt(3))
const double kDefaultMax = 1.0 + 2.0 / (3.0 * std::sqrt(3.0));
} // namespace

TEST_CASE("spline kernel: default cubic is -5 + 11x - 6x^2 + x^3") {
    const auto& c = default_kernel().spline_coefficients();
    CHECK(c[0] == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(c[2] == doctest::Approx(-6.0).epsilon(1e-12));
    CHECK(c[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spline kernel: normalisation and frozen point values") {
    const auto& g = default_kernel();
    CHECK(g(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g(2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g(0.0) == 0.0);
    CHECK(g(0.5) == doctest::Approx(0.25).epsilon(1e-12));  // x1^-2 x^2 branch
    CHECK(g(4.0) == doctest::Approx(0.25).epsilon(1e-12));  // x2^2 x^-2 branch
    CHECK(g(1.5) == doctest::Approx(1.375).epsilon(1e-12)); // cubic segment
    CHECK(g(10.0) == doctest::Approx(0.04).epsilon(1e-12)); // 4/100
    CHECK_THROWS_AS(g(-0.1), NegativeArgument);
}

TEST_CASE("spline kernel: continuity at the transition points") {
    const auto& g = default_kernel();
    for (double eps = 1e-6; eps >= 1e-9; eps /= 10.0) {
        CHECK(std::abs(g(1.0 - eps) - g(1.0 + eps)) <= 10.0 * eps);
        CHECK(std::abs(g(2.0 - eps) - g(2.0 + eps)) <= 10.0 * eps);
    }
}

TEST_CASE("spline kernel: monotone rise and decay") {
    const auto& g = default_kernel();
    double prev = g(0.0);
    for (int i = 1; i <= 100; ++i) {
        const double v = g(i / 100.0); // [0, x1]
        CHECK(v >= prev);
        prev = v;
    }
    prev = g(2.0);
    for (int i = 1; i <= 100; ++i) {
        const double v = g(2.0 + 0.5 * i); // [x2, inf)
        CHECK(v <= prev);
        prev = v;
    }
    // vanishes at infinity
    CHECK(g(1e6) < 2e-11);
}

TEST_CASE("spline kernel: closed-form max matches a dense grid") {
    const auto& g = default_kernel();
    CHECK(g.max_on(10.0) == doctest::Approx(kDefaultMax).epsilon(1e-12));
    // grid oracle
    double grid_max = 0.0;
    for (int i = 0; i <= 200000; ++i) grid_max = std::max(grid_max, g(10.0 * i / 200000.0));
    CHECK(g.max_on(10.0) >= grid_max - 1e-9);
    // r_max inside the rising branch
    CHECK(g.max_on(0.5) == doctest::Approx(0.25).epsilon(1e-12));
    // r_max inside the cubic segment
    CHECK(g.max_on(1.2) == doctest::Approx(-5 + 11 * 1.2 - 6 * 1.44 + 1.728).epsilon(1e-12));
}

TEST_CASE("spline kernel: degenerate transition region") {
    CHECK_THROWS_AS(SplineKernel::make(2, 2, 1.0, 1.0), SingularSystem);
    CHECK_THROWS_AS(SplineKernel::make(0, 2, 1.0, 2.0), InvalidParameter);
    CHECK_THROWS_AS(SplineKernel::make(2, 2, -1.0, 2.0), InvalidParameter);
}

TEST_CASE("scaling kernel: amplitude and decay") {
    const double r_max = 10.0, K = 20.0;
    const ScalingKernel h = ScalingKernel::make(r_max, K, kDefaultMax);
    CHECK(h(0.0) == doctest::Approx(kDefaultMax).epsilon(1e-14));
    const double lmin = r_max / K;
    CHECK(h(0.6 * lmin) == doctest::Approx(kDefaultMax * std::exp(-1.0)).epsilon(1e-12));
    double prev = h(0.0);
    for (int i = 1; i <= 50; ++i) {
        const double v = h(r_max * i / 50.0);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK_THROWS_AS(ScalingKernel::make(0.0, 20.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(ScalingKernel::make(1.0, 0.5, 1.0), InvalidParameter);
    CHECK_THROWS_AS(h(-1.0), NegativeArgument);
}

TEST_CASE("select_scales: endpoints and log spacing") {
    // J = 1 keeps only the coarsest scale
    const auto one = select_scales(10.0, 1, 20.0, 1.0, 2.0);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == doctest::Approx(4.0).epsilon(1e-14));

    // J = 2 gives exactly the two endpoints
    const auto two = select_scales(10.0, 2, 20.0, 1.0, 2.0);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(two[1] == doctest::Approx(0.1).epsilon(1e-14));

    // J = 4: log-spaced between 4.0 and 0.1
    const auto four = select_scales(10.0, 4, 20.0, 1.0, 2.0);
    REQUIRE(four.size() == 4);
    const double ratio = std::pow(0.1 / 4.0, 1.0 / 3.0);
    CHECK(four[0] == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(four[1] == doctest::Approx(4.0 * ratio).epsilon(1e-13));
    CHECK(four[2] == doctest::Approx(4.0 * ratio * ratio).epsilon(1e-13));
    CHECK(four[3] == doctest::Approx(0.1).epsilon(1e-13));
    for (std::size_t i = 1; i < four.size(); ++i) CHECK(four[i] < four[i - 1]);
}

TEST_CASE("select_scales: doubling r_max halves every scale") {
    const auto base = select_scales(3.7, 5, 20.0, 1.0, 2.0);
    const auto halved = select_scales(7.4, 5, 20.0, 1.0, 2.0);
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(halved[i] == doctest::Approx(0.5 * base[i]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(select_scales(0.0, 4, 20.0, 1.0, 2.0), InvalidParameter);
    CHECK_THROWS_AS(select_scales(1.0, 0, 20.0, 1.0, 2.0), InvalidParameter);
    CHECK_THROWS_AS(select_scales(1.0, 4, 1.0, 1.0, 2.0), InvalidParameter);
}

TEST_CASE("frame bounds of the default bank") {
    const FilterBank bank = make_filter_bank(10.0, 5, 20.0);
    const auto [a, b] = frame_bounds(bank, 2000);
    CHECK(a > 0.0);
    CHECK(b >= a);
    // G(0) = h(0)^2 = rho^2 since g(0) = 0
    double g0 = 0.0;
    for (int band = 0; band < bank.bands(); ++band) {
        const double v = bank.eval_band(band, 0.0);
        g0 += v * v;
    }
    CHECK(g0 == doctest::Approx(kDefaultMax * kDefaultMax).epsilon(1e-12));
    CHECK(b >= kDefaultMax); // peak of G dominates the kernel peak
    CHECK_THROWS_AS(frame_bounds(bank, 50), InvalidParameter);
}

TEST_CASE("frame failure is detectable: h = 0 with a single scale") {
    FilterBank bank;
    bank.g = SplineKernel::make(2, 2, 1.0, 2.0);
    bank.h = ScalingKernel::make(10.0, 20.0, 0.0); // zero scaling kernel
    bank.scales = {4.0};
    bank.r_max = 10.0;
    bank.K = 20.0;
    const auto [a, b] = frame_bounds(bank, 1000);
    CHECK(a == 0.0); // g(t_1 * 0) = 0 and h = 0
    CHECK(b > 0.0);
}

TEST_CASE("admissibility integral: analytic oracle for the default kernel") {
    // piecewise antiderivative:
    //   [0,1]  : integrand = 1, contributes 1
    //   [1,2]  : 5/x + 11 ln x - 6x + x^2/2 evaluated at the ends
    //   [2,U]  : 1/6 - 4/(3 U^3)
    auto analytic = [](double upper) {
        const double mid = (2.5 + 11.0 * std::log(2.0) - 12.0 + 2.0) - (5.0 - 6.0 + 0.5);
        return 1.0 + mid + 1.0 / 6.0 - 4.0 / (3.0 * upper * upper * upper);
    };
    const auto& g = default_kernel();
    const double i50 = admissibility_integral(g, 50.0, 400000);
    CHECK(i50 == doctest::Approx(analytic(50.0)).epsilon(1e-6));
    CHECK(i50 > 0.0);

    // doubling the upper limit only adds the analytic tail, bounded by x2^beta/upper
    const double i100 = admissibility_integral(g, 100.0, 800000);
    CHECK(std::abs(i100 - i50) <= 4.0 / 50.0);
    CHECK(std::abs(i100 - i50 - (analytic(100.0) - analytic(50.0))) < 1e-6);
}

TEST_CASE("admissibility integral: zero integrand and divergent decay rate") {
    CHECK(detail::trapezoid([](double) { return 0.0; }, 0.0, 10.0, 1000) == 0.0);
    const SplineKernel slow = SplineKernel::make(1, 2, 1.0, 2.0);
    CHECK_THROWS_AS(admissibility_integral(slow, 50.0, 1000), NonConvergent);
    CHECK_THROWS_AS(admissibility_integral(default_kernel(), 1.5, 1000), InvalidParameter);
}

TEST_CASE("filter bank construction guards") {
    CHECK_THROWS_AS(make_filter_bank_with_scales(10.0, 20.0, {}), InvalidParameter);
    CHECK_THROWS_AS(make_filter_bank_with_scales(10.0, 20.0, {1.0, 2.0}), InvalidParameter);
    CHECK_THROWS_AS(make_filter_bank_with_scales(10.0, 20.0, {2.0, -1.0}), InvalidParameter);
    const FilterBank bank = make_filter_bank(10.0, 3, 20.0);
    CHECK_THROWS_AS(bank.eval_band(-1, 0.0), IndexOutOfRange);
    CHECK_THROWS_AS(bank.eval_band(4, 0.0), IndexOutOfRange);
    CHECK(bank.bands() == 4);
}
