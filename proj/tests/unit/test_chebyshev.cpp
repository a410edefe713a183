#include <doctest.h>

#include <random>

#include "fk/chebyshev.hpp"
#include "fk/errors.hpp"
#include "oracles.hpp"

using namespace fk;

namespace {

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// Method-of-definition recurrence on a scalar: T_0 = 1, T_1 = xi, T_{k+1} = 2 xi T_k - T_{k-1}.
Complex cheb_by_recurrence(int m, Complex xi) {
    Complex t0 = 1.0, t1 = xi;
    if (m == 0) return t0;
    for (int k = 1; k < m; ++k) {
        const Complex t2 = 2.0 * xi * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    return t1;
}

}  // namespace

TEST_CASE("arithmetic_sqrt branch convention") {
    CHECK(arithmetic_sqrt(4.0) == Complex(2.0, 0.0));
    CHECK(close(arithmetic_sqrt(-1.0), Complex(0.0, 1.0), 1e-16));
    CHECK(close(arithmetic_sqrt(Complex(0.0, -2.0)), Complex(1.0, -1.0), 1e-15));
    CHECK(close(arithmetic_sqrt(Complex(-1.0, -0.0)), Complex(0.0, 1.0), 1e-16));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const Complex z(u(rng), u(rng));
        const Complex r = arithmetic_sqrt(z);
        CHECK((r.real() > 0.0 || (r.real() == 0.0 && r.imag() >= 0.0)));
        CHECK(std::abs(r * r - z) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(z));
    }
}

TEST_CASE("modulus_largest_root") {
    CHECK(close(modulus_largest_root(1.25), 2.0, 1e-15));
    CHECK(close(modulus_largest_root(1.0), 1.0, 1e-15));
    const Complex w = modulus_largest_root(Complex(0.0, 1.25));
    CHECK(close(w, Complex(0.0, (5.0 + std::sqrt(41.0)) / 4.0), 1e-15));
    CHECK(std::abs(w) == doctest::Approx(2.8508).epsilon(1e-4));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const Complex xi(u(rng), u(rng));
        const Complex root = modulus_largest_root(xi);
        CHECK(std::abs(root) >= 1.0 - 1e-12);
        CHECK(std::abs(0.5 * (root + 1.0 / root) - xi) <= 1e-12 * std::max(1.0, std::abs(xi)));
    }
}

TEST_CASE("branch fault hook flips the root") {
    testing::set_branch_fault(true);
    const Complex flipped = modulus_largest_root(1.25);
    testing::set_branch_fault(false);
    CHECK(close(flipped, 0.5, 1e-15));
    CHECK(!testing::branch_fault());
}

TEST_CASE("cheb_T values") {
    CHECK(close(cheb_T(1, 0.3), 0.3, 1e-15));
    CHECK(close(cheb_T(2, 2.0), 7.0, 1e-14));
    CHECK(close(cheb_T(3, Complex(0.0, 1.0)), Complex(0.0, -7.0), 1e-14));
    CHECK(close(cheb_T(0, Complex(3.0, 1.0)), 1.0, 1e-15));
    CHECK_THROWS_AS(cheb_T(-1, 0.5), Error);
    CHECK_THROWS_AS(cheb_T(2000, 1e3), RangeExceeded);

    // Classical cos(m acos x) on [-1, 1] and the recurrence everywhere.
    for (double x = -1.0; x <= 1.0; x += 0.125) {
        for (int m : {0, 1, 4, 9, 17}) CHECK(close(cheb_T(m, x), std::cos(m * std::acos(x)), 1e-12));
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        const Complex xi(u(rng), u(rng));
        const int m = static_cast<int>(i % 12);
        CHECK(close(cheb_T(m, xi), cheb_by_recurrence(m, xi), 1e-10));
    }
}

TEST_CASE("filter_value examples") {
    FilterSpec circle{Ellipse{0.5, 0.0, 1.0}, 5, 3.0};
    CHECK(close(filter_value(circle, 1.0), 3.2e-4, 1e-13));
    CHECK(close(filter_value(circle, 3.0), 1.0, 1e-15));

    // The c2 -> 0 limit agrees with a tiny positive c2.
    FilterSpec near = circle;
    near.ellipse.c2 = 1e-8;
    CHECK(std::abs(filter_value(near, 1.0) - 3.2e-4) <= 1e-10);

    // c2 = 0.25 against the scalar recurrence applied to [lambda].
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const FilterSpec spec{Ellipse{0.0, 0.25, 1.0}, 1 + i % 12, 2.5};
        const double lambda = u(rng);
        MatvecCounter counter;
        const Vector z = chebyshev_apply(CsrMatrix::diagonal(Vector{lambda}), Vector{1.0}, spec, counter);
        const double expected = filter_value(spec, lambda).real();
        CHECK(std::abs(z[0] - expected) <= 1e-12 * std::max(std::abs(expected), 1e-3));
        CHECK(std::abs(filter_value(spec, lambda).imag()) <= 1e-12);
    }
}

TEST_CASE("filter spec validation") {
    CHECK_THROWS_AS(filter_value(FilterSpec{Ellipse{0.0, 0.0, 1.0}, 0, 2.0}, 1.0), Error);
    CHECK_THROWS_AS(filter_value(FilterSpec{Ellipse{1.0, 0.0, 1.0}, 3, 1.0}, 1.0), Error);
    CHECK_THROWS_AS(filter_value(FilterSpec{Ellipse{0.0, 4.0, 1.0}, 3, 3.0}, 1.0), Error);
    CHECK_THROWS_AS(filter_value(FilterSpec{Ellipse{0.0, 0.0, -1.0}, 3, 3.0}, 1.0), Error);
}

TEST_CASE("chebyshev_apply examples") {
    const CsrMatrix a = CsrMatrix::diagonal(Vector{3.0, 1.0, 0.0});
    MatvecCounter counter;
    const FilterSpec spec{Ellipse{0.5, 0.0, 1.0}, 5, 3.0};
    const Vector z = chebyshev_apply(a, Vector{1.0, 1.0, 1.0}, spec, counter);
    CHECK(counter.count() == 5);
    CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(z[1] == doctest::Approx(3.2e-4).epsilon(1e-12));
    CHECK(z[2] == doctest::Approx(-3.2e-4).epsilon(1e-12));

    // m = 1 is (A - dI) z0 / (l1 - d).
    const FilterSpec one{Ellipse{0.5, 0.25, 1.0}, 1, 3.0};
    const Vector z1 = chebyshev_apply(a, Vector{1.0, 1.0, 1.0}, one, counter);
    CHECK(z1[0] == doctest::Approx(1.0));
    CHECK(z1[1] == doctest::Approx(0.2));
    CHECK(z1[2] == doctest::Approx(-0.2));

    CHECK_THROWS_AS(chebyshev_apply(a, Vector{0.0, 0.0, 0.0}, spec, counter), Error);
    CHECK_THROWS_AS(chebyshev_apply(a, Vector{1.0, 1.0}, spec, counter), DimensionMismatch);
}

TEST_CASE("chebyshev_apply signals a degenerate recurrence before any product") {
    // l1 - d = 1 and c2 = 2 give rho_1 = 1, then 2(l1-d) - c2 rho_1 = 0.
    const FilterSpec spec{Ellipse{0.0, 2.0, 1.5}, 3, 1.0};
    MatvecCounter counter;
    CHECK_THROWS_AS(chebyshev_apply(CsrMatrix::identity(2), Vector{1.0, 1.0}, spec, counter), FilterDegenerate);
    CHECK(counter.count() == 0);
}

TEST_CASE("chebyshev_apply matches the eigen-decomposition oracle") {
    std::mt19937_64 rng(21);
    const std::size_t n = 50;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x(i, j) += 0.2 * u(rng);
    Eigen::VectorXd d(n);
    for (std::size_t i = 0; i < n; ++i) d(i) = std::uniform_real_distribution<double>(-2.0, 0.5)(rng);
    d(0) = 1.0;
    const Eigen::MatrixXd x_inv = x.inverse();
    const Eigen::MatrixXd dense = x * d.asDiagonal() * x_inv;
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = dense(i, j);
    const CsrMatrix a = CsrMatrix::from_dense(m);

    const Vector z0 = test::random_vector(rng, n);
    const Eigen::VectorXd c0 = x_inv * Eigen::Map<const Eigen::VectorXd>(z0.data(), n);
    for (const FilterSpec& spec : {FilterSpec{Ellipse{-0.75, 0.0, 1.25}, 12, 1.0},
                                   FilterSpec{Ellipse{-0.75, 1.0, 1.3}, 10, 1.0},
                                   FilterSpec{Ellipse{-0.75, -0.5, 1.5}, 8, 1.0}}) {
        MatvecCounter counter;
        const Vector z = chebyshev_apply(a, z0, spec, counter);
        const Eigen::VectorXd cm = x_inv * Eigen::Map<const Eigen::VectorXd>(z.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            const double expected = filter_value(spec, d(i)).real() * c0(i);
            CHECK(std::abs(cm(i) - expected) <= 1e-9 * std::max(std::abs(expected), std::abs(c0(i))));
        }
    }
}

TEST_CASE("damping_report examples") {
    const FilterSpec circle{Ellipse{0.0, 0.0, 2.0}, 10, 4.0};
    const ComplexVector unwanted{1.0, 2.0};
    const DampingReport r = damping_report(unwanted, circle);
    CHECK(r.kappas[0] == doctest::Approx(0.25));
    CHECK(r.kappas[1] == doctest::Approx(0.5));
    CHECK(r.kappa_max == doctest::Approx(0.5));

    CHECK(damping_bound(Ellipse{0.0, 0.0, 1.0}, 3.0) == doctest::Approx(1.0 / 3.0));
    CHECK(damping_bound(Ellipse{0.0, 0.25, 1.0}, 3.0) ==
          doctest::Approx((1.0 + std::sqrt(1.25)) / (3.0 + std::sqrt(8.75))).epsilon(1e-12));
    CHECK(damping_bound(Ellipse{0.0, 0.25, 1.0}, 3.0) == doctest::Approx(0.35549).epsilon(1e-4));
}

TEST_CASE("determine_ellipse branch 1") {
    const ComplexVector unwanted{Complex(-1.0, 0.5), Complex(-1.0, -0.5), -3.0};
    const EllipseFit fit = determine_ellipse(unwanted, 1.0, 0.5);
    CHECK(fit.branch == 1);
    CHECK(fit.ellipse.d == doctest::Approx(-2.0));
    CHECK(fit.ellipse.a_mod == doctest::Approx(std::sqrt(1.25)));
    CHECK(fit.ellipse.c2 == 0.0);
    CHECK(fit.kappa_u == doctest::Approx(std::sqrt(1.25) / 3.0));
    CHECK(fit.kappa_u == doctest::Approx(0.37268).epsilon(1e-4));
    for (const Complex& z : unwanted) CHECK(fit.ellipse.contains(z, 1e-12));
    CHECK(!fit.ellipse.contains(1.0));
}

TEST_CASE("determine_ellipse branch 2") {
    // x+ = 0, x- = -1, y+ = 2; zeta = 1 from theta1 = 2 at fraction 0.5.
    const ComplexVector unwanted{Complex(0.0, 2.0), Complex(0.0, -2.0), -1.0};
    const EllipseFit fit = determine_ellipse(unwanted, 2.0, 0.5);
    CHECK(fit.branch == 2);
    CHECK(fit.ellipse.d == doctest::Approx(-1.5));
    CHECK(fit.ellipse.a_mod == doctest::Approx(2.5));
    CHECK(std::abs(Complex(0.0, 2.0) - fit.ellipse.d) == doctest::Approx(2.5));
    CHECK(fit.kappa_u == doctest::Approx(2.5 / 3.5));
    for (const Complex& z : unwanted) CHECK(fit.ellipse.contains(z, 1e-12));
    CHECK(!fit.ellipse.contains(2.0));
}

TEST_CASE("determine_ellipse with complex theta1 uses zeta = Re(theta1)") {
    const ComplexVector unwanted{-1.0, -3.0};
    const EllipseFit fit = determine_ellipse(unwanted, Complex(1.0, 0.5), 0.1);
    CHECK(fit.branch == 1);
    CHECK(fit.ellipse.d == doctest::Approx(-2.0));
    CHECK(fit.ellipse.a_mod == doctest::Approx(1.0));
}

TEST_CASE("determine_ellipse degenerate single point") {
    const EllipseFit fit = determine_ellipse(ComplexVector{5.0}, 9.0, 0.5);
    CHECK(fit.branch == 1);
    CHECK(fit.ellipse.d == 5.0);
    CHECK(fit.ellipse.a_mod == doctest::Approx(6e-8));
    CHECK(fit.kappa_u <= 2e-8);
}

TEST_CASE("determine_ellipse without separation") {
    CHECK_THROWS_AS(determine_ellipse(ComplexVector{1.0, -2.0}, 1.0, 0.5), NoSeparation);
    CHECK_THROWS_AS(determine_ellipse(ComplexVector{1.0}, 0.5, 0.5), NoSeparation);
    CHECK_THROWS_AS(determine_ellipse(ComplexVector{}, 0.5, 0.5), Error);
    CHECK_THROWS_AS(determine_ellipse(ComplexVector{0.0}, 1.0, 1.5), Error);
}

TEST_CASE("random fits contain their unwanted values and exclude theta1") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-5.0, 0.0);
    for (int t = 0; t < 500; ++t) {
        ComplexVector unwanted;
        for (int i = 0; i < 1 + t % 9; ++i) {
            const Complex z(u(rng), t % 2 ? 0.0 : u(rng) + 2.5);
            unwanted.push_back(z);
            if (z.imag() != 0.0) unwanted.push_back(std::conj(z));
        }
        const double theta = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
        const EllipseFit fit = determine_ellipse(unwanted, theta, 0.5);
        for (const Complex& z : unwanted) CHECK(fit.ellipse.contains(z, 1e-12));
        CHECK(!fit.ellipse.contains(theta));
        CHECK(fit.kappa_u < 1.0);
    }
}
