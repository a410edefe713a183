#pragma once

// Complex Chebyshev filters on ellipses E(d, c, a) symmetric about the real
// axis: closed-form values, the real three-term recurrence applied to a
// sparse matrix, damping coefficients and their bound, and the fat-ellipse
// fit around a set of unwanted Ritz values.

#include <span>

#include "fk/linalg.hpp"

namespace fk {

/// Ellipse with real center d, foci d -+ c and major semiaxis |a|.
///
/// c is real or purely imaginary, so it is carried as the signed square c2:
/// c2 > 0 gives real foci (a fat ellipse), c2 < 0 imaginary foci (a thin one),
/// c2 == 0 a circle of radius a_mod.
struct Ellipse {
    double d = 0.0;
    double c2 = 0.0;
    double a_mod = 0.0;

    /// Focal half-distance |c|.
    double focal_distance() const;
    /// Half-width along the real axis.
    double real_semiaxis() const;
    /// Half-height along the imaginary axis.
    double imag_semiaxis() const;
    /// Sum-of-focal-distances test, with relative slack.
    bool contains(Complex z, double rel_slack = 0.0) const;
    /// Throws fk::Error unless a_mod >= 0 and a_mod^2 >= |c2|.
    void validate() const;

    friend bool operator==(const Ellipse&, const Ellipse&) = default;
};

/// Degree-m filter normalized to 1 at the real reference point lambda_ref.
struct FilterSpec {
    Ellipse ellipse;
    int m = 1;
    double lambda_ref = 0.0;

    void validate() const;

    friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

struct DampingReport {
    Vector kappas;
    double kappa_max = 0.0;
    double bound = 0.0;
};

/// Square root with positive real part, or zero real part and non-negative
/// imaginary part.
Complex arithmetic_sqrt(Complex z);

/// Root w of (w + 1/w)/2 = xi with |w| >= 1: xi + sqrt(xi^2 - 1) in the closed
/// right half-plane side (Re > 0, or Re = 0 and Im >= 0), xi - sqrt(xi^2 - 1)
/// otherwise.
Complex modulus_largest_root(Complex xi);

/// T_m(xi) = (w^m + w^-m)/2. Throws RangeExceeded past the double range.
Complex cheb_T(int m, Complex xi);

/// p_m(lambda) = T_m((lambda-d)/c) / T_m((lambda_ref-d)/c), or
/// ((lambda-d)/(lambda_ref-d))^m when c2 == 0.
Complex filter_value(const FilterSpec& spec, Complex lambda);

/// z_m = p_m(A) z0 by the real recurrence in rho_k = sigma_k / c:
///   rho_1 = 1/(l1-d),            z_1 = rho_1 (A-dI) z0,
///   rho_{k+1} = 1/(2(l1-d) - c2 rho_k),
///   z_{k+1} = 2 rho_{k+1} (A-dI) z_k - c2 rho_k rho_{k+1} z_{k-1}.
/// Uses exactly m products with A. Throws FilterDegenerate when a
/// denominator vanishes.
Vector chebyshev_apply(const CsrMatrix& a, std::span<const double> z0, const FilterSpec& spec,
                       MatvecCounter& counter);

/// kappa_i = |w_i / w_1| for each supplied eigenvalue, their maximum, and the
/// bound (|a| + sqrt(|a|^2+|c|^2)) / ||l1-d| + sqrt(|l1-d|^2-|c|^2)| that holds
/// whenever all of them lie inside the ellipse.
DampingReport damping_report(std::span<const Complex> unwanted, const FilterSpec& spec);

/// Right-hand side of the damping bound alone.
double damping_bound(const Ellipse& ellipse, Complex lambda_ref);

struct EllipseFit {
    Ellipse ellipse;
    double kappa_u = 0.0;  ///< a_mod / |theta1 - d|
    int branch = 0;        ///< 1: centered at the real midpoint; 2: through (zeta, 0)
};

/// Fat ellipse (a circle, c2 = 0) enclosing the unwanted values and leaving
/// theta1 outside. x+, x- are the extreme real parts and y+ the largest
/// |imaginary part| of `unwanted`; zeta = Re(theta1) when theta1 is complex,
/// otherwise x+ + zeta_fraction (Re(theta1) - x+).
///
/// Throws NoSeparation when Re(theta1) - x+ <= 1e-12 (1 + |x+|). A zero radius
/// is inflated to 1e-8 (1 + |x+|).
EllipseFit determine_ellipse(std::span<const Complex> unwanted, Complex theta1, double zeta_fraction = 0.5);

namespace testing {
/// Fault injection for the verification suites: when set,
/// modulus_largest_root picks the opposite branch.
void set_branch_fault(bool enabled);
bool branch_fault();
}  // namespace testing

}  // namespace fk
