#include "fk/chebyshev.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>

#include "fk/errors.hpp"

namespace fk {

namespace {

std::atomic<bool> g_branch_fault{false};

// Largest m log|w| that keeps |w|^m (and twice it) inside the double range.
const double kLogMax = std::log(std::numeric_limits<double>::max()) - 1.0;

Complex ipow(Complex base, int e) {
    Complex result{1.0, 0.0};
    while (e > 0) {
        if (e & 1) result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

void check_range(int m, double modulus, const char* what) {
    if (modulus > 0.0 && static_cast<double>(m) * std::log(modulus) > kLogMax) {
        throw RangeExceeded(std::string(what) + ": |w|^m exceeds the double range (m=" + std::to_string(m) +
                            ", |w|=" + std::to_string(modulus) + ")");
    }
}

}  // namespace

namespace testing {
void set_branch_fault(bool enabled) { g_branch_fault.store(enabled); }
bool branch_fault() { return g_branch_fault.load(); }
}  // namespace testing

double Ellipse::focal_distance() const { return std::sqrt(std::abs(c2)); }

double Ellipse::real_semiaxis() const { return c2 >= 0.0 ? a_mod : std::sqrt(std::max(0.0, a_mod * a_mod + c2)); }

double Ellipse::imag_semiaxis() const { return c2 >= 0.0 ? std::sqrt(std::max(0.0, a_mod * a_mod - c2)) : a_mod; }

bool Ellipse::contains(Complex z, double rel_slack) const {
    const Complex c = arithmetic_sqrt(Complex(c2, 0.0));
    const double dist = std::abs(z - (d + c)) + std::abs(z - (d - c));
    return dist <= 2.0 * a_mod * (1.0 + rel_slack);
}

void Ellipse::validate() const {
    if (!std::isfinite(d) || !std::isfinite(c2) || !std::isfinite(a_mod)) throw Error("ellipse: non-finite parameter");
    if (a_mod < 0.0) throw Error("ellipse: a_mod must be non-negative");
    if (a_mod * a_mod < std::abs(c2) * (1.0 - 1e-12))
        throw Error("ellipse: semiaxis must dominate the focal distance");
}

void FilterSpec::validate() const {
    ellipse.validate();
    if (m < 1) throw Error("filter: degree must be at least 1");
    if (!std::isfinite(lambda_ref) || lambda_ref == ellipse.d)
        throw Error("filter: reference point must differ from the ellipse center");
}

Complex arithmetic_sqrt(Complex z) {
    Complex r = std::sqrt(z);
    if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
    // -0.0 on the real part would read as "zero real part" downstream either way.
    if (r.real() == 0.0) r = Complex(0.0, r.imag());
    return r;
}

Complex modulus_largest_root(Complex xi) {
    const Complex root = arithmetic_sqrt(xi * xi - 1.0);
    bool plus = xi.real() > 0.0 || (xi.real() == 0.0 && xi.imag() >= 0.0);
    if (g_branch_fault.load(std::memory_order_relaxed)) plus = !plus;
    return plus ? xi + root : xi - root;
}

Complex cheb_T(int m, Complex xi) {
    if (m < 0) throw Error("cheb_T: degree must be non-negative");
    const Complex w = modulus_largest_root(xi);
    check_range(m, std::abs(w), "cheb_T");
    return 0.5 * (ipow(w, m) + ipow(1.0 / w, m));
}

Complex filter_value(const FilterSpec& spec, Complex lambda) {
    spec.validate();
    const Ellipse& e = spec.ellipse;
    if (e.c2 == 0.0) {
        const Complex ratio = (lambda - e.d) / (spec.lambda_ref - e.d);
        check_range(spec.m, std::abs(ratio), "filter_value");
        return ipow(ratio, spec.m);
    }
    const Complex c = arithmetic_sqrt(Complex(e.c2, 0.0));
    const Complex w = modulus_largest_root((lambda - e.d) / c);
    const Complex w1 = modulus_largest_root((spec.lambda_ref - e.d) / c);
    const Complex ratio = w / w1;
    check_range(spec.m, std::abs(ratio), "filter_value");
    const Complex num = 1.0 + ipow(1.0 / w, 2 * spec.m);
    const Complex den = 1.0 + ipow(1.0 / w1, 2 * spec.m);
    if (den == Complex{0.0, 0.0}) throw FilterDegenerate("filter_value: reference point is a root of T_m");
    return ipow(ratio, spec.m) * num / den;
}

Vector chebyshev_apply(const CsrMatrix& a, std::span<const double> z0, const FilterSpec& spec,
                       MatvecCounter& counter) {
    spec.validate();
    if (z0.size() != a.n()) throw DimensionMismatch("chebyshev_apply: start vector has wrong length");
    if (norm2(z0) == 0.0) throw Error("chebyshev_apply: start vector is zero");

    const double d = spec.ellipse.d;
    const double c2 = spec.ellipse.c2;
    const double shift = spec.lambda_ref - d;
    const std::size_t n = a.n();

    // All coefficients first, so a degenerate filter fails before any product.
    Vector rhos(static_cast<std::size_t>(spec.m));
    rhos[0] = 1.0 / shift;
    for (int k = 1; k < spec.m; ++k) {
        const double denom = 2.0 * shift - c2 * rhos[k - 1];
        if (std::abs(denom) <= 1e-300) {
            throw FilterDegenerate("chebyshev_apply: vanishing recurrence denominator at step " + std::to_string(k));
        }
        rhos[k] = 1.0 / denom;
    }

    Vector prev(z0.begin(), z0.end());
    Vector cur(n);
    Vector tmp(n);

    matvec(a, prev, tmp, counter);
    for (std::size_t i = 0; i < n; ++i) cur[i] = rhos[0] * (tmp[i] - d * prev[i]);

    for (int k = 1; k < spec.m; ++k) {
        const double two_rho = 2.0 * rhos[k];
        const double back = c2 * rhos[k - 1] * rhos[k];
        matvec(a, cur, tmp, counter);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = two_rho * (tmp[i] - d * cur[i]) - back * prev[i];
        std::swap(prev, cur);
        std::swap(cur, tmp);
    }
    return cur;
}

double damping_bound(const Ellipse& ellipse, Complex lambda_ref) {
    const double a = ellipse.a_mod;
    const double c_abs2 = std::abs(ellipse.c2);
    const double dist = std::abs(lambda_ref - ellipse.d);
    const double num = a + std::sqrt(a * a + c_abs2);
    const double den = std::abs(dist + arithmetic_sqrt(Complex(dist * dist - c_abs2, 0.0)));
    return num / den;
}

DampingReport damping_report(std::span<const Complex> unwanted, const FilterSpec& spec) {
    spec.validate();
    const Ellipse& e = spec.ellipse;
    DampingReport out;
    out.kappas.reserve(unwanted.size());
    if (e.c2 == 0.0) {
        const double ref = std::abs(spec.lambda_ref - e.d);
        for (const Complex& lam : unwanted) out.kappas.push_back(std::abs(lam - e.d) / ref);
    } else {
        const Complex c = arithmetic_sqrt(Complex(e.c2, 0.0));
        const double w1 = std::abs(modulus_largest_root((spec.lambda_ref - e.d) / c));
        for (const Complex& lam : unwanted) out.kappas.push_back(std::abs(modulus_largest_root((lam - e.d) / c)) / w1);
    }
    out.kappa_max = out.kappas.empty() ? 0.0 : *std::max_element(out.kappas.begin(), out.kappas.end());
    out.bound = damping_bound(e, spec.lambda_ref);
    return out;
}

EllipseFit determine_ellipse(std::span<const Complex> unwanted, Complex theta1, double zeta_fraction) {
    if (unwanted.empty()) throw Error("determine_ellipse: no unwanted values");
    if (!(zeta_fraction > 0.0 && zeta_fraction < 1.0)) throw Error("determine_ellipse: zeta_fraction must lie in (0,1)");

    double x_plus = -std::numeric_limits<double>::infinity();
    double x_minus = std::numeric_limits<double>::infinity();
    double y_plus = 0.0;
    for (const Complex& v : unwanted) {
        x_plus = std::max(x_plus, v.real());
        x_minus = std::min(x_minus, v.real());
        y_plus = std::max(y_plus, std::abs(v.imag()));
    }

    const double re1 = theta1.real();
    if (re1 - x_plus <= 1e-12 * (1.0 + std::abs(x_plus))) {
        throw NoSeparation("determine_ellipse: Re(theta1)=" + std::to_string(re1) +
                           " not right of unwanted values (x+=" + std::to_string(x_plus) + ")");
    }
    const double zeta = theta1.imag() != 0.0 ? re1 : x_plus + zeta_fraction * (re1 - x_plus);

    EllipseFit fit;
    if (y_plus * y_plus < (zeta - x_plus) * (zeta - x_minus)) {
        fit.branch = 1;
        fit.ellipse.d = 0.5 * (x_plus + x_minus);
        fit.ellipse.a_mod = std::hypot(x_plus - fit.ellipse.d, y_plus);
    } else {
        fit.branch = 2;
        fit.ellipse.d = (zeta * zeta - x_plus * x_plus - y_plus * y_plus) / (2.0 * (zeta - x_plus));
        fit.ellipse.a_mod = zeta - fit.ellipse.d;
    }
    fit.ellipse.c2 = 0.0;
    if (fit.ellipse.a_mod == 0.0) fit.ellipse.a_mod = 1e-8 * (1.0 + std::abs(x_plus));
    fit.kappa_u = fit.ellipse.a_mod / std::abs(theta1 - fit.ellipse.d);
    return fit;
}

}  // namespace fk
