#include "fk/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "fk/chebyshev.hpp"
#include "fk/dense_eig.hpp"
#include "fk/errors.hpp"
#include "fk/linalg.hpp"

namespace fk {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt(Complex z) { return "(" + fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i)"; }

std::string fmt(const Ellipse& e) { return "E(d=" + fmt(e.d) + ", c2=" + fmt(e.c2) + ", a=" + fmt(e.a_mod) + ")"; }

std::string fmt(const FilterSpec& s) {
    return fmt(s.ellipse) + ", m=" + std::to_string(s.m) + ", lambda_ref=" + fmt(s.lambda_ref);
}

// Runs `body` with a timer; `body` returns false after filling the
// counterexample to stop early.
SuiteResult run_suite(std::string name, const std::function<bool(SuiteResult&)>& body) {
    SuiteResult r;
    r.name = std::move(name);
    const auto start = std::chrono::steady_clock::now();
    try {
        r.passed = body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        if (r.counterexample.empty()) r.counterexample = std::string("unexpected exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

enum class EllipseShape { Circle, Fat, Thin };

// Random ellipse and a real reference point outside it on the real axis.
FilterSpec random_spec(Rng& rng, EllipseShape shape, int m) {
    FilterSpec spec;
    spec.m = m;
    spec.ellipse.d = uniform(rng, -3.0, 3.0);
    spec.ellipse.a_mod = uniform(rng, 0.5, 3.0);
    const double a2 = spec.ellipse.a_mod * spec.ellipse.a_mod;
    if (shape == EllipseShape::Fat) spec.ellipse.c2 = uniform(rng, 0.05, 0.95) * a2;
    if (shape == EllipseShape::Thin) spec.ellipse.c2 = -uniform(rng, 0.05, 0.95) * a2;
    const double side = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    spec.lambda_ref = spec.ellipse.d + side * spec.ellipse.real_semiaxis() * (1.0 + uniform(rng, 0.1, 1.0));
    return spec;
}

EllipseShape shape_for(std::size_t i) { return static_cast<EllipseShape>(i % 3); }

Complex cpow(Complex w, int m) {
    Complex r{1.0, 0.0};
    for (int k = 0; k < m; ++k) r *= w;
    return r;
}

double frobenius(const Matrix& m) { return m.frobenius_norm(); }

Matrix random_matrix(Rng& rng, std::size_t k) {
    Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = uniform(rng, -1.0, 1.0);
    return m;
}

}  // namespace

SuiteResult root_modulus_suite(const VerifyOptions& opts) {
    return run_suite("roots: modulus inequalities", [&](SuiteResult& r) {
        Rng rng(opts.seed);
        const double half_pi = 0.5 * std::numbers::pi;
        for (int plane = 0; plane < 2; ++plane) {
            for (std::size_t s = 0; s < opts.samples; ++s) {
                const double modulus = std::pow(10.0, uniform(rng, -3.0, 3.0));
                Complex z;
                if (s % 1000 == 999) {
                    // Imaginary axis: Im >= 0 belongs to the right half-plane rule.
                    z = Complex(0.0, plane == 0 ? modulus : -modulus);
                } else {
                    double phi = uniform(rng, -half_pi, half_pi);
                    if (std::cos(phi) <= 0.0) phi = 0.0;
                    z = std::polar(modulus, plane == 0 ? phi : phi + std::numbers::pi);
                }
                const double az = std::abs(z);
                const Complex big = modulus_largest_root(z);
                const Complex small = 2.0 * z - big;
                const double lo = std::abs(small);
                const double mid = std::abs(az + arithmetic_sqrt(Complex(az * az - 1.0, 0.0)));
                const double hi = std::abs(big);
                const double top = az + std::sqrt(az * az + 1.0);
                const double slack = 1e-12 * (1.0 + az);
                r.checks += 3;

                const char* which = nullptr;
                double lhs = 0.0, rhs = 0.0;
                if (lo > mid + slack) {
                    which = plane == 0 ? "|z - sqrt(z^2-1)| <= ||z| + sqrt(|z|^2-1)|"
                                       : "|z + sqrt(z^2-1)| <= ||z| + sqrt(|z|^2-1)|";
                    lhs = lo;
                    rhs = mid;
                } else if (mid > hi + slack) {
                    which = plane == 0 ? "||z| + sqrt(|z|^2-1)| <= |z + sqrt(z^2-1)|"
                                       : "||z| + sqrt(|z|^2-1)| <= |z - sqrt(z^2-1)|";
                    lhs = mid;
                    rhs = hi;
                } else if (hi > top + slack) {
                    which = plane == 0 ? "|z + sqrt(z^2-1)| <= |z| + sqrt(|z|^2+1)"
                                       : "|z - sqrt(z^2-1)| <= |z| + sqrt(|z|^2+1)";
                    lhs = hi;
                    rhs = top;
                }
                if (which != nullptr) {
                    r.counterexample = std::string(plane == 0 ? "(i)" : "(ii)") + " z = " + fmt(z) + ": " + which +
                                       " violated, lhs = " + fmt(lhs) + ", rhs = " + fmt(rhs) +
                                       ", slack = " + fmt(slack);
                    return false;
                }
            }
        }
        return true;
    });
}

SuiteResult damping_bound_suite(const VerifyOptions& opts) {
    return run_suite("damping: bound over interior eigenvalues", [&](SuiteResult& r) {
        Rng rng(opts.seed + 1);
        const std::size_t instances = std::max<std::size_t>(10, opts.samples / 100);
        for (std::size_t t = 0; t < instances; ++t) {
            FilterSpec spec = random_spec(rng, shape_for(t), 20);
            spec.lambda_ref = spec.ellipse.d + (spec.lambda_ref - spec.ellipse.d) * uniform(rng, 1.0, 3.0);
            const Ellipse& e = spec.ellipse;
            const double rx = e.real_semiaxis();
            const double ry = e.imag_semiaxis();
            ComplexVector inside;
            while (inside.size() < 50) {
                const Complex z(e.d + uniform(rng, -rx, rx), uniform(rng, -ry, ry));
                if (e.contains(z)) inside.push_back(z);
            }
            const DampingReport rep = damping_report(inside, spec);
            ++r.checks;
            if (rep.kappa_max > rep.bound + 1e-12) {
                r.counterexample = fmt(spec) + ": kappa_max = " + fmt(rep.kappa_max) + " > bound = " + fmt(rep.bound);
                return false;
            }
        }
        return true;
    });
}

SuiteResult filter_consistency_suite(const VerifyOptions& opts) {
    return run_suite("filter: recurrence vs closed form", [&](SuiteResult& r) {
        Rng rng(opts.seed + 2);
        const std::size_t specs = std::clamp<std::size_t>(opts.samples / 1000, 10, 100);
        for (std::size_t t = 0; t < specs; ++t) {
            const FilterSpec spec = random_spec(rng, shape_for(t), uniform_int(rng, 1, 60));
            const double rx = spec.ellipse.real_semiaxis();

            Vector lambdas{spec.lambda_ref};
            for (int i = 0; i < 30; ++i) lambdas.push_back(spec.ellipse.d + uniform(rng, -rx, rx));
            Vector z0(lambdas.size());
            for (double& v : z0) v = uniform(rng, 0.5, 1.5);

            const CsrMatrix diag = CsrMatrix::diagonal(lambdas);
            MatvecCounter counter;
            const Vector z = chebyshev_apply(diag, z0, spec, counter);
            ++r.checks;
            if (counter.count() != static_cast<std::uint64_t>(spec.m)) {
                r.counterexample = fmt(spec) + ": counted " + std::to_string(counter.count()) + " products";
                return false;
            }

            const Complex at_ref = filter_value(spec, spec.lambda_ref);
            ++r.checks;
            if (std::abs(at_ref - 1.0) > 1e-13) {
                r.counterexample = fmt(spec) + ": filter_value(lambda_ref) = " + fmt(at_ref);
                return false;
            }
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                const double expected = filter_value(spec, lambdas[i]).real() * z0[i];
                ++r.checks;
                if (std::abs(z[i] - expected) > 1e-10 * std::abs(expected)) {
                    r.counterexample = fmt(spec) + ", lambda = " + fmt(lambdas[i]) + ": recurrence " + fmt(z[i]) +
                                       " vs closed form " + fmt(expected);
                    return false;
                }
            }
        }
        return true;
    });
}

SuiteResult normalization_suite(const VerifyOptions& opts) {
    return run_suite("filter: normalization at lambda_ref", [&](SuiteResult& r) {
        Rng rng(opts.seed + 3);
        const std::size_t specs = std::max<std::size_t>(100, opts.samples / 10);
        for (std::size_t t = 0; t < specs; ++t) {
            const FilterSpec spec = random_spec(rng, shape_for(t), uniform_int(rng, 1, 60));
            const Complex v = filter_value(spec, spec.lambda_ref);
            ++r.checks;
            if (std::abs(v - 1.0) > 1e-13) {
                r.counterexample = fmt(spec) + ": filter_value(lambda_ref) = " + fmt(v);
                return false;
            }
        }
        return true;
    });
}

SuiteResult branch_invariance_suite(const VerifyOptions& opts) {
    return run_suite("filter: root branch invariance", [&](SuiteResult& r) {
        Rng rng(opts.seed + 4);
        const std::size_t trials = std::max<std::size_t>(100, opts.samples / 100);
        for (std::size_t t = 0; t < trials; ++t) {
            const EllipseShape shape = t % 2 == 0 ? EllipseShape::Fat : EllipseShape::Thin;
            const FilterSpec spec = random_spec(rng, shape, uniform_int(rng, 1, 20));
            const Complex c = arithmetic_sqrt(Complex(spec.ellipse.c2, 0.0));
            // |xi| <= 3 sqrt(2): the small root xi - sqrt(xi^2-1) loses ~|xi|^2 ulps to cancellation.
            const Complex lambda = spec.ellipse.d + c * Complex(uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0));
            const Complex xi = (lambda - spec.ellipse.d) / c;
            const Complex root = std::sqrt(xi * xi - 1.0);
            const Complex w1 = modulus_largest_root((spec.lambda_ref - spec.ellipse.d) / c);
            const Complex den = cpow(w1, spec.m) + cpow(1.0 / w1, spec.m);
            const int m = spec.m;
            const Complex w_plus = xi + root;
            const Complex w_minus = xi - root;
            const Complex p_plus = (cpow(w_plus, m) + cpow(1.0 / w_plus, m)) / den;
            const Complex p_minus = (cpow(w_minus, m) + cpow(1.0 / w_minus, m)) / den;
            const Complex p = filter_value(spec, lambda);
            // Size of the individual terms, so cancellation near a root is not penalized.
            const double big = std::max(std::abs(w_plus), std::abs(w_minus));
            const double scale = (std::pow(big, m) + std::pow(big, -m)) / std::abs(den);
            r.checks += 2;
            if (std::abs(p_plus - p_minus) > 1e-12 * scale || std::abs(p - p_plus) > 1e-12 * scale) {
                r.counterexample = fmt(spec) + ", lambda = " + fmt(lambda) + ": p(w+) = " + fmt(p_plus) +
                                   ", p(w-) = " + fmt(p_minus) + ", filter_value = " + fmt(p);
                return false;
            }
        }
        return true;
    });
}

SuiteResult orthonormality_suite(const VerifyOptions& opts) {
    return run_suite("linalg: MGS orthonormality", [&](SuiteResult& r) {
        Rng rng(opts.seed + 5);
        const std::size_t trials = std::clamp<std::size_t>(opts.samples / 2000, 5, 50);
        const std::size_t rows = 200;
        for (std::size_t t = 0; t < trials; ++t) {
            DenseColumns basis(rows);
            for (int j = 0; j < 40; ++j) {
                Vector z(rows);
                if (j > 0 && j % 3 == 0) {
                    // Nearly inside the current span.
                    Vector coeffs(basis.cols());
                    for (double& c : coeffs) c = uniform(rng, -1.0, 1.0);
                    z = basis.combine(coeffs);
                    for (double& v : z) v += 1e-8 * uniform(rng, -1.0, 1.0);
                } else {
                    for (double& v : z) v = uniform(rng, -1.0, 1.0);
                }
                basis.append(mgs_orthonormalize(basis, z).v);
                const double err = basis.orthonormality_error();
                ++r.checks;
                if (err > 1e-12) {
                    r.counterexample = "trial " + std::to_string(t) + ", column " + std::to_string(j) +
                                       ": max|V^T V - I| = " + fmt(err);
                    return false;
                }
            }
        }
        return true;
    });
}

SuiteResult dense_oracle_suite(const VerifyOptions& opts) {
    return run_suite("dense: eigen oracles", [&](SuiteResult& r) {
        Rng rng(opts.seed + 6);
        const std::size_t trials = std::clamp<std::size_t>(opts.samples / 1000, 10, 100);
        for (std::size_t t = 0; t < trials; ++t) {
            const std::size_t k = static_cast<std::size_t>(uniform_int(rng, 1, 30));
            const Matrix m = random_matrix(rng, k);
            const EigenPairSet eig = eig_real(m);
            const double scale = frobenius(m);
            for (std::size_t i = 0; i < eig.size(); ++i) {
                const ComplexVector mv = multiply(m, eig.vectors[i]);
                ComplexVector res(k);
                for (std::size_t j = 0; j < k; ++j) res[j] = mv[j] - eig.values[i] * eig.vectors[i][j];
                ++r.checks;
                if (norm2(res) > 1e-10 * scale) {
                    r.counterexample = "k = " + std::to_string(k) + ": ||M v - lambda v|| = " + fmt(norm2(res)) +
                                       " for lambda = " + fmt(eig.values[i]);
                    return false;
                }
            }

            Matrix sym = m;
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < i; ++j) sym(i, j) = sym(j, i);
            const SymmetricEigen jac = jacobi_eigen(sym);
            ComplexVector qr = eig_values(sym);
            std::reverse(qr.begin(), qr.end());
            for (std::size_t i = 0; i < k; ++i) {
                ++r.checks;
                if (std::abs(jac.values[i] - qr[i]) > 1e-11 * std::max(1.0, frobenius(sym))) {
                    r.counterexample = "k = " + std::to_string(k) + ": Jacobi " + fmt(jac.values[i]) + " vs QR " +
                                       fmt(qr[i]);
                    return false;
                }
            }

            // Refined vector: no sampled unit s beats the reported minimum.
            const std::size_t rows = 3 * k + 5;
            DenseColumns v(rows);
            DenseColumns w(rows);
            for (std::size_t j = 0; j < k; ++j) {
                Vector z(rows);
                for (double& x : z) x = uniform(rng, -1.0, 1.0);
                v.append(mgs_orthonormalize(v, z).v);
            }
            const Matrix a = random_matrix(rng, rows);
            for (std::size_t j = 0; j < k; ++j) w.append(multiply(a, v.col(j)));
            Matrix h(k, k);
            for (std::size_t j = 0; j < k; ++j) {
                const Vector col = v.transpose_times(w.col(j));
                for (std::size_t i = 0; i < k; ++i) h(i, j) = col[i];
            }
            const double theta = uniform(rng, -2.0, 2.0);
            const RefinedVector best = refined_s(v, w, h, theta);
            auto objective = [&](const Vector& s) {
                Vector y = w.combine(s);
                axpy(-theta, v.combine(s), y);
                return norm2(y);
            };
            const double at_best = objective(best.s);
            ++r.checks;
            if (std::abs(at_best - best.sigma_min) > 1e-8 * std::max(1.0, at_best)) {
                r.counterexample = "k = " + std::to_string(k) + ": reported sigma_min " + fmt(best.sigma_min) +
                                   " but ||(A - theta I) V s|| = " + fmt(at_best);
                return false;
            }
            for (int probe = 0; probe < 50; ++probe) {
                Vector s(k);
                for (double& x : s) x = uniform(rng, -1.0, 1.0);
                normalize(s);
                ++r.checks;
                if (objective(s) < at_best - 1e-10 * std::max(1.0, at_best)) {
                    r.counterexample = "k = " + std::to_string(k) + ": sampled s gives " + fmt(objective(s)) +
                                       " < refined " + fmt(at_best);
                    return false;
                }
            }
        }
        return true;
    });
}

std::vector<SuiteResult> run_all_suites(const VerifyOptions& opts) {
    return {root_modulus_suite(opts),           damping_bound_suite(opts),     filter_consistency_suite(opts),
            normalization_suite(opts),   branch_invariance_suite(opts), orthonormality_suite(opts),
            dense_oracle_suite(opts)};
}

}  // namespace fk
