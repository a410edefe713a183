#include "fk/dense_eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fk/errors.hpp"

namespace fk {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) throw DimensionMismatch(std::string(what) + ": matrix must be square");
    if (m.rows() == 0) throw DimensionMismatch(std::string(what) + ": matrix must be non-empty");
}

std::vector<std::size_t> sorted_order(const ComplexVector& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a].real() != values[b].real()) return values[a].real() > values[b].real();
        return values[a].imag() > values[b].imag();
    });
    return order;
}

void fix_phase(ComplexVector& y) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (std::abs(y[i]) > std::abs(y[imax])) imax = i;
    const double mag = std::abs(y[imax]);
    if (mag == 0.0) return;
    const Complex rot = std::conj(y[imax]) / mag;
    for (Complex& v : y) v *= rot;
    y[imax] = Complex(y[imax].real(), 0.0);
}

// Inverse iteration with (H - shift I), H upper Hessenberg. Elimination only
// pairs neighbouring rows, so factorization and each solve are O(k^2).
ComplexVector inverse_iteration(const Matrix& h, Complex shift) {
    const std::size_t n = h.rows();
    const double tiny = kEps * std::max(h.frobenius_norm(), std::numeric_limits<double>::min());

    ComplexMatrix u(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) u(i, j) = h(i, j);
    for (std::size_t i = 0; i < n; ++i) u(i, i) -= shift;

    std::vector<bool> swapped(n, false);
    ComplexVector mult(n, Complex{0.0, 0.0});
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (std::abs(u(j + 1, j)) > std::abs(u(j, j))) {
            for (std::size_t c = j; c < n; ++c) std::swap(u(j, c), u(j + 1, c));
            swapped[j] = true;
        }
        if (u(j, j) == Complex{0.0, 0.0}) u(j, j) = tiny;
        const Complex l = u(j + 1, j) / u(j, j);
        mult[j] = l;
        u(j + 1, j) = 0.0;
        for (std::size_t c = j + 1; c < n; ++c) u(j + 1, c) -= l * u(j, c);
    }
    if (u(n - 1, n - 1) == Complex{0.0, 0.0}) u(n - 1, n - 1) = tiny;

    ComplexVector x(n, Complex{1.0, 0.0});
    for (int iter = 0; iter < 3; ++iter) {
        for (std::size_t j = 0; j + 1 < n; ++j) {
            if (swapped[j]) std::swap(x[j], x[j + 1]);
            x[j + 1] -= mult[j] * x[j];
        }
        for (std::size_t i = n; i-- > 0;) {
            Complex s = x[i];
            for (std::size_t c = i + 1; c < n; ++c) s -= u(i, c) * x[c];
            x[i] = s / u(i, i);
        }
        const double nrm = norm2(x);
        for (Complex& v : x) v /= nrm;
    }
    return x;
}

}  // namespace

HessenbergForm hessenberg(const Matrix& m) {
    require_square(m, "hessenberg");
    const std::size_t n = m.rows();
    HessenbergForm out{m, Matrix::identity(n)};
    Matrix& h = out.h;
    Matrix& q = out.q;
    Vector v(n);

    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t len = n - k - 1;
        double alpha = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            v[i] = h(k + 1 + i, k);
            alpha += v[i] * v[i];
        }
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        if (v[0] > 0.0) alpha = -alpha;
        v[0] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = 0; i < len; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        const double beta = 2.0 / vnorm2;

        // H <- P H
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < len; ++i) s += v[i] * h(k + 1 + i, j);
            s *= beta;
            for (std::size_t i = 0; i < len; ++i) h(k + 1 + i, j) -= s * v[i];
        }
        // H <- H P, Q <- Q P
        for (Matrix* target : {&h, &q}) {
            Matrix& t = *target;
            for (std::size_t r = 0; r < n; ++r) {
                double s = 0.0;
                for (std::size_t i = 0; i < len; ++i) s += t(r, k + 1 + i) * v[i];
                s *= beta;
                for (std::size_t i = 0; i < len; ++i) t(r, k + 1 + i) -= s * v[i];
            }
        }
        h(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
    return out;
}

ComplexVector hessenberg_eigenvalues(Matrix a) {
    require_square(a, "hessenberg_eigenvalues");
    const int n = static_cast<int>(a.rows());
    ComplexVector out(static_cast<std::size_t>(n));
    auto at = [&](int i, int j) -> double& { return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); };
    auto sign = [](double mag, double s) { return s >= 0.0 ? std::abs(mag) : -std::abs(mag); };

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(at(i, j));

    int budget = 30 * n;
    int nn = n - 1;
    double t = 0.0;
    double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0, z = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 1; --l) {
                s = std::abs(at(l - 1, l - 1)) + std::abs(at(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(at(l, l - 1)) <= kEps * s) {
                    at(l, l - 1) = 0.0;
                    break;
                }
            }
            x = at(nn, nn);
            if (l == nn) {
                out[static_cast<std::size_t>(nn)] = Complex(x + t, 0.0);
                --nn;
            } else {
                y = at(nn - 1, nn - 1);
                w = at(nn, nn - 1) * at(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign(z, p);
                        const double hi = x + z;
                        const double lo = z != 0.0 ? x - w / z : hi;
                        out[static_cast<std::size_t>(nn - 1)] = Complex(hi, 0.0);
                        out[static_cast<std::size_t>(nn)] = Complex(lo, 0.0);
                    } else {
                        out[static_cast<std::size_t>(nn - 1)] = Complex(x + p, z);
                        out[static_cast<std::size_t>(nn)] = Complex(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (budget-- <= 0) {
                        throw EigFailed("Francis QR did not converge within " + std::to_string(30 * n) +
                                        " iterations");
                    }
                    if (its > 0 && its % 10 == 0) {
                        // Exceptional shift.
                        t += x;
                        for (int i = 0; i <= nn; ++i) at(i, i) -= x;
                        s = std::abs(at(nn, nn - 1)) + std::abs(at(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    for (; m >= l; --m) {
                        z = at(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / at(m + 1, m) + at(m, m + 1);
                        q = at(m + 1, m + 1) - z - r - s;
                        r = at(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(at(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v =
                            std::abs(p) * (std::abs(at(m - 1, m - 1)) + std::abs(z) + std::abs(at(m + 1, m + 1)));
                        if (u <= kEps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        at(i, i - 2) = 0.0;
                        if (i != m + 2) at(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = at(k, k - 1);
                            q = at(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = at(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = sign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m) at(k, k - 1) = -at(k, k - 1);
                            } else {
                                at(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = at(k, j) + q * at(k + 1, j);
                                if (k != nn - 1) {
                                    p += r * at(k + 2, j);
                                    at(k + 2, j) -= p * z;
                                }
                                at(k + 1, j) -= p * y;
                                at(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * at(i, k) + y * at(i, k + 1);
                                if (k != nn - 1) {
                                    p += z * at(i, k + 2);
                                    at(i, k + 2) -= p * r;
                                }
                                at(i, k + 1) -= p * q;
                                at(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    return out;
}

ComplexVector eig_values(const Matrix& m) {
    ComplexVector raw = hessenberg_eigenvalues(hessenberg(m).h);
    ComplexVector out;
    out.reserve(raw.size());
    for (std::size_t i : sorted_order(raw)) out.push_back(raw[i]);
    return out;
}

EigenPairSet eig_real(const Matrix& m) {
    const HessenbergForm hf = hessenberg(m);
    const ComplexVector raw = hessenberg_eigenvalues(hf.h);
    const std::size_t n = raw.size();

    std::vector<ComplexVector> raw_vecs(n);
    auto lift = [&](std::size_t i) {
        const ComplexVector x = inverse_iteration(hf.h, raw[i]);
        ComplexVector y = multiply(hf.q, x);
        const double nrm = norm2(y);
        for (Complex& v : y) v /= nrm;
        fix_phase(y);
        raw_vecs[i] = std::move(y);
    };
    for (std::size_t i = 0; i < n; ++i)
        if (raw[i].imag() >= 0.0) lift(i);
    for (std::size_t i = 0; i < n; ++i) {
        if (raw[i].imag() >= 0.0) continue;
        const auto partner = std::find_if(raw.begin(), raw.end(), [&](const Complex& c) {
            return c.imag() > 0.0 && c == std::conj(raw[i]);
        });
        if (partner == raw.end()) {
            lift(i);
            continue;
        }
        const ComplexVector& src = raw_vecs[static_cast<std::size_t>(partner - raw.begin())];
        raw_vecs[i].resize(src.size());
        std::transform(src.begin(), src.end(), raw_vecs[i].begin(), [](const Complex& c) { return std::conj(c); });
    }

    EigenPairSet out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t i : sorted_order(raw)) {
        out.values.push_back(raw[i]);
        out.vectors.push_back(std::move(raw_vecs[i]));
    }
    return out;
}

SymmetricEigen jacobi_eigen(Matrix a) {
    require_square(a, "jacobi_eigen");
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);
    const double total = a.frobenius_norm();

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off == 0.0 || std::sqrt(off) <= kEps * total) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double tn = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(tn * tn + 1.0);
                const double s = tn * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

HermitianSmallest hermitian_smallest_eigvec(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw DimensionMismatch("hermitian_smallest_eigvec: matrix must be square and non-empty");
    const std::size_t n = m.rows();
    const double scale = std::max(1.0, m.frobenius_norm());
    bool real_input = true;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(m(i, j) - std::conj(m(j, i))) > 1e-10 * scale)
                throw Error("internal assertion: matrix is not Hermitian");
            if (m(i, j).imag() != 0.0) real_input = false;
        }
    }

    HermitianSmallest out;
    if (real_input) {
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j).real() + m(j, i).real());
        const SymmetricEigen se = jacobi_eigen(std::move(a));
        out.value = se.values[0];
        out.vec.resize(n);
        for (std::size_t i = 0; i < n; ++i) out.vec[i] = se.vectors(i, 0);
        return out;
    }

    Matrix big(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Complex hij = 0.5 * (m(i, j) + std::conj(m(j, i)));
            big(i, j) = hij.real();
            big(n + i, n + j) = hij.real();
            big(i, n + j) = -hij.imag();
            big(n + i, j) = hij.imag();
        }
    }
    const SymmetricEigen se = jacobi_eigen(std::move(big));
    out.value = se.values[0];
    out.vec.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.vec[i] = Complex(se.vectors(i, 0), se.vectors(n + i, 0));
    const double nrm = norm2(out.vec);
    for (Complex& c : out.vec) c /= nrm;
    return out;
}

RefinedVector refined_from_gram(const Matrix& wtw, const Matrix& h, Complex theta) {
    const std::size_t k = h.rows();
    if (k == 0) throw DimensionMismatch("refined vector: empty subspace");
    if (h.cols() != k || wtw.rows() != k || wtw.cols() != k)
        throw DimensionMismatch("refined vector: Gram blocks must be k x k");

    ComplexMatrix hat(k, k);
    const double t2 = std::norm(theta);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            hat(i, j) = wtw(i, j) - theta * h(j, i) - std::conj(theta) * h(i, j);
        }
        hat(i, i) += t2;
    }
    const HermitianSmallest hs = hermitian_smallest_eigvec(hat);
    return {aligned_real_part(hs.vec), std::sqrt(std::max(0.0, hs.value))};
}

RefinedVector refined_s(const DenseColumns& v, const DenseColumns& w, const Matrix& h, Complex theta) {
    const std::size_t k = v.cols();
    if (w.cols() != k || w.rows() != v.rows() || h.rows() != k)
        throw DimensionMismatch("refined_s: V, W and H disagree in size");
    Matrix wtw(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j <= i; ++j) wtw(i, j) = wtw(j, i) = dot(w.col(i), w.col(j));
    return refined_from_gram(wtw, h, theta);
}

}  // namespace fk
