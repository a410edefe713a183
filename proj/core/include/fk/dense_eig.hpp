#pragma once

// Eigensolvers for the small projected matrices.

#include <cstddef>
#include <vector>

#include "fk/linalg.hpp"

namespace fk {

/// Eigenpairs of a real square matrix, sorted by decreasing real part (ties:
/// decreasing imaginary part, then original position). Complex eigenvalues
/// come in exactly conjugate pairs, and their vectors are exact conjugates.
struct EigenPairSet {
    ComplexVector values;
    std::vector<ComplexVector> vectors;  ///< unit 2-norm, largest component real positive

    std::size_t size() const noexcept { return values.size(); }
};

/// Householder reduction to upper Hessenberg form: M = Q H Q^T.
struct HessenbergForm {
    Matrix h;
    Matrix q;
};
HessenbergForm hessenberg(const Matrix& m);

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// iteration, in the order they deflate. Throws EigFailed after 30 k sweeps.
ComplexVector hessenberg_eigenvalues(Matrix h);

/// All eigenvalues of m, sorted as in EigenPairSet. No vectors.
ComplexVector eig_values(const Matrix& m);

/// All eigenpairs of m. Vectors come from inverse iteration on the Hessenberg
/// form, shifted by the converged eigenvalue, then mapped back.
EigenPairSet eig_real(const Matrix& m);

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi; values
/// ascending, column j of `vectors` belongs to values[j].
struct SymmetricEigen {
    Vector values;
    Matrix vectors;
};
SymmetricEigen jacobi_eigen(Matrix a);

struct HermitianSmallest {
    double value = 0.0;
    ComplexVector vec;
};

/// Algebraically smallest eigenpair of a Hermitian matrix. Complex input is
/// handled through its real symmetric 2k x 2k embedding [[Re,-Im],[Im,Re]].
HermitianSmallest hermitian_smallest_eigvec(const ComplexMatrix& m);

struct RefinedVector {
    Vector s;                ///< real unit coefficient vector
    double sigma_min = 0.0;  ///< smallest singular value of (A - theta I) V
};

/// Unit s minimizing ||(A - theta I) V s|| from the cross-product matrix
///   (W - theta V)^H (W - theta V) = WtW - theta H^T - conj(theta) H + |theta|^2 I,
/// where WtW = W^T W and H = V^T W. For complex theta the phase-aligned real
/// part of the minimizer is returned.
RefinedVector refined_from_gram(const Matrix& wtw, const Matrix& h, Complex theta);

/// Same, forming W^T W and V^T W from the blocks; W must equal A V.
RefinedVector refined_s(const DenseColumns& v, const DenseColumns& w, const Matrix& h, Complex theta);

}  // namespace fk
