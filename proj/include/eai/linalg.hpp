#pragma once

#include <Eigen/Dense>

#include "eai/common.hpp"

namespace eai {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

namespace linalg {

// Solves A X = B by partial-pivot LU. Throws numeric_error when the
// estimated condition number exceeds 1e14 (reciprocal condition from
// the factorization), which also catches exactly singular input.
CMat solve(const CMat& A, const CMat& B);

struct EigDecomposition {
    RVec values;   // real, sorted descending
    CMat vectors;  // orthonormal columns, phase-fixed
};

// Hermitian eigendecomposition with eigenvalues descending so index 0
// is the dominant mode. Eigenvector phase is fixed by rotating the
// largest-magnitude component to the positive real axis. When
// symmetrize is set the Hermitian part (A + A^H)/2 is decomposed;
// otherwise input must already be Hermitian to 1e-8 relative.
EigDecomposition eig_hermitian(const CMat& A, bool symmetrize = false);

struct PinvResult {
    CMat pinv;
    int rank = 0;
};

// Moore-Penrose pseudo-inverse via SVD; singular values below
// rel_tol * sigma_max are truncated and excluded from the rank.
PinvResult pinv(const CMat& A, double rel_tol = 1e-10);

// Orthonormal basis of the column span (thin QR).
CMat orthonormalize(const CMat& A);

// Largest residual of V's directions outside span(U), i.e.
// ||(I - U U^H) V||_2 for orthonormal inputs; equals sin of the largest
// principal angle of V against U, and 1 when V has directions U cannot
// cover. Inputs are orthonormalized internally.
double subspace_residual(const CMat& U, const CMat& V);

// asin of the above, in radians.
double max_principal_angle(const CMat& U, const CMat& V);

}  // namespace linalg
}  // namespace eai
