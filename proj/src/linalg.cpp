#include "eai/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace eai::linalg {

namespace {

void check_square(const CMat& A, const char* who) {
    if (A.rows() != A.cols() || A.rows() == 0) {
        throw numeric_error(std::string(who) + ": matrix must be square");
    }
}

}  // namespace

CMat solve(const CMat& A, const CMat& B) {
    check_square(A, "solve");
    if (B.rows() != A.rows()) {
        throw numeric_error("solve: dimension mismatch");
    }
    Eigen::PartialPivLU<CMat> lu(A);
    // The rcond estimate alone misses exact singularity: a zero pivot
    // poisons the internal norm estimate with NaNs. Check U's diagonal
    // against the matrix scale as well.
    const double scale = A.cwiseAbs().maxCoeff();
    const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(pivot_min > 1e-14 * scale) || !(lu.rcond() > 1e-14)) {
        throw numeric_error("solve: matrix is singular or ill-conditioned");
    }
    return lu.solve(B);
}

EigDecomposition eig_hermitian(const CMat& A, bool symmetrize) {
    check_square(A, "eig_hermitian");
    CMat H;
    if (symmetrize) {
        H = 0.5 * (A + A.adjoint());
    } else {
        const double drift = (A - A.adjoint()).norm();
        if (drift > 1e-8 * std::max(A.norm(), 1e-300)) {
            throw numeric_error("eig_hermitian: input is not Hermitian");
        }
        H = 0.5 * (A + A.adjoint());
    }

    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    if (es.info() != Eigen::Success) {
        throw numeric_error("eig_hermitian: decomposition failed");
    }

    const int n = static_cast<int>(H.rows());
    EigDecomposition out;
    out.values = RVec(n);
    out.vectors = CMat(n, n);
    // Eigen returns ascending order; flip so index 0 is dominant.
    for (int m = 0; m < n; ++m) {
        out.values(m) = es.eigenvalues()(n - 1 - m);
        out.vectors.col(m) = es.eigenvectors().col(n - 1 - m);
    }
    // Phase convention: largest-magnitude component real and positive.
    for (int m = 0; m < n; ++m) {
        int imax = 0;
        out.vectors.col(m).cwiseAbs().maxCoeff(&imax);
        const cd pivot = out.vectors(imax, m);
        if (std::abs(pivot) > 0.0) {
            out.vectors.col(m) *= std::conj(pivot) / std::abs(pivot);
        }
    }
    return out;
}

PinvResult pinv(const CMat& A, double rel_tol) {
    if (A.rows() == 0 || A.cols() == 0) {
        throw numeric_error("pinv: empty matrix");
    }
    if (!(rel_tol > 0.0)) {
        throw numeric_error("pinv: rel_tol must be positive");
    }
    Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = rel_tol * sv(0);

    PinvResult out;
    out.pinv = CMat::Zero(A.cols(), A.rows());
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0) {
            out.pinv += (1.0 / sv(i)) * svd.matrixV().col(i) *
                        svd.matrixU().col(i).adjoint();
            ++out.rank;
        }
    }
    return out;
}

CMat orthonormalize(const CMat& A) {
    if (A.cols() == 0) {
        return A;
    }
    Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-12 * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0) {
            ++rank;
        }
    }
    return svd.matrixU().leftCols(rank);
}

double subspace_residual(const CMat& U_in, const CMat& V_in) {
    if (V_in.cols() == 0) {
        return 0.0;
    }
    const CMat U = orthonormalize(U_in);
    const CMat V = orthonormalize(V_in);
    if (U.cols() == 0) {
        return 1.0;
    }
    if (U.rows() != V.rows()) {
        throw numeric_error("subspace_residual: dimension mismatch");
    }
    const CMat R = V - U * (U.adjoint() * V);
    Eigen::JacobiSVD<CMat> svd(R);
    const double s = svd.singularValues()(0);
    return std::min(s, 1.0);
}

double max_principal_angle(const CMat& U, const CMat& V) {
    return std::asin(subspace_residual(U, V));
}

}  // namespace eai::linalg
