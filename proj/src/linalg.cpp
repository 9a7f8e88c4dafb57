#include "qmarkov/linalg.hpp"

#include <cmath>
#include <sstream>

#include "qmarkov/errors.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

double hermiticity_defect(const Matrix& M) {
    return (M - M.adjoint()).norm();
}

double unitarity_defect(const Matrix& M) {
    return (M.adjoint() * M - Matrix::Identity(M.rows(), M.cols())).norm();
}

double min_eigenvalue(const Matrix& M) {
    Matrix sym = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool is_hermitian(const Matrix& M, double tolerance) {
    return M.rows() == M.cols() && hermiticity_defect(M) <= tolerance;
}

bool is_unitary(const Matrix& M, double tolerance) {
    return M.rows() == M.cols() && unitarity_defect(M) <= tolerance;
}

bool is_density(const Matrix& M, double tolerance) {
    if (!is_hermitian(M, tolerance)) return false;
    if (std::abs(M.trace().real() - 1.0) > tolerance) return false;
    if (std::abs(M.trace().imag()) > tolerance) return false;
    return min_eigenvalue(M) >= -tolerance;
}

HermitianEig hermitian_eig(const Matrix& M) {
    if (M.rows() != M.cols()) {
        throw ValidationError("hermitian_eig: matrix is not square");
    }
    double defect = hermiticity_defect(M);
    if (defect > tol::kHermitian) {
        std::ostringstream msg;
        msg << "hermitian_eig: input is not Hermitian, ||M - M^dag||_F = " << defect;
        throw ValidationError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (M + M.adjoint()));
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hermitian_eig: eigensolver failed to converge");
    }
    // Eigen returns ascending eigenvalues already; no reordering needed.
    return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix unitary_propagator(const Matrix& H, double t, double hbar) {
    if (hbar <= 0.0) {
        throw ValidationError("unitary_propagator: hbar must be positive");
    }
    HermitianEig eig = hermitian_eig(H);
    const Eigen::Index n = H.rows();
    Vector phases(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        phases(i) = std::exp(Complex(0.0, -t * eig.eigenvalues(i) / hbar));
    }
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

namespace {

// Degree-13 Pade approximant with scaling-and-squaring: the argument is
// halved until its 1-norm is at most 0.5, the [13/13] approximant is solved,
// and the result is squared back up.
template <typename Mat>
Mat pade13_expm(const Mat& A) {
    static const double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const Eigen::Index n = A.rows();
    const Mat I = Mat::Identity(n, n);

    double norm = A.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    Mat B = A / std::pow(2.0, squarings);

    Mat B2 = B * B;
    Mat B4 = B2 * B2;
    Mat B6 = B4 * B2;
    Mat U = B * (B6 * (b[13] * B6 + b[11] * B4 + b[9] * B2) +
                 b[7] * B6 + b[5] * B4 + b[3] * B2 + b[1] * I);
    Mat V = B6 * (b[12] * B6 + b[10] * B4 + b[8] * B2) +
            b[6] * B6 + b[4] * B4 + b[2] * B2 + b[0] * I;

    Mat numer = V + U;
    Mat denom = V - U;
    Mat R = denom.partialPivLu().solve(numer);
    for (int i = 0; i < squarings; ++i) R = R * R;
    return R;
}

}  // namespace

RealMatrix real_matrix_exp(const RealMatrix& Q, double t) {
    if (Q.rows() != Q.cols()) {
        throw ValidationError("real_matrix_exp: matrix is not square");
    }
    RealMatrix B = t * Q;
    return pade13_expm<RealMatrix>(B);
}

Matrix complex_matrix_exp(const Matrix& A) {
    if (A.rows() != A.cols()) {
        throw ValidationError("complex_matrix_exp: matrix is not square");
    }
    return pade13_expm<Matrix>(A);
}

}  // namespace qmarkov
