#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qmarkov {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;      // dense complex, the working carrier type
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Structural predicates (Frobenius-norm based).
bool is_hermitian(const Matrix& M, double tolerance);
bool is_unitary(const Matrix& M, double tolerance);
bool is_density(const Matrix& M, double tolerance);

// Deviation helpers used for validation messages and conservation tracking.
double hermiticity_defect(const Matrix& M);   // ||M - M^dag||_F
double unitarity_defect(const Matrix& M);     // ||M^dag M - I||_F
double min_eigenvalue(const Matrix& M);       // smallest eigenvalue of (M+M^dag)/2

struct HermitianEig {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns form a unitary matrix
};

// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
HermitianEig hermitian_eig(const Matrix& M);

// exp(-i t H / hbar) via the eigendecomposition of Hermitian H.
Matrix unitary_propagator(const Matrix& H, double t, double hbar);

// exp(t Q) for real square Q by scaling-and-squaring with a degree-13 Pade core.
RealMatrix real_matrix_exp(const RealMatrix& Q, double t);

// Same core applied to a complex matrix; internal utility for oracles and
// cross-checks (block generators are complex).
Matrix complex_matrix_exp(const Matrix& A);

}  // namespace qmarkov
