#include "qmarkov/superop.hpp"

#include <cmath>
#include <sstream>

#include "qmarkov/errors.hpp"
#include "qmarkov/tolerances.hpp"
#include "qmarkov/trajectory.hpp"

namespace qmarkov {

Vector vectorize(const Matrix& rho) {
    if (rho.rows() != rho.cols()) throw ValidationError("vectorize: matrix not square");
    const Eigen::Index N = rho.rows();
    Vector v(N * N);
    for (Eigen::Index c = 0; c < N; ++c)
        for (Eigen::Index r = 0; r < N; ++r) v(c * N + r) = rho(r, c);
    return v;
}

Matrix devectorize(const Vector& v) {
    const auto len = v.size();
    const auto N = static_cast<Eigen::Index>(std::llround(std::sqrt(double(len))));
    if (N * N != len) {
        std::ostringstream msg;
        msg << "devectorize: length " << len << " is not a perfect square";
        throw ValidationError(msg.str());
    }
    Matrix rho(N, N);
    for (Eigen::Index c = 0; c < N; ++c)
        for (Eigen::Index r = 0; r < N; ++r) rho(r, c) = v(c * N + r);
    return rho;
}

Matrix kronecker(const Matrix& A, const Matrix& B) {
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

Matrix commutator_superop(const Matrix& H) {
    if (!is_hermitian(H, tol::kHermitian)) {
        std::ostringstream msg;
        msg << "commutator_superop: H is not Hermitian, defect = "
            << hermiticity_defect(H);
        throw ValidationError(msg.str());
    }
    const Eigen::Index N = H.rows();
    const Matrix I = Matrix::Identity(N, N);
    // vec([H, rho]) = (I kron H - H^T kron I) vec(rho) under column stacking.
    return kronecker(I, H) - kronecker(H.transpose(), I);
}

Matrix conjugation_superop(const Matrix& V) {
    if (!is_unitary(V, tol::kUnitary)) {
        std::ostringstream msg;
        msg << "conjugation_superop: V is not unitary, defect = " << unitarity_defect(V);
        throw ValidationError(msg.str());
    }
    // vec(V rho V^dag) = (conj(V) kron V) vec(rho).
    return kronecker(V.conjugate(), V);
}

BlockGenerator block_generator(const QuantumModel& model) {
    validate_model(model);
    const int K = model.chain.K;
    const int N = model.N;
    const int n2 = N * N;

    BlockGenerator gen;
    gen.K = K;
    gen.N = N;
    gen.shocked = !model.shocks.is_identity(N);
    gen.matrix = Matrix::Zero(K * n2, K * n2);

    const Complex minus_i_over_hbar(0.0, -1.0 / model.hbar);
    for (int k = 0; k < K; ++k) {
        gen.matrix.block(k * n2, k * n2, n2, n2) +=
            minus_i_over_hbar * commutator_superop(model.hamiltonians[k]);
        if (model.chain.absorbing[k]) continue;
        const double lk = model.chain.lambda(k);
        gen.matrix.block(k * n2, k * n2, n2, n2) -=
            lk * Matrix::Identity(n2, n2);
        for (int j = 0; j < K; ++j) {
            const double rate = lk * model.chain.Q(k, j);
            if (rate == 0.0) continue;
            gen.matrix.block(k * n2, j * n2, n2, n2) +=
                rate * conjugation_superop(model.shocks(k, j));
        }
    }
    return gen;
}

Vector stack_components(const std::vector<Matrix>& rhos) {
    if (rhos.empty()) throw ValidationError("stack_components: no components");
    const Eigen::Index n2 = rhos[0].rows() * rhos[0].cols();
    Vector out(static_cast<Eigen::Index>(rhos.size()) * n2);
    for (std::size_t k = 0; k < rhos.size(); ++k) {
        out.segment(static_cast<Eigen::Index>(k) * n2, n2) = vectorize(rhos[k]);
    }
    return out;
}

std::vector<Matrix> unstack_components(const Vector& stacked, int K, int N) {
    if (stacked.size() != static_cast<Eigen::Index>(K) * N * N) {
        throw ValidationError("unstack_components: length mismatch");
    }
    std::vector<Matrix> out;
    out.reserve(K);
    for (int k = 0; k < K; ++k) {
        out.push_back(devectorize(stacked.segment(k * N * N, N * N)));
    }
    return out;
}

}  // namespace qmarkov
