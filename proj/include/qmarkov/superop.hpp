#pragma once

#include <vector>

#include "qmarkov/linalg.hpp"

namespace qmarkov {

struct QuantumModel;  // defined in trajectory.hpp

// Column-stacking vectorization: entry (r, c) of an N x N matrix maps to
// index c*N + r, so vec(A rho B) = (B^T kron A) vec(rho).
Vector vectorize(const Matrix& rho);
Matrix devectorize(const Vector& v);

// Kronecker product (dense, desk scale).
Matrix kronecker(const Matrix& A, const Matrix& B);

// S vec(rho) = vec([H, rho]).
Matrix commutator_superop(const Matrix& H);

// S vec(rho) = vec(V rho V^dag).
Matrix conjugation_superop(const Matrix& V);

struct BlockGenerator {
    int K = 0;                    // environment state count
    int N = 0;                    // system dimension
    Matrix matrix;                // (K N^2) x (K N^2)
    bool shocked = false;         // true when any shock differs from identity
};

// Generator A of the averaged system d/dt vec(rho_stacked) = A vec(rho_stacked):
//   block (k,k) = -(i/hbar) Hk^x + lambda_k Q(k,k) S_V(k->k) - lambda_k I
//   block (k,j) =  lambda_k Q(k,j) S_V(k->j)        for j != k
BlockGenerator block_generator(const QuantumModel& model);

// Convenience views on stacked vectors.
Vector stack_components(const std::vector<Matrix>& rhos);
std::vector<Matrix> unstack_components(const Vector& stacked, int K, int N);

}  // namespace qmarkov
