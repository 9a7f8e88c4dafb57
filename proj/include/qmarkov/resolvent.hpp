#pragma once

#include <vector>

#include "qmarkov/superop.hpp"
#include "qmarkov/trajectory.hpp"

namespace qmarkov {

struct LaplacePoint {
    Complex s;        // Re(s) > 0
    Matrix op;        // operator value at s
};

struct LaplaceQuadrature {
    Matrix value;       // trapezoid of e^{-s t} f(t) over the grid
    double tail_bound;  // ||f(T)||_F / Re(s) * e^{-Re(s) T}
};

// (s + lambda + (i/hbar) H^x)^{-1} as an N^2 x N^2 matrix.
Matrix free_resolvent(const Matrix& H, double lambda, Complex s, double hbar);

// Laplace transform of the averaged propagator as the solution of the renewal
// fixed point  X = R0 + X S_jump R0, i.e. X = R0 (I - S_jump R0)^{-1}, where
// R0 = blockdiag (s + lambda_k + (i/hbar) Hk^x)^{-1} and S_jump carries
// lambda_k Q(k,j) and the shock conjugations. Equals (s I - A)^{-1} for the
// block generator A.
Matrix laplace_fixed_point(const QuantumModel& model, Complex s);

// Composite trapezoid of e^{-s t} f(t) on a uniform grid, plus a tail bound
// for the truncated [T, infinity) remainder.
LaplaceQuadrature numerical_laplace(const std::vector<double>& grid,
                                    const std::vector<Matrix>& values, Complex s);

}  // namespace qmarkov
