#pragma once

// Central tolerance table. Every numeric threshold used by the library lives
// here so the accuracy contract is visible in one place.

namespace qmarkov::tol {

// Structural predicates on matrices.
inline constexpr double kHermitian = 1e-10;       // is_hermitian / input checks
inline constexpr double kUnitary = 1e-10;         // is_unitary / shock checks
inline constexpr double kDensity = 1e-10;         // is_density eigenvalue floor
inline constexpr double kRowSum = 1e-12;          // stochastic rows, generator rows

// Linear-algebra kernels.
inline constexpr double kEigReconstruct = 1e-12;  // ||M - U L U^dag||_F / ||M||_F
inline constexpr double kExpmRelative = 1e-12;    // real_matrix_exp relative accuracy
inline constexpr double kPropagatorUnitary = 1e-10;

// Conservation along evolutions (trajectories and averaged solutions).
inline constexpr double kTraceDrift = 1e-9;
inline constexpr double kHermDrift = 1e-9;
inline constexpr double kNormDrift = 1e-9;
inline constexpr double kMinEigenvalue = -1e-7;

// Averaged master equation integration.
inline constexpr double kOdeHalving = 1e-9;       // default step-halving target
inline constexpr int kOdeMaxSubsteps = 1 << 14;   // refinement cap before giving up

// Laplace domain.
inline constexpr double kResolventResidual = 1e-10;

// Environment semigroup self-consistency: ||P_s P_t - P_{s+t}||_max.
inline constexpr double kChapmanKolmogorov = 1e-10;

// Monte Carlo / cross-validation.
inline constexpr double kZScoreLimit = 5.0;
inline constexpr double kStderrFloor = 2e-9;      // guards z = diff/0 for constant entries

}  // namespace qmarkov::tol
