#pragma once

#include <cstdint>
#include <vector>

#include "qmarkov/superop.hpp"
#include "qmarkov/trajectory.hpp"

namespace qmarkov {

// Environment-averaged solution in backward (conditional) form: component k
// is <rho>(t, k) = E^k[rho(t, xi(t))], indexed by the environment start state.
struct MasterSolution {
    std::vector<double> grid;
    std::vector<std::vector<Matrix>> components;  // [k][time index]
    double halving_residual = 0.0;  // max entry change at the accepted halving
    int substeps = 1;               // internal RK4 substeps per grid interval
};

struct MCEstimate {
    std::vector<double> grid;
    std::vector<std::vector<Matrix>> mean;        // [k][time index]
    std::vector<std::vector<RealMatrix>> se_re;   // stderr of real parts
    std::vector<std::vector<RealMatrix>> se_im;   // stderr of imaginary parts
    long n_samples = 0;
    std::uint64_t seed = 0;
};

// Extremes of the conservation diagnostics seen across a whole run; combined
// with max/min so the result is independent of accumulation order.
struct ConservationStats {
    double max_trace_deviation = 0.0;
    double max_hermiticity_defect = 0.0;
    double min_eigenvalue = 1.0;

    void absorb(const ConservationStats& other);
    void observe(const Matrix& rho);
};

// Classical RK4 on d vec(rho)/dt = A vec(rho) with A = block_generator(model).
// The internal step starts at the grid spacing and is halved until one more
// halving changes every output entry by less than `halving_tol`; failure to
// converge raises NumericalError carrying the residual.
MasterSolution integrate_master(const QuantumModel& model,
                                const std::vector<Matrix>& rho0,
                                const std::vector<double>& grid,
                                double halving_tol = 1e-9);

// Monte Carlo estimate of the same backward averages: for each start state k,
// n_samples environment trajectories are sampled with RNG streams keyed
// (seed, k, sample index), the density is evolved along each, and entries are
// averaged. stderr = sample standard deviation / sqrt(n_samples), per real and
// imaginary part. Deterministic for a given seed regardless of parallelism:
// samples are accumulated in fixed-size blocks in sample order and the block
// sums are combined in block order.
MCEstimate mc_average(const QuantumModel& model, const std::vector<Matrix>& rho0,
                      const std::vector<double>& grid, long n_samples,
                      std::uint64_t seed, ConservationStats* stats = nullptr);

// Serial reference: identical algorithm and reduction order, no worker
// threads. Kept for testing and benchmarking against the parallel kernel;
// results are byte-identical to mc_average.
MCEstimate mc_average_serial(const QuantumModel& model, const std::vector<Matrix>& rho0,
                             const std::vector<double>& grid, long n_samples,
                             std::uint64_t seed, ConservationStats* stats = nullptr);

// tr(A . sum_k dist(k) <rho>(t, k)); t must lie on the solution grid.
double observable_expectation(const Matrix& A, const MasterSolution& solution,
                              const RealVector& initial_dist, double t);
double observable_expectation(const Matrix& A, const MCEstimate& estimate,
                              const RealVector& initial_dist, double t);

}  // namespace qmarkov
