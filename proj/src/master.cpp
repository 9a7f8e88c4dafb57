#include "qmarkov/master.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qmarkov/errors.hpp"
#include "qmarkov/rng.hpp"
#include "qmarkov/tolerances.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qmarkov {

void ConservationStats::absorb(const ConservationStats& other) {
    max_trace_deviation = std::max(max_trace_deviation, other.max_trace_deviation);
    max_hermiticity_defect =
        std::max(max_hermiticity_defect, other.max_hermiticity_defect);
    min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
}

namespace {

// Smallest eigenvalue of a Hermitian matrix; closed form at N = 2 keeps the
// per-sample conservation bookkeeping cheap inside the Monte Carlo loop.
double min_eig_hermitian(const Matrix& M) {
    if (M.rows() == 1) return M(0, 0).real();
    if (M.rows() == 2) {
        double a = M(0, 0).real();
        double d = M(1, 1).real();
        double mean = 0.5 * (a + d);
        double radius = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(M(0, 1)));
        return mean - radius;
    }
    return min_eigenvalue(M);
}

}  // namespace

void ConservationStats::observe(const Matrix& rho) {
    max_trace_deviation =
        std::max(max_trace_deviation, std::abs(rho.trace() - Complex(1.0, 0.0)));
    max_hermiticity_defect = std::max(max_hermiticity_defect, hermiticity_defect(rho));
    min_eigenvalue = std::min(min_eigenvalue, min_eig_hermitian(0.5 * (rho + rho.adjoint())));
}

namespace {

void validate_inputs(const QuantumModel& model, const std::vector<Matrix>& rho0,
                     const std::vector<double>& grid) {
    validate_model(model);
    if (static_cast<int>(rho0.size()) != model.chain.K) {
        throw ValidationError("master: one initial density per environment state required");
    }
    for (std::size_t k = 0; k < rho0.size(); ++k) {
        if (rho0[k].rows() != model.N || rho0[k].cols() != model.N ||
            !is_density(rho0[k], tol::kDensity)) {
            throw ValidationError("master: rho0 component " + std::to_string(k + 1) +
                                  " is not a density matrix");
        }
    }
    double prev = -1.0;
    for (double t : grid) {
        if (t < 0.0) throw ValidationError("master: grid times must be >= 0");
        if (t <= prev) throw ValidationError("master: grid times must be increasing");
        prev = t;
    }
}

// One full pass over the grid with `substeps` RK4 steps per interval
// (including the lead-in [0, grid[0]] when the grid does not start at 0).
std::vector<Vector> rk4_pass(const Matrix& A, const Vector& y0,
                             const std::vector<double>& grid, int substeps) {
    std::vector<Vector> out;
    out.reserve(grid.size());
    Vector y = y0;
    double now = 0.0;
    for (double t : grid) {
        double span = t - now;
        if (span > 0.0) {
            double h = span / substeps;
            for (int m = 0; m < substeps; ++m) {
                Vector k1 = A * y;
                Vector k2 = A * (y + 0.5 * h * k1);
                Vector k3 = A * (y + 0.5 * h * k2);
                Vector k4 = A * (y + h * k3);
                y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        now = t;
        out.push_back(y);
    }
    return out;
}

}  // namespace

MasterSolution integrate_master(const QuantumModel& model,
                                const std::vector<Matrix>& rho0,
                                const std::vector<double>& grid, double halving_tol) {
    validate_inputs(model, rho0, grid);
    const int K = model.chain.K;
    const int N = model.N;

    MasterSolution sol;
    sol.grid = grid;
    sol.components.assign(K, {});
    if (grid.empty()) return sol;

    const Matrix A = block_generator(model).matrix;
    const Vector y0 = stack_components(rho0);

    std::vector<Vector> coarse = rk4_pass(A, y0, grid, 1);
    int substeps = 1;
    double residual = 0.0;
    bool converged = false;
    while (substeps <= tol::kOdeMaxSubsteps) {
        std::vector<Vector> fine = rk4_pass(A, y0, grid, 2 * substeps);
        residual = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            // An overflowing pass yields inf/NaN; NaN must not slip through the
            // max/less-than chain below as a zero residual.
            if (!fine[i].allFinite() || !coarse[i].allFinite()) {
                residual = std::numeric_limits<double>::infinity();
                break;
            }
            residual = std::max(residual, (fine[i] - coarse[i]).cwiseAbs().maxCoeff());
        }
        coarse = std::move(fine);
        substeps *= 2;
        if (residual < halving_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "integrate_master: step halving did not converge, residual " << residual
            << " at " << substeps << " substeps (target " << halving_tol << ")";
        throw NumericalError(msg.str());
    }

    sol.substeps = substeps;
    sol.halving_residual = residual;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<Matrix> comps = unstack_components(coarse[i], K, N);
        for (int k = 0; k < K; ++k) sol.components[k].push_back(comps[k]);
    }
    return sol;
}

namespace {

// Fixed block size for the deterministic reduction; independent of worker
// count so the summation bracketing never changes.
constexpr long kMcBlock = 256;

struct BlockAccum {
    std::vector<Matrix> sum;        // per grid time
    std::vector<RealMatrix> sq_re;  // sum of squared real parts
    std::vector<RealMatrix> sq_im;  // sum of squared imaginary parts
    ConservationStats stats;

    void init(std::size_t n_times, int N) {
        sum.assign(n_times, Matrix::Zero(N, N));
        sq_re.assign(n_times, RealMatrix::Zero(N, N));
        sq_im.assign(n_times, RealMatrix::Zero(N, N));
    }
};

MCEstimate mc_average_impl(const QuantumModel& model, const std::vector<Matrix>& rho0,
                           const std::vector<double>& grid, long n_samples,
                           std::uint64_t seed, ConservationStats* stats,
                           bool parallel) {
    validate_inputs(model, rho0, grid);
    if (n_samples < 1) throw ValidationError("mc_average: n_samples must be >= 1");

    const int K = model.chain.K;
    const int N = model.N;
    const std::size_t n_times = grid.size();
    const double horizon = grid.empty() ? 0.0 : grid.back();
    const long n_blocks = (n_samples + kMcBlock - 1) / kMcBlock;

    // One accumulator slot per (start state, block); filled in any order,
    // combined in fixed order afterwards.
    std::vector<BlockAccum> slots(static_cast<std::size_t>(K) * n_blocks);

    const long n_tasks = static_cast<long>(slots.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
#endif
    for (long task = 0; task < n_tasks; ++task) {
        const int k = static_cast<int>(task / n_blocks);
        const long block = task % n_blocks;
        BlockAccum& acc = slots[task];
        acc.init(n_times, N);
        const long begin = block * kMcBlock;
        const long end = std::min(n_samples, begin + kMcBlock);
        for (long idx = begin; idx < end; ++idx) {
            RngStream stream(seed, static_cast<std::uint64_t>(k),
                             static_cast<std::uint64_t>(idx));
            EnvTrajectory traj = sample_trajectory(model.chain, k, horizon, stream);
            DensityPath path = evolve_density(model, traj, rho0[k], grid);
            for (std::size_t i = 0; i < n_times; ++i) {
                const Matrix& rho = path.values[i];
                acc.sum[i] += rho;
                acc.sq_re[i] += rho.real().cwiseProduct(rho.real());
                acc.sq_im[i] += rho.imag().cwiseProduct(rho.imag());
                if (stats != nullptr) acc.stats.observe(rho);
            }
        }
    }
    (void)parallel;

    MCEstimate est;
    est.grid = grid;
    est.n_samples = n_samples;
    est.seed = seed;
    est.mean.assign(K, std::vector<Matrix>(n_times, Matrix::Zero(N, N)));
    est.se_re.assign(K, std::vector<RealMatrix>(n_times, RealMatrix::Zero(N, N)));
    est.se_im.assign(K, std::vector<RealMatrix>(n_times, RealMatrix::Zero(N, N)));

    const double n = static_cast<double>(n_samples);
    for (int k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < n_times; ++i) {
            Matrix total = Matrix::Zero(N, N);
            RealMatrix total_sq_re = RealMatrix::Zero(N, N);
            RealMatrix total_sq_im = RealMatrix::Zero(N, N);
            for (long block = 0; block < n_blocks; ++block) {
                const BlockAccum& acc = slots[static_cast<std::size_t>(k) * n_blocks +
                                              block];
                total += acc.sum[i];
                total_sq_re += acc.sq_re[i];
                total_sq_im += acc.sq_im[i];
            }
            Matrix mean = total / n;
            est.mean[k][i] = mean;
            if (n_samples > 1) {
                RealMatrix var_re =
                    (total_sq_re - n * mean.real().cwiseProduct(mean.real())) / (n - 1.0);
                RealMatrix var_im =
                    (total_sq_im - n * mean.imag().cwiseProduct(mean.imag())) / (n - 1.0);
                est.se_re[k][i] = (var_re.cwiseMax(0.0) / n).cwiseSqrt();
                est.se_im[k][i] = (var_im.cwiseMax(0.0) / n).cwiseSqrt();
            }
        }
    }
    if (stats != nullptr) {
        for (const BlockAccum& acc : slots) stats->absorb(acc.stats);
    }
    return est;
}

}  // namespace

MCEstimate mc_average(const QuantumModel& model, const std::vector<Matrix>& rho0,
                      const std::vector<double>& grid, long n_samples,
                      std::uint64_t seed, ConservationStats* stats) {
    return mc_average_impl(model, rho0, grid, n_samples, seed, stats, true);
}

MCEstimate mc_average_serial(const QuantumModel& model, const std::vector<Matrix>& rho0,
                             const std::vector<double>& grid, long n_samples,
                             std::uint64_t seed, ConservationStats* stats) {
    return mc_average_impl(model, rho0, grid, n_samples, seed, stats, false);
}

namespace {

std::size_t grid_index(const std::vector<double>& grid, double t) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] == t || std::abs(grid[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) {
            return i;
        }
    }
    std::ostringstream msg;
    msg << "observable_expectation: t = " << t
        << " is not a grid time (interpolation is refused)";
    throw ValidationError(msg.str());
}

double expectation_impl(const Matrix& A,
                        const std::vector<std::vector<Matrix>>& components,
                        const RealVector& dist, std::size_t ti) {
    Complex value(0.0, 0.0);
    for (std::size_t k = 0; k < components.size(); ++k) {
        value += dist(static_cast<Eigen::Index>(k)) * (A * components[k][ti]).trace();
    }
    if (std::abs(value.imag()) > 1e-10) {
        std::ostringstream msg;
        msg << "observable_expectation: imaginary residual " << value.imag()
            << " exceeds 1e-10";
        throw NumericalError(msg.str());
    }
    return value.real();
}

void check_observable(const Matrix& A, const RealVector& dist, std::size_t K) {
    if (!is_hermitian(A, tol::kHermitian)) {
        throw ValidationError("observable_expectation: A is not Hermitian");
    }
    if (static_cast<std::size_t>(dist.size()) != K) {
        throw ValidationError("observable_expectation: distribution has wrong length");
    }
    if (dist.minCoeff() < 0.0 || std::abs(dist.sum() - 1.0) > tol::kRowSum) {
        throw ValidationError(
            "observable_expectation: initial distribution must be a probability vector");
    }
}

}  // namespace

double observable_expectation(const Matrix& A, const MasterSolution& solution,
                              const RealVector& initial_dist, double t) {
    check_observable(A, initial_dist, solution.components.size());
    return expectation_impl(A, solution.components, initial_dist,
                            grid_index(solution.grid, t));
}

double observable_expectation(const Matrix& A, const MCEstimate& estimate,
                              const RealVector& initial_dist, double t) {
    check_observable(A, initial_dist, estimate.mean.size());
    return expectation_impl(A, estimate.mean, initial_dist, grid_index(estimate.grid, t));
}

}  // namespace qmarkov
