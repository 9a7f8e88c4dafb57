#include "qmarkov/resolvent.hpp"

#include <cmath>
#include <sstream>

#include "qmarkov/errors.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

namespace {

void require_right_half_plane(Complex s, const char* who) {
    if (s.real() <= 0.0) {
        std::ostringstream msg;
        msg << who << ": Re(s) must be positive, got " << s.real();
        throw ValidationError(msg.str());
    }
}

Matrix guarded_inverse(const Matrix& M, const char* who) {
    Eigen::PartialPivLU<Matrix> lu(M);
    Matrix inv = lu.solve(Matrix::Identity(M.rows(), M.cols()));
    double residual = (M * inv - Matrix::Identity(M.rows(), M.cols())).norm();
    if (!std::isfinite(residual) || residual > tol::kResolventResidual) {
        // Estimate conditioning from the norms involved.
        std::ostringstream msg;
        msg << who << ": near-singular solve, residual " << residual
            << ", cond estimate ~ " << M.norm() * inv.norm();
        throw NumericalError(msg.str());
    }
    return inv;
}

}  // namespace

Matrix free_resolvent(const Matrix& H, double lambda, Complex s, double hbar) {
    require_right_half_plane(s, "free_resolvent");
    if (lambda < 0.0) throw ValidationError("free_resolvent: lambda must be >= 0");
    if (hbar <= 0.0) throw ValidationError("free_resolvent: hbar must be positive");
    const Matrix Hx = commutator_superop(H);
    const Eigen::Index n2 = Hx.rows();
    Matrix system = (s + lambda) * Matrix::Identity(n2, n2) +
                    Complex(0.0, 1.0 / hbar) * Hx;
    return guarded_inverse(system, "free_resolvent");
}

Matrix laplace_fixed_point(const QuantumModel& model, Complex s) {
    require_right_half_plane(s, "laplace_fixed_point");
    validate_model(model);
    const int K = model.chain.K;
    const int N = model.N;
    const int n2 = N * N;
    const Eigen::Index dim = static_cast<Eigen::Index>(K) * n2;

    Matrix R0 = Matrix::Zero(dim, dim);
    for (int k = 0; k < K; ++k) {
        double lk = model.chain.absorbing[k] ? 0.0 : model.chain.lambda(k);
        R0.block(k * n2, k * n2, n2, n2) =
            free_resolvent(model.hamiltonians[k], lk, s, model.hbar);
    }

    Matrix S_jump = Matrix::Zero(dim, dim);
    for (int k = 0; k < K; ++k) {
        if (model.chain.absorbing[k]) continue;
        for (int j = 0; j < K; ++j) {
            double rate = model.chain.lambda(k) * model.chain.Q(k, j);
            if (rate == 0.0) continue;
            S_jump.block(k * n2, j * n2, n2, n2) =
                rate * conjugation_superop(model.shocks(k, j));
        }
    }

    // X = R0 (I - S_jump R0)^{-1}; the inverse factor of the renewal equation.
    Matrix factor =
        guarded_inverse(Matrix::Identity(dim, dim) - S_jump * R0, "laplace_fixed_point");
    return R0 * factor;
}

LaplaceQuadrature numerical_laplace(const std::vector<double>& grid,
                                    const std::vector<Matrix>& values, Complex s) {
    require_right_half_plane(s, "numerical_laplace");
    if (grid.size() < 2) throw ValidationError("numerical_laplace: need >= 2 grid points");
    if (grid.size() != values.size()) {
        throw ValidationError("numerical_laplace: grid/value length mismatch");
    }
    const double h = grid[1] - grid[0];
    if (h <= 0.0) throw ValidationError("numerical_laplace: grid must be increasing");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double step = grid[i] - grid[i - 1];
        if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(grid.back()))) {
            throw ValidationError("numerical_laplace: grid is not uniform");
        }
    }

    Matrix acc = Matrix::Zero(values[0].rows(), values[0].cols());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double w = (i == 0 || i + 1 == grid.size()) ? 0.5 : 1.0;
        acc += (w * std::exp(-s * grid[i])) * values[i];
    }
    LaplaceQuadrature out;
    out.value = h * acc;
    out.tail_bound = values.back().norm() / s.real() * std::exp(-s.real() * grid.back());
    return out;
}

}  // namespace qmarkov
