#include "qmarkov/models.hpp"

#include <cmath>
#include <sstream>

#include "qmarkov/errors.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

QuantumModel goldstein_model(double J, double lambda, double hbar) {
    if (lambda < 0.0) throw ValidationError("goldstein_model: lambda must be >= 0");
    if (hbar <= 0.0) throw ValidationError("goldstein_model: hbar must be positive");
    Matrix H(2, 2);
    H << Complex(J, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(-J, 0.0);

    RealVector rates(2);
    rates << lambda, lambda;
    RealMatrix Q(2, 2);
    Q << 0.0, 1.0, 1.0, 0.0;

    QuantumModel model;
    model.N = 2;
    model.hbar = hbar;
    model.chain = build_chain(rates, Q);
    model.hamiltonians = {H, -H};
    model.shocks = ShockMap::identity(2);
    return model;
}

QuantumModel poisson_swap_model(double E1, double E2, double lambda, double hbar) {
    if (lambda < 0.0) throw ValidationError("poisson_swap_model: lambda must be >= 0");
    if (hbar <= 0.0) throw ValidationError("poisson_swap_model: hbar must be positive");
    Matrix H(2, 2);
    H << Complex(E1, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(E2, 0.0);
    Matrix V(2, 2);
    V << Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.0);

    RealVector rates(1);
    rates << lambda;
    RealMatrix Q(1, 1);
    Q << 1.0;  // pure pulse process: every jump is a self-jump

    QuantumModel model;
    model.N = 2;
    model.hbar = hbar;
    model.chain = build_chain(rates, Q);
    model.hamiltonians = {H};
    model.shocks = ShockMap::constant_shock(V);
    return model;
}

namespace {

double uniform_step(const std::vector<double>& grid, const char* who) {
    if (grid.size() < 3) {
        throw ValidationError(std::string(who) + ": need at least 3 grid points");
    }
    const double h = grid[1] - grid[0];
    if (h <= 0.0) throw ValidationError(std::string(who) + ": grid must be increasing");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (std::abs(grid[i] - grid[i - 1] - h) >
            1e-9 * std::max(1.0, std::abs(grid.back()))) {
            throw ValidationError(std::string(who) + ": grid is not uniform");
        }
    }
    return h;
}

Matrix swap_diagonal(const Matrix& d) {
    Matrix out = Matrix::Zero(2, 2);
    out(0, 0) = d(1, 1);
    out(1, 1) = d(0, 0);
    return out;
}

Matrix diagonal_part(const Matrix& rho) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    out.diagonal() = rho.diagonal();
    return out;
}

}  // namespace

ResidualSeries telegraph_residual(const MasterSolution& solution, double lambda,
                                  const QuantumModel& model, TelegraphMode mode) {
    const double h = uniform_step(solution.grid, "telegraph_residual");
    const std::size_t n = solution.grid.size();
    ResidualSeries series;

    if (mode == TelegraphMode::kGoldstein) {
        if (solution.components.size() != 2) {
            throw ValidationError("telegraph_residual: goldstein mode expects 2 components");
        }
        const int N = model.N;
        // Per-component squared Liouvillians ((1/(i hbar)) Hk^x)^2.
        std::vector<Matrix> L2(2);
        for (int k = 0; k < 2; ++k) {
            Matrix L = Complex(0.0, -1.0 / model.hbar) *
                       commutator_superop(model.hamiltonians[k]);
            L2[k] = L * L;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            Matrix stacked(2 * N, N);
            double norm_sq = 0.0;
            for (int k = 0; k < 2; ++k) {
                const Matrix& prev = solution.components[k][i - 1];
                const Matrix& here = solution.components[k][i];
                const Matrix& next = solution.components[k][i + 1];
                Matrix second = (next - 2.0 * here + prev) / (h * h);
                Matrix first = (next - prev) / (2.0 * h);
                Matrix drift = devectorize(L2[k] * vectorize(here));
                Matrix R = second + 2.0 * lambda * first - drift;
                stacked.block(k * N, 0, N, N) = R;
                norm_sq += R.squaredNorm();
            }
            series.grid.push_back(solution.grid[i]);
            series.residual.push_back(stacked);
            series.norm.push_back(std::sqrt(norm_sq));
        }
    } else {
        if (solution.components.size() != 1 || model.N != 2) {
            throw ValidationError(
                "telegraph_residual: poisson-swap mode expects one 2x2 component");
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            Matrix prev = diagonal_part(solution.components[0][i - 1]);
            Matrix here = diagonal_part(solution.components[0][i]);
            Matrix next = diagonal_part(solution.components[0][i + 1]);
            Matrix second = (next - 2.0 * here + prev) / (h * h);
            Matrix R = second - kSwapTelegraphCoefficient * lambda * lambda *
                                    (here - swap_diagonal(here));
            series.grid.push_back(solution.grid[i]);
            series.residual.push_back(R);
            series.norm.push_back(R.norm());
        }
    }
    for (double v : series.norm) series.max_norm = std::max(series.max_norm, v);
    return series;
}

SwapAdjudication adjudicate_swap_coefficient(const MasterSolution& solution,
                                             double lambda) {
    const double h = uniform_step(solution.grid, "adjudicate_swap_coefficient");
    if (solution.components.size() != 1) {
        throw ValidationError("adjudicate_swap_coefficient: expects one component");
    }
    const std::size_t n = solution.grid.size();
    SwapAdjudication adj;
    double dot_xy = 0.0;
    double dot_yy = 0.0;

    // First pass: least-squares fit of c in D^2 rho_d = c * lambda^2 (rho_d - swap).
    std::vector<Matrix> seconds, firsts, sources;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        Matrix prev = diagonal_part(solution.components[0][i - 1]);
        Matrix here = diagonal_part(solution.components[0][i]);
        Matrix next = diagonal_part(solution.components[0][i + 1]);
        Matrix second = (next - 2.0 * here + prev) / (h * h);
        Matrix first = (next - prev) / (2.0 * h);
        Matrix source = lambda * lambda * (here - swap_diagonal(here));
        seconds.push_back(second);
        firsts.push_back(first);
        sources.push_back(source);
        dot_xy += (second.cwiseProduct(source.conjugate())).sum().real();
        dot_yy += source.squaredNorm();
    }
    adj.fitted_c = (dot_yy == 0.0) ? 0.0 : dot_xy / dot_yy;

    auto max_residual = [&](double damping, double c) {
        double worst = 0.0;
        for (std::size_t i = 0; i < seconds.size(); ++i) {
            Matrix R = seconds[i] + damping * firsts[i] - c * sources[i];
            worst = std::max(worst, R.cwiseAbs().maxCoeff());
        }
        return worst;
    };
    adj.residual_fitted = max_residual(0.0, adj.fitted_c);
    adj.residual_damped_c0 = max_residual(2.0 * lambda, 0.0);
    adj.residual_undamped_c2 = max_residual(0.0, 2.0);
    adj.residual_damped_c4 = max_residual(2.0 * lambda, 4.0);
    return adj;
}

}  // namespace qmarkov
