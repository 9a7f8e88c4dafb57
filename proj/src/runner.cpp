#include "qmarkov/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qmarkov/csv.hpp"
#include "qmarkov/errors.hpp"
#include "qmarkov/models.hpp"
#include "qmarkov/resolvent.hpp"
#include "qmarkov/superop.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class PhaseTimer {
    using Clock = std::chrono::steady_clock;
    Clock::time_point last_ = Clock::now();

public:
    double lap() {
        const Clock::time_point now = Clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }
};

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

json grid_echo(const ExperimentConfig& cfg) {
    return json{{"start", cfg.grid_start}, {"stop", cfg.grid_stop}, {"steps", cfg.grid_steps}};
}

// Evaluate every configured observable on a solution grid.
template <typename Solution>
std::vector<std::vector<double>> observable_table(const ExperimentConfig& cfg,
                                                  const Solution& sol) {
    std::vector<std::vector<double>> table;
    table.reserve(cfg.observables.size());
    for (const auto& [name, A] : cfg.observables) {
        std::vector<double> col;
        col.reserve(cfg.grid.size());
        for (double t : cfg.grid)
            col.push_back(observable_expectation(A, sol, cfg.initial_dist, t));
        table.push_back(std::move(col));
    }
    return table;
}

std::vector<std::string> observable_names(const ExperimentConfig& cfg) {
    std::vector<std::string> names;
    names.reserve(cfg.observables.size());
    for (const auto& [name, A] : cfg.observables) names.push_back(name);
    return names;
}

template <typename Solution>
void maybe_write_observables(const ExperimentConfig& cfg, const Solution& sol,
                             const std::string& filename, json& files) {
    if (cfg.observables.empty()) return;
    write_observables_csv(cfg.grid, observable_names(cfg), observable_table(cfg, sol),
                          join_path(cfg.out_dir, filename));
    files.push_back(filename);
}

ConservationStats stats_of(const MasterSolution& sol) {
    ConservationStats stats;
    for (const auto& component : sol.components)
        for (const Matrix& rho : component) stats.observe(rho);
    return stats;
}

json stats_echo(const ConservationStats& stats) {
    return json{{"trace_deviation", stats.max_trace_deviation},
                {"hermiticity_defect", stats.max_hermiticity_defect},
                {"min_eigenvalue", stats.min_eigenvalue}};
}

double max_stderr(const MCEstimate& est) {
    double m = 0.0;
    for (const auto& per_state : est.se_re)
        for (const RealMatrix& se : per_state) m = std::max(m, se.maxCoeff());
    for (const auto& per_state : est.se_im)
        for (const RealMatrix& se : per_state) m = std::max(m, se.maxCoeff());
    return m;
}

struct ZTables {
    std::vector<std::vector<RealMatrix>> z_re;
    std::vector<std::vector<RealMatrix>> z_im;
    double z_max = 0.0;
};

ZTables z_scores(const MasterSolution& sol, const MCEstimate& est) {
    const int K = static_cast<int>(sol.components.size());
    ZTables z;
    z.z_re.resize(K);
    z.z_im.resize(K);
    for (int k = 0; k < K; ++k) {
        const std::size_t nt = sol.grid.size();
        z.z_re[k].reserve(nt);
        z.z_im[k].reserve(nt);
        for (std::size_t ti = 0; ti < nt; ++ti) {
            const Matrix diff = est.mean[k][ti] - sol.components[k][ti];
            const RealMatrix zr = diff.real().cwiseAbs().cwiseQuotient(
                est.se_re[k][ti].cwiseMax(tol::kStderrFloor));
            const RealMatrix zi = diff.imag().cwiseAbs().cwiseQuotient(
                est.se_im[k][ti].cwiseMax(tol::kStderrFloor));
            z.z_max = std::max({z.z_max, zr.maxCoeff(), zi.maxCoeff()});
            z.z_re[k].push_back(zr);
            z.z_im[k].push_back(zi);
        }
    }
    return z;
}

Matrix direct_resolvent(const Matrix& A, Complex s) {
    const int n = static_cast<int>(A.rows());
    const Matrix lhs = s * Matrix::Identity(n, n) - A;
    Eigen::PartialPivLU<Matrix> lu(lhs);
    const Matrix inv = lu.solve(Matrix::Identity(n, n));
    const double residual = (lhs * inv - Matrix::Identity(n, n)).norm();
    if (!std::isfinite(residual) || residual > tol::kResolventResidual)
        throw NumericalError("resolvent inversion residual " + std::to_string(residual) +
                             " exceeds tolerance; s may be too close to the spectrum");
    return inv;
}

// Frequency scale for the telegraph-residual threshold: the second-difference
// truncation error is ~ (h^2/12) * ||d^4 rho/dt^4|| and fourth derivatives
// scale like omega^4 for the dominant oscillation frequency omega.
double telegraph_frequency(const ExperimentConfig& cfg, TelegraphMode mode) {
    const json& echo = cfg.model_echo;
    const double lambda = echo["lambda"].get<double>();
    if (mode == TelegraphMode::kGoldstein)
        return 2.0 * (std::abs(echo["J"].get<double>()) / cfg.model.hbar + lambda);
    const double gap = std::abs(echo["E1"].get<double>() - echo["E2"].get<double>());
    return std::max(2.0 * lambda, gap / cfg.model.hbar);
}

bool grid_is_uniform(const std::vector<double>& grid) {
    if (grid.size() < 3) return false;
    const double h = grid[1] - grid[0];
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (std::abs((grid[i + 1] - grid[i]) - h) > 1e-9 * std::max(1.0, std::abs(grid.back())))
            return false;
    return h > 0.0;
}

}  // namespace

RunResult run_ode(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    RunResult res;
    PhaseTimer timer;

    const MasterSolution sol = integrate_master(cfg.model, cfg.rho0, cfg.grid);
    res.timings["integrate_seconds"] = timer.lap();

    json files = json::array();
    write_master_csv(sol, join_path(cfg.out_dir, "ode.csv"));
    files.push_back("ode.csv");
    maybe_write_observables(cfg, sol, "observables_ode.csv", files);
    res.timings["write_seconds"] = timer.lap();

    res.summary["files"] = files;
    res.summary["ode"] = {{"halving_residual", sol.halving_residual},
                          {"substeps", sol.substeps},
                          {"conservation", stats_echo(stats_of(sol))}};
    return res;
}

RunResult run_mc(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    RunResult res;
    PhaseTimer timer;

    ConservationStats stats;
    const MCEstimate est =
        mc_average(cfg.model, cfg.rho0, cfg.grid, cfg.n_samples, cfg.seed, &stats);
    res.timings["mc_seconds"] = timer.lap();

    json files = json::array();
    write_mc_csv(est, join_path(cfg.out_dir, "mc.csv"));
    files.push_back("mc.csv");
    maybe_write_observables(cfg, est, "observables_mc.csv", files);
    res.timings["write_seconds"] = timer.lap();

    res.summary["files"] = files;
    res.summary["mc"] = {{"n_samples", est.n_samples},
                         {"seed", est.seed},
                         {"max_stderr", max_stderr(est)},
                         {"conservation", stats_echo(stats)}};
    return res;
}

RunResult run_compare(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    RunResult res;
    PhaseTimer timer;

    const MasterSolution sol = integrate_master(cfg.model, cfg.rho0, cfg.grid);
    res.timings["integrate_seconds"] = timer.lap();
    ConservationStats stats;
    const MCEstimate est =
        mc_average(cfg.model, cfg.rho0, cfg.grid, cfg.n_samples, cfg.seed, &stats);
    res.timings["mc_seconds"] = timer.lap();

    const ZTables z = z_scores(sol, est);

    json files = json::array();
    write_master_csv(sol, join_path(cfg.out_dir, "ode.csv"));
    files.push_back("ode.csv");
    write_mc_csv(est, join_path(cfg.out_dir, "mc.csv"));
    files.push_back("mc.csv");
    write_zscore_csv(cfg.grid, z.z_re, z.z_im, join_path(cfg.out_dir, "zscores.csv"));
    files.push_back("zscores.csv");
    maybe_write_observables(cfg, sol, "observables_ode.csv", files);
    maybe_write_observables(cfg, est, "observables_mc.csv", files);
    res.timings["write_seconds"] = timer.lap();

    const bool pass = z.z_max <= tol::kZScoreLimit;
    res.summary["files"] = files;
    res.summary["ode"] = {{"halving_residual", sol.halving_residual},
                          {"substeps", sol.substeps},
                          {"conservation", stats_echo(stats_of(sol))}};
    res.summary["mc"] = {{"n_samples", est.n_samples},
                         {"seed", est.seed},
                         {"max_stderr", max_stderr(est)},
                         {"conservation", stats_echo(stats)}};
    res.summary["compare"] = {{"z_max", z.z_max},
                              {"z_limit", tol::kZScoreLimit},
                              {"stderr_floor", tol::kStderrFloor},
                              {"pass", pass}};
    res.exit_code = pass ? 0 : 3;
    return res;
}

RunResult run_laplace(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    RunResult res;
    PhaseTimer timer;

    const Matrix A = block_generator(cfg.model).matrix;
    std::vector<double> residuals;
    residuals.reserve(cfg.s_values.size());
    double max_residual = 0.0;
    for (Complex s : cfg.s_values) {
        const Matrix fixed_point = laplace_fixed_point(cfg.model, s);
        const double residual = (fixed_point - direct_resolvent(A, s)).norm();
        residuals.push_back(residual);
        max_residual = std::max(max_residual, residual);
    }
    res.timings["laplace_seconds"] = timer.lap();

    json files = json::array();
    write_laplace_csv(cfg.s_values, residuals, join_path(cfg.out_dir, "laplace.csv"));
    files.push_back("laplace.csv");
    res.timings["write_seconds"] = timer.lap();

    json s_echo = json::array();
    for (Complex s : cfg.s_values) s_echo.push_back({s.real(), s.imag()});
    const bool pass = max_residual <= tol::kResolventResidual;
    res.summary["files"] = files;
    res.summary["laplace"] = {{"s_values", s_echo},
                              {"max_fixed_point_residual", max_residual},
                              {"residual_limit", tol::kResolventResidual},
                              {"pass", pass}};
    res.exit_code = pass ? 0 : 3;
    return res;
}

RunResult run_check(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    RunResult res;
    PhaseTimer timer;

    json checks = json::array();
    bool all_pass = true;
    const auto add = [&](const std::string& name, double value, double threshold,
                         bool pass, const char* direction) {
        checks.push_back(json{{"name", name},
                              {"value", value},
                              {"threshold", threshold},
                              {"direction", direction},
                              {"pass", pass}});
        all_pass = all_pass && pass;
    };

    // Structural validity: load_config already enforces it; assert again so a
    // `check` run documents it explicitly.
    validate_model(cfg.model);
    checks.push_back(json{{"name", "model_structure"}, {"pass", true}});

    // Chapman-Kolmogorov consistency of the environment semigroup.
    {
        const double T = cfg.grid.back() > 0.0 ? cfg.grid.back() : 1.0;
        const RealMatrix lhs = transition_matrix(cfg.model.chain, 0.3 * T) *
                               transition_matrix(cfg.model.chain, 0.7 * T);
        const double ck =
            (lhs - transition_matrix(cfg.model.chain, T)).cwiseAbs().maxCoeff();
        add("chapman_kolmogorov", ck, tol::kChapmanKolmogorov,
            ck <= tol::kChapmanKolmogorov, "max");
    }
    res.timings["chain_seconds"] = timer.lap();

    // Conservation along the averaged master equation.
    const MasterSolution sol = integrate_master(cfg.model, cfg.rho0, cfg.grid);
    {
        const ConservationStats stats = stats_of(sol);
        add("ode_trace_deviation", stats.max_trace_deviation, tol::kTraceDrift,
            stats.max_trace_deviation <= tol::kTraceDrift, "max");
        add("ode_hermiticity_defect", stats.max_hermiticity_defect, tol::kHermDrift,
            stats.max_hermiticity_defect <= tol::kHermDrift, "max");
        add("ode_min_eigenvalue", stats.min_eigenvalue, tol::kMinEigenvalue,
            stats.min_eigenvalue >= tol::kMinEigenvalue, "min");
    }
    res.timings["ode_seconds"] = timer.lap();

    // Conservation along sampled trajectories (small deterministic batch).
    const long n_check = std::min<long>(cfg.n_samples, 256);
    {
        ConservationStats stats;
        (void)mc_average(cfg.model, cfg.rho0, cfg.grid, n_check, cfg.seed, &stats);
        add("mc_trace_deviation", stats.max_trace_deviation, tol::kTraceDrift,
            stats.max_trace_deviation <= tol::kTraceDrift, "max");
        add("mc_hermiticity_defect", stats.max_hermiticity_defect, tol::kHermDrift,
            stats.max_hermiticity_defect <= tol::kHermDrift, "max");
        add("mc_min_eigenvalue", stats.min_eigenvalue, tol::kMinEigenvalue,
            stats.min_eigenvalue >= tol::kMinEigenvalue, "min");
    }
    res.timings["mc_seconds"] = timer.lap();

    // Second-order finite-difference identity for the canned models.
    const std::string model_name = cfg.model_echo.value("name", std::string());
    if (model_name == "goldstein" || model_name == "poisson-swap") {
        if (grid_is_uniform(cfg.grid)) {
            const TelegraphMode mode = model_name == "goldstein"
                                           ? TelegraphMode::kGoldstein
                                           : TelegraphMode::kPoissonSwap;
            const double lambda = cfg.model_echo["lambda"].get<double>();
            const ResidualSeries series =
                telegraph_residual(sol, lambda, cfg.model, mode);
            const double h = cfg.grid[1] - cfg.grid[0];
            const double omega = telegraph_frequency(cfg, mode);
            const double threshold =
                10.0 * h * h * std::max(1.0, std::pow(omega, 4) / 12.0);
            add("telegraph_residual", series.max_norm, threshold,
                series.max_norm <= threshold, "max");
        } else {
            checks.push_back(json{{"name", "telegraph_residual"},
                                  {"skipped", true},
                                  {"reason", "needs a uniform grid with at least 3 points"}});
        }
    }
    res.timings["telegraph_seconds"] = timer.lap();

    res.summary["files"] = json::array();
    res.summary["check"] = {{"all_pass", all_pass},
                            {"checks", checks},
                            {"mc_samples_used", n_check}};
    res.exit_code = all_pass ? 0 : 3;
    return res;
}

int run_command(const std::string& command, const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    PhaseTimer total;
    RunResult res;
    if (command == "ode")
        res = run_ode(cfg);
    else if (command == "mc")
        res = run_mc(cfg);
    else if (command == "compare")
        res = run_compare(cfg);
    else if (command == "laplace")
        res = run_laplace(cfg);
    else if (command == "check")
        res = run_check(cfg);
    else
        throw ValidationError("unknown command: " + command);
    const double total_seconds = total.lap();

    res.summary["command"] = command;
    res.summary["schema_version"] = 1;
    res.summary["model"] = cfg.model_echo;
    res.summary["grid"] = grid_echo(cfg);
    res.summary["seed"] = cfg.seed;
    res.summary["timings_file"] = "timings.json";
    {
        std::ofstream out(join_path(cfg.out_dir, "summary.json"), std::ios::binary);
        if (!out) throw ValidationError("cannot open output file: " +
                                        join_path(cfg.out_dir, "summary.json"));
        out << res.summary.dump(2) << "\n";
    }

    res.timings["command"] = command;
    res.timings["total_seconds"] = total_seconds;
    {
        std::ofstream out(join_path(cfg.out_dir, "timings.json"), std::ios::binary);
        if (out) out << res.timings.dump(2) << "\n";
    }
    std::fprintf(stderr, "[qmarkov] %s finished in %.3f s (exit %d)\n", command.c_str(),
                 total_seconds, res.exit_code);
    return res.exit_code;
}

}  // namespace qmarkov
