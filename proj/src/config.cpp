#include "qmarkov/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "qmarkov/errors.hpp"
#include "qmarkov/models.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError("config: " + path + ": " + msg);
}

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required field");
    return *it;
}

double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

long as_long(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long>();
}

std::uint64_t as_u64(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
        fail(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

Complex as_complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(path, "expected a complex number encoded as [re, im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

// Flattened row-major complex matrix: rows*cols entries of [re, im].
Matrix as_complex_matrix(const json& j, int rows, int cols, const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
        fail(path, "expected a flattened row-major matrix with " +
                       std::to_string(rows * cols) + " [re, im] entries, got " +
                       (j.is_array() ? std::to_string(j.size()) + " entries"
                                     : std::string("a non-array")));
    Matrix M(rows, cols);
    for (int idx = 0; idx < rows * cols; ++idx)
        M(idx / cols, idx % cols) = as_complex(j[idx], path + "[" + std::to_string(idx) + "]");
    return M;
}

RealVector as_real_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
    RealVector v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i)
        v(i) = as_double(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

RealMatrix as_real_matrix(const json& j, int rows, int cols, const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        fail(path, "expected " + std::to_string(rows) + " rows");
    RealMatrix M(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = j[r];
        const std::string rpath = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            fail(rpath, "expected " + std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c)
            M(r, c) = as_double(row[c], rpath + "[" + std::to_string(c) + "]");
    }
    return M;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& path) {
    if (!j.is_object()) return;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok) fail(path + "." + it.key(), "unknown field");
    }
}

QuantumModel parse_model(const json& jm) {
    const std::string path = "model";
    const json& jname = require(jm, "name", path);
    if (!jname.is_string()) fail(path + ".name", "expected a string");
    const std::string name = jname.get<std::string>();
    const double hbar = jm.contains("hbar") ? as_double(jm["hbar"], path + ".hbar") : 1.0;

    if (name == "goldstein") {
        reject_unknown_keys(jm, {"name", "J", "lambda", "hbar"}, path);
        const double J = as_double(require(jm, "J", path), path + ".J");
        const double lambda = as_double(require(jm, "lambda", path), path + ".lambda");
        return goldstein_model(J, lambda, hbar);
    }
    if (name == "poisson-swap") {
        reject_unknown_keys(jm, {"name", "E1", "E2", "lambda", "hbar"}, path);
        const double E1 = as_double(require(jm, "E1", path), path + ".E1");
        const double E2 = as_double(require(jm, "E2", path), path + ".E2");
        const double lambda = as_double(require(jm, "lambda", path), path + ".lambda");
        return poisson_swap_model(E1, E2, lambda, hbar);
    }
    if (name == "explicit") {
        reject_unknown_keys(jm, {"name", "N", "hbar", "lambda", "Q", "hamiltonians",
                                 "shock", "shocks"}, path);
        const long N = as_long(require(jm, "N", path), path + ".N");
        if (N < 1 || N > 64) fail(path + ".N", "system dimension must be in [1, 64]");
        const RealVector lambda = as_real_vector(require(jm, "lambda", path), path + ".lambda");
        const int K = static_cast<int>(lambda.size());
        const RealMatrix Q = as_real_matrix(require(jm, "Q", path), K, K, path + ".Q");

        const json& jh = require(jm, "hamiltonians", path);
        if (!jh.is_array() || static_cast<int>(jh.size()) != K)
            fail(path + ".hamiltonians", "expected one Hamiltonian per environment state (" +
                                             std::to_string(K) + ")");
        std::vector<Matrix> hams;
        hams.reserve(K);
        for (int k = 0; k < K; ++k)
            hams.push_back(as_complex_matrix(jh[k], static_cast<int>(N), static_cast<int>(N),
                                             path + ".hamiltonians[" + std::to_string(k) + "]"));

        if (jm.contains("shock") && jm.contains("shocks"))
            fail(path, "give either a constant \"shock\" or a per-transition \"shocks\" table, not both");

        ShockMap shocks = ShockMap::identity(static_cast<int>(N));
        if (jm.contains("shock")) {
            shocks = ShockMap::constant_shock(as_complex_matrix(
                jm["shock"], static_cast<int>(N), static_cast<int>(N), path + ".shock"));
        } else if (jm.contains("shocks")) {
            const json& js = jm["shocks"];
            if (!js.is_array() || js.empty()) fail(path + ".shocks", "expected a non-empty array");
            std::vector<std::vector<Matrix>> table(K, std::vector<Matrix>(K));
            for (std::size_t e = 0; e < js.size(); ++e) {
                const std::string epath = path + ".shocks[" + std::to_string(e) + "]";
                reject_unknown_keys(js[e], {"from", "to", "matrix"}, epath);
                const long from = as_long(require(js[e], "from", epath), epath + ".from");
                const long to = as_long(require(js[e], "to", epath), epath + ".to");
                if (from < 1 || from > K) fail(epath + ".from", "state index out of range (1-based)");
                if (to < 1 || to > K) fail(epath + ".to", "state index out of range (1-based)");
                if (table[from - 1][to - 1].size() != 0)
                    fail(epath, "duplicate shock for transition " + std::to_string(from) +
                                    " -> " + std::to_string(to));
                table[from - 1][to - 1] = as_complex_matrix(
                    require(js[e], "matrix", epath), static_cast<int>(N), static_cast<int>(N),
                    epath + ".matrix");
            }
            shocks = ShockMap::transition_table(std::move(table));
        }

        QuantumModel model;
        model.N = static_cast<int>(N);
        model.hbar = hbar;
        model.chain = build_chain(lambda, Q);
        model.hamiltonians = std::move(hams);
        model.shocks = std::move(shocks);
        return model;
    }
    fail(path + ".name", "unknown model \"" + name +
                             "\" (expected goldstein, poisson-swap, or explicit)");
}

json model_echo_of(const json& jm, const QuantumModel& model) {
    json echo = jm;
    // Resolve defaults so the summary is self-describing.
    echo["hbar"] = model.hbar;
    echo["N"] = model.N;
    echo["K"] = model.chain.K;
    return echo;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) fail("<root>", "expected a JSON object");
    reject_unknown_keys(j, {"model", "initial", "run", "outputs"}, "<root>");

    ExperimentConfig cfg;
    const json& jm = require(j, "model", "<root>");
    cfg.model = parse_model(jm);
    validate_model(cfg.model);
    cfg.model_echo = model_echo_of(jm, cfg.model);
    const int K = cfg.model.chain.K;
    const int N = cfg.model.N;

    // --- initial ---
    const json& ji = require(j, "initial", "<root>");
    reject_unknown_keys(ji, {"rho0", "psi0", "distribution"}, "initial");
    if (ji.contains("rho0") == ji.contains("psi0"))
        fail("initial", "give exactly one of \"rho0\" or \"psi0\"");
    if (ji.contains("psi0")) {
        const json& jp = ji["psi0"];
        if (!jp.is_array() || static_cast<int>(jp.size()) != N)
            fail("initial.psi0", "expected " + std::to_string(N) + " [re, im] amplitudes");
        Vector psi(N);
        for (int i = 0; i < N; ++i)
            psi(i) = as_complex(jp[i], "initial.psi0[" + std::to_string(i) + "]");
        if (std::abs(psi.norm() - 1.0) > tol::kDensity)
            fail("initial.psi0", "state vector must be normalized (|norm - 1| = " +
                                     std::to_string(std::abs(psi.norm() - 1.0)) + ")");
        cfg.rho0.assign(K, psi * psi.adjoint());
    } else {
        const json& jr = ji["rho0"];
        if (!jr.is_array() || jr.empty()) fail("initial.rho0", "expected an array");
        // Either one flat matrix shared by all start states, or one per state.
        const bool per_state = jr[0].is_array() && !jr[0].empty() && jr[0][0].is_array();
        if (per_state) {
            if (static_cast<int>(jr.size()) != K)
                fail("initial.rho0", "expected one density matrix per environment state (" +
                                         std::to_string(K) + ")");
            for (int k = 0; k < K; ++k)
                cfg.rho0.push_back(as_complex_matrix(jr[k], N, N,
                                                     "initial.rho0[" + std::to_string(k) + "]"));
        } else {
            cfg.rho0.assign(K, as_complex_matrix(jr, N, N, "initial.rho0"));
        }
        for (int k = 0; k < K; ++k)
            if (!is_density(cfg.rho0[k], tol::kDensity))
                fail("initial.rho0", "matrix for start state " + std::to_string(k + 1) +
                                         " is not a density matrix (Hermitian, unit trace, "
                                         "positive semidefinite)");
    }

    if (ji.contains("distribution")) {
        cfg.initial_dist = as_real_vector(ji["distribution"], "initial.distribution");
        if (cfg.initial_dist.size() != K)
            fail("initial.distribution", "expected " + std::to_string(K) + " weights");
        double sum = 0.0;
        for (int k = 0; k < K; ++k) {
            if (cfg.initial_dist(k) < 0.0)
                fail("initial.distribution", "weights must be non-negative");
            sum += cfg.initial_dist(k);
        }
        if (std::abs(sum - 1.0) > 1e-9)
            fail("initial.distribution", "weights must sum to 1 (got " + std::to_string(sum) + ")");
    } else {
        cfg.initial_dist = RealVector::Constant(K, 1.0 / K);
    }

    // --- run ---
    const json& jrun = require(j, "run", "<root>");
    reject_unknown_keys(jrun, {"grid", "n_samples", "seed", "observables", "s_values",
                               "quad_steps"}, "run");
    const json& jg = require(jrun, "grid", "run");
    reject_unknown_keys(jg, {"start", "stop", "steps"}, "run.grid");
    cfg.grid_start = as_double(require(jg, "start", "run.grid"), "run.grid.start");
    cfg.grid_stop = as_double(require(jg, "stop", "run.grid"), "run.grid.stop");
    const long steps = as_long(require(jg, "steps", "run.grid"), "run.grid.steps");
    if (!(cfg.grid_start >= 0.0)) fail("run.grid.start", "start time must be >= 0");
    if (!(cfg.grid_stop >= cfg.grid_start)) fail("run.grid.stop", "stop must be >= start");
    if (steps < 1 || steps > 2'000'000) fail("run.grid.steps", "steps must be in [1, 2000000]");
    if (steps == 1 && cfg.grid_stop != cfg.grid_start)
        fail("run.grid.steps", "a single-point grid requires stop == start");
    cfg.grid_steps = static_cast<int>(steps);
    cfg.grid.resize(cfg.grid_steps);
    for (int i = 0; i < cfg.grid_steps; ++i)
        cfg.grid[i] = cfg.grid_steps == 1
                          ? cfg.grid_start
                          : cfg.grid_start + (cfg.grid_stop - cfg.grid_start) *
                                                 static_cast<double>(i) /
                                                 static_cast<double>(cfg.grid_steps - 1);
    if (cfg.grid_steps > 1) cfg.grid.back() = cfg.grid_stop;  // exact endpoint

    if (jrun.contains("n_samples")) {
        cfg.n_samples = as_long(jrun["n_samples"], "run.n_samples");
        if (cfg.n_samples < 1) fail("run.n_samples", "need at least one sample");
    }
    if (jrun.contains("seed")) cfg.seed = as_u64(jrun["seed"], "run.seed");
    if (jrun.contains("quad_steps")) {
        const long q = as_long(jrun["quad_steps"], "run.quad_steps");
        if (q < 1 || q > 1'000'000) fail("run.quad_steps", "quad_steps must be in [1, 1000000]");
        cfg.quad_steps = static_cast<int>(q);
    }

    if (jrun.contains("observables")) {
        const json& jo = jrun["observables"];
        if (!jo.is_object()) fail("run.observables", "expected an object of name -> matrix");
        for (auto it = jo.begin(); it != jo.end(); ++it) {  // name-sorted iteration
            const std::string opath = "run.observables." + it.key();
            Matrix A = as_complex_matrix(it.value(), N, N, opath);
            if (!is_hermitian(A, tol::kHermitian)) fail(opath, "observable must be Hermitian");
            cfg.observables.emplace_back(it.key(), std::move(A));
        }
    }

    if (jrun.contains("s_values")) {
        const json& js = jrun["s_values"];
        if (!js.is_array() || js.empty())
            fail("run.s_values", "expected a non-empty array of [re, im] points");
        for (std::size_t i = 0; i < js.size(); ++i) {
            Complex s = as_complex(js[i], "run.s_values[" + std::to_string(i) + "]");
            if (!(s.real() > 0.0))
                fail("run.s_values[" + std::to_string(i) + "]",
                     "Laplace points need Re(s) > 0");
            cfg.s_values.push_back(s);
        }
    } else {
        cfg.s_values = {Complex(0.5, 0.0), Complex(1.0, 0.0), Complex(2.0, 1.0)};
    }

    // --- outputs ---
    if (j.contains("outputs")) {
        const json& jo = j["outputs"];
        reject_unknown_keys(jo, {"directory"}, "outputs");
        if (jo.contains("directory")) {
            if (!jo["directory"].is_string()) fail("outputs.directory", "expected a string");
            cfg.out_dir = jo["directory"].get<std::string>();
            if (cfg.out_dir.empty()) fail("outputs.directory", "must not be empty");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("config: cannot open file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("config: " + path + ": invalid JSON: " + e.what());
    }
    return parse_config(j);
}

}  // namespace qmarkov
