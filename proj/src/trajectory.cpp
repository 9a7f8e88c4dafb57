#include "qmarkov/trajectory.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <sstream>

#include "qmarkov/errors.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

const Matrix& ShockMap::operator()(int from, int to) const {
    if (constant) return *constant;
    if (from < 0 || to < 0 || from >= static_cast<int>(per_transition.size()) ||
        to >= static_cast<int>(per_transition[from].size()) ||
        per_transition[from][to].size() == 0) {
        std::ostringstream msg;
        msg << "ShockMap: no shock configured for transition " << from + 1 << " -> "
            << to + 1;
        throw ValidationError(msg.str());
    }
    return per_transition[from][to];
}

bool ShockMap::is_identity(int N) const {
    auto is_id = [N](const Matrix& M) {
        return (M - Matrix::Identity(N, N)).norm() == 0.0;
    };
    if (constant) return is_id(*constant);
    for (const auto& row : per_transition)
        for (const auto& M : row)
            if (M.size() != 0 && !is_id(M)) return false;
    return true;
}

ShockMap ShockMap::identity(int N) {
    ShockMap map;
    map.constant = Matrix::Identity(N, N);
    return map;
}

ShockMap ShockMap::constant_shock(const Matrix& V) {
    ShockMap map;
    map.constant = V;
    return map;
}

ShockMap ShockMap::transition_table(std::vector<std::vector<Matrix>> table) {
    ShockMap map;
    map.per_transition = std::move(table);
    return map;
}

void validate_model(const QuantumModel& model) {
    if (model.N < 1) throw ValidationError("model: dimension N must be >= 1");
    if (model.hbar <= 0.0) throw ValidationError("model: hbar must be positive");
    if (static_cast<int>(model.hamiltonians.size()) != model.chain.K) {
        std::ostringstream msg;
        msg << "model: " << model.hamiltonians.size() << " Hamiltonians for "
            << model.chain.K << " environment states";
        throw ValidationError(msg.str());
    }
    for (int k = 0; k < model.chain.K; ++k) {
        const Matrix& H = model.hamiltonians[k];
        if (H.rows() != model.N || H.cols() != model.N) {
            throw ValidationError("model: Hamiltonian " + std::to_string(k + 1) +
                                  " has wrong shape");
        }
        if (!is_hermitian(H, tol::kHermitian)) {
            std::ostringstream msg;
            msg << "model: Hamiltonian " << k + 1 << " is not Hermitian, defect = "
                << hermiticity_defect(H);
            throw ValidationError(msg.str());
        }
    }
    auto check_unitary = [&](const Matrix& V, const std::string& label) {
        if (V.rows() != model.N || V.cols() != model.N) {
            throw ValidationError("model: shock " + label + " has wrong shape");
        }
        if (!is_unitary(V, tol::kUnitary)) {
            std::ostringstream msg;
            msg << "model: shock " << label << " is not unitary, defect = "
                << unitarity_defect(V);
            throw ValidationError(msg.str());
        }
    };
    if (model.shocks.constant) {
        check_unitary(*model.shocks.constant, "V");
    } else {
        if (static_cast<int>(model.shocks.per_transition.size()) != model.chain.K) {
            throw ValidationError("model: per-transition shock table has wrong size");
        }
        for (int from = 0; from < model.chain.K; ++from) {
            if (static_cast<int>(model.shocks.per_transition[from].size()) !=
                model.chain.K) {
                throw ValidationError("model: per-transition shock table row " +
                                      std::to_string(from + 1) + " has wrong size");
            }
            for (int to = 0; to < model.chain.K; ++to) {
                const Matrix& V = model.shocks.per_transition[from][to];
                const bool reachable = !model.chain.absorbing[from] &&
                                       model.chain.lambda(from) * model.chain.Q(from, to) > 0.0;
                if (V.size() == 0) {
                    // Unused transitions may stay empty, reachable ones may not.
                    if (reachable) {
                        throw ValidationError(
                            "model: transition " + std::to_string(from + 1) + " -> " +
                            std::to_string(to + 1) +
                            " has positive rate but no shock configured");
                    }
                    continue;
                }
                check_unitary(V, std::to_string(from + 1) + "->" + std::to_string(to + 1));
            }
        }
    }
}

Vector apply_jump(const QuantumModel& model, int from, int to, const Vector& psi) {
    return model.shocks(from, to) * psi;
}

Matrix apply_jump(const QuantumModel& model, int from, int to, const Matrix& rho) {
    const Matrix& M = model.shocks(from, to);
    return M * rho * M.adjoint();
}

namespace {

// Per-call propagator cache keyed by (state, bit pattern of dt). Recomputing
// is deterministic, so the cache cannot change results — only skip work.
class PropagatorCache {
public:
    PropagatorCache(const QuantumModel& model, bool enabled)
        : model_(model), enabled_(enabled) {}

    const Matrix& get(int state, double dt) {
        if (!enabled_) {
            scratch_ = unitary_propagator(model_.hamiltonians[state], dt, model_.hbar);
            return scratch_;
        }
        std::uint64_t bits;
        std::memcpy(&bits, &dt, sizeof(bits));
        auto key = std::make_pair(state, bits);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_
                     .emplace(key, unitary_propagator(model_.hamiltonians[state], dt,
                                                      model_.hbar))
                     .first;
        }
        return it->second;
    }

private:
    const QuantumModel& model_;
    bool enabled_;
    std::map<std::pair<int, std::uint64_t>, Matrix> cache_;
    Matrix scratch_;
};

void check_grid(const EnvTrajectory& traj, const std::vector<double>& grid) {
    double prev = -1.0;
    for (double t : grid) {
        if (t < 0.0 || t > traj.horizon) {
            std::ostringstream msg;
            msg << "evolve: grid time " << t << " outside [0, " << traj.horizon << "]";
            throw ValidationError(msg.str());
        }
        if (t <= prev) throw ValidationError("evolve: grid times must be increasing");
        prev = t;
    }
}

// Shared walk over events and grid times. `advance` moves the carried value
// by dt under the current state's Hamiltonian; `shock` applies the jump.
template <typename ValueT, typename Advance, typename Shock>
PathSolution<ValueT> evolve_impl(const EnvTrajectory& traj, ValueT value,
                                 const std::vector<double>& grid, Advance&& advance,
                                 Shock&& shock) {
    check_grid(traj, grid);
    PathSolution<ValueT> out;
    out.grid = grid;
    out.values.reserve(grid.size());
    out.trajectory = traj;

    int state = traj.initial_state;
    double now = 0.0;
    std::size_t next_event = 0;
    for (double t : grid) {
        // Events at times <= t happen first (post-shock value at coincidence).
        while (next_event < traj.events.size() && traj.events[next_event].time <= t) {
            const auto& ev = traj.events[next_event];
            advance(value, state, ev.time - now);
            shock(value, state, ev.state);
            state = ev.state;
            now = ev.time;
            ++next_event;
        }
        advance(value, state, t - now);
        now = t;
        out.values.push_back(value);
    }
    return out;
}

}  // namespace

StatePath evolve_state(const QuantumModel& model, const EnvTrajectory& traj,
                       const Vector& psi0, const std::vector<double>& grid,
                       bool use_cache) {
    validate_model(model);
    if (psi0.size() != model.N) throw ValidationError("evolve_state: psi0 wrong length");
    if (std::abs(psi0.norm() - 1.0) > tol::kHermitian) {
        throw ValidationError("evolve_state: psi0 is not normalized");
    }
    PropagatorCache cache(model, use_cache);
    return evolve_impl<Vector>(
        traj, psi0, grid,
        [&](Vector& psi, int state, double dt) {
            if (dt != 0.0) psi = cache.get(state, dt) * psi;
        },
        [&](Vector& psi, int from, int to) { psi = apply_jump(model, from, to, psi); });
}

DensityPath evolve_density(const QuantumModel& model, const EnvTrajectory& traj,
                           const Matrix& rho0, const std::vector<double>& grid,
                           bool use_cache) {
    validate_model(model);
    if (rho0.rows() != model.N || rho0.cols() != model.N) {
        throw ValidationError("evolve_density: rho0 wrong shape");
    }
    if (!is_density(rho0, tol::kDensity)) {
        throw ValidationError("evolve_density: rho0 is not a density matrix");
    }
    PropagatorCache cache(model, use_cache);
    return evolve_impl<Matrix>(
        traj, rho0, grid,
        [&](Matrix& rho, int state, double dt) {
            if (dt != 0.0) {
                const Matrix& U = cache.get(state, dt);
                rho = U * rho * U.adjoint();
            }
        },
        [&](Matrix& rho, int from, int to) { rho = apply_jump(model, from, to, rho); });
}

}  // namespace qmarkov
