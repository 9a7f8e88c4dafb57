#pragma once

#include <optional>
#include <vector>

#include "qmarkov/environment.hpp"
#include "qmarkov/linalg.hpp"

namespace qmarkov {

// Quantum system switched by the environment: one Hermitian Hamiltonian per
// environment state, plus unitary shocks applied at jump instants. Shocks are
// keyed (from, to) and applied as M(to, from) * psi; the default is a single
// constant V, and the default V is the identity (no shock).
struct ShockMap {
    // Either a constant shock, or one unitary per ordered transition.
    std::optional<Matrix> constant;                 // set when state-independent
    std::vector<std::vector<Matrix>> per_transition;  // [from][to] when not

    const Matrix& operator()(int from, int to) const;
    bool is_identity(int N) const;

    static ShockMap identity(int N);
    static ShockMap constant_shock(const Matrix& V);
    static ShockMap transition_table(std::vector<std::vector<Matrix>> table);
};

struct QuantumModel {
    int N = 0;            // system dimension
    double hbar = 1.0;
    EnvironmentChain chain;
    std::vector<Matrix> hamiltonians;  // K Hermitian N x N matrices
    ShockMap shocks;
};

// Throws ValidationError on any structural violation.
void validate_model(const QuantumModel& model);

// One sampled path of the quantum system along a fixed environment
// trajectory, reported at the requested grid times.
template <typename ValueT>
struct PathSolution {
    std::vector<double> grid;
    std::vector<ValueT> values;
    EnvTrajectory trajectory;
};

using StatePath = PathSolution<Vector>;
using DensityPath = PathSolution<Matrix>;

// Shock application at a jump from `from` to `to`.
Vector apply_jump(const QuantumModel& model, int from, int to, const Vector& psi);
Matrix apply_jump(const QuantumModel& model, int from, int to, const Matrix& rho);

// Piecewise-unitary propagation with shocks at jump instants. Values at grid
// times are obtained by propagating exactly to each grid time; jump times are
// never rounded to the grid. When a grid time coincides with a jump time the
// reported value is the post-shock one (paths are right-continuous).
// `use_cache` toggles the per-call (state, dt) propagator cache; results are
// bit-identical either way.
StatePath evolve_state(const QuantumModel& model, const EnvTrajectory& traj,
                       const Vector& psi0, const std::vector<double>& grid,
                       bool use_cache = true);
DensityPath evolve_density(const QuantumModel& model, const EnvTrajectory& traj,
                           const Matrix& rho0, const std::vector<double>& grid,
                           bool use_cache = true);

}  // namespace qmarkov
