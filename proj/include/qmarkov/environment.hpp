#pragma once

#include <functional>
#include <vector>

#include "qmarkov/linalg.hpp"
#include "qmarkov/rng.hpp"

namespace qmarkov {

// Continuous-time Markov environment on states {0, ..., K-1}: per-state jump
// rates lambda_i and jump distribution Q(i,j). Self-jumps Q(i,i) > 0 are
// legal: they trigger shocks on the quantum system without moving the
// environment's marginal state.
struct EnvironmentChain {
    int K = 0;
    RealVector lambda;            // lambda_i >= 0
    RealMatrix Q;                 // rows sum to 1 where lambda_i > 0
    std::vector<bool> absorbing;  // lambda_i == 0 (Q row ignored)

    // Marginal generator q(i,j) = lambda_i Q(i,j) - lambda_i delta_ij.
    // Self-jumps cancel on the diagonal, so this already describes the law of
    // the visible state.
    RealMatrix generator() const;
};

struct EnvTrajectory {
    struct Event {
        double time;  // in (0, horizon]
        int state;    // post-jump state
    };
    int initial_state = 0;
    double horizon = 0.0;
    std::vector<Event> events;  // strictly increasing times

    // Right-continuous piecewise-constant lookup.
    int state_at(double t) const;
};

EnvironmentChain build_chain(const RealVector& lambda, const RealMatrix& Q);

EnvTrajectory sample_trajectory(const EnvironmentChain& chain, int initial_state,
                                double horizon, RngStream& stream);

// P_t = exp(t q); rows sum to 1.
RealMatrix transition_matrix(const EnvironmentChain& chain, double t);

// v(i, t) = E^i[h(xi(t))] = (exp(t q) h)(i).
RealVector backward_expectation(const EnvironmentChain& chain, const RealVector& h,
                                double t);

// First-jump decomposition evaluated by composite-trapezoid quadrature:
//   v(i,t) = h(i) e^{-lambda_i t}
//          + lambda_i sum_j Q(i,j) int_0^t e^{-lambda_i (t-s)} v(j,s) ds,
// with v(j,s) supplied by backward_expectation. The sum runs over all j,
// self-jumps included — for a pulse chain (Q(i,i) = 1) the jump terms must
// resum to keep v constant, which a sum excluding j = i cannot do. This is a
// verification oracle, not a production solver.
RealVector renewal_expectation(const EnvironmentChain& chain, const RealVector& h,
                               double t, int quad_steps);

}  // namespace qmarkov
