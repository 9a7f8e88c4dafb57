#include "qmarkov/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmarkov/errors.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

RealMatrix EnvironmentChain::generator() const {
    RealMatrix q = RealMatrix::Zero(K, K);
    for (int i = 0; i < K; ++i) {
        if (absorbing[i]) continue;
        for (int j = 0; j < K; ++j) q(i, j) = lambda(i) * Q(i, j);
        q(i, i) -= lambda(i);
    }
    return q;
}

int EnvTrajectory::state_at(double t) const {
    int state = initial_state;
    for (const Event& ev : events) {
        if (ev.time > t) break;
        state = ev.state;
    }
    return state;
}

EnvironmentChain build_chain(const RealVector& lambda, const RealMatrix& Q) {
    const int K = static_cast<int>(lambda.size());
    if (K < 1) throw ValidationError("build_chain: at least one state required");
    if (Q.rows() != K || Q.cols() != K) {
        std::ostringstream msg;
        msg << "build_chain: Q must be " << K << "x" << K << ", got " << Q.rows()
            << "x" << Q.cols();
        throw ValidationError(msg.str());
    }
    EnvironmentChain chain;
    chain.K = K;
    chain.lambda = lambda;
    chain.Q = Q;
    chain.absorbing.resize(K, false);
    for (int i = 0; i < K; ++i) {
        if (!std::isfinite(lambda(i))) {
            throw ValidationError("build_chain: rate is not finite at state " +
                                  std::to_string(i + 1));
        }
        if (lambda(i) < 0.0) {
            throw ValidationError("build_chain: negative rate at state " +
                                  std::to_string(i + 1));
        }
        if (lambda(i) == 0.0) {
            chain.absorbing[i] = true;  // Q row ignored for absorbing states
            continue;
        }
        double row_sum = 0.0;
        for (int j = 0; j < K; ++j) {
            if (!std::isfinite(Q(i, j))) {
                throw ValidationError("build_chain: Q entry not finite in row " +
                                      std::to_string(i + 1));
            }
            if (Q(i, j) < 0.0) {
                std::ostringstream msg;
                msg << "build_chain: negative Q(" << i + 1 << "," << j + 1
                    << ") = " << Q(i, j);
                throw ValidationError(msg.str());
            }
            row_sum += Q(i, j);
        }
        if (std::abs(row_sum - 1.0) > tol::kRowSum) {
            std::ostringstream msg;
            msg << "build_chain: Q row " << i + 1 << " sums to " << row_sum
                << ", expected 1";
            throw ValidationError(msg.str());
        }
    }
    return chain;
}

EnvTrajectory sample_trajectory(const EnvironmentChain& chain, int initial_state,
                                double horizon, RngStream& stream) {
    if (initial_state < 0 || initial_state >= chain.K) {
        throw ValidationError("sample_trajectory: initial state out of range");
    }
    if (horizon < 0.0) throw ValidationError("sample_trajectory: negative horizon");

    EnvTrajectory traj;
    traj.initial_state = initial_state;
    traj.horizon = horizon;

    int state = initial_state;
    double t = 0.0;
    while (!chain.absorbing[state]) {
        t += stream.exponential(chain.lambda(state));
        if (t > horizon) break;
        Eigen::RowVectorXd row = chain.Q.row(state);  // contiguous copy
        int next = stream.categorical(row.data(), chain.K);
        traj.events.push_back({t, next});
        state = next;
    }
    return traj;
}

RealMatrix transition_matrix(const EnvironmentChain& chain, double t) {
    if (t < 0.0) throw ValidationError("transition_matrix: negative time");
    return real_matrix_exp(chain.generator(), t);
}

RealVector backward_expectation(const EnvironmentChain& chain, const RealVector& h,
                                double t) {
    if (h.size() != chain.K) {
        throw ValidationError("backward_expectation: h has wrong length");
    }
    return transition_matrix(chain, t) * h;
}

RealVector renewal_expectation(const EnvironmentChain& chain, const RealVector& h,
                               double t, int quad_steps) {
    if (t < 0.0) throw ValidationError("renewal_expectation: negative time");
    if (quad_steps < 2) throw ValidationError("renewal_expectation: quad_steps < 2");
    if (h.size() != chain.K) {
        throw ValidationError("renewal_expectation: h has wrong length");
    }
    const int K = chain.K;
    if (t == 0.0) return h;

    // Tabulate v(j, s) = (e^{s q} h)(j) on the quadrature grid by stepping the
    // semigroup: one matrix exponential for the step, then repeated products.
    const double ds = t / quad_steps;
    RealMatrix P_step = real_matrix_exp(chain.generator(), ds);
    std::vector<RealVector> v(quad_steps + 1);
    v[0] = h;
    for (int m = 1; m <= quad_steps; ++m) v[m] = P_step * v[m - 1];

    RealVector out(K);
    for (int i = 0; i < K; ++i) {
        if (chain.absorbing[i]) {
            out(i) = h(i);  // no jumps ever leave i
            continue;
        }
        const double li = chain.lambda(i);
        double integral_weighted = 0.0;
        for (int m = 0; m <= quad_steps; ++m) {
            double s = m * ds;
            double coupled = 0.0;
            for (int j = 0; j < K; ++j) coupled += chain.Q(i, j) * v[m](j);
            double w = (m == 0 || m == quad_steps) ? 0.5 : 1.0;
            integral_weighted += w * std::exp(-li * (t - s)) * coupled;
        }
        out(i) = h(i) * std::exp(-li * t) + li * ds * integral_weighted;
    }
    return out;
}

}  // namespace qmarkov
