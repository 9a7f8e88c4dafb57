#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qmarkov/errors.hpp"
#include "qmarkov/models.hpp"
#include "qmarkov/superop.hpp"
#include "qmarkov/tolerances.hpp"
#include "qmarkov/trajectory.hpp"

using namespace qmarkov;
using namespace std::complex_literals;

namespace {

Matrix sample_rho() {
    Matrix rho(2, 2);
    rho << Complex(0.7, 0.0), Complex(0.1, 0.2), Complex(0.1, -0.2), Complex(0.3, 0.0);
    return rho;
}

Matrix sample_general(int seedish) {
    Matrix m(2, 2);
    const double a = 0.1 * seedish;
    m << Complex(1.0 + a, -0.3), Complex(0.2, a), Complex(-0.7, 0.4 + a), Complex(0.0, 1.1);
    return m;
}

Matrix swap2() {
    Matrix v(2, 2);
    v << 0, 1, 1, 0;
    return v;
}

}  // namespace

TEST_CASE("vectorize uses column stacking: (r,c) -> c*N + r") {
    Matrix M(2, 2);
    M << 1, 2, 3, 4;  // rows (1,2) and (3,4)
    const Vector v = vectorize(M);
    REQUIRE(v.size() == 4);
    CHECK(v(0) == Complex(1, 0));  // (0,0)
    CHECK(v(1) == Complex(3, 0));  // (1,0): column-major
    CHECK(v(2) == Complex(2, 0));  // (0,1)
    CHECK(v(3) == Complex(4, 0));  // (1,1)
    CHECK((devectorize(v) - M).norm() == 0.0);
    CHECK_THROWS_AS(devectorize(Vector::Zero(3)), ValidationError);  // not a square
}

TEST_CASE("kronecker product has the textbook block layout") {
    Matrix A(2, 2), B(2, 2);
    A << 1, 2, 3, 4;
    B << 0, 5, 6, 7;
    const Matrix K = kronecker(A, B);
    REQUIRE(K.rows() == 4);
    // K = [[a11 B, a12 B], [a21 B, a22 B]]
    CHECK(K(0, 1) == Complex(5, 0));
    CHECK(K(0, 3) == Complex(10, 0));
    CHECK(K(3, 0) == Complex(18, 0));
    CHECK(K(3, 3) == Complex(28, 0));
}

TEST_CASE("vec(A rho B) = (B^T kron A) vec(rho)") {
    const Matrix A = sample_general(1), B = sample_general(2), rho = sample_general(3);
    const Vector lhs = vectorize(A * rho * B);
    const Vector rhs = kronecker(B.transpose(), A) * vectorize(rho);
    CHECK((lhs - rhs).norm() <= 1e-14);
}

TEST_CASE("commutator_superop acts as rho -> [H, rho]") {
    Matrix H(2, 2);
    H << Complex(0.5, 0.0), Complex(0.2, -0.4), Complex(0.2, 0.4), Complex(-1.0, 0.0);
    const Matrix S = commutator_superop(H);
    const Matrix rho = sample_rho();
    const Vector lhs = S * vectorize(rho);
    const Vector rhs = vectorize(H * rho - rho * H);
    CHECK((lhs - rhs).norm() <= 1e-14);
    CHECK_THROWS_AS(commutator_superop(sample_general(4)), ValidationError);
}

TEST_CASE("conjugation_superop acts as rho -> V rho V^dag") {
    const Matrix V = unitary_propagator(swap2() + Matrix::Identity(2, 2), 0.9, 1.0);
    const Matrix S = conjugation_superop(V);
    const Matrix rho = sample_rho();
    CHECK((S * vectorize(rho) - vectorize(V * rho * V.adjoint())).norm() <= 1e-14);
    CHECK_THROWS_AS(conjugation_superop(sample_general(5)), ValidationError);
}

TEST_CASE("block generator assembles the goldstein structure") {
    const QuantumModel model = goldstein_model(1.0, 0.5, 1.0);
    const BlockGenerator gen = block_generator(model);
    REQUIRE(gen.K == 2);
    REQUIRE(gen.N == 2);
    REQUIRE(gen.matrix.rows() == 8);
    CHECK_FALSE(gen.shocked);  // identity shocks

    const double lambda = 0.5;
    const Matrix L1 = Complex(0, -1) * commutator_superop(model.hamiltonians[0]);
    const Matrix L2 = Complex(0, -1) * commutator_superop(model.hamiltonians[1]);
    Matrix expected = Matrix::Zero(8, 8);
    expected.block(0, 0, 4, 4) = L1 - lambda * Matrix::Identity(4, 4);
    expected.block(4, 4, 4, 4) = L2 - lambda * Matrix::Identity(4, 4);
    expected.block(0, 4, 4, 4) = lambda * Matrix::Identity(4, 4);  // S_V = I
    expected.block(4, 0, 4, 4) = lambda * Matrix::Identity(4, 4);
    CHECK((gen.matrix - expected).norm() <= 1e-14);
}

TEST_CASE("goldstein quadratic identity: A^2 = ((1/i hbar) Hx)^2 - 2 lambda A") {
    const double lambda = 0.8;
    const QuantumModel model = goldstein_model(1.3, lambda, 1.0);
    const Matrix A = block_generator(model).matrix;
    // Stacked free Liouvillian (the same H^x up to sign in both blocks).
    Matrix L = Matrix::Zero(8, 8);
    L.block(0, 0, 4, 4) = Complex(0, -1) * commutator_superop(model.hamiltonians[0]);
    L.block(4, 4, 4, 4) = Complex(0, -1) * commutator_superop(model.hamiltonians[1]);
    CHECK((A * A - (L * L - 2.0 * lambda * A)).norm() <= 1e-12);
}

TEST_CASE("poisson-swap algebra: anticommutation and the quadratic identity") {
    const double lambda = 0.7;
    const QuantumModel model = poisson_swap_model(1.0, -1.0, lambda, 1.0);
    const Matrix Hx = commutator_superop(model.hamiltonians[0]);
    const Matrix S = conjugation_superop(swap2());

    // H^x S + S H^x = 0 exactly for H = diag(E1, E2) with E2 = -E1 and V = swap.
    CHECK((Hx * S + S * Hx).norm() <= 1e-14);
    // The operator product is NOT zero: the two do not annihilate each
    // other, only the anticommutator vanishes.
    CHECK((Hx * S).norm() > 1.0);

    // (S - I)^2 = 2 (I - S) for an involution.
    const Matrix I4 = Matrix::Identity(4, 4);
    CHECK(((S - I4) * (S - I4) - 2.0 * (I4 - S)).norm() <= 1e-14);

    // For the one-state model, A = L + lambda (S - I) obeys A^2 + 2 lambda A = L^2.
    const Matrix A = block_generator(model).matrix;
    const Matrix L = Complex(0, -1) * Hx;
    CHECK((A * A + 2.0 * lambda * A - L * L).norm() <= 1e-12);
}

TEST_CASE("per-transition shocks enter coupling blocks individually") {
    // Two-state chain where the 1->2 and 2->1 transitions carry different
    // shocks; check each lands in its own block with weight lambda_k Q(k,j).
    RealVector lambda(2);
    lambda << 0.5, 2.0;
    RealMatrix Q(2, 2);
    Q << 0.25, 0.75, 1.0, 0.0;
    Matrix H0(2, 2), H1(2, 2);
    H0 << 1, 0, 0, -1;
    H1 << 0, 1, 1, 0;
    const Matrix V12 = swap2();
    Matrix V11(2, 2), V21(2, 2);
    V11 << 1, 0, 0, Complex(std::cos(1.0), std::sin(1.0));   // phase shock (self-jump)
    V21 << Complex(0, 1), 0, 0, Complex(0, -1);

    std::vector<std::vector<Matrix>> table(2, std::vector<Matrix>(2));
    table[0][0] = V11;
    table[0][1] = V12;
    table[1][0] = V21;  // (2,2) unused: Q(1,1) = 0

    QuantumModel model;
    model.N = 2;
    model.hbar = 1.0;
    model.chain = build_chain(lambda, Q);
    model.hamiltonians = {H0, H1};
    model.shocks = ShockMap::transition_table(table);
    validate_model(model);

    const BlockGenerator gen = block_generator(model);
    CHECK(gen.shocked);
    const Matrix I4 = Matrix::Identity(4, 4);
    const Matrix L0 = Complex(0, -1) * commutator_superop(H0);
    const Matrix L1 = Complex(0, -1) * commutator_superop(H1);

    const Matrix b00 = gen.matrix.block(0, 0, 4, 4);
    const Matrix b01 = gen.matrix.block(0, 4, 4, 4);
    const Matrix b10 = gen.matrix.block(4, 0, 4, 4);
    const Matrix b11 = gen.matrix.block(4, 4, 4, 4);
    CHECK((b00 - (L0 + 0.5 * 0.25 * conjugation_superop(V11) - 0.5 * I4)).norm() <= 1e-14);
    CHECK((b01 - 0.5 * 0.75 * conjugation_superop(V12)).norm() <= 1e-14);
    CHECK((b10 - 2.0 * 1.0 * conjugation_superop(V21)).norm() <= 1e-14);
    CHECK((b11 - (L1 - 2.0 * I4)).norm() <= 1e-14);
}

TEST_CASE("stack and unstack round-trip") {
    const std::vector<Matrix> rhos = {sample_rho(), swap2() * sample_rho() * swap2()};
    const Vector stacked = stack_components(rhos);
    REQUIRE(stacked.size() == 8);
    const std::vector<Matrix> back = unstack_components(stacked, 2, 2);
    CHECK((back[0] - rhos[0]).norm() == 0.0);
    CHECK((back[1] - rhos[1]).norm() == 0.0);
    CHECK_THROWS_AS(unstack_components(stacked, 3, 2), ValidationError);
}
