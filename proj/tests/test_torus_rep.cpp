#include "khom/error.hpp"
#include "khom/torus_rep.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace khom;

namespace {

Complex phase(double turns) { return std::polar(1.0, 2.0 * std::numbers::pi * turns); }

NCPolynomial random_poly(int degree) {
    NCPolynomial p;
    std::normal_distribution<double> normal;
    for (int m = -degree; m <= degree; ++m)
        for (int n = -degree; n <= degree; ++n)
            if (khom::testing::uniform(0, 2) == 0)
                p.add_term(m, n, Complex(normal(khom::testing::rng()), normal(khom::testing::rng())));
    return p;
}

CMatrix evaluate(const ClockShiftRep& rep, const NCPolynomial& p) {
    PolyEvaluator ev(to_sparse(rep.U), to_sparse(rep.V));
    return to_dense(ev.evaluate(p));
}

}  // namespace

TEST_CASE("clock_shift(1, 2) matrices") {
    const ClockShiftRep rep = clock_shift(1, 2);
    CMatrix U(2, 2), V(2, 2);
    U << 0, 1, 1, 0;
    V << 1, 0, 0, -1;
    CHECK((rep.U - U).norm() == 0.0);
    CHECK((rep.V - V).norm() < 1e-15);
    CHECK(rep.relation_defect() <= 1e-12);
}

TEST_CASE("clock_shift rejects non-coprime pairs") {
    try {
        clock_shift(2, 4);
        FAIL("expected NotCoprime");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotCoprime);
    }
}

TEST_CASE("clock_shift relation and unitarity for q <= 50") {
    for (long q = 1; q <= 50; ++q)
        for (long m = 0; m < q; ++m) {
            if (std::gcd(m, q) != 1) continue;
            const ClockShiftRep rep = clock_shift(m, q);
            CHECK(rep.relation_defect() <= 1e-12);
            CHECK(rep.unitarity_defect() <= 1e-12);
        }
}

TEST_CASE("clock_shift multiplicity amplifies") {
    const ClockShiftRep rep = clock_shift(1, 3, 2);
    CHECK(rep.dimension() == 6);
    CHECK(rep.relation_defect() <= 1e-12);
}

TEST_CASE("truncated rep V carries lambda^k on the diagonal") {
    const Theta theta = Theta::rational(1, 3);
    const TruncatedZRep rep = truncated_rep(theta, 2, ShiftVariant::z1);
    const CMatrix V = to_dense(rep.V);
    for (long k = -2; k <= 2; ++k) CHECK(std::abs(V(k + 2, k + 2) - phase(static_cast<double>(k) / 3.0)) < 1e-14);
    CHECK(rep.boundary_defective == "U");
    // U e_k = e_{k+1}, last column zero
    const CMatrix U = to_dense(rep.U);
    CHECK(U(rep.index_of(1), rep.index_of(0)) == Complex(1.0));
    CHECK(U.col(rep.index_of(2)).norm() == 0.0);
}

TEST_CASE("truncated rep: interior relation for both variants") {
    for (double t : {0.0, 0.2, 0.6180339887498949, 1.0 / 3.0})
        for (auto variant : {ShiftVariant::z1, ShiftVariant::z1prime})
            for (int N : {2, 8, 33, 64})
                for (int d : {1, 2}) {
                    const TruncatedZRep rep = truncated_rep(Theta(t), N, variant, d);
                    CHECK(rep.interior_relation_defect() <= 1e-12);
                }
}

TEST_CASE("z1prime puts the shift on V") {
    const TruncatedZRep rep = truncated_rep(Theta(0.3), 3, ShiftVariant::z1prime);
    CHECK(rep.boundary_defective == "V");
    CHECK(to_dense(rep.V)(rep.index_of(1), rep.index_of(0)) == Complex(1.0));
    CHECK(std::abs(to_dense(rep.U)(rep.index_of(2), rep.index_of(2)) - phase(-0.6)) < 1e-14);
}

TEST_CASE("variant names") {
    CHECK(parse_variant("z1") == ShiftVariant::z1);
    CHECK(parse_variant("z1'") == ShiftVariant::z1prime);
    CHECK(parse_variant("z1prime") == ShiftVariant::z1prime);
    CHECK_THROWS_AS(parse_variant("z2"), Error);
}

TEST_CASE("l2(Z^2) data") {
    const Theta theta(0.3);
    const TruncatedZ2Rep rep = dirac_data(theta, 3);
    CHECK(rep.F0_at(0, 0) == Complex(1.0));
    CHECK(rep.F0_at(1, 0) == Complex(1.0));
    CHECK(std::abs(rep.F0_at(0, 1) - Complex(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(rep.F0_at(1, 1) - Complex(1.0, 1.0) / std::sqrt(2.0)) < 1e-15);
    for (Eigen::Index i = 0; i < rep.F0.size(); ++i) CHECK(std::abs(std::abs(rep.F0(i)) - 1.0) < 1e-15);
    // <e_{1,1}, V e_{1,0}> = lambda
    const CMatrix V = to_dense(rep.V);
    CHECK(std::abs(V(rep.index_of(1, 1), rep.index_of(1, 0)) - theta.lambda()) < 1e-15);
    CHECK(rep.interior_relation_defect() <= 1e-12);
    CHECK(dirac_data(Theta(0.61803398875), 64).interior_relation_defect() <= 1e-12);
}

TEST_CASE("rotation algebra products and adjoints") {
    const Theta theta(0.37);
    const RotationAlgebra A(theta);
    // V U = lambda U V
    const NCPolynomial VU = A.multiply(NCPolynomial::V(), NCPolynomial::U());
    CHECK(std::abs(VU.coefficient(1, 1) - theta.lambda()) < 1e-15);
    // (U V)* = lambda V* U*... in normal form lambda^{1} U^{-1} V^{-1}
    const NCPolynomial adj = A.adjoint(NCPolynomial::monomial(1, 1));
    CHECK(std::abs(adj.coefficient(-1, -1) - theta.lambda()) < 1e-15);
    CHECK(A.trace(NCPolynomial::constant(2.5) + NCPolynomial::U()) == Complex(2.5));
}

TEST_CASE("algebra products agree with clock-shift matrices") {
    const ClockShiftRep rep = clock_shift(3, 7);
    const RotationAlgebra A(rep.theta);
    for (int i = 0; i < 20; ++i) {
        const NCPolynomial a = random_poly(2), b = random_poly(2);
        const CMatrix lhs = evaluate(rep, A.multiply(a, b));
        const CMatrix rhs = evaluate(rep, a) * evaluate(rep, b);
        CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        CHECK((evaluate(rep, A.adjoint(a)) - evaluate(rep, a).adjoint()).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }
}

TEST_CASE("commutator trace in clock_shift(1, 3)") {
    const ClockShiftRep rep = clock_shift(1, 3);
    const CMatrix c = rep.U * rep.V * rep.U.inverse() * rep.V.inverse();
    CHECK(std::abs(canonical_trace(c, RepKind::clock_shift) - std::conj(rep.theta.lambda())) < 1e-12);
}

TEST_CASE("trace property tau(ab) = tau(ba)") {
    for (auto [m, q] : {std::pair{1L, 3L}, {2L, 5L}, {5L, 12L}}) {
        const ClockShiftRep rep = clock_shift(m, q);
        for (int i = 0; i < 10; ++i) {
            const CMatrix a = evaluate(rep, random_poly(3)), b = evaluate(rep, random_poly(3));
            CHECK(std::abs(canonical_trace(a * b, RepKind::clock_shift) -
                           canonical_trace(b * a, RepKind::clock_shift)) <= 1e-10 * (1.0 + a.norm() * b.norm()));
        }
    }
}

TEST_CASE("canonical trace of polynomials and unsupported kinds") {
    NCPolynomial p = NCPolynomial::constant(0.25) + NCPolynomial::monomial(1, -2, 3.0);
    CHECK(canonical_trace(p) == Complex(0.25));
    // the normalized matrix trace agrees with a_00 in a faithful-enough rep
    const ClockShiftRep rep = clock_shift(1, 5);
    CHECK(std::abs(canonical_trace(evaluate(rep, p), RepKind::clock_shift) - 0.25) < 1e-12);
    CHECK_THROWS_AS(canonical_trace(CMatrix::Identity(2, 2), RepKind::truncated_z), Error);
}

TEST_CASE("lambda powers reduce exactly for rationals") {
    const Theta t = Theta::rational(2, 7);
    CHECK(std::abs(t.lambda_pow(7) - 1.0) < 1e-15);
    CHECK(std::abs(t.lambda_pow(-3) - t.lambda_pow(4)) < 1e-15);
    CHECK(std::abs(t.lambda_pow(1'000'000'007L) - t.lambda_pow(1'000'000'007L % 7)) < 1e-15);
    CHECK(t.to_string() == "2/7");
}

TEST_CASE("sign convention") {
    CHECK(sign_of(0) == 1);
    CHECK(sign_of(-1) == -1);
    CHECK(sign_of(5) == 1);
}
