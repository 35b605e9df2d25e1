#include "khom/error.hpp"
#include "khom/fredholm.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace khom;

namespace {

PolyMatrix U(int k = 1) { return PolyMatrix::scalar(NCPolynomial::U(k)); }
PolyMatrix V(int k = 1) { return PolyMatrix::scalar(NCPolynomial::V(k)); }

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::InvalidInput;
}

}  // namespace

TEST_CASE("z0 at theta = 0 pairs to 1 with [1]") {
    const auto m = z0_module();
    CHECK(m.invariants().holds());
    const auto r = even_pairing(m, PolyMatrix::identity(1));
    CHECK(r.value == 1);
    CHECK(r.method == PairingMethod::trace_formula);
}

TEST_CASE("z0' pairs to q with [1]") {
    for (auto [m, q] : {std::pair{2L, 7L}, {1L, 3L}, {5L, 12L}}) {
        const auto mod = z0prime_module(clock_shift(m, q));
        CHECK(mod.invariants().holds());
        CHECK(even_pairing(mod, PolyMatrix::identity(1)).value == q);
        // e = 1 + 1 in M_2
        CHECK(even_pairing(mod, PolyMatrix::identity(2)).value == 2 * q);
        // e = 0
        CHECK(even_pairing(mod, PolyMatrix::scalar(NCPolynomial())).value == 0);
    }
}

TEST_CASE("z0' pairs with the Rieffel projection to m") {
    const auto mod = z0prime_module(clock_shift(2, 7));
    CHECK(even_pairing(mod, RieffelProjection(2.0 / 7.0)).value == 2);
}

TEST_CASE("degenerate even module pairs to 0") {
    const auto mod = zero_even_module(3, Theta(0.25));
    CHECK(mod.invariants().holds());
    CHECK(even_pairing(mod, PolyMatrix::identity(1)).value == 0);
    const auto rep = compactness_report(mod, {"U", "V"});
    for (const auto& e : rep.entries) CHECK(e.rank == 0);
}

TEST_CASE("non-projections are rejected") {
    const auto mod = z0prime_module(clock_shift(1, 3));
    PolyMatrix e = PolyMatrix::scalar(NCPolynomial::constant(0.5));
    CHECK(code_of([&] { even_pairing(mod, e); }) == Errc::NotAProjection);
    CHECK(code_of([&] { even_pairing(mod, U()); }) == Errc::NotAProjection);
}

TEST_CASE("Rieffel class needs a finite-order representation") {
    const ClockShiftRep rep = clock_shift(1, 2);
    const auto mod = canonical_even("no-order", rep.theta, rep.U, rep.V);
    CHECK(code_of([&] { even_pairing(mod, RieffelProjection(0.5)); }) == Errc::UnsupportedForm);
    CHECK(even_pairing(canonical_even("order", rep.theta, rep.U, rep.V, 2), RieffelProjection(0.5)).value == 1);
}

TEST_CASE("odd table for z1 and z1'") {
    int sign = 0;
    for (double t : {0.0, 0.2, 0.6180339887498949}) {
        const auto z1 = canonical_odd(Theta(t), 12, ShiftVariant::z1);
        const auto z1p = canonical_odd(Theta(t), 12, ShiftVariant::z1prime);
        CHECK(z1.invariants().holds());
        const auto a = odd_pairing(z1, U()), b = odd_pairing(z1, V());
        const auto c = odd_pairing(z1p, U()), d = odd_pairing(z1p, V());
        CHECK(std::abs(a.value) == 1);
        CHECK(b.value == 0);
        CHECK(c.value == 0);
        CHECK(std::abs(d.value) == 1);
        if (sign == 0) sign = static_cast<int>(a.value);
        CHECK(a.value == sign);
        CHECK(d.value == sign);
        CHECK(a.stable);
        CHECK(a.method == PairingMethod::kernel_index);
        CHECK(a.N_check == 16);
    }
}

TEST_CASE("fiber dimension d gives magnitude d") {
    for (int d : {1, 2, 3}) {
        const auto r = odd_pairing(canonical_odd(Theta(0.3), 10, ShiftVariant::z1, d), U());
        CHECK(std::abs(r.value) == d);
        CHECK(r.kernel_dim + r.cokernel_dim == d);
    }
}

TEST_CASE("winding additivity") {
    const auto mod = canonical_odd(Theta(0.41), 12, ShiftVariant::z1);
    const long unit = odd_pairing(mod, U()).value;
    for (int k = -3; k <= 3; ++k) CHECK(odd_pairing(mod, U(k)).value == k * unit);
}

TEST_CASE("direct sums add") {
    const auto mod = canonical_odd(Theta(0.2), 12, ShiftVariant::z1);
    const long a = odd_pairing(mod, U(2)).value, b = odd_pairing(mod, U(-1)).value;
    const PolyMatrix sum = PolyMatrix::block_diagonal({NCPolynomial::U(2), NCPolynomial::U(-1)});
    CHECK(odd_pairing(mod, sum).value == a + b);
}

TEST_CASE("non-unitaries are rejected") {
    const auto mod = canonical_odd(Theta(0.2), 8, ShiftVariant::z1);
    CHECK(code_of([&] { odd_pairing(mod, PolyMatrix::scalar(NCPolynomial::U() + NCPolynomial::V())); }) ==
          Errc::NotUnitary);
}

TEST_CASE("pairing is stable in N") {
    for (int N = 8; N <= 32; N += 4) {
        const auto r = odd_pairing(canonical_odd(Theta(0.7), N, ShiftVariant::z1prime), V());
        CHECK(r.stable);
        CHECK(r.value == r.value_check);
        CHECK(std::abs(r.value) == 1);
    }
}

TEST_CASE("compactness of commutators") {
    const auto mod = canonical_odd(Theta(0.3), 10, ShiftVariant::z1);
    const auto rep = compactness_report(mod, {"U", "V"});
    REQUIRE(rep.entries.size() == 2);
    CHECK(rep.entries[0].generator == "U");
    CHECK(rep.entries[0].rank == 1);
    CHECK(rep.entries[0].norm == doctest::Approx(2.0));
    CHECK(rep.entries[1].rank == 0);
    CHECK(rep.entries[1].norm == 0.0);
    for (int d : {2, 3}) {
        const auto r = compactness_report(canonical_odd(Theta(0.3), 6, ShiftVariant::z1, d), {"U"});
        CHECK(r.entries[0].rank <= d);
    }
    CHECK_THROWS_AS(compactness_report(mod, {"W"}), Error);
}

TEST_CASE("Dirac module invariants and pairings") {
    const Theta golden(0.6180339887498949);
    const auto mod = dirac_module(golden, 24);
    CHECK(mod.invariants().holds());
    const auto one = even_pairing(mod, PolyMatrix::identity(1));
    CHECK(one.value == 0);
    CHECK(one.stable);
    const auto p = even_pairing(mod, RieffelProjection(golden.value()));
    CHECK(std::abs(p.value) == 1);
    CHECK(p.stable);
    CHECK(p.method == PairingMethod::compressed_index);
    CHECK(std::abs(p.raw - static_cast<double>(p.value)) < 0.1);
    // p = 0
    CHECK(even_pairing(mod, PolyMatrix::scalar(NCPolynomial())).value == 0);
    CHECK(code_of([&] { dirac_module(golden, 3); }) == Errc::InvalidInput);
}

TEST_CASE("conjugation by a diagonal unitary changes nothing") {
    const auto frame = random_diagonal_frame(7);
    const auto odd = canonical_odd(Theta(0.3), 10, ShiftVariant::z1, 2);
    const auto odd_c = conjugated(odd, frame);
    CHECK(odd_c.invariants().holds(1e-12));
    CHECK(odd_pairing(odd_c, U()).value == odd_pairing(odd, U()).value);
    CHECK(odd_pairing(odd_c, V()).value == odd_pairing(odd, V()).value);

    const auto even = z0prime_module(clock_shift(3, 8));
    const auto even_c = conjugated(even, frame);
    CHECK(even_c.invariants().holds(1e-12));
    CHECK(even_pairing(even_c, RieffelProjection(3.0 / 8.0)).value == 3);
}

TEST_CASE("frames are deterministic in the seed") {
    const auto a = random_diagonal_frame(42), b = random_diagonal_frame(42), c = random_diagonal_frame(43);
    CHECK(a(3, 1) == b(3, 1));
    CHECK(a(3, 1) != c(3, 1));
    CHECK(std::abs(std::abs(a(-5, 2)) - 1.0) < 1e-15);
}
