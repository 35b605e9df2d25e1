#include "khom/af_tower.hpp"
#include "khom/error.hpp"
#include "khom/rieffel.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace khom;

namespace {

BratteliTower golden_tower(int depth) { return build_tower(cf_expand(golden_interval(60), depth + 1), depth); }

CFExpansion random_cf(int digits) {
    std::vector<BigInt> a;
    for (int i = 0; i < digits; ++i) a.emplace_back(khom::testing::uniform(1, 10));
    return CFExpansion::from_digits(0, a, false);
}

}  // namespace

TEST_CASE("golden tower has Fibonacci dimensions") {
    const BratteliTower t = golden_tower(10);
    const long fib[] = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
    for (int n = 1; n <= 10; ++n) {
        CHECK(t.level(n).q_n == fib[n - 1]);
        CHECK(t.level(n).q_prev == (n == 1 ? 1 : fib[n - 2]));
    }
    for (const auto& s : t.steps) CHECK(s.multiplicity == 1);
}

TEST_CASE("multiplicities equal the partial quotients") {
    const CFExpansion cf = CFExpansion::from_digits(0, {3, 1, 4, 1, 5, 9, 2, 6}, false);
    const BratteliTower t = build_tower(cf, 7);
    for (int n = 1; n < 7; ++n) CHECK(t.step_from(n).multiplicity == cf[static_cast<std::size_t>(n + 1)]);
    CHECK(t.level(1).q_n == 3);
}

TEST_CASE("push and pullback") {
    const BratteliTower t = golden_tower(6);
    const DimensionVector v = push_k0_class(p1_class(), t, 4);
    CHECK(v.level == 4);
    CHECK(v.d == 3);  // (1,0) -> (1,1) -> (2,1) -> (3,2)
    CHECK(v.d_prime == 2);
    const DimensionVector one = push_k0_class(identity_class(t, 1), t, 5);
    CHECK(one.d == t.level(5).q_n);
    CHECK(one.d_prime == t.level(5).q_prev);
    for (const auto& s : t.steps) CHECK(determinant(khom_pullback_matrix(s)) == -1);
    CHECK_THROWS_AS(push_k0_class(DimensionVector{1, 5, 0}, t, 3), Error);
    CHECK_THROWS_AS(push_k0_class(v, t, 2), Error);
}

TEST_CASE("inverse-limit coefficients") {
    const BratteliTower t = golden_tower(8);
    const auto c1 = inverse_limit_coefficients(t, 1);
    CHECK(c1.x == 0);
    CHECK(c1.y == 1);
    const auto c2 = inverse_limit_coefficients(t, 2);
    CHECK(c2.x == 1);
    CHECK(c2.y == -1);
    const auto c3 = inverse_limit_coefficients(t, 3);
    CHECK(c3.x == -1);
    CHECK(c3.y == 2);
}

TEST_CASE("pairing invariance over random towers") {
    for (int trial = 0; trial < 50; ++trial) {
        const BratteliTower t = build_tower(random_cf(30), 30);
        for (const auto& c : compare_coefficients(t)) {
            CHECK(c.recursion_vs_identity == 1);
            CHECK(c.recursion_vs_p1 == 0);
            CHECK(c.convergent_matrix_matches == c.closed_form_matches);
        }
    }
}

TEST_CASE("closed form differs from the recursion") {
    const auto cmp = compare_coefficients(golden_tower(5));
    CHECK_FALSE(cmp[0].closed_form_matches);
    CHECK(cmp[0].closed_form.x == 1);
    CHECK(cmp[0].closed_form.y == -1);
    CHECK(cmp[0].closed_form_vs_identity == 0);
}

TEST_CASE("depth needs digits") {
    const CFExpansion cf = cf_expand(BigRational(15, 11), 10);
    CHECK_NOTHROW(build_tower(cf, 3));
    try {
        build_tower(cf, 4);
        FAIL("expected InsufficientDigits");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InsufficientDigits);
    }
    CHECK(build_tower(cf, 3).rational_terminated());
}

TEST_CASE("trace weights") {
    const BratteliTower t = golden_tower(45);
    const BigRational tr = trace_weights(t, 1, 40).trace(p1_class());
    const BigRational theta = (golden_interval(60).lo + golden_interval(60).hi) / 2;
    const BigRational bound(1, BigInt(t.convergents.q(40) * t.convergents.q(41)));
    CHECK(abs(BigRational(tr - theta)) <= bound);
    // normalization
    const auto w = trace_weights(t, 3, 20);
    CHECK(w.trace(identity_class(t, 3)) == 1);
    CHECK(std::abs(tr.get_d() - RieffelProjection(theta.get_d()).trace()) <= 1e-6);
    CHECK_THROWS_AS(trace_weights(t, 5, 6), Error);
    CHECK_THROWS_AS(trace_weights(t, 1, 46), Error);
}

TEST_CASE("auto horizon converges") {
    const BratteliTower t = golden_tower(80);
    const auto est = trace_with_auto_horizon(t, p1_class(), 1e-15);
    CHECK(est.movement <= 1e-15);
    CHECK(std::abs(est.value.get_d() - 0.6180339887498949) < 1e-15);
}

TEST_CASE("DOT export names every level") {
    const std::string dot = to_dot(golden_tower(4));
    CHECK(dot.find("digraph") == 0);
    CHECK(dot.find("a4") != std::string::npos);
    CHECK(dot.find("a3 -> a4") != std::string::npos);
}
