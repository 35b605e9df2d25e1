#include "khom/error.hpp"
#include "khom/zlattice.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace khom;

namespace {

IntMatrix random_matrix(std::size_t r, std::size_t c, long bound) {
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = khom::testing::uniform(-bound, bound);
    return m;
}

/// Random unimodular matrix from elementary operations.
IntMatrix random_unimodular(std::size_t n) {
    IntMatrix u = IntMatrix::identity(n);
    if (n < 2) return u;
    for (int k = 0; k < 6; ++k) {
        const auto a = static_cast<std::size_t>(khom::testing::uniform(0, static_cast<long>(n) - 1));
        auto b = static_cast<std::size_t>(khom::testing::uniform(0, static_cast<long>(n) - 2));
        if (b >= a) ++b;
        u.add_row_multiple(a, b, khom::testing::uniform(-2, 2));
    }
    return u;
}

BigInt gcd_entries(const IntMatrix& m) {
    BigInt g = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) g = gcd(g, m(i, j));
    return g;
}

}  // namespace

TEST_CASE("Smith form of diag(2, 3) is diag(1, 6)") {
    const IntMatrix m{{2, 0}, {0, 3}};
    const SmithForm s = smith_normal_form(m);
    CHECK(s.D == IntMatrix{{1, 0}, {0, 6}});
    CHECK(s.U * m * s.V == s.D);
    CHECK(s.rank == 2);
}

TEST_CASE("Smith form against gcd-of-minors oracle") {
    for (int i = 0; i < 200; ++i) {
        const IntMatrix m = random_matrix(2, 2, 20);
        const SmithForm s = smith_normal_form(m);
        CHECK(s.U * m * s.V == s.D);
        CHECK(abs(s.U.determinant()) == 1);
        CHECK(abs(s.V.determinant()) == 1);
        // d1 = gcd of 1x1 minors, d1 d2 = |det|
        CHECK(s.D(0, 0) == gcd_entries(m));
        CHECK(s.D(0, 0) * s.D(1, 1) == abs(m.determinant()));
    }
}

TEST_CASE("Smith form of rectangular matrices") {
    for (int i = 0; i < 100; ++i) {
        const auto r = static_cast<std::size_t>(khom::testing::uniform(1, 4));
        const auto c = static_cast<std::size_t>(khom::testing::uniform(1, 4));
        const IntMatrix m = random_matrix(r, c, 6);
        const SmithForm s = smith_normal_form(m);
        CHECK(s.U * m * s.V == s.D);
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < c; ++b)
                if (a != b) CHECK(s.D(a, b) == 0);
        for (std::size_t k = 0; k + 1 < s.rank; ++k) {
            CHECK(s.D(k, k) > 0);
            CHECK(mpz_divisible_p(s.D(k + 1, k + 1).get_mpz_t(), s.D(k, k).get_mpz_t()) != 0);
        }
    }
}

TEST_CASE("Bareiss determinant") {
    CHECK(IntMatrix{{2, 1}, {7, 4}}.determinant() == 1);
    CHECK(IntMatrix{{1, 2, 3}, {4, 5, 6}, {7, 8, 10}}.determinant() == -3);
    CHECK(IntMatrix{{0, 1}, {1, 0}}.determinant() == -1);
}

TEST_CASE("Hermite form decides lattice equality") {
    using V = std::vector<std::vector<BigInt>>;
    CHECK(hermite_normal_form(V{{2, 0}, {0, 2}}, 2) == hermite_normal_form(V{{2, 2}, {0, 2}}, 2));
    CHECK(hermite_normal_form(V{{2}}, 1) != hermite_normal_form(V{{1}}, 1));
    CHECK(hermite_normal_form(V{{0, 0}}, 2).empty());
    const auto h = hermite_normal_form(V{{4, 6}, {6, 9}}, 2);
    CHECK(lattice_contains(h, {2, 3}));
    CHECK_FALSE(lattice_contains(h, {1, 0}));
}

TEST_CASE("kernel and image of small maps") {
    const FreeAbelianGroup g2{"G", {"a", "b"}}, g1{"H", {"c"}};
    const IntegerMatrixMap f("f", g2, g1, IntMatrix{{1, 0}});
    const auto k = kernel_basis(f);
    REQUIRE(k.size() == 1);
    CHECK(hermite_normal_form(k, 2) == hermite_normal_form({{0, 1}}, 2));
    CHECK(image_generators(f).size() == 2);
}

TEST_CASE("2Z inside Z is not exact") {
    const FreeAbelianGroup z{"Z", {"e"}};
    const IntegerMatrixMap twice("2", z, z, IntMatrix{{2}});
    const IntegerMatrixMap zero("0", z, z, IntMatrix{{0}});
    const auto v = check_exact_at(twice, zero);
    CHECK_FALSE(v.exact);
    CHECK_FALSE(v.diagnostic.empty());
    CHECK(check_exact_at(IntegerMatrixMap("1", z, z, IntMatrix{{1}}), zero).exact);
}

TEST_CASE("shape mismatches are rejected") {
    const FreeAbelianGroup g2{"G", {"a", "b"}}, g1{"H", {"c"}};
    CHECK_THROWS_AS(IntegerMatrixMap("f", g2, g1, IntMatrix{{1, 0}, {0, 1}}), Error);
    const IntegerMatrixMap f("f", g2, g1, IntMatrix{{1, 0}});
    CHECK_THROWS_AS(check_exact_at(f, f), Error);
}

TEST_CASE("builtin sequences are exact") {
    for (const auto& seq : {builtin_khomology_sequence(), builtin_ktheory_sequence()}) {
        const auto nodes = seq.check_exactness();
        REQUIRE(nodes.size() == 6);
        for (const auto& n : nodes) CHECK_MESSAGE(n.verdict.exact, n.group << ": " << n.verdict.diagnostic);
        CHECK(seq.is_exact());
    }
}

TEST_CASE("single-entry perturbations break exactness") {
    for (auto make : {builtin_khomology_sequence, builtin_ktheory_sequence}) {
        for (std::size_t k = 0; k < 6; ++k) {
            CyclicSequence seq = make();
            seq.maps()[k].matrix(0, 0) += 1;
            CHECK_FALSE(seq.is_exact());
        }
    }
}

TEST_CASE("perturbing d_0 breaks the KK^1(A_theta) node") {
    CyclicSequence seq = builtin_khomology_sequence();
    seq.maps()[2].matrix(0, 0) += 1;  // d_0 = (0,1)^T -> (1,1)^T
    for (const auto& n : seq.check_exactness()) CHECK(n.verdict.exact == (n.group != "KK^1(A_theta)"));
}

TEST_CASE("zeroing all maps fails at every node") {
    CyclicSequence seq = builtin_khomology_sequence();
    for (auto& f : seq.maps()) f.matrix = IntMatrix(f.matrix.rows(), f.matrix.cols());
    for (const auto& n : seq.check_exactness()) CHECK_FALSE(n.verdict.exact);
}

TEST_CASE("exactness is invariant under unimodular base change") {
    for (int trial = 0; trial < 20; ++trial) {
        CyclicSequence seq = builtin_khomology_sequence();
        const std::size_t n = seq.size();
        std::vector<IntMatrix> change;  // change[k] acts on maps[k].domain
        for (std::size_t k = 0; k < n; ++k) change.push_back(random_unimodular(seq.maps()[k].domain.rank()));
        std::vector<IntMatrix> inverse;
        for (const auto& c : change) {
            // inverse via Smith form: U c V = I, so c^{-1} = V U
            const SmithForm s = smith_normal_form(c);
            REQUIRE(s.D == IntMatrix::identity(c.rows()));
            inverse.push_back(s.V * s.U);
        }
        for (std::size_t k = 0; k < n; ++k) {
            auto& f = seq.maps()[k];
            f.matrix = change[(k + 1) % n] * f.matrix * inverse[k];
        }
        CHECK(seq.is_exact());
    }
}

TEST_CASE("boundary pairing through delta_1") {
    const CyclicSequence k = builtin_ktheory_sequence();
    const auto& delta1 = k.maps()[5];
    CHECK(pair_through({1}, delta1, "[V]") == 1);
    CHECK(pair_through({1}, delta1, "[U]") == 0);
}
