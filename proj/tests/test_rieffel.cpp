#include "khom/error.hpp"
#include "khom/rieffel.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace khom;

TEST_CASE("Fourier coefficients match an independent quadrature") {
    // values of int_0^1 h(t) e^{-2 pi i k t} dt at theta = 0.3 from
    // adaptive quadrature in 50-digit arithmetic
    const RieffelProjection p(0.3);
    struct Row {
        long k;
        Complex f, g;
    };
    const Row rows[] = {
        {0, {0.29999999999999999, 0.0}, {0.029452431127404311, 0.0}},
        {1, {0.097638601390500498, -0.23572043568808681}, {-0.015282307781115249, -0.024938459735834352}},
        {3, {-0.027831627798708904, 0.011528237697145272}, {0.027565608594740182, -0.0021694604460654178}},
        {-2, {-0.10311387134115871, 0.10311387134115872}, {-0.01300338316026313, -0.025520576397441175}},
        {7, {-0.0032503047546253594, -0.0078469298204623044}, {-0.01332045802842632, -0.015596252503003264}},
    };
    for (const auto& r : rows) {
        CHECK(std::abs(p.f_hat(r.k) - r.f) < 1e-13);
        CHECK(std::abs(p.g_hat(r.k) - r.g) < 1e-13);
    }
}

TEST_CASE("Fourier coefficients against midpoint sums") {
    for (double theta : {0.1, 0.5, 0.77}) {
        const RieffelProjection p(theta);
        const int n = 400000;
        for (long k : {0L, 1L, -4L, 11L}) {
            Complex f = 0.0, g = 0.0;
            for (int j = 0; j < n; ++j) {
                const double t = (j + 0.5) / n;
                const Complex e = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) * t);
                f += p.f(t) * e;
                g += p.g(t) * e;
            }
            CHECK(std::abs(p.f_hat(k) - f / static_cast<double>(n)) < 1e-6);
            CHECK(std::abs(p.g_hat(k) - g / static_cast<double>(n)) < 1e-6);
        }
    }
}

TEST_CASE("profiles") {
    const RieffelProjection p(0.4);
    CHECK(p.ramp_width() == doctest::Approx(0.1));
    CHECK(p.f(0.0) == 0.0);
    CHECK(p.f(0.25) == 1.0);
    CHECK(p.f(0.45) == doctest::Approx(0.5));
    CHECK(p.f(0.7) == 0.0);
    CHECK(p.g(0.45) == doctest::Approx(0.5));
    CHECK(p.g(0.2) == 0.0);
    // f(t) + f(t + theta) on the rising ramp: the two ramps interlock
    for (double t = 0.0; t < 0.1; t += 0.013) CHECK(p.f(t) + p.f(t + 0.4) == doctest::Approx(1.0));
    CHECK(p.trace() == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("theta outside (0, 1) is rejected") {
    for (double t : {0.0, 1.0, -0.2, 1.5}) {
        try {
            RieffelProjection p(t);
            FAIL("expected ThetaOutOfRange");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::ThetaOutOfRange);
        }
    }
}

TEST_CASE("theta = 1/2 in an amplified clock_shift(1, 2)") {
    const ClockShiftRep rep = clock_shift(1, 2, 3);
    const auto spec = rieffel_projection(Theta::rational(1, 2), rep);
    CHECK(spec.trace == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(spec.projection_defect <= 1e-8);
}

TEST_CASE("theta = 2/5 in clock_shift(2, 5) is a rank-2 projection") {
    const auto spec = rieffel_projection(Theta::rational(2, 5), clock_shift(2, 5));
    CHECK(std::abs(spec.trace - 0.4) <= 1e-8);
    CHECK(spec.projection_defect <= 1e-8);
    CHECK(spec.selfadjoint_defect <= 1e-10);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(spec.matrix);
    int ones = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ones += es.eigenvalues()(i) > 0.5;
    CHECK(ones == 2);
}

TEST_CASE("random rational theta at matrix size >= 64") {
    for (int i = 0; i < 10; ++i) {
        const auto [m, q] = khom::testing::random_coprime(64, 90);
        const auto spec = rieffel_projection(Theta::rational(m, q), clock_shift(m, q));
        CHECK(spec.projection_defect <= 1e-8);
        CHECK(std::abs(spec.trace - static_cast<double>(m) / static_cast<double>(q)) <= 1e-8);
    }
}

TEST_CASE("representation theta must match") {
    CHECK_THROWS_AS(rieffel_projection(Theta::rational(1, 3), clock_shift(2, 5)), Error);
}

TEST_CASE("truncated l2(Z^2) projection") {
    const Theta theta(0.6180339887498949);
    const auto spec = rieffel_projection(theta, dirac_data(theta, 16));
    CHECK(spec.trace == doctest::Approx(theta.value()).epsilon(1e-12));
    CHECK(spec.selfadjoint_defect < 1e-10);
    try {
        rieffel_projection(Theta(0.1), dirac_data(Theta(0.1), 16));
        FAIL("expected RepresentationTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::RepresentationTooSmall);
    }
}
