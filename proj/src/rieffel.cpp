#include "khom/rieffel.hpp"

#include "khom/error.hpp"

#include <cmath>
#include <numbers>

namespace khom {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

/// int_a^b (c0 + c1 t) exp(-i w t) dt
Complex linear_exp_integral(double a, double b, double c0, double c1, double w) {
    if (w == 0.0) return c0 * (b - a) + c1 * (b * b - a * a) / 2.0;
    auto antiderivative = [&](double t) {
        const Complex e = std::exp(-kI * w * t);
        // int e^{-iwt} = (i/w) e^{-iwt};  int t e^{-iwt} = (i t/w + 1/w^2) e^{-iwt}
        return c0 * (kI / w) * e + c1 * (kI * t / w + 1.0 / (w * w)) * e;
    };
    return antiderivative(b) - antiderivative(a);
}

double frac(double t) { return t - std::floor(t); }

}  // namespace

RieffelProjection::RieffelProjection(double theta) : theta_(theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw Error(Errc::ThetaOutOfRange, "Rieffel projection needs 0 < theta < 1, got " + std::to_string(theta));
    delta_ = std::min(theta, 1.0 - theta) / 4.0;
}

double RieffelProjection::f(double t) const {
    t = frac(t);
    if (t < delta_) return t / delta_;
    if (t <= theta_) return 1.0;
    if (t < theta_ + delta_) return 1.0 - (t - theta_) / delta_;
    return 0.0;
}

double RieffelProjection::g(double t) const {
    t = frac(t);
    if (t <= theta_ || t >= theta_ + delta_) return 0.0;
    const double v = f(t);
    return std::sqrt(std::max(0.0, v - v * v));
}

Complex RieffelProjection::f_hat(long k) const {
    const double w = 2.0 * kPi * static_cast<double>(k);
    const double d = delta_, th = theta_;
    return linear_exp_integral(0.0, d, 0.0, 1.0 / d, w) + linear_exp_integral(d, th, 1.0, 0.0, w) +
           linear_exp_integral(th, th + d, 1.0 + th / d, -1.0 / d, w);
}

Complex RieffelProjection::g_hat(long k) const {
    // t = theta + d s, g = sqrt(s(1-s)); with s = (1+x)/2 the integral becomes
    // (d/4) e^{-iw(theta+d/2)} int_{-1}^{1} sqrt(1-x^2) e^{-iax} dx, a = w d / 2,
    // and that integral is pi J1(a)/a.
    const double w = 2.0 * kPi * static_cast<double>(k);
    const double a = w * delta_ / 2.0;
    const double semicircle = (a == 0.0) ? kPi / 2.0 : kPi * std::cyl_bessel_j(1.0, std::abs(a)) / std::abs(a);
    return (delta_ / 4.0) * std::exp(-kI * w * (theta_ + delta_ / 2.0)) * semicircle;
}

CMatrix RieffelProjection::evaluate_finite(const CMatrix& U, const CMatrix& V, long order) const {
    const Eigen::Index n = U.rows();
    if (order < 1) throw Error(Errc::InvalidInput, "order must be >= 1");
    // powers U^0 .. U^{order-1}; U^order must be the identity
    std::vector<CMatrix> powers;
    powers.reserve(static_cast<std::size_t>(order));
    powers.push_back(CMatrix::Identity(n, n));
    for (long k = 1; k < order; ++k) powers.push_back(powers.back() * U);
    if ((powers.back() * U - CMatrix::Identity(n, n)).norm() > 1e-9 * static_cast<double>(n))
        throw Error(Errc::InvalidInput, "U^" + std::to_string(order) + " != I");

    // h(U) = sum_k c_k U^k with c_k the discrete Fourier coefficients of h
    // sampled at the spectrum exp(2 pi i j / order)
    auto calculus = [&](auto&& h) {
        CMatrix out = CMatrix::Zero(n, n);
        for (long k = 0; k < order; ++k) {
            Complex c = 0.0;
            for (long j = 0; j < order; ++j) {
                const double t = static_cast<double>(j) / static_cast<double>(order);
                c += h(t) * std::polar(1.0, -2.0 * kPi * static_cast<double>((j * k) % order) /
                                                static_cast<double>(order));
            }
            c /= static_cast<double>(order);
            if (std::abs(c) > 0.0) out += c * powers[static_cast<std::size_t>(k)];
        }
        return out;
    };
    const CMatrix F = calculus([this](double t) { return f(t); });
    const CMatrix G = calculus([this](double t) { return g(t); });
    return V * G + F + G * V.adjoint();
}

SparseCMatrix RieffelProjection::evaluate_truncated(const SparseCMatrix& U, const SparseCMatrix& V, int N) const {
    PolyEvaluator ev(U, V);
    const int K = 2 * N;
    SparseCMatrix F(U.rows(), U.cols()), G(U.rows(), U.cols());
    for (int k = -K; k <= K; ++k) {
        const SparseCMatrix& Uk = ev.U_power(k);
        F += f_hat(k) * Uk;
        G += g_hat(k) * Uk;
    }
    SparseCMatrix VG = V * G;
    SparseCMatrix GV = G * SparseCMatrix(V.adjoint());
    SparseCMatrix p = VG + F + GV;
    p.prune(Complex(0.0));
    return p;
}

RieffelProjectionSpec rieffel_projection(const Theta& theta, const ClockShiftRep& rep) {
    RieffelProjection element(theta.value());
    const double mismatch = std::abs(theta.lambda() - rep.theta.lambda());
    if (mismatch > 1e-12)
        throw Error(Errc::InvalidInput, "representation is for theta = " + rep.theta.to_string() + ", not " +
                                            theta.to_string());
    RieffelProjectionSpec spec{element, RepKind::clock_shift, {}, {}, 0.0, 0.0, 0.0};
    spec.matrix = element.evaluate_finite(rep.U, rep.V, rep.q);
    spec.projection_defect = spectral_norm(spec.matrix * spec.matrix - spec.matrix);
    spec.selfadjoint_defect = spectral_norm(spec.matrix - spec.matrix.adjoint());
    spec.trace = canonical_trace(spec.matrix, RepKind::clock_shift).real();
    if (spec.projection_defect > 1e-8 || spec.selfadjoint_defect > 1e-10)
        throw Error(Errc::RepresentationTooSmall,
                    "||p^2 - p|| = " + std::to_string(spec.projection_defect) + " in clock_shift(" +
                        std::to_string(rep.m) + ", " + std::to_string(rep.q) + ")");
    return spec;
}

RieffelProjectionSpec rieffel_projection(const Theta& theta, const TruncatedZ2Rep& rep) {
    RieffelProjection element(theta.value());
    if (rep.N * theta.value() < 4.0)
        throw Error(Errc::RepresentationTooSmall,
                    "truncation N = " + std::to_string(rep.N) + " below 4/theta for theta = " + theta.to_string());
    RieffelProjectionSpec spec{element, RepKind::truncated_z2, {}, {}, 0.0, 0.0, element.trace()};
    spec.sparse = element.evaluate_truncated(rep.U, rep.V, rep.N);
    const SparseCMatrix adj = spec.sparse.adjoint();
    spec.selfadjoint_defect = SparseCMatrix(spec.sparse - adj).norm();
    const SparseCMatrix defect = spec.sparse * spec.sparse - spec.sparse;
    const long half = rep.N / 2;
    double sum = 0.0;
    for (Eigen::Index col = 0; col < defect.outerSize(); ++col) {
        const long m = col / rep.side() - rep.N, n = col % rep.side() - rep.N;
        if (std::abs(m) > half || std::abs(n) > half) continue;
        for (SparseCMatrix::InnerIterator it(defect, col); it; ++it) {
            const long rm = it.row() / rep.side() - rep.N, rn = it.row() % rep.side() - rep.N;
            if (std::abs(rm) <= half && std::abs(rn) <= half) sum += std::norm(it.value());
        }
    }
    spec.projection_defect = std::sqrt(sum);
    return spec;
}

}  // namespace khom
