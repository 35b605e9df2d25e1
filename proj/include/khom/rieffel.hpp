#pragma once

#include "khom/torus_rep.hpp"

namespace khom {

/// Powers-Rieffel projection p = V g(U) + f(U) + g(U) V* of trace theta.
///
/// With t the angle coordinate of U (U ~ exp(2 pi i t)), f is piecewise
/// linear: rises on [0, d], equals 1 on [d, theta], falls on
/// [theta, theta + d], vanishes elsewhere; g = sqrt(f - f^2) on the falling
/// ramp and 0 elsewhere, d = min(theta, 1 - theta) / 4. These force p = p*
/// and p^2 = p in any representation with V h(U) V* = h(lambda U).
class RieffelProjection {
public:
    explicit RieffelProjection(double theta);

    double theta() const noexcept { return theta_; }
    double ramp_width() const noexcept { return delta_; }

    /// Profiles as functions of t (taken mod 1).
    double f(double t) const;
    double g(double t) const;

    /// Fourier coefficients int_0^1 h(t) exp(-2 pi i k t) dt, closed form.
    Complex f_hat(long k) const;
    Complex g_hat(long k) const;

    /// tau(p) = f_hat(0)
    double trace() const { return f_hat(0).real(); }

    /// Exact functional calculus when U has finite order (U^order = I).
    CMatrix evaluate_finite(const CMatrix& U, const CMatrix& V, long order) const;

    /// Box restriction of p on a truncated l^2(Z^2): Fourier series of f and
    /// g summed over |k| <= 2N, the full range that fits inside the box.
    SparseCMatrix evaluate_truncated(const SparseCMatrix& U, const SparseCMatrix& V, int N) const;

private:
    double theta_;
    double delta_;
};

struct RieffelProjectionSpec {
    RieffelProjection element;
    RepKind kind;
    CMatrix matrix;           // clock-shift representations
    SparseCMatrix sparse;     // truncated l^2(Z^2)
    double projection_defect = 0.0;  // ||p^2 - p||; interior block for truncations
    double selfadjoint_defect = 0.0;
    double trace = 0.0;
};

/// Requires 0 < theta < 1 and theta == m/q of the representation.
/// Throws RepresentationTooSmall if p^2 = p fails beyond 1e-8.
RieffelProjectionSpec rieffel_projection(const Theta& theta, const ClockShiftRep& rep);

/// Requires N >= 4 / theta. The truncation is not a representation, so the
/// projection defect is reported for the central block |m|,|n| <= N/2 and not
/// enforced; the trace is the exact tau(p) = f_hat(0).
RieffelProjectionSpec rieffel_projection(const Theta& theta, const TruncatedZ2Rep& rep);

}  // namespace khom
