#include "khom/af_tower.hpp"

#include "khom/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace khom {

const BratteliLevel& BratteliTower::level(int n) const {
    if (n < 1 || n > depth())
        throw Error(Errc::LevelMismatch, "level " + std::to_string(n) + " outside 1.." + std::to_string(depth()));
    return levels[static_cast<std::size_t>(n - 1)];
}

const EmbeddingStep& BratteliTower::step_from(int n) const {
    if (n < 1 || n >= depth())
        throw Error(Errc::LevelMismatch, "no embedding step from level " + std::to_string(n));
    return steps[static_cast<std::size_t>(n - 1)];
}

bool BratteliTower::rational_terminated() const {
    return cf.terminated && static_cast<std::size_t>(depth()) == cf.digits.size();
}

BratteliTower build_tower(const CFExpansion& cf, int depth) {
    if (depth < 1) throw Error(Errc::InvalidInput, "tower depth must be >= 1");
    if (cf.size() < static_cast<std::size_t>(depth) + 1)
        throw Error(Errc::InsufficientDigits, "depth " + std::to_string(depth) + " needs " +
                                                  std::to_string(depth + 1) + " partial quotients, have " +
                                                  std::to_string(cf.size()));
    BratteliTower t;
    t.cf = cf;
    t.convergents = convergents(cf);
    for (int n = 1; n <= depth; ++n) t.levels.push_back({n, t.convergents.q(n), t.convergents.q(n - 1)});
    for (int n = 1; n < depth; ++n) {
        const BigInt& q_next = t.convergents.q(n + 1);
        const BigInt& q_n = t.convergents.q(n);
        const BigInt& q_prev = t.convergents.q(n - 1);
        const BigInt gap = q_next - q_prev;
        if (!mpz_divisible_p(gap.get_mpz_t(), q_n.get_mpz_t()))
            throw Error(Errc::InvalidInput, "dimension consistency fails at level " + std::to_string(n));
        BigInt m = gap / q_n;
        if (m < 1) throw Error(Errc::InvalidInput, "non-positive multiplicity at level " + std::to_string(n));
        t.steps.push_back({n, std::move(m)});
    }
    return t;
}

DimensionVector identity_class(const BratteliTower& tower, int level) {
    const auto& l = tower.level(level);
    return {level, l.q_n, l.q_prev};
}

DimensionVector p1_class() { return {1, 1, 0}; }

DimensionVector push_k0_class(const DimensionVector& v, const BratteliTower& tower, int to_level) {
    if (to_level < v.level) throw Error(Errc::LevelMismatch, "cannot push a class to a lower level");
    const auto& start = tower.level(v.level);
    auto in_range = [](const BigInt& x, const BigInt& hi) { return x >= 0 && x <= hi; };
    if (!in_range(v.d, start.q_n) || !in_range(v.d_prime, start.q_prev))
        throw Error(Errc::RankOverflow, "dimension vector exceeds block sizes at level " + std::to_string(v.level));
    DimensionVector w = v;
    for (int n = v.level; n < to_level; ++n) {
        const BigInt& m = tower.step_from(n).multiplicity;
        BigInt d = m * w.d + w.d_prime;
        w.d_prime = w.d;
        w.d = std::move(d);
        w.level = n + 1;
        const auto& l = tower.level(w.level);
        if (!in_range(w.d, l.q_n) || !in_range(w.d_prime, l.q_prev))
            throw Error(Errc::RankOverflow, "pushed class exceeds block sizes at level " + std::to_string(w.level));
    }
    return w;
}

IntMatrix2 khom_pullback_matrix(const EmbeddingStep& step) {
    return {{{step.multiplicity, BigInt(1)}, {BigInt(1), BigInt(0)}}};
}

BigInt determinant(const IntMatrix2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

KHomCoefficients inverse_limit_coefficients(const BratteliTower& tower, int level) {
    tower.level(level);
    KHomCoefficients c{1, 0, 1};
    for (int n = 1; n < level; ++n) {
        // [[m,1],[1,0]]^{-1} = [[0,1],[1,-m]]
        const BigInt& m = tower.step_from(n).multiplicity;
        BigInt x = c.y;
        BigInt y = c.x - m * c.y;
        c = {n + 1, std::move(x), std::move(y)};
    }
    return c;
}

KHomCoefficients closed_form_coefficients(const BratteliTower& tower, int level) {
    tower.level(level);
    const int sign = (level % 2 == 0) ? 1 : -1;
    return {level, sign * -tower.convergents.q(level - 1), sign * tower.convergents.q(level)};
}

KHomCoefficients convergent_matrix_coefficients(const BratteliTower& tower, int level) {
    tower.level(level);
    const auto& cv = tower.convergents;
    const BigInt a = cv.q(level), b = cv.q(level - 1), c = cv.p(level), d = cv.p(level - 1);
    const BigInt det = a * d - b * c;
    // inverse times (0, 1) = (-b, a) / det; det = +-1
    BigRational x(-b, det), y(a, det);
    x.canonicalize();
    y.canonicalize();
    if (x.get_den() != 1 || y.get_den() != 1)
        throw Error(Errc::InvalidInput, "convergent matrix is not unimodular at level " + std::to_string(level));
    return {level, x.get_num(), y.get_num()};
}

BigInt pairing_along_tower(const KHomCoefficients& coeffs, const DimensionVector& v) {
    if (coeffs.level != v.level)
        throw Error(Errc::LevelMismatch, "coefficients at level " + std::to_string(coeffs.level) +
                                             ", class at level " + std::to_string(v.level));
    return coeffs.x * v.d + coeffs.y * v.d_prime;
}

TraceWeightVector trace_weights(const BratteliTower& tower, int level, int horizon) {
    tower.level(level);
    if (horizon < level + 2)
        throw Error(Errc::HorizonTooSmall, "horizon " + std::to_string(horizon) + " < level + 2");
    if (horizon > tower.depth())
        throw Error(Errc::HorizonTooSmall, "horizon " + std::to_string(horizon) + " beyond tower depth " +
                                               std::to_string(tower.depth()));
    TraceWeightVector w{horizon, BigRational(1, tower.level(horizon).q_n), BigRational(0)};
    w.beta.canonicalize();
    for (int n = horizon - 1; n >= level; --n) {
        const BigInt& m = tower.step_from(n).multiplicity;
        BigRational beta = m * w.beta + w.beta_prime;
        w.beta_prime = w.beta;
        w.beta = beta;
        w.level = n;
    }
    const auto& l = tower.level(level);
    const BigRational norm = w.beta * l.q_n + w.beta_prime * l.q_prev;
    w.beta /= norm;
    w.beta_prime /= norm;
    return w;
}

TraceEstimate trace_with_auto_horizon(const BratteliTower& tower, const DimensionVector& v, double threshold) {
    int horizon = std::min(v.level + 30, tower.depth());
    if (horizon < v.level + 2)
        throw Error(Errc::HorizonTooSmall, "tower too shallow for a trace at level " + std::to_string(v.level));
    TraceEstimate est{horizon, trace_weights(tower, v.level, horizon).trace(v),
                      std::numeric_limits<double>::infinity()};
    if (horizon > v.level + 2) {
        est.movement = std::abs(
            BigRational(est.value - trace_weights(tower, v.level, horizon - 1).trace(v)).get_d());
    }
    while (est.movement > threshold && horizon + 10 <= tower.depth()) {
        horizon += 10;
        BigRational next = trace_weights(tower, v.level, horizon).trace(v);
        est.movement = std::abs(BigRational(next - est.value).get_d());
        est.value = next;
        est.horizon = horizon;
    }
    return est;
}

std::vector<CoefficientComparison> compare_coefficients(const BratteliTower& tower) {
    std::vector<CoefficientComparison> out;
    const DimensionVector one = identity_class(tower, 1), p1 = p1_class();
    for (int n = 1; n <= tower.depth(); ++n) {
        CoefficientComparison c{n,
                                inverse_limit_coefficients(tower, n),
                                closed_form_coefficients(tower, n),
                                convergent_matrix_coefficients(tower, n),
                                false,
                                false,
                                0,
                                0,
                                0,
                                0};
        c.closed_form_matches = c.recursion.x == c.closed_form.x && c.recursion.y == c.closed_form.y;
        c.convergent_matrix_matches =
            c.recursion.x == c.convergent_matrix.x && c.recursion.y == c.convergent_matrix.y;
        const DimensionVector one_n = push_k0_class(one, tower, n), p1_n = push_k0_class(p1, tower, n);
        c.recursion_vs_identity = pairing_along_tower(c.recursion, one_n);
        c.recursion_vs_p1 = pairing_along_tower(c.recursion, p1_n);
        c.closed_form_vs_identity = pairing_along_tower(c.closed_form, one_n);
        c.closed_form_vs_p1 = pairing_along_tower(c.closed_form, p1_n);
        out.push_back(std::move(c));
    }
    return out;
}

std::string to_dot(const BratteliTower& tower) {
    std::ostringstream os;
    os << "digraph bratteli {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (const auto& l : tower.levels) {
        os << "  a" << l.n << " [label=\"" << l.q_n.get_str() << "\"];\n";
        os << "  b" << l.n << " [label=\"" << l.q_prev.get_str() << "\"];\n";
        os << "  { rank=same; a" << l.n << "; b" << l.n << "; }\n";
    }
    for (const auto& s : tower.steps) {
        const int n = s.from;
        os << "  a" << n << " -> a" << n + 1 << " [label=\"" << s.multiplicity.get_str() << "\"];\n";
        os << "  b" << n << " -> a" << n + 1 << " [label=\"1\"];\n";
        os << "  a" << n << " -> b" << n + 1 << " [label=\"1\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace khom
