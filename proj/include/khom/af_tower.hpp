#pragma once

// The AF tower C_1 -> C_2 -> ... with C_n = M_{q_n} + M_{q_{n-1}}, its K_0
// bookkeeping, trace weights and the K-homology inverse limit.

#include "khom/exact_arith.hpp"

#include <array>
#include <string>
#include <vector>

namespace khom {

struct BratteliLevel {
    int n;
    BigInt q_n;
    BigInt q_prev;
};

/// C_n -> C_{n+1}: the big block of C_{n+1} holds `multiplicity` copies of
/// the big block of C_n plus one copy of the small one; the small block of
/// C_{n+1} is the big block of C_n. Rank bookkeeping is [[m, 1], [1, 0]].
struct EmbeddingStep {
    int from;
    BigInt multiplicity;
};

using IntMatrix2 = std::array<std::array<BigInt, 2>, 2>;

struct BratteliTower {
    CFExpansion cf;
    ConvergentTable convergents;
    std::vector<BratteliLevel> levels;  // levels[i].n == i + 1
    std::vector<EmbeddingStep> steps;   // steps[i]: level i+1 -> i+2

    int depth() const { return static_cast<int>(levels.size()); }
    const BratteliLevel& level(int n) const;
    const EmbeddingStep& step_from(int n) const;
    /// The driving expansion is a complete rational one and the tower stops at
    /// its last digit.
    bool rational_terminated() const;
};

/// Levels 1..depth. Needs a_1..a_depth; multiplicities are solved from
/// q_{n+1} = m q_n + q_{n-1} (exact division) rather than read off a digit
/// index.
BratteliTower build_tower(const CFExpansion& cf, int depth);

struct DimensionVector {
    int level;
    BigInt d;        // rank in M_{q_n}
    BigInt d_prime;  // rank in M_{q_{n-1}}
};

DimensionVector identity_class(const BratteliTower& tower, int level);
/// Rank-one projection in the big block of C_1.
DimensionVector p1_class();

/// Pushes v from its level to `to_level` through the embedding steps.
DimensionVector push_k0_class(const DimensionVector& v, const BratteliTower& tower, int to_level);

/// [[m, 1], [1, 0]]: level-(n+1) coefficient pairs of (z1, z2) to level n.
IntMatrix2 khom_pullback_matrix(const EmbeddingStep& step);
BigInt determinant(const IntMatrix2& m);

/// z_n = x z_1^(n) + y z_2^(n)
struct KHomCoefficients {
    int level;
    BigInt x;
    BigInt y;
};

/// Seed (0, 1) at level 1, then (x, y)_{n+1} = M_n^{-1} (x, y)_n.
KHomCoefficients inverse_limit_coefficients(const BratteliTower& tower, int level);
/// The closed form (-1)^n (-q_{n-1}, q_n), kept for comparison.
KHomCoefficients closed_form_coefficients(const BratteliTower& tower, int level);
/// [[q_n, q_{n-1}], [p_n, p_{n-1}]]^{-1} (0, 1), exact; for comparison.
KHomCoefficients convergent_matrix_coefficients(const BratteliTower& tower, int level);

/// x d + y d'
BigInt pairing_along_tower(const KHomCoefficients& coeffs, const DimensionVector& v);

struct TraceWeightVector {
    int level;
    BigRational beta;
    BigRational beta_prime;

    BigRational trace(const DimensionVector& v) const { return beta * v.d + beta_prime * v.d_prime; }
};

/// Level-n weights of the normalized trace, transported back from `horizon`
/// where all weight sits on the big block: beta_n = M_n beta_{n+1},
/// renormalized to beta q_n + beta' q_{n-1} = 1. Needs horizon >= n + 2.
TraceWeightVector trace_weights(const BratteliTower& tower, int level, int horizon);

struct TraceEstimate {
    int horizon;
    BigRational value;
    double movement;  // |value(horizon) - value(previous horizon)|
};

/// Trace of the image of `v`, starting at horizon level + 30 and extending
/// while the value still moves by more than `threshold` and the tower allows.
TraceEstimate trace_with_auto_horizon(const BratteliTower& tower, const DimensionVector& v,
                                      double threshold = 1e-12);

struct CoefficientComparison {
    int level;
    KHomCoefficients recursion;
    KHomCoefficients closed_form;
    KHomCoefficients convergent_matrix;
    bool closed_form_matches;
    bool convergent_matrix_matches;
    BigInt recursion_vs_identity;     // pairing with the identity image
    BigInt recursion_vs_p1;
    BigInt closed_form_vs_identity;
    BigInt closed_form_vs_p1;
};

std::vector<CoefficientComparison> compare_coefficients(const BratteliTower& tower);

/// Bratteli diagram in Graphviz DOT.
std::string to_dot(const BratteliTower& tower);

}  // namespace khom
