#pragma once

// Exact rationals, continued-fraction expansion and convergent tables.

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace khom {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// A real number known only to lie in the closed interval [lo, hi].
/// Produced from decimal literals that truncate an irrational.
struct RealInterval {
    BigRational lo;
    BigRational hi;
    std::string source;  // literal the interval was parsed from, for reports
};

using ThetaInput = std::variant<BigRational, RealInterval>;

/// Parses "m/n", an integer, a decimal literal, or "golden".
///
/// Decimal literals are exact rationals unless they carry at least
/// `precision_digits` fractional digits or end in "...", in which case they
/// are read as truncations: the value lies within one unit of the last
/// printed digit. "golden" expands to the first `precision_digits` digits of
/// (sqrt(5)-1)/2 as a certified interval.
ThetaInput parse_theta(std::string_view text, int precision_digits = 60);

BigRational parse_rational(std::string_view text);

/// Interval of width 10^-digits containing (sqrt(5)-1)/2.
RealInterval golden_interval(int digits);

/// Interval containing (sqrt(radicand) + offset) / divisor, certified to
/// `digits` decimal places. radicand must not be a perfect square.
RealInterval quadratic_interval(long radicand, long offset, long divisor, int digits);

double to_double(const BigRational& x);
std::string to_string(const BigInt& x);
std::string to_string(const BigRational& x);

/// theta = a0 + 1/(a1 + 1/(a2 + ...)).
///
/// `terminated` is set when the expansion is the complete expansion of a
/// rational; its last digit is then >= 2 (or it consists of a0 alone).
struct CFExpansion {
    BigInt a0;
    std::vector<BigInt> digits;  // a_1, a_2, ...
    bool terminated = false;

    /// Validates a hand-supplied digit list (a_i >= 1, canonical ending).
    static CFExpansion from_digits(BigInt a0, std::vector<BigInt> digits, bool terminated);

    /// Number of partial quotients including a0.
    std::size_t size() const noexcept { return digits.size() + 1; }
    /// a_n, with a_0 the integer part.
    const BigInt& operator[](std::size_t n) const;

    bool operator==(const CFExpansion&) const = default;
};

CFExpansion cf_expand(const BigRational& theta, int depth);
/// Digits are produced only while every real in the interval shares them.
/// Throws PrecisionExhausted when fewer than `depth` digits can be certified.
CFExpansion cf_expand(const RealInterval& theta, int depth);
CFExpansion cf_expand(const ThetaInput& theta, int depth);

struct Convergent {
    int n;
    BigInt p;
    BigInt q;
};

class ConvergentTable {
public:
    ConvergentTable() = default;
    explicit ConvergentTable(std::vector<Convergent> rows) : rows_(std::move(rows)) {}

    std::size_t size() const noexcept { return rows_.size(); }
    const Convergent& operator[](std::size_t n) const { return rows_.at(n); }
    const std::vector<Convergent>& rows() const noexcept { return rows_; }

    // p_{-1} = 1, q_{-1} = 0
    static BigInt seed_p() { return 1; }
    static BigInt seed_q() { return 0; }

    /// p_{n} for n >= -1.
    BigInt p(int n) const { return n < 0 ? seed_p() : rows_.at(n).p; }
    BigInt q(int n) const { return n < 0 ? seed_q() : rows_.at(n).q; }

    BigRational value(std::size_t n) const;

    /// p_n q_{n-1} - p_{n-1} q_n == (-1)^{n-1} for every stored row n >= 1.
    bool determinant_identity_holds() const;

private:
    std::vector<Convergent> rows_;
};

ConvergentTable convergents(const CFExpansion& cf);

}  // namespace khom
