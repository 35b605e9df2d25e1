#include "khom/exact_arith.hpp"

#include "khom/error.hpp"

#include <cctype>

namespace khom {

namespace {

BigInt pow10(int k) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(k));
    return r;
}

BigInt floor_of(const BigRational& x) {
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

BigInt parse_integer(std::string_view s) {
    if (s.empty()) throw Error(Errc::InvalidInput, "empty integer");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw Error(Errc::InvalidInput, "malformed integer '" + std::string(s) + "'");
    for (std::size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j])))
            throw Error(Errc::InvalidInput, "malformed integer '" + std::string(s) + "'");
    std::string digits(s.substr(s[0] == '+' ? 1 : 0));
    return BigInt(digits, 10);
}

struct Decimal {
    BigRational value;
    int fraction_digits = 0;
};

Decimal parse_decimal(std::string_view s) {
    bool negative = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) negative = s[i++] == '-';
    std::string int_part, frac_part;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) int_part += s[i++];
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) frac_part += s[i++];
    }
    if (i != s.size() || (int_part.empty() && frac_part.empty()))
        throw Error(Errc::InvalidInput, "malformed decimal '" + std::string(s) + "'");
    BigInt whole(int_part.empty() ? "0" : int_part, 10);
    BigInt frac(frac_part.empty() ? "0" : frac_part, 10);
    const int k = static_cast<int>(frac_part.size());
    BigRational v(whole * pow10(k) + frac, pow10(k));
    v.canonicalize();
    if (negative) v = -v;
    return {v, k};
}

}  // namespace

BigRational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        Decimal d = parse_decimal(text);
        return d.value;
    }
    BigInt num = parse_integer(text.substr(0, slash));
    BigInt den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw Error(Errc::InvalidInput, "zero denominator in '" + std::string(text) + "'");
    BigRational r(num, den);
    r.canonicalize();
    return r;
}

RealInterval quadratic_interval(long radicand, long offset, long divisor, int digits) {
    if (radicand <= 0 || divisor == 0 || digits < 1)
        throw Error(Errc::InvalidInput, "quadratic_interval needs radicand > 0, divisor != 0, digits >= 1");
    if (mpz_perfect_square_p(BigInt(radicand).get_mpz_t()))
        throw Error(Errc::InvalidInput, "radicand is a perfect square");
    const BigInt scale = pow10(digits);
    BigInt s;
    BigInt scaled = BigInt(radicand) * scale * scale;
    mpz_sqrt(s.get_mpz_t(), scaled.get_mpz_t());
    // sqrt(radicand) lies in (s, s + 1) / scale
    BigRational a(s + BigInt(offset) * scale, scale * divisor);
    BigRational b(s + 1 + BigInt(offset) * scale, scale * divisor);
    a.canonicalize();
    b.canonicalize();
    RealInterval out;
    out.lo = a < b ? a : b;
    out.hi = a < b ? b : a;
    out.source = "(sqrt(" + std::to_string(radicand) + ")+" + std::to_string(offset) + ")/" +
                 std::to_string(divisor);
    return out;
}

RealInterval golden_interval(int digits) {
    RealInterval r = quadratic_interval(5, -1, 2, digits);
    r.source = "golden";
    return r;
}

ThetaInput parse_theta(std::string_view text, int precision_digits) {
    if (text == "golden") return golden_interval(precision_digits);
    if (text.find('/') != std::string_view::npos) return parse_rational(text);
    bool truncated = false;
    std::string_view body = text;
    if (body.size() > 3 && body.substr(body.size() - 3) == "...") {
        truncated = true;
        body.remove_suffix(3);
    }
    Decimal d = parse_decimal(body);
    if (!truncated && d.fraction_digits < precision_digits) return d.value;
    RealInterval r;
    const BigRational ulp(1, pow10(d.fraction_digits));
    r.lo = d.value - ulp;
    r.hi = d.value + ulp;
    r.source = std::string(text);
    return r;
}

double to_double(const BigRational& x) { return x.get_d(); }
std::string to_string(const BigInt& x) { return x.get_str(10); }
std::string to_string(const BigRational& x) { return x.get_str(10); }

CFExpansion CFExpansion::from_digits(BigInt a0, std::vector<BigInt> digits, bool terminated) {
    for (const auto& a : digits)
        if (a < 1) throw Error(Errc::InvalidInput, "continued-fraction digits must be >= 1");
    if (terminated && !digits.empty() && digits.back() == 1)
        throw Error(Errc::InvalidInput, "terminating expansion may not end in 1 (use [..., a+1])");
    CFExpansion cf;
    cf.a0 = std::move(a0);
    cf.digits = std::move(digits);
    cf.terminated = terminated;
    return cf;
}

const BigInt& CFExpansion::operator[](std::size_t n) const {
    if (n == 0) return a0;
    return digits.at(n - 1);
}

CFExpansion cf_expand(const BigRational& theta, int depth) {
    if (depth < 1) throw Error(Errc::InvalidInput, "depth must be >= 1");
    CFExpansion cf;
    BigInt num = theta.get_num();
    BigInt den = theta.get_den();
    BigInt a;
    mpz_fdiv_qr(a.get_mpz_t(), num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    cf.a0 = a;
    // theta - a0 = num/den with 0 <= num < den
    while (num != 0 && static_cast<int>(cf.digits.size()) < depth) {
        std::swap(num, den);
        mpz_fdiv_qr(a.get_mpz_t(), num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        cf.digits.push_back(a);
    }
    cf.terminated = (num == 0);
    return cf;
}

CFExpansion cf_expand(const RealInterval& theta, int depth) {
    if (depth < 1) throw Error(Errc::InvalidInput, "depth must be >= 1");
    if (theta.hi < theta.lo) throw Error(Errc::InvalidInput, "empty interval");
    if (theta.lo == theta.hi) return cf_expand(theta.lo, depth);

    BigRational lo = theta.lo, hi = theta.hi;
    CFExpansion cf;
    for (int n = 0; n <= depth; ++n) {
        const BigInt a = floor_of(lo);
        if (floor_of(hi) != a) {
            throw Error(Errc::PrecisionExhausted,
                        "interval for '" + theta.source + "' certifies only " +
                            std::to_string(cf.digits.size()) + " of " + std::to_string(depth) +
                            " digits");
        }
        if (n == 0)
            cf.a0 = a;
        else
            cf.digits.push_back(a);
        if (n == depth) break;
        if (lo == a) {
            // some real in the interval has a terminating expansion here
            throw Error(Errc::PrecisionExhausted,
                        "interval for '" + theta.source + "' contains a rational with expansion of length " +
                            std::to_string(cf.digits.size()));
        }
        BigRational new_lo = 1 / (hi - a);
        BigRational new_hi = 1 / (lo - a);
        lo = new_lo;
        hi = new_hi;
    }
    return cf;
}

CFExpansion cf_expand(const ThetaInput& theta, int depth) {
    return std::visit([depth](const auto& t) { return cf_expand(t, depth); }, theta);
}

BigRational ConvergentTable::value(std::size_t n) const {
    BigRational r(rows_.at(n).p, rows_.at(n).q);
    r.canonicalize();
    return r;
}

bool ConvergentTable::determinant_identity_holds() const {
    for (std::size_t n = 1; n < rows_.size(); ++n) {
        const BigInt det = rows_[n].p * rows_[n - 1].q - rows_[n - 1].p * rows_[n].q;
        const int expected = (n % 2 == 1) ? 1 : -1;  // (-1)^(n-1)
        if (det != expected) return false;
    }
    return true;
}

ConvergentTable convergents(const CFExpansion& cf) {
    std::vector<Convergent> rows;
    rows.reserve(cf.size());
    BigInt p_prev = ConvergentTable::seed_p(), q_prev = ConvergentTable::seed_q();
    BigInt p = cf.a0, q = 1;
    rows.push_back({0, p, q});
    for (std::size_t n = 1; n < cf.size(); ++n) {
        const BigInt& a = cf[n];
        BigInt p_next = a * p + p_prev;
        BigInt q_next = a * q + q_prev;
        p_prev = std::move(p);
        q_prev = std::move(q);
        p = std::move(p_next);
        q = std::move(q_next);
        rows.push_back({static_cast<int>(n), p, q});
    }
    return ConvergentTable(std::move(rows));
}

}  // namespace khom
