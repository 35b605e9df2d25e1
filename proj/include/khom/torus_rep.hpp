#pragma once

// Matrix realizations of the rotation algebra A_theta: VU = lambda UV with
// lambda = exp(2 pi i theta).

#include "khom/exact_arith.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace khom {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseCMatrix = Eigen::SparseMatrix<Complex>;

/// sign(0) = +1 throughout.
constexpr int sign_of(long k) noexcept { return k >= 0 ? 1 : -1; }

/// The rotation number together with, when rational, its exact form, so that
/// lambda^k is reduced modulo 1 exactly before exponentiating.
class Theta {
public:
    Theta() = default;
    explicit Theta(double value);
    explicit Theta(const BigRational& value);
    static Theta from_input(const ThetaInput& input);
    static Theta rational(long m, long q);

    double value() const noexcept { return value_; }
    bool is_rational() const noexcept { return rational_.has_value(); }
    /// (m, q) with q > 0 when rational and representable in long.
    const std::optional<std::pair<long, long>>& exact() const noexcept { return rational_; }

    /// lambda^k = exp(2 pi i k theta)
    Complex lambda_pow(long k) const;
    Complex lambda() const { return lambda_pow(1); }

    std::string to_string() const;

private:
    double value_ = 0.0;
    std::optional<std::pair<long, long>> rational_;
};

/// Finite sum  sum a_{m,n} U^m V^n  kept in the normal order U^m V^n.
class NCPolynomial {
public:
    using Key = std::pair<int, int>;

    NCPolynomial() = default;
    static NCPolynomial constant(Complex c);
    static NCPolynomial monomial(int m, int n, Complex c = 1.0);
    static NCPolynomial U(int power = 1) { return monomial(power, 0); }
    static NCPolynomial V(int power = 1) { return monomial(0, power); }

    const std::map<Key, Complex>& terms() const noexcept { return terms_; }
    Complex coefficient(int m, int n) const;
    void add_term(int m, int n, Complex c);
    bool is_zero() const noexcept { return terms_.empty(); }
    /// max |m| and max |n| over the support
    int u_degree() const;
    int v_degree() const;

    NCPolynomial operator+(const NCPolynomial& other) const;
    NCPolynomial operator-(const NCPolynomial& other) const;
    NCPolynomial operator*(Complex s) const;

private:
    std::map<Key, Complex> terms_;
};

/// Multiplication and adjoint need lambda: V^b U^c = lambda^{bc} U^c V^b.
class RotationAlgebra {
public:
    explicit RotationAlgebra(Theta theta) : theta_(std::move(theta)) {}

    const Theta& theta() const noexcept { return theta_; }
    NCPolynomial multiply(const NCPolynomial& a, const NCPolynomial& b) const;
    NCPolynomial adjoint(const NCPolynomial& a) const;
    /// tau(sum a_{m,n} U^m V^n) = a_{0,0}
    Complex trace(const NCPolynomial& a) const { return a.coefficient(0, 0); }

private:
    Theta theta_;
};

/// Square matrix over A_theta (an element of M_r(A_theta)).
class PolyMatrix {
public:
    explicit PolyMatrix(std::size_t r = 1) : r_(r), entries_(r * r) {}
    static PolyMatrix scalar(const NCPolynomial& p);
    static PolyMatrix identity(std::size_t r);
    static PolyMatrix block_diagonal(const std::vector<NCPolynomial>& diagonal);

    std::size_t size() const noexcept { return r_; }
    NCPolynomial& operator()(std::size_t i, std::size_t j) { return entries_[i * r_ + j]; }
    const NCPolynomial& operator()(std::size_t i, std::size_t j) const { return entries_[i * r_ + j]; }
    int max_degree() const;

private:
    std::size_t r_;
    std::vector<NCPolynomial> entries_;
};

/// Evaluates polynomials in a representation given by the images of U and V.
/// Negative powers use the adjoint, which is the inverse on genuine unitaries
/// and the correct truncation of the inverse for truncated shifts.
class PolyEvaluator {
public:
    PolyEvaluator(SparseCMatrix U, SparseCMatrix V);

    Eigen::Index dimension() const noexcept { return U_.rows(); }
    SparseCMatrix evaluate(const NCPolynomial& p);
    SparseCMatrix evaluate(const PolyMatrix& e);
    const SparseCMatrix& U_power(int k);
    const SparseCMatrix& V_power(int k);

private:
    SparseCMatrix U_, V_;
    std::map<int, SparseCMatrix> u_cache_, v_cache_;
};

enum class RepKind { clock_shift, truncated_z, truncated_z2, polynomial };

/// phi(U) = cyclic shift e_j -> e_{j+1 mod q}, phi(V) = diag(lambda^j),
/// lambda = exp(2 pi i m / q); optionally amplified by `multiplicity` copies
/// (U x I, V x I).
struct ClockShiftRep {
    long m = 0;
    long q = 1;
    long multiplicity = 1;
    Theta theta;
    CMatrix U;
    CMatrix V;

    Eigen::Index dimension() const { return U.rows(); }
    /// ||VU - lambda UV|| (spectral norm)
    double relation_defect() const;
    double unitarity_defect() const;
};

ClockShiftRep clock_shift(long m, long q, long multiplicity = 1);

enum class ShiftVariant {
    z1,       // U e_k = e_{k+1},            V e_k = lambda^k e_k
    z1prime,  // U e_k = lambda^{-k} e_k,    V e_k = e_{k+1}
};

const char* variant_name(ShiftVariant v) noexcept;
ShiftVariant parse_variant(const std::string& name);

/// Truncation of l^2(Z) (x C^d) to e_{-N..N}. The shift generator loses its
/// last column; `boundary_defective` names it.
struct TruncatedZRep {
    Theta theta;
    int N = 1;
    int fiber_dim = 1;
    ShiftVariant variant = ShiftVariant::z1;
    std::string boundary_defective;
    SparseCMatrix U;
    SparseCMatrix V;

    Eigen::Index dimension() const { return U.rows(); }
    /// Basis position of site k, fiber component c.
    Eigen::Index index_of(long k, int c = 0) const { return (k + N) * fiber_dim + c; }
    /// ||(VU - lambda UV) x|| over unit x supported on |k| <= N - 1.
    double interior_relation_defect() const;
};

TruncatedZRep truncated_rep(const Theta& theta, int N, ShiftVariant variant, int fiber_dim = 1);

/// Truncation of l^2(Z^2) to |m|, |n| <= N with U e_{m,n} = e_{m+1,n},
/// V e_{m,n} = lambda^m e_{m,n+1}, and the Dirac phase
/// F0 e_{m,n} = (m + i n)/|m + i n| e_{m,n} (F0 e_{0,0} = e_{0,0}).
struct TruncatedZ2Rep {
    Theta theta;
    int N = 1;
    SparseCMatrix U;
    SparseCMatrix V;
    CVector F0;

    Eigen::Index side() const { return 2 * N + 1; }
    Eigen::Index dimension() const { return side() * side(); }
    Eigen::Index index_of(long m, long n) const { return (m + N) * side() + (n + N); }
    Complex F0_at(long m, long n) const { return F0(index_of(m, n)); }
    double interior_relation_defect() const;
};

TruncatedZ2Rep dirac_data(const Theta& theta, int N);

Complex dirac_phase(long m, long n);

/// Normalized trace of a matrix in a finite (clock-shift) representation.
/// Truncated representations carry no normalized trace: UnsupportedForm.
Complex canonical_trace(const CMatrix& element, RepKind kind);
Complex canonical_trace(const NCPolynomial& element);

double spectral_norm(const CMatrix& m);

/// Dense view, for small matrices and diagnostics.
CMatrix to_dense(const SparseCMatrix& m);
SparseCMatrix to_sparse(const CMatrix& m, double drop = 0.0);
SparseCMatrix sparse_identity(Eigen::Index n);
SparseCMatrix kron_identity(const SparseCMatrix& a, Eigen::Index copies);

}  // namespace khom
