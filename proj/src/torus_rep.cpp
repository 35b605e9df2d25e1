#include "khom/torus_rep.hpp"

#include "khom/error.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace khom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex unit_phase(double turns) { return std::polar(1.0, kTwoPi * turns); }

}  // namespace

Theta::Theta(double value) : value_(value) {}

Theta::Theta(const BigRational& value) : value_(value.get_d()) {
    if (value.get_num().fits_slong_p() && value.get_den().fits_slong_p())
        rational_ = std::make_pair(value.get_num().get_si(), value.get_den().get_si());
}

Theta Theta::rational(long m, long q) {
    if (q <= 0) throw Error(Errc::InvalidInput, "rational theta needs q > 0");
    BigRational r(m, q);
    r.canonicalize();
    return Theta(r);
}

Theta Theta::from_input(const ThetaInput& input) {
    if (const auto* r = std::get_if<BigRational>(&input)) return Theta(*r);
    const auto& iv = std::get<RealInterval>(input);
    return Theta(BigRational((iv.lo + iv.hi) / 2).get_d());
}

Complex Theta::lambda_pow(long k) const {
    if (rational_) {
        const auto [m, q] = *rational_;
        __int128 r = static_cast<__int128>(k) * m % q;
        if (r < 0) r += q;
        return unit_phase(static_cast<double>(static_cast<long>(r)) / static_cast<double>(q));
    }
    const long double x = static_cast<long double>(k) * value_;
    return unit_phase(static_cast<double>(x - std::nearbyint(x)));
}

std::string Theta::to_string() const {
    if (rational_) return std::to_string(rational_->first) + "/" + std::to_string(rational_->second);
    std::ostringstream os;
    os.precision(17);
    os << value_;
    return os.str();
}

NCPolynomial NCPolynomial::constant(Complex c) { return monomial(0, 0, c); }

NCPolynomial NCPolynomial::monomial(int m, int n, Complex c) {
    NCPolynomial p;
    p.add_term(m, n, c);
    return p;
}

Complex NCPolynomial::coefficient(int m, int n) const {
    const auto it = terms_.find({m, n});
    return it == terms_.end() ? Complex(0.0) : it->second;
}

void NCPolynomial::add_term(int m, int n, Complex c) {
    auto& slot = terms_[{m, n}];
    slot += c;
    if (slot == Complex(0.0)) terms_.erase({m, n});
}

int NCPolynomial::u_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, std::abs(k.first));
    return d;
}

int NCPolynomial::v_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, std::abs(k.second));
    return d;
}

NCPolynomial NCPolynomial::operator+(const NCPolynomial& other) const {
    NCPolynomial r = *this;
    for (const auto& [k, c] : other.terms_) r.add_term(k.first, k.second, c);
    return r;
}

NCPolynomial NCPolynomial::operator-(const NCPolynomial& other) const { return *this + other * Complex(-1.0); }

NCPolynomial NCPolynomial::operator*(Complex s) const {
    NCPolynomial r;
    if (s == Complex(0.0)) return r;
    for (const auto& [k, c] : terms_) r.terms_[k] = c * s;
    return r;
}

NCPolynomial RotationAlgebra::multiply(const NCPolynomial& a, const NCPolynomial& b) const {
    NCPolynomial r;
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms()) {
            // U^a V^b U^c V^d = lambda^{bc} U^{a+c} V^{b+d}
            const long bc = static_cast<long>(ka.second) * kb.first;
            r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb * theta_.lambda_pow(bc));
        }
    return r;
}

NCPolynomial RotationAlgebra::adjoint(const NCPolynomial& a) const {
    NCPolynomial r;
    for (const auto& [k, c] : a.terms()) {
        // (U^m V^n)* = V^{-n} U^{-m} = lambda^{mn} U^{-m} V^{-n}
        const long mn = static_cast<long>(k.first) * k.second;
        r.add_term(-k.first, -k.second, std::conj(c) * theta_.lambda_pow(mn));
    }
    return r;
}

PolyMatrix PolyMatrix::scalar(const NCPolynomial& p) {
    PolyMatrix m(1);
    m(0, 0) = p;
    return m;
}

PolyMatrix PolyMatrix::identity(std::size_t r) {
    PolyMatrix m(r);
    for (std::size_t i = 0; i < r; ++i) m(i, i) = NCPolynomial::constant(1.0);
    return m;
}

PolyMatrix PolyMatrix::block_diagonal(const std::vector<NCPolynomial>& diagonal) {
    PolyMatrix m(diagonal.size());
    for (std::size_t i = 0; i < diagonal.size(); ++i) m(i, i) = diagonal[i];
    return m;
}

int PolyMatrix::max_degree() const {
    int d = 0;
    for (const auto& p : entries_) d = std::max({d, p.u_degree(), p.v_degree()});
    return d;
}

PolyEvaluator::PolyEvaluator(SparseCMatrix U, SparseCMatrix V) : U_(std::move(U)), V_(std::move(V)) {
    if (U_.rows() != U_.cols() || V_.rows() != V_.cols() || U_.rows() != V_.rows())
        throw Error(Errc::ShapeMismatch, "U and V must be square of equal size");
}

namespace {

const SparseCMatrix& power_of(const SparseCMatrix& base, int k, std::map<int, SparseCMatrix>& cache) {
    if (auto it = cache.find(k); it != cache.end()) return it->second;
    SparseCMatrix result;
    if (k == 0) {
        result = sparse_identity(base.rows());
    } else if (k > 0) {
        result = (power_of(base, k - 1, cache) * base).pruned();
    } else {
        SparseCMatrix adj = base.adjoint();
        result = (power_of(base, k + 1, cache) * adj).pruned();
    }
    return cache.emplace(k, std::move(result)).first->second;
}

}  // namespace

const SparseCMatrix& PolyEvaluator::U_power(int k) { return power_of(U_, k, u_cache_); }
const SparseCMatrix& PolyEvaluator::V_power(int k) { return power_of(V_, k, v_cache_); }

SparseCMatrix PolyEvaluator::evaluate(const NCPolynomial& p) {
    SparseCMatrix out(dimension(), dimension());
    for (const auto& [k, c] : p.terms()) {
        SparseCMatrix term = U_power(k.first) * V_power(k.second);
        out += c * term;
    }
    out.prune(Complex(0.0));
    return out;
}

SparseCMatrix PolyEvaluator::evaluate(const PolyMatrix& e) {
    const Eigen::Index d = dimension();
    const auto r = static_cast<Eigen::Index>(e.size());
    std::vector<Eigen::Triplet<Complex>> triplets;
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j) {
            const SparseCMatrix block = evaluate(e(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
            for (Eigen::Index col = 0; col < block.outerSize(); ++col)
                for (SparseCMatrix::InnerIterator it(block, col); it; ++it)
                    triplets.emplace_back(i * d + it.row(), j * d + it.col(), it.value());
        }
    SparseCMatrix out(r * d, r * d);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

double spectral_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

CMatrix to_dense(const SparseCMatrix& m) { return CMatrix(m); }

SparseCMatrix to_sparse(const CMatrix& m, double drop) {
    SparseCMatrix s = m.sparseView(Complex(1.0), drop);
    s.makeCompressed();
    return s;
}

SparseCMatrix sparse_identity(Eigen::Index n) {
    SparseCMatrix id(n, n);
    id.setIdentity();
    return id;
}

SparseCMatrix kron_identity(const SparseCMatrix& a, Eigen::Index copies) {
    if (copies == 1) return a;
    std::vector<Eigen::Triplet<Complex>> t;
    for (Eigen::Index col = 0; col < a.outerSize(); ++col)
        for (SparseCMatrix::InnerIterator it(a, col); it; ++it)
            for (Eigen::Index c = 0; c < copies; ++c)
                t.emplace_back(it.row() * copies + c, it.col() * copies + c, it.value());
    SparseCMatrix out(a.rows() * copies, a.cols() * copies);
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

double ClockShiftRep::relation_defect() const {
    return spectral_norm(V * U - theta.lambda() * U * V);
}

double ClockShiftRep::unitarity_defect() const {
    const auto n = dimension();
    return std::max(spectral_norm(U.adjoint() * U - CMatrix::Identity(n, n)),
                    spectral_norm(V.adjoint() * V - CMatrix::Identity(n, n)));
}

ClockShiftRep clock_shift(long m, long q, long multiplicity) {
    if (q < 1) throw Error(Errc::InvalidInput, "clock_shift needs q >= 1");
    if (multiplicity < 1) throw Error(Errc::InvalidInput, "clock_shift needs multiplicity >= 1");
    if (std::gcd(m, q) != 1)
        throw Error(Errc::NotCoprime, "gcd(" + std::to_string(m) + ", " + std::to_string(q) + ") != 1");
    ClockShiftRep rep;
    rep.m = m;
    rep.q = q;
    rep.multiplicity = multiplicity;
    rep.theta = Theta::rational(m, q);
    CMatrix U = CMatrix::Zero(q, q), V = CMatrix::Zero(q, q);
    for (long j = 0; j < q; ++j) {
        U((j + 1) % q, j) = 1.0;
        V(j, j) = rep.theta.lambda_pow(j);
    }
    if (multiplicity == 1) {
        rep.U = std::move(U);
        rep.V = std::move(V);
    } else {
        rep.U = to_dense(kron_identity(to_sparse(U), multiplicity));
        rep.V = to_dense(kron_identity(to_sparse(V), multiplicity));
    }
    return rep;
}

const char* variant_name(ShiftVariant v) noexcept { return v == ShiftVariant::z1 ? "z1" : "z1prime"; }

ShiftVariant parse_variant(const std::string& name) {
    if (name == "z1") return ShiftVariant::z1;
    if (name == "z1prime" || name == "z1'") return ShiftVariant::z1prime;
    throw Error(Errc::InvalidInput, "unknown variant '" + name + "' (expected z1 or z1prime)");
}

TruncatedZRep truncated_rep(const Theta& theta, int N, ShiftVariant variant, int fiber_dim) {
    if (N < 1) throw Error(Errc::InvalidInput, "truncation half-width N must be >= 1");
    if (fiber_dim < 1) throw Error(Errc::InvalidInput, "fiber dimension must be >= 1");
    TruncatedZRep rep;
    rep.theta = theta;
    rep.N = N;
    rep.fiber_dim = fiber_dim;
    rep.variant = variant;
    const Eigen::Index sites = 2 * N + 1;
    std::vector<Eigen::Triplet<Complex>> shift, diag;
    for (long k = -N; k <= N; ++k) {
        const Eigen::Index i = k + N;
        if (k < N) shift.emplace_back(i + 1, i, 1.0);
        const long power = variant == ShiftVariant::z1 ? k : -k;
        diag.emplace_back(i, i, theta.lambda_pow(power));
    }
    SparseCMatrix S(sites, sites), D(sites, sites);
    S.setFromTriplets(shift.begin(), shift.end());
    D.setFromTriplets(diag.begin(), diag.end());
    S = kron_identity(S, fiber_dim);
    D = kron_identity(D, fiber_dim);
    if (variant == ShiftVariant::z1) {
        rep.U = std::move(S);
        rep.V = std::move(D);
        rep.boundary_defective = "U";
    } else {
        rep.U = std::move(D);
        rep.V = std::move(S);
        rep.boundary_defective = "V";
    }
    return rep;
}

double TruncatedZRep::interior_relation_defect() const {
    const CMatrix defect = to_dense(SparseCMatrix(V * U - theta.lambda() * U * V));
    // columns of sites |k| <= N - 1
    const Eigen::Index first = index_of(-N + 1), count = (2 * N - 1) * fiber_dim;
    return spectral_norm(defect.middleCols(first, count));
}

Complex dirac_phase(long m, long n) {
    if (m == 0 && n == 0) return 1.0;
    const double r = std::hypot(static_cast<double>(m), static_cast<double>(n));
    return {static_cast<double>(m) / r, static_cast<double>(n) / r};
}

TruncatedZ2Rep dirac_data(const Theta& theta, int N) {
    if (N < 1) throw Error(Errc::InvalidInput, "truncation half-width N must be >= 1");
    TruncatedZ2Rep rep;
    rep.theta = theta;
    rep.N = N;
    const Eigen::Index dim = rep.dimension();
    std::vector<Eigen::Triplet<Complex>> u, v;
    rep.F0.resize(dim);
    for (long m = -N; m <= N; ++m)
        for (long n = -N; n <= N; ++n) {
            const Eigen::Index i = rep.index_of(m, n);
            if (m < N) u.emplace_back(rep.index_of(m + 1, n), i, 1.0);
            if (n < N) v.emplace_back(rep.index_of(m, n + 1), i, theta.lambda_pow(m));
            rep.F0(i) = dirac_phase(m, n);
        }
    rep.U.resize(dim, dim);
    rep.V.resize(dim, dim);
    rep.U.setFromTriplets(u.begin(), u.end());
    rep.V.setFromTriplets(v.begin(), v.end());
    return rep;
}

double TruncatedZ2Rep::interior_relation_defect() const {
    const SparseCMatrix defect = V * U - theta.lambda() * U * V;
    // Frobenius norm of the interior columns bounds their spectral norm
    double sum = 0.0;
    for (Eigen::Index col = 0; col < defect.outerSize(); ++col) {
        const long m = col / side() - N, n = col % side() - N;
        if (std::abs(m) > N - 1 || std::abs(n) > N - 1) continue;
        for (SparseCMatrix::InnerIterator it(defect, col); it; ++it) sum += std::norm(it.value());
    }
    return std::sqrt(sum);
}

Complex canonical_trace(const CMatrix& element, RepKind kind) {
    if (kind != RepKind::clock_shift)
        throw Error(Errc::UnsupportedForm, "normalized trace needs a finite (clock-shift) representation");
    if (element.rows() != element.cols() || element.rows() == 0)
        throw Error(Errc::UnsupportedForm, "trace of a non-square matrix");
    return element.trace() / static_cast<double>(element.rows());
}

Complex canonical_trace(const NCPolynomial& element) { return element.coefficient(0, 0); }

}  // namespace khom
