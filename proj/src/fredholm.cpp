#include "khom/fredholm.hpp"

#include "khom/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace khom {

const char* method_name(PairingMethod m) noexcept {
    switch (m) {
        case PairingMethod::trace_formula: return "trace-formula";
        case PairingMethod::kernel_index: return "kernel-index";
        case PairingMethod::compressed_index: return "compressed-index";
    }
    return "unknown";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double sparse_norm(const SparseCMatrix& m) { return m.norm(); }

SparseCMatrix conjugate_by_diagonal(const SparseCMatrix& a, const CVector& q) {
    SparseCMatrix out = a;
    for (Eigen::Index col = 0; col < out.outerSize(); ++col)
        for (SparseCMatrix::InnerIterator it(out, col); it; ++it)
            it.valueRef() = q(it.row()) * it.value() * std::conj(q(it.col()));
    return out;
}

SparseCMatrix diagonal_matrix(const Eigen::VectorXd& d) {
    SparseCMatrix m(d.size(), d.size());
    std::vector<Eigen::Triplet<Complex>> t;
    for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d(i));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

/// Rounds and enforces the integrality threshold.
long round_pairing(double raw, const Tolerances& tol, const std::string& what) {
    const double nearest = std::nearbyint(raw);
    if (std::abs(raw - nearest) > tol.round)
        throw Error(Errc::NonIntegerPairing, what + ": raw value " + std::to_string(raw) + " is " +
                                                 std::to_string(std::abs(raw - nearest)) +
                                                 " from the nearest integer");
    return static_cast<long>(nearest);
}

void require_projection(const CMatrix& e, const Tolerances& tol) {
    const double sa = spectral_norm(e - e.adjoint());
    const double idem = spectral_norm(e * e - e);
    if (sa > tol.projection || idem > tol.projection)
        throw Error(Errc::NotAProjection, "||e - e*|| = " + std::to_string(sa) + ", ||e^2 - e|| = " +
                                              std::to_string(idem));
}

}  // namespace

DiagonalFrame random_diagonal_frame(std::uint64_t seed) {
    return [seed](long a, long b) {
        std::uint64_t h = splitmix64(seed);
        h = splitmix64(h ^ static_cast<std::uint64_t>(a));
        h = splitmix64(h ^ (static_cast<std::uint64_t>(b) * 0x2545f4914f6cdd1dULL));
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        return std::polar(1.0, 2.0 * std::numbers::pi * u);
    };
}

bool ModuleInvariants::holds(double tol) const {
    return F_selfadjoint <= tol && F_involution <= tol && gamma_involution <= tol && gamma_anticommutes <= tol &&
           gamma_commutes_pi <= tol;
}

SparseCMatrix EvenFredholmModule::pi(const SparseCMatrix& a) const {
    const Eigen::Index d = base_dimension();
    std::vector<Eigen::Triplet<Complex>> t;
    if (!zero_homomorphism) {
        for (Eigen::Index col = 0; col < a.outerSize(); ++col)
            for (SparseCMatrix::InnerIterator it(a, col); it; ++it) {
                t.emplace_back(it.row(), it.col(), it.value());
                if (form == EvenForm::dirac) t.emplace_back(d + it.row(), d + it.col(), it.value());
            }
    }
    SparseCMatrix out(2 * d, 2 * d);
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

ModuleInvariants EvenFredholmModule::invariants() const {
    ModuleInvariants inv;
    const Eigen::Index n = F.rows();
    const SparseCMatrix id = sparse_identity(n);
    const SparseCMatrix G = diagonal_matrix(gamma);
    const SparseCMatrix Fadj = F.adjoint();
    inv.F_selfadjoint = sparse_norm(F - Fadj);
    inv.F_involution = sparse_norm(SparseCMatrix(F * F) - id);
    inv.gamma_involution = sparse_norm(SparseCMatrix(G * G) - id);
    inv.gamma_anticommutes = sparse_norm(SparseCMatrix(G * F) + SparseCMatrix(F * G));
    for (const SparseCMatrix* gen : {&base_U, &base_V}) {
        const SparseCMatrix p = pi(*gen);
        inv.gamma_commutes_pi =
            std::max(inv.gamma_commutes_pi, sparse_norm(SparseCMatrix(G * p) - SparseCMatrix(p * G)));
    }
    return inv;
}

EvenFredholmModule canonical_even(std::string name, const Theta& theta, const CMatrix& phi_U, const CMatrix& phi_V,
                                  std::optional<long> finite_order) {
    if (phi_U.rows() != phi_U.cols() || phi_U.rows() != phi_V.rows() || phi_V.rows() != phi_V.cols())
        throw Error(Errc::ShapeMismatch, "phi(U) and phi(V) must be square of equal size");
    EvenFredholmModule m;
    m.name = std::move(name);
    m.form = EvenForm::canonical;
    m.theta = theta;
    m.finite_order = finite_order;
    m.base_U = to_sparse(phi_U);
    m.base_V = to_sparse(phi_V);
    const Eigen::Index d = phi_U.rows();
    std::vector<Eigen::Triplet<Complex>> t;
    for (Eigen::Index i = 0; i < d; ++i) {
        t.emplace_back(i, d + i, 1.0);
        t.emplace_back(d + i, i, 1.0);
    }
    m.F.resize(2 * d, 2 * d);
    m.F.setFromTriplets(t.begin(), t.end());
    m.gamma = Eigen::VectorXd::Ones(2 * d);
    m.gamma.tail(d).setConstant(-1.0);
    return m;
}

EvenFredholmModule z0_module() {
    const CMatrix one = CMatrix::Identity(1, 1);
    return canonical_even("z0", Theta::rational(0, 1), one, one, 1);
}

EvenFredholmModule z0prime_module(const ClockShiftRep& rep) {
    return canonical_even("z0prime", rep.theta, rep.U, rep.V, rep.q);
}

EvenFredholmModule zero_even_module(int d, const Theta& theta) {
    const CMatrix zero = CMatrix::Zero(d, d);
    EvenFredholmModule m = canonical_even("zero", theta, zero, zero);
    m.zero_homomorphism = true;
    return m;
}

EvenFredholmModule dirac_module(const Theta& theta, int N) {
    if (N < 4) throw Error(Errc::InvalidInput, "Dirac module needs N >= 4");
    const TruncatedZ2Rep rep = dirac_data(theta, N);
    EvenFredholmModule m;
    m.name = "dirac";
    m.form = EvenForm::dirac;
    m.theta = theta;
    m.N = N;
    m.base_U = rep.U;
    m.base_V = rep.V;
    m.F0 = rep.F0;
    const Eigen::Index d = rep.dimension();
    std::vector<Eigen::Triplet<Complex>> t;
    for (Eigen::Index i = 0; i < d; ++i) {
        t.emplace_back(i, d + i, rep.F0(i));
        t.emplace_back(d + i, i, std::conj(rep.F0(i)));
    }
    m.F.resize(2 * d, 2 * d);
    m.F.setFromTriplets(t.begin(), t.end());
    m.gamma = Eigen::VectorXd::Ones(2 * d);
    m.gamma.tail(d).setConstant(-1.0);
    return m;
}

namespace {

CVector frame_vector(const EvenFredholmModule& m, const DiagonalFrame& frame) {
    const Eigen::Index d = m.base_dimension();
    CVector q(d);
    if (m.form == EvenForm::dirac) {
        const long side = 2L * m.N + 1;
        for (Eigen::Index i = 0; i < d; ++i) q(i) = frame(i / side - m.N, i % side - m.N);
    } else {
        for (Eigen::Index i = 0; i < d; ++i) q(i) = frame(i, 0);
    }
    return q;
}

}  // namespace

EvenFredholmModule conjugated(const EvenFredholmModule& module, const DiagonalFrame& frame) {
    EvenFredholmModule m = module;
    const CVector q = frame_vector(module, frame);
    CVector qq(2 * q.size());
    qq << q, q;
    m.base_U = conjugate_by_diagonal(module.base_U, q);
    m.base_V = conjugate_by_diagonal(module.base_V, q);
    m.F = conjugate_by_diagonal(module.F, qq);
    m.frame = frame;
    return m;
}

EvenFredholmModule with_truncation(const EvenFredholmModule& module, int N) {
    if (module.form != EvenForm::dirac)
        throw Error(Errc::InvalidInput, "only Dirac modules carry a truncation");
    EvenFredholmModule m = dirac_module(module.theta, N);
    m.name = module.name;
    if (module.frame) m = conjugated(m, *module.frame);
    return m;
}

std::string describe(const EvenClass& e) {
    if (const auto* r = std::get_if<RieffelProjection>(&e)) return "p(theta=" + std::to_string(r->theta()) + ")";
    const auto& pm = std::get<PolyMatrix>(e);
    if (pm.size() == 1) {
        const auto& p = pm(0, 0);
        if (p.is_zero()) return "0";
        if (p.terms().size() == 1 && p.coefficient(0, 0) == Complex(1.0)) return "1";
    }
    return "matrix(" + std::to_string(pm.size()) + "x" + std::to_string(pm.size()) + ")";
}

PairingResult even_pairing(const EvenFredholmModule& module, const EvenClass& e, const Tolerances& tol) {
    if (module.form == EvenForm::dirac) return dirac_even_pairing(module, e, tol);
    PairingResult r;
    r.module = module.name;
    r.element = describe(e);
    r.method = PairingMethod::trace_formula;
    r.tolerances = tol;
    if (module.zero_homomorphism) {
        r.value = r.value_check = 0;
        return r;
    }
    CMatrix phi_e;
    if (const auto* pm = std::get_if<PolyMatrix>(&e)) {
        PolyEvaluator ev(module.base_U, module.base_V);
        phi_e = to_dense(ev.evaluate(*pm));
    } else {
        if (!module.finite_order)
            throw Error(Errc::UnsupportedForm, "functional calculus needs phi(U) of known finite order");
        phi_e = std::get<RieffelProjection>(e).evaluate_finite(to_dense(module.base_U), to_dense(module.base_V),
                                                               *module.finite_order);
    }
    require_projection(phi_e, tol);
    // sum_k Tr phi(e_kk) is the trace of the block matrix phi(e)
    r.raw = r.raw_check = phi_e.trace().real();
    r.value = r.value_check = round_pairing(r.raw, tol, module.name + " x " + r.element);
    return r;
}

namespace {

double dirac_raw_index(const EvenFredholmModule& module, const EvenClass& p) {
    SparseCMatrix P;
    if (const auto* pm = std::get_if<PolyMatrix>(&p)) {
        PolyEvaluator ev(module.base_U, module.base_V);
        P = ev.evaluate(*pm);
    } else {
        const auto& rp = std::get<RieffelProjection>(p);
        if (module.N * rp.theta() < 4.0)
            throw Error(Errc::RepresentationTooSmall,
                        "Dirac truncation N = " + std::to_string(module.N) + " below 4/theta");
        P = rp.evaluate_truncated(module.base_U, module.base_V, module.N);
    }
    const Eigen::Index d = module.base_dimension();
    // A = P - u P u*, u = F0 on every block
    SparseCMatrix A = P;
    for (Eigen::Index col = 0; col < A.outerSize(); ++col)
        for (SparseCMatrix::InnerIterator it(A, col); it; ++it) {
            const Complex ux = module.F0(it.row() % d), uy = module.F0(it.col() % d);
            it.valueRef() *= 1.0 - ux * std::conj(uy);
        }
    A.prune(Complex(0.0));
    const SparseCMatrix A2 = A * A;
    const SparseCMatrix At = A.transpose();
    // Tr A^3 = sum_{x,y} (A^2)_{xy} A_{yx}
    return A2.cwiseProduct(At).sum().real();
}

}  // namespace

PairingResult dirac_even_pairing(const EvenFredholmModule& module, const EvenClass& p, const Tolerances& tol) {
    if (module.form != EvenForm::dirac) throw Error(Errc::InvalidInput, "dirac_even_pairing needs a Dirac module");
    PairingResult r;
    r.module = module.name;
    r.element = describe(p);
    r.method = PairingMethod::compressed_index;
    r.tolerances = tol;
    r.N = module.N;
    r.N_check = module.N + 4;
    r.raw = dirac_raw_index(module, p);
    r.raw_check = dirac_raw_index(with_truncation(module, r.N_check), p);
    r.value = round_pairing(r.raw, tol, module.name + " x " + r.element + " at N=" + std::to_string(r.N));
    r.value_check = round_pairing(r.raw_check, tol, module.name + " x " + r.element + " at N=" +
                                                        std::to_string(r.N_check));
    r.stable = r.value == r.value_check;
    if (!r.stable)
        throw Error(Errc::UnstableIndex, module.name + " x " + r.element + ": " + std::to_string(r.value) +
                                             " at N=" + std::to_string(r.N) + " but " +
                                             std::to_string(r.value_check) + " at N=" + std::to_string(r.N_check));
    return r;
}

ModuleInvariants OddFredholmModule::invariants() const {
    ModuleInvariants inv;
    const Eigen::VectorXd sq = F.cwiseProduct(F) - Eigen::VectorXd::Ones(F.size());
    inv.F_involution = sq.cwiseAbs().maxCoeff();
    return inv;  // F is real diagonal: self-adjoint exactly; no grading
}

OddFredholmModule canonical_odd(const Theta& theta, int N, ShiftVariant variant, int fiber_dim) {
    if (N < 2) throw Error(Errc::InvalidInput, "odd module needs truncation N >= 2");
    OddFredholmModule m;
    m.name = variant_name(variant);
    m.rep = truncated_rep(theta, N, variant, fiber_dim);
    m.F.resize(m.rep.dimension());
    for (long k = -N; k <= N; ++k)
        for (int c = 0; c < fiber_dim; ++c) m.F(m.rep.index_of(k, c)) = sign_of(k);
    return m;
}

OddFredholmModule conjugated(const OddFredholmModule& module, const DiagonalFrame& frame) {
    OddFredholmModule m = module;
    const auto& rep = module.rep;
    CVector q(rep.dimension());
    for (long k = -rep.N; k <= rep.N; ++k)
        for (int c = 0; c < rep.fiber_dim; ++c) q(rep.index_of(k, c)) = frame(k, c);
    m.rep.U = conjugate_by_diagonal(rep.U, q);
    m.rep.V = conjugate_by_diagonal(rep.V, q);
    // F is diagonal, so Q F Q* = F
    m.frame = frame;
    return m;
}

OddFredholmModule with_truncation(const OddFredholmModule& module, int N) {
    OddFredholmModule m = canonical_odd(module.rep.theta, N, module.rep.variant, module.rep.fiber_dim);
    m.name = module.name;
    if (module.frame) m = conjugated(m, *module.frame);
    return m;
}

namespace {

/// Number of kernel vectors (columns of `basis`) that can be chosen with no
/// weight on the listed boundary coordinates.
long interior_kernel_dimension(const CMatrix& basis, const std::vector<Eigen::Index>& boundary) {
    if (basis.cols() == 0) return 0;
    if (boundary.empty()) return basis.cols();
    CMatrix on_boundary(static_cast<Eigen::Index>(boundary.size()), basis.cols());
    for (std::size_t i = 0; i < boundary.size(); ++i)
        on_boundary.row(static_cast<Eigen::Index>(i)) = basis.row(boundary[i]);
    Eigen::JacobiSVD<CMatrix> svd(on_boundary);
    long rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-6) ++rank;
    return basis.cols() - rank;
}

struct IndexCount {
    long kernel = 0;
    long cokernel = 0;
};

IndexCount odd_index(const OddFredholmModule& module, const PolyMatrix& u, const Tolerances& tol) {
    const auto& rep = module.rep;
    const int N = rep.N;
    const int width = std::max(1, u.max_degree());
    if (width >= N) throw Error(Errc::RepresentationTooSmall, "element degree exceeds truncation");

    PolyEvaluator ev(rep.U, rep.V);
    const CMatrix pu = to_dense(ev.evaluate(u));
    const Eigen::Index D = rep.dimension();
    const auto r = static_cast<Eigen::Index>(u.size());

    // unitarity on columns supported away from the edge
    std::vector<Eigen::Index> interior_cols;
    for (Eigen::Index b = 0; b < r; ++b)
        for (long k = -N + width; k <= N - width; ++k)
            for (int c = 0; c < rep.fiber_dim; ++c) interior_cols.push_back(b * D + rep.index_of(k, c));
    const CMatrix id = CMatrix::Identity(r * D, r * D);
    const CMatrix left = pu.adjoint() * pu - id, right = pu * pu.adjoint() - id;
    double defect = 0.0;
    for (Eigen::Index col : interior_cols) defect = std::max({defect, left.col(col).norm(), right.col(col).norm()});
    if (defect > tol.unitary)
        throw Error(Errc::NotUnitary, "||u*u - 1|| on interior columns = " + std::to_string(defect));

    // range of E = (1 + F)/2: sites k >= 0
    std::vector<Eigen::Index> coords, boundary;
    for (Eigen::Index b = 0; b < r; ++b)
        for (long k = 0; k <= N; ++k)
            for (int c = 0; c < rep.fiber_dim; ++c) {
                if (k > N - width) boundary.push_back(static_cast<Eigen::Index>(coords.size()));
                coords.push_back(b * D + rep.index_of(k, c));
            }
    const auto n = static_cast<Eigen::Index>(coords.size());
    CMatrix T(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) T(i, j) = pu(coords[i], coords[j]);

    Eigen::JacobiSVD<CMatrix> svd(T, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index zero = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) < tol.rank) ++zero;
    IndexCount count;
    count.kernel = interior_kernel_dimension(svd.matrixV().rightCols(zero), boundary);
    count.cokernel = interior_kernel_dimension(svd.matrixU().rightCols(zero), boundary);
    return count;
}

std::string describe_unitary(const PolyMatrix& u) {
    if (u.size() == 1) {
        const auto& p = u(0, 0);
        if (p.terms().size() == 1) {
            const auto& [key, c] = *p.terms().begin();
            if (c == Complex(1.0)) {
                if (key.second == 0) return key.first == 1 ? "U" : "U^" + std::to_string(key.first);
                if (key.first == 0) return key.second == 1 ? "V" : "V^" + std::to_string(key.second);
            }
        }
    }
    return "unitary(" + std::to_string(u.size()) + "x" + std::to_string(u.size()) + ")";
}

}  // namespace

PairingResult odd_pairing(const OddFredholmModule& module, const PolyMatrix& u, const Tolerances& tol) {
    PairingResult r;
    r.module = module.name;
    r.element = describe_unitary(u);
    r.method = PairingMethod::kernel_index;
    r.tolerances = tol;
    r.N = module.N();
    r.N_check = module.N() + 4;
    const IndexCount here = odd_index(module, u, tol);
    const IndexCount there = odd_index(with_truncation(module, r.N_check), u, tol);
    r.kernel_dim = here.kernel;
    r.cokernel_dim = here.cokernel;
    r.value = here.kernel - here.cokernel;
    r.value_check = there.kernel - there.cokernel;
    r.raw = static_cast<double>(r.value);
    r.raw_check = static_cast<double>(r.value_check);
    r.stable = r.value == r.value_check;
    if (!r.stable)
        throw Error(Errc::UnstableIndex, module.name + " x " + r.element + ": " + std::to_string(r.value) +
                                             " at N=" + std::to_string(r.N) + " but " +
                                             std::to_string(r.value_check) + " at N=" + std::to_string(r.N_check));
    return r;
}

namespace {

CommutatorReport::Entry commutator_entry(const std::string& name, const CMatrix& C, double rank_tol) {
    CommutatorReport::Entry e;
    e.generator = name;
    if (C.size() == 0) return e;
    Eigen::BDCSVD<CMatrix> svd(C);
    const auto& sv = svd.singularValues();
    e.norm = sv.size() > 0 ? sv(0) : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > rank_tol) ++e.rank;
        if (i < 16) e.singular_values.push_back(sv(i));
    }
    return e;
}

void require_generator(const std::string& g) {
    if (g != "U" && g != "V") throw Error(Errc::InvalidInput, "unknown generator '" + g + "' (expected U or V)");
}

}  // namespace

CommutatorReport compactness_report(const OddFredholmModule& module, const std::vector<std::string>& generators,
                                    double rank_tol) {
    CommutatorReport report;
    report.module = module.name;
    report.rank_tolerance = rank_tol;
    const CMatrix F = module.F.cast<Complex>().asDiagonal();
    for (const auto& g : generators) {
        require_generator(g);
        const CMatrix a = to_dense(g == "U" ? module.rep.U : module.rep.V);
        report.entries.push_back(commutator_entry(g, F * a - a * F, rank_tol));
    }
    return report;
}

CommutatorReport compactness_report(const EvenFredholmModule& module, const std::vector<std::string>& generators,
                                    double rank_tol) {
    CommutatorReport report;
    report.module = module.name;
    report.rank_tolerance = rank_tol;
    for (const auto& g : generators) {
        require_generator(g);
        const SparseCMatrix a = module.pi(g == "U" ? module.base_U : module.base_V);
        const SparseCMatrix c = module.F * a - a * module.F;
        report.entries.push_back(commutator_entry(g, to_dense(c), rank_tol));
    }
    return report;
}

}  // namespace khom
