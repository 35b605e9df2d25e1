#pragma once

// Fredholm modules over A_theta and their index pairings with K-theory.

#include "khom/rieffel.hpp"
#include "khom/torus_rep.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace khom {

struct Tolerances {
    double rank = 1e-8;        // singular values below this count as kernel
    double round = 0.1;        // max |raw - nearest integer| for a pairing
    double unitary = 1e-8;     // ||u*u - 1|| on interior indices
    double projection = 1e-8;  // ||e^2 - e||
};

enum class PairingMethod { trace_formula, kernel_index, compressed_index };
const char* method_name(PairingMethod m) noexcept;

struct PairingResult {
    std::string module;
    std::string element;
    long value = 0;
    double raw = 0.0;  // un-rounded quantity the value was read from
    PairingMethod method = PairingMethod::trace_formula;
    int N = 0;           // truncation used (0: finite-dimensional, none)
    int N_check = 0;     // truncation of the stability recomputation
    long value_check = 0;
    double raw_check = 0.0;
    bool stable = true;
    long kernel_dim = 0;     // kernel_index only
    long cokernel_dim = 0;
    Tolerances tolerances;
};

/// Diagonal unitary on the basis sites, as a function of the site
/// coordinates (k, fiber) for l^2(Z) x C^d, (m, n) for l^2(Z^2), (j, 0) for
/// finite representations. Defined on every site so it survives re-truncation.
using DiagonalFrame = std::function<Complex(long, long)>;

/// Phases exp(2 pi i u), u uniform from a counter-based hash of (seed, a, b).
DiagonalFrame random_diagonal_frame(std::uint64_t seed);

struct ModuleInvariants {
    double F_selfadjoint = 0.0;   // ||F - F*||
    double F_involution = 0.0;    // ||F^2 - 1||
    double gamma_involution = 0.0;
    double gamma_anticommutes = 0.0;  // ||gamma F + F gamma||
    double gamma_commutes_pi = 0.0;   // max over U, V of ||[gamma, pi(a)]||
    bool holds(double tol = 1e-12) const;
};

enum class EvenForm { canonical, dirac };

/// (H + H, pi, F, gamma). Canonical form: pi = phi + 0, F = [[0,1],[1,0]],
/// gamma = diag(1,-1). Dirac form: H = l^2(Z^2) truncated, pi(a) = a + a,
/// F = [[0, F0], [F0*, 0]].
struct EvenFredholmModule {
    std::string name;
    EvenForm form = EvenForm::canonical;
    Theta theta;
    int N = 0;                       // Dirac truncation half-width
    bool zero_homomorphism = false;  // phi = 0 (non-unital)
    std::optional<long> finite_order;  // phi(U)^order = I, enables f(U)
    SparseCMatrix base_U;  // phi(U) or the l^2(Z^2) operator
    SparseCMatrix base_V;
    CVector F0;            // Dirac phase (Dirac form only)
    SparseCMatrix F;
    Eigen::VectorXd gamma;
    std::optional<DiagonalFrame> frame;

    Eigen::Index base_dimension() const { return base_U.rows(); }
    /// pi(a) on the full space, from a's image on the base space.
    SparseCMatrix pi(const SparseCMatrix& base_image) const;
    ModuleInvariants invariants() const;
};

/// Canonical even module of a finite-dimensional representation phi.
EvenFredholmModule canonical_even(std::string name, const Theta& theta, const CMatrix& phi_U, const CMatrix& phi_V,
                                  std::optional<long> finite_order = std::nullopt);
/// z0 at theta = 0: phi(U) = phi(V) = 1.
EvenFredholmModule z0_module();
/// z0' from clock_shift(m, q).
EvenFredholmModule z0prime_module(const ClockShiftRep& rep);
/// phi = 0 on C^d: a degenerate module.
EvenFredholmModule zero_even_module(int d, const Theta& theta);

EvenFredholmModule dirac_module(const Theta& theta, int N);

/// Q pi Q*, Q F Q*, with Q = frame + frame on the doubled space.
EvenFredholmModule conjugated(const EvenFredholmModule& module, const DiagonalFrame& frame);
/// Dirac modules only: the same module at another truncation (frame kept).
EvenFredholmModule with_truncation(const EvenFredholmModule& module, int N);

/// Projection class to pair with an even module.
using EvenClass = std::variant<PolyMatrix, RieffelProjection>;
std::string describe(const EvenClass& e);

/// Canonical modules: value = sum_k Tr phi(e_kk). Dirac modules are routed
/// to dirac_even_pairing.
PairingResult even_pairing(const EvenFredholmModule& module, const EvenClass& e, const Tolerances& tol = {});

/// Index of P F0 P on the range of P, via Tr (P - F0 P F0*)^3 over the
/// truncation box; recomputed at N + 4 as a stability certificate.
PairingResult dirac_even_pairing(const EvenFredholmModule& module, const EvenClass& p, const Tolerances& tol = {});

/// (l^2(Z) x C^d, pi_1, F = diag(sign k)) on the truncation |k| <= N.
struct OddFredholmModule {
    std::string name;
    TruncatedZRep rep;
    Eigen::VectorXd F;
    std::optional<DiagonalFrame> frame;

    int N() const { return rep.N; }
    ModuleInvariants invariants() const;
};

OddFredholmModule canonical_odd(const Theta& theta, int N, ShiftVariant variant, int fiber_dim = 1);
OddFredholmModule conjugated(const OddFredholmModule& module, const DiagonalFrame& frame);
OddFredholmModule with_truncation(const OddFredholmModule& module, int N);

/// dim ker(E u E) - dim ker(E u* E), E = (1 + F)/2, counting only kernel
/// vectors that avoid the truncation edge; recomputed at N + 4.
PairingResult odd_pairing(const OddFredholmModule& module, const PolyMatrix& u, const Tolerances& tol = {});

struct CommutatorReport {
    struct Entry {
        std::string generator;
        double norm = 0.0;
        long rank = 0;
        std::vector<double> singular_values;  // leading values, descending
    };
    std::string module;
    double rank_tolerance = 1e-10;
    std::vector<Entry> entries;
};

/// Norm, numerical rank and singular-value profile of [F, pi(a)] for each
/// named generator ("U", "V"). Densifies; meant for modest truncations.
CommutatorReport compactness_report(const OddFredholmModule& module, const std::vector<std::string>& generators,
                                    double rank_tol = 1e-10);
CommutatorReport compactness_report(const EvenFredholmModule& module, const std::vector<std::string>& generators,
                                    double rank_tol = 1e-10);

}  // namespace khom
