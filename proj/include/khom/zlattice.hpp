#pragma once

// Free abelian groups, integer matrix homomorphisms, Smith/Hermite normal
// forms and exactness checking of cyclic sequences.

#include "khom/exact_arith.hpp"

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace khom {

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

    static IntMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const BigInt& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    IntMatrix transpose() const;
    bool is_zero() const;
    /// Fraction-free (Bareiss) determinant; square matrices only.
    BigInt determinant() const;

    std::vector<BigInt> column(std::size_t j) const;
    std::vector<BigInt> apply(const std::vector<BigInt>& x) const;

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
    bool operator==(const IntMatrix&) const = default;

    void swap_rows(std::size_t a, std::size_t b);
    void swap_cols(std::size_t a, std::size_t b);
    /// row[dst] += k * row[src]
    void add_row_multiple(std::size_t dst, std::size_t src, const BigInt& k);
    void add_col_multiple(std::size_t dst, std::size_t src, const BigInt& k);
    void negate_row(std::size_t r);
    void negate_col(std::size_t c);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BigInt> data_;
};

struct SmithForm {
    IntMatrix U;  // rows x rows, unimodular
    IntMatrix D;  // rows x cols, diagonal, d_i | d_{i+1}, d_i >= 0
    IntMatrix V;  // cols x cols, unimodular
    std::size_t rank = 0;
};

/// U * m * V == D.
SmithForm smith_normal_form(const IntMatrix& m);

/// Row-style Hermite normal form of the lattice spanned by `generators`
/// (each inner vector one generator). Zero rows are dropped, pivots are
/// positive and entries above each pivot are reduced into [0, pivot).
/// Two generating sets span the same lattice iff their HNFs are equal.
std::vector<std::vector<BigInt>> hermite_normal_form(std::vector<std::vector<BigInt>> generators,
                                                     std::size_t dimension);

bool lattice_contains(const std::vector<std::vector<BigInt>>& hnf, std::vector<BigInt> v);

struct FreeAbelianGroup {
    std::string label;  // e.g. "KK^0(A_theta)"
    std::vector<std::string> generators;

    std::size_t rank() const noexcept { return generators.size(); }
    /// Same basis (names and order); labels are descriptive only.
    bool same_basis(const FreeAbelianGroup& other) const { return generators == other.generators; }
    void validate() const;
};

struct IntegerMatrixMap {
    std::string name;
    FreeAbelianGroup domain;
    FreeAbelianGroup codomain;
    IntMatrix matrix;  // codomain.rank x domain.rank

    IntegerMatrixMap(std::string name, FreeAbelianGroup domain, FreeAbelianGroup codomain, IntMatrix matrix);
};

/// Kernel lattice basis (as generator vectors of the domain).
std::vector<std::vector<BigInt>> kernel_basis(const IntegerMatrixMap& f);
/// Columns of the matrix: generators of the image lattice.
std::vector<std::vector<BigInt>> image_generators(const IntegerMatrixMap& f);

struct ExactnessVerdict {
    bool exact = false;
    std::string diagnostic;  // names a witness when not exact
};

/// Decides image(incoming) == kernel(outgoing) as sublattices.
ExactnessVerdict check_exact_at(const IntegerMatrixMap& incoming, const IntegerMatrixMap& outgoing);

class CyclicSequence {
public:
    explicit CyclicSequence(std::vector<IntegerMatrixMap> maps);

    const std::vector<IntegerMatrixMap>& maps() const noexcept { return maps_; }
    std::vector<IntegerMatrixMap>& maps() noexcept { return maps_; }
    std::size_t size() const noexcept { return maps_.size(); }

    struct NodeReport {
        std::size_t index;       // node k sits between map k-1 and map k
        std::string group;       // label of maps[k].domain
        std::string incoming;    // name of maps[k-1]
        std::string outgoing;    // name of maps[k]
        ExactnessVerdict verdict;
    };

    std::vector<NodeReport> check_exactness() const;
    bool is_exact() const;

private:
    std::vector<IntegerMatrixMap> maps_;
};

/// Dual Pimsner-Voiculescu sequence for A = C*(U), A x Z = A_theta:
/// KK0(A_theta) -i*-> KK0(A) -(id-a*)-> KK0(A) -d0-> KK1(A_theta)
///   -i*-> KK1(A) -(id-a*)-> KK1(A) -d1-> KK0(A_theta).
CyclicSequence builtin_khomology_sequence();

/// K0(A) -(id-a*)-> K0(A) -i*-> K0(A_theta) -delta0-> K1(A)
///   -(id-a*)-> K1(A) -i*-> K1(A_theta) -delta1-> K0(A).
CyclicSequence builtin_ktheory_sequence();

/// Integer pairing of a row functional on f.codomain with f(generator).
BigInt pair_through(const std::vector<BigInt>& row, const IntegerMatrixMap& f, const std::string& generator);

}  // namespace khom
