#include "khom/zlattice.hpp"

#include "khom/error.hpp"

#include <algorithm>
#include <sstream>

namespace khom {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error(Errc::ShapeMismatch, "ragged matrix literal");
        for (long v : r) data_.emplace_back(v);
    }
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool IntMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const BigInt& v) { return v == 0; });
}

BigInt IntMatrix::determinant() const {
    if (rows_ != cols_) throw Error(Errc::ShapeMismatch, "determinant of a non-square matrix");
    const std::size_t n = rows_;
    if (n == 0) return 1;
    IntMatrix a = *this;
    BigInt prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t r = k + 1;
            while (r < n && a(r, k) == 0) ++r;
            if (r == n) return 0;
            a.swap_rows(k, r);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                BigInt v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                a(i, j) = v;
            }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

std::vector<BigInt> IntMatrix::column(std::size_t j) const {
    std::vector<BigInt> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

std::vector<BigInt> IntMatrix::apply(const std::vector<BigInt>& x) const {
    if (x.size() != cols_) throw Error(Errc::ShapeMismatch, "vector length does not match matrix columns");
    std::vector<BigInt> y(rows_, BigInt(0));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(Errc::ShapeMismatch, "matrix product dimensions");
    IntMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const BigInt& k) {
    if (k == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += k * (*this)(src, j);
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const BigInt& k) {
    if (k == 0) return;
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += k * (*this)(i, src);
}

void IntMatrix::negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
}

void IntMatrix::negate_col(std::size_t c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = -(*this)(i, c);
}

namespace {

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    SmithForm s{IntMatrix::identity(rows), m, IntMatrix::identity(cols), 0};
    IntMatrix& D = s.D;
    // Row ops on D are mirrored into U, column ops into V.
    auto row_add = [&](std::size_t dst, std::size_t src, const BigInt& k) {
        D.add_row_multiple(dst, src, k);
        s.U.add_row_multiple(dst, src, k);
    };
    auto col_add = [&](std::size_t dst, std::size_t src, const BigInt& k) {
        D.add_col_multiple(dst, src, k);
        s.V.add_col_multiple(dst, src, k);
    };

    const std::size_t diag = std::min(rows, cols);
    for (std::size_t t = 0; t < diag; ++t) {
        for (;;) {
            // smallest nonzero |entry| in the trailing block becomes the pivot
            std::size_t pr = rows, pc = cols;
            for (std::size_t i = t; i < rows; ++i)
                for (std::size_t j = t; j < cols; ++j)
                    if (D(i, j) != 0 && (pr == rows || abs(D(i, j)) < abs(D(pr, pc)))) {
                        pr = i;
                        pc = j;
                    }
            if (pr == rows) {
                s.rank = t;
                goto finished;
            }
            D.swap_rows(t, pr);
            s.U.swap_rows(t, pr);
            D.swap_cols(t, pc);
            s.V.swap_cols(t, pc);

            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (D(i, t) == 0) continue;
                row_add(i, t, -floor_div(D(i, t), D(t, t)));
                if (D(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (D(t, j) == 0) continue;
                col_add(j, t, -floor_div(D(t, j), D(t, t)));
                if (D(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            // pivot must divide the whole trailing block
            bool divides = true;
            for (std::size_t i = t + 1; i < rows && divides; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (!mpz_divisible_p(D(i, j).get_mpz_t(), D(t, t).get_mpz_t())) {
                        row_add(t, i, 1);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (D(t, t) < 0) {
            D.negate_row(t);
            s.U.negate_row(t);
        }
        s.rank = t + 1;
    }
finished:
    return s;
}

std::vector<std::vector<BigInt>> hermite_normal_form(std::vector<std::vector<BigInt>> gens,
                                                     std::size_t dimension) {
    for (const auto& g : gens)
        if (g.size() != dimension) throw Error(Errc::ShapeMismatch, "generator length != lattice dimension");

    std::size_t row = 0;
    for (std::size_t col = 0; col < dimension && row < gens.size(); ++col) {
        // Euclid down the column until one nonzero entry remains at `row`
        for (;;) {
            std::size_t best = gens.size();
            for (std::size_t i = row; i < gens.size(); ++i)
                if (gens[i][col] != 0 && (best == gens.size() || abs(gens[i][col]) < abs(gens[best][col])))
                    best = i;
            if (best == gens.size()) break;
            std::swap(gens[row], gens[best]);
            bool done = true;
            for (std::size_t i = row + 1; i < gens.size(); ++i) {
                if (gens[i][col] == 0) continue;
                const BigInt k = floor_div(gens[i][col], gens[row][col]);
                for (std::size_t j = col; j < dimension; ++j) gens[i][j] -= k * gens[row][j];
                if (gens[i][col] != 0) done = false;
            }
            if (done) break;
        }
        if (row >= gens.size() || gens[row][col] == 0) continue;
        if (gens[row][col] < 0)
            for (auto& v : gens[row]) v = -v;
        for (std::size_t i = 0; i < row; ++i) {
            const BigInt k = floor_div(gens[i][col], gens[row][col]);
            if (k == 0) continue;
            for (std::size_t j = col; j < dimension; ++j) gens[i][j] -= k * gens[row][j];
        }
        ++row;
    }
    gens.resize(row);
    return gens;
}

bool lattice_contains(const std::vector<std::vector<BigInt>>& hnf, std::vector<BigInt> v) {
    for (const auto& h : hnf) {
        const auto pivot = std::find_if(h.begin(), h.end(), [](const BigInt& x) { return x != 0; });
        const auto col = static_cast<std::size_t>(pivot - h.begin());
        for (std::size_t j = 0; j < col; ++j)
            if (v[j] != 0) return false;
        if (!mpz_divisible_p(v[col].get_mpz_t(), pivot->get_mpz_t())) return false;
        BigInt k = v[col] / *pivot;
        for (std::size_t j = col; j < v.size(); ++j) v[j] -= k * h[j];
    }
    return std::all_of(v.begin(), v.end(), [](const BigInt& x) { return x == 0; });
}

void FreeAbelianGroup::validate() const {
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t j = i + 1; j < generators.size(); ++j)
            if (generators[i] == generators[j])
                throw Error(Errc::InvalidInput, "duplicate generator name '" + generators[i] + "' in " + label);
}

IntegerMatrixMap::IntegerMatrixMap(std::string n, FreeAbelianGroup dom, FreeAbelianGroup cod, IntMatrix m)
    : name(std::move(n)), domain(std::move(dom)), codomain(std::move(cod)), matrix(std::move(m)) {
    domain.validate();
    codomain.validate();
    // rank-0 groups give empty matrices; only the nonzero extents are checked
    const bool rows_ok = matrix.rows() == codomain.rank() || (matrix.empty() && codomain.rank() == 0);
    const bool cols_ok = matrix.cols() == domain.rank() || (matrix.empty() && domain.rank() == 0);
    if (matrix.empty()) matrix = IntMatrix(codomain.rank(), domain.rank());
    if (!rows_ok || !cols_ok)
        throw Error(Errc::ShapeMismatch, "map " + name + " has matrix " + std::to_string(matrix.rows()) + "x" +
                                             std::to_string(matrix.cols()) + " but groups of rank " +
                                             std::to_string(codomain.rank()) + " <- " +
                                             std::to_string(domain.rank()));
}

std::vector<std::vector<BigInt>> kernel_basis(const IntegerMatrixMap& f) {
    const std::size_t n = f.domain.rank();
    std::vector<std::vector<BigInt>> basis;
    if (n == 0) return basis;
    if (f.codomain.rank() == 0) {
        const IntMatrix id = IntMatrix::identity(n);
        for (std::size_t j = 0; j < n; ++j) basis.push_back(id.column(j));
        return basis;
    }
    const SmithForm s = smith_normal_form(f.matrix);
    for (std::size_t j = s.rank; j < n; ++j) basis.push_back(s.V.column(j));
    return basis;
}

std::vector<std::vector<BigInt>> image_generators(const IntegerMatrixMap& f) {
    std::vector<std::vector<BigInt>> gens;
    for (std::size_t j = 0; j < f.domain.rank(); ++j) gens.push_back(f.matrix.column(j));
    return gens;
}

namespace {

std::string describe(const std::vector<BigInt>& v, const FreeAbelianGroup& g) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0) continue;
        if (!first) os << " + ";
        if (v[i] != 1) os << "(" << v[i].get_str() << ")*";
        os << g.generators[i];
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace

ExactnessVerdict check_exact_at(const IntegerMatrixMap& incoming, const IntegerMatrixMap& outgoing) {
    if (!incoming.codomain.same_basis(outgoing.domain))
        throw Error(Errc::ShapeMismatch, "codomain of " + incoming.name + " is not the domain of " + outgoing.name);
    const FreeAbelianGroup& node = outgoing.domain;
    const std::size_t dim = node.rank();
    if (dim == 0) return {true, "rank-0 node"};

    const auto image = image_generators(incoming);
    for (std::size_t j = 0; j < image.size(); ++j) {
        const auto out = outgoing.matrix.apply(image[j]);
        if (std::any_of(out.begin(), out.end(), [](const BigInt& x) { return x != 0; })) {
            return {false, outgoing.name + " o " + incoming.name + " is nonzero on " +
                               incoming.domain.generators[j] + " (image element " + describe(image[j], node) +
                               " is not in the kernel)"};
        }
    }
    const auto image_hnf = hermite_normal_form(image, dim);
    for (const auto& k : kernel_basis(outgoing)) {
        if (!lattice_contains(image_hnf, k))
            return {false, "kernel element " + describe(k, node) + " of " + outgoing.name +
                               " is not in the image of " + incoming.name};
    }
    return {true, "image == kernel"};
}

CyclicSequence::CyclicSequence(std::vector<IntegerMatrixMap> maps) : maps_(std::move(maps)) {
    if (maps_.empty()) throw Error(Errc::InvalidInput, "empty cyclic sequence");
    for (std::size_t k = 0; k < maps_.size(); ++k) {
        const auto& next = maps_[(k + 1) % maps_.size()];
        if (!maps_[k].codomain.same_basis(next.domain))
            throw Error(Errc::ShapeMismatch, "codomain of " + maps_[k].name + " is not the domain of " + next.name);
    }
}

std::vector<CyclicSequence::NodeReport> CyclicSequence::check_exactness() const {
    std::vector<NodeReport> out;
    const std::size_t n = maps_.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& in = maps_[(k + n - 1) % n];
        const auto& outm = maps_[k];
        out.push_back({k, outm.domain.label, in.name, outm.name, check_exact_at(in, outm)});
    }
    return out;
}

bool CyclicSequence::is_exact() const {
    const auto nodes = check_exactness();
    return std::all_of(nodes.begin(), nodes.end(), [](const NodeReport& r) { return r.verdict.exact; });
}

CyclicSequence builtin_khomology_sequence() {
    // Bases fixed so every entry is forced: i*(z0) = w0, i*(Dirac) = 0,
    // d0(w0) = z1', i*(z1) = w1, i*(z1') = 0, d1(w1) = Dirac, id - a* = 0.
    const FreeAbelianGroup kk0_at{"KK^0(A_theta)", {"z0", "Dirac"}};
    const FreeAbelianGroup kk0_a{"KK^0(A)", {"w0"}};
    const FreeAbelianGroup kk1_at{"KK^1(A_theta)", {"z1", "z1'"}};
    const FreeAbelianGroup kk1_a{"KK^1(A)", {"w1"}};
    return CyclicSequence({
        IntegerMatrixMap("i*_0", kk0_at, kk0_a, IntMatrix{{1, 0}}),
        IntegerMatrixMap("(id-alpha*)_0", kk0_a, kk0_a, IntMatrix{{0}}),
        IntegerMatrixMap("d_0", kk0_a, kk1_at, IntMatrix{{0}, {1}}),
        IntegerMatrixMap("i*_1", kk1_at, kk1_a, IntMatrix{{1, 0}}),
        IntegerMatrixMap("(id-alpha*)_1", kk1_a, kk1_a, IntMatrix{{0}}),
        IntegerMatrixMap("d_1", kk1_a, kk0_at, IntMatrix{{0}, {1}}),
    });
}

CyclicSequence builtin_ktheory_sequence() {
    const FreeAbelianGroup k0_a{"K_0(A)", {"[1]"}};
    const FreeAbelianGroup k0_at{"K_0(A_theta)", {"[1]", "[p]"}};
    const FreeAbelianGroup k1_a{"K_1(A)", {"[U]"}};
    const FreeAbelianGroup k1_at{"K_1(A_theta)", {"[U]", "[V]"}};
    return CyclicSequence({
        IntegerMatrixMap("(id-alpha*)_0", k0_a, k0_a, IntMatrix{{0}}),
        IntegerMatrixMap("i*_0", k0_a, k0_at, IntMatrix{{1}, {0}}),
        IntegerMatrixMap("delta_0", k0_at, k1_a, IntMatrix{{0, 1}}),
        IntegerMatrixMap("(id-alpha*)_1", k1_a, k1_a, IntMatrix{{0}}),
        IntegerMatrixMap("i*_1", k1_a, k1_at, IntMatrix{{1}, {0}}),
        IntegerMatrixMap("delta_1", k1_at, k0_a, IntMatrix{{0, 1}}),
    });
}

BigInt pair_through(const std::vector<BigInt>& row, const IntegerMatrixMap& f, const std::string& generator) {
    if (row.size() != f.codomain.rank()) throw Error(Errc::ShapeMismatch, "pairing row length");
    const auto it = std::find(f.domain.generators.begin(), f.domain.generators.end(), generator);
    if (it == f.domain.generators.end())
        throw Error(Errc::InvalidInput, "no generator '" + generator + "' in " + f.domain.label);
    const auto col = f.matrix.column(static_cast<std::size_t>(it - f.domain.generators.begin()));
    BigInt s = 0;
    for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * col[i];
    return s;
}

}  // namespace khom
