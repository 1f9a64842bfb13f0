#include "ellip/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace ellip {

GMat GMat::identity(std::size_t n) {
    GMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = GaussianRational(1);
    return m;
}

GVec GMat::apply(const GVec& v) const {
    if (v.size() != cols_) throw std::invalid_argument("GMat::apply: dimension mismatch");
    GVec r(rows_, GaussianRational(0));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            r[i] += (*this)(i, j) * v[j];
    return r;
}

GMat GMat::transpose_conj() const {
    GMat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            r(j, i) = (*this)(i, j).conj();
    return r;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(GMat& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t piv = row;
        while (piv < m.rows() && m(piv, col).is_zero()) ++piv;
        if (piv == m.rows()) continue;
        if (piv != row)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(piv, j));
        GaussianRational inv = GaussianRational(1) / m(row, col);
        for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col).is_zero()) continue;
            GaussianRational f = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j)
                m(i, j) -= f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

} // namespace

RankKernel exact_rank_kernel(const GMat& m) {
    GMat r = m;
    std::vector<std::size_t> pivots = rref(r);
    RankKernel out;
    out.rank = pivots.size();
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t c : pivots) is_pivot[c] = true;
    for (std::size_t free_col = 0; free_col < m.cols(); ++free_col) {
        if (is_pivot[free_col]) continue;
        GVec v(m.cols(), GaussianRational(0));
        v[free_col] = GaussianRational(1);
        for (std::size_t pi = 0; pi < pivots.size(); ++pi)
            v[pivots[pi]] = -r(pi, free_col);
        out.kernel_basis.push_back(std::move(v));
    }
    return out;
}

std::optional<GVec> solve_linear(const GMat& m, const GVec& b) {
    if (b.size() != m.rows()) throw std::invalid_argument("solve_linear: dimension mismatch");
    GMat aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    std::vector<std::size_t> pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt; // inconsistent
    GVec x(m.cols(), GaussianRational(0));
    for (std::size_t pi = 0; pi < pivots.size(); ++pi)
        x[pivots[pi]] = aug(pi, m.cols());
    return x;
}

Subspace::Subspace(std::size_t ambient_dim, std::vector<GVec> basis)
    : ambient_(ambient_dim), basis_(std::move(basis)) {
    if (basis_.empty()) return;
    GMat m(ambient_, basis_.size());
    for (std::size_t j = 0; j < basis_.size(); ++j) {
        if (basis_[j].size() != ambient_)
            throw std::invalid_argument("Subspace: basis vector length != ambient dim");
        for (std::size_t i = 0; i < ambient_; ++i) m(i, j) = basis_[j][i];
    }
    if (exact_rank_kernel(m).rank != basis_.size())
        throw std::invalid_argument("Subspace: basis vectors not linearly independent");
}

bool Subspace::contains(const GVec& v) const {
    if (v.size() != ambient_) throw std::invalid_argument("Subspace::contains: dimension mismatch");
    if (basis_.empty()) {
        for (const auto& c : v)
            if (!c.is_zero()) return false;
        return true;
    }
    GMat m(ambient_, basis_.size());
    for (std::size_t j = 0; j < basis_.size(); ++j)
        for (std::size_t i = 0; i < ambient_; ++i) m(i, j) = basis_[j][i];
    return solve_linear(m, v).has_value();
}

bool Subspace::same_as(const Subspace& other) const {
    if (ambient_ != other.ambient_) return false;
    for (const auto& v : other.basis_)
        if (!contains(v)) return false;
    for (const auto& v : basis_)
        if (!other.contains(v)) return false;
    return true;
}

Subspace Subspace::span_of_columns(const GMat& m) {
    // independent subset of columns via pivot columns of the rref
    GMat r = m;
    std::vector<std::size_t> pivots = rref(r);
    std::vector<GVec> basis;
    basis.reserve(pivots.size());
    for (std::size_t c : pivots) {
        GVec v(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, c);
        basis.push_back(std::move(v));
    }
    return Subspace(m.rows(), std::move(basis));
}

namespace {

Subspace intersect_pair(const Subspace& x, const Subspace& y) {
    std::size_t n = x.ambient_dim();
    if (x.dim() == 0 || y.dim() == 0) return Subspace(n);
    // ker [X | -Y]: combinations with X a = Y b lie in both spans
    GMat m(n, x.dim() + y.dim());
    for (std::size_t j = 0; j < x.dim(); ++j)
        for (std::size_t i = 0; i < n; ++i) m(i, j) = x.basis()[j][i];
    for (std::size_t j = 0; j < y.dim(); ++j)
        for (std::size_t i = 0; i < n; ++i) m(i, x.dim() + j) = -y.basis()[j][i];
    RankKernel rk = exact_rank_kernel(m);
    GMat gen(n, rk.kernel_basis.size());
    for (std::size_t c = 0; c < rk.kernel_basis.size(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            GaussianRational s(0);
            for (std::size_t j = 0; j < x.dim(); ++j)
                s += x.basis()[j][i] * rk.kernel_basis[c][j];
            gen(i, c) = s;
        }
    }
    return Subspace::span_of_columns(gen);
}

} // namespace

Subspace subspace_intersection(const std::vector<Subspace>& spaces) {
    if (spaces.empty()) throw std::invalid_argument("subspace_intersection: empty list");
    for (const auto& s : spaces)
        if (s.ambient_dim() != spaces[0].ambient_dim())
            throw std::invalid_argument("subspace_intersection: ambient dimension mismatch");
    Subspace acc = spaces[0];
    for (std::size_t i = 1; i < spaces.size(); ++i) acc = intersect_pair(acc, spaces[i]);
    return acc;
}

GMat PolyMatrix::eval_exact(const std::vector<GaussianRational>& point) const {
    GMat m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            m(i, j) = (*this)(i, j).eval_exact(point);
    return m;
}

std::vector<std::complex<double>> PolyMatrix::eval(std::span<const std::complex<double>> point) const {
    std::vector<std::complex<double>> m(rows_ * cols_);
    for (std::size_t i = 0; i < rows_ * cols_; ++i) m[i] = a_[i].eval(point);
    return m;
}

MultiPoly PolyMatrix::minor_det(const std::vector<std::size_t>& row_idx,
                                const std::vector<std::size_t>& col_idx) const {
    if (row_idx.size() != col_idx.size())
        throw std::invalid_argument("minor_det: not square");
    std::size_t n = row_idx.size();
    if (n == 0) return MultiPoly::constant(nvars_, GaussianRational(1));
    if (n == 1) return (*this)(row_idx[0], col_idx[0]);
    MultiPoly acc(nvars_);
    std::vector<std::size_t> sub_rows(row_idx.begin() + 1, row_idx.end());
    for (std::size_t j = 0; j < n; ++j) {
        const MultiPoly& pivot = (*this)(row_idx[0], col_idx[j]);
        if (pivot.is_zero()) continue;
        std::vector<std::size_t> sub_cols;
        sub_cols.reserve(n - 1);
        for (std::size_t l = 0; l < n; ++l)
            if (l != j) sub_cols.push_back(col_idx[l]);
        MultiPoly cof = pivot * minor_det(sub_rows, sub_cols);
        if (j % 2 == 0) acc += cof;
        else acc -= cof;
    }
    return acc;
}

MultiPoly PolyMatrix::det() const {
    if (rows_ != cols_) throw std::invalid_argument("det: not square");
    std::vector<std::size_t> idx(rows_);
    for (std::size_t i = 0; i < rows_; ++i) idx[i] = i;
    return minor_det(idx, idx);
}

MultiPoly sylvester_resultant(const std::vector<MultiPoly>& p_in,
                              const std::vector<MultiPoly>& q_in) {
    auto trim = [](std::vector<MultiPoly> v) {
        while (!v.empty() && v.back().is_zero()) v.pop_back();
        return v;
    };
    std::vector<MultiPoly> p = trim(p_in), q = trim(q_in);
    if (p.empty() && q.empty())
        throw std::domain_error("sylvester_resultant: both polynomials zero");
    std::size_t nvars = !p.empty() ? p[0].nvars() : q[0].nvars();
    int dp = static_cast<int>(p.size()) - 1;
    int dq = static_cast<int>(q.size()) - 1;
    if (dp < 1 && dq < 1)
        throw std::domain_error("sylvester_resultant: need a polynomial of degree >= 1");
    if (dp < 0 || dq < 0) return MultiPoly(nvars); // one side zero, shared root forced
    // degree-0 against degree-d: Res = lc^d convention
    if (dp == 0) {
        MultiPoly r = MultiPoly::constant(nvars, GaussianRational(1));
        for (int t = 0; t < dq; ++t) r *= p[0];
        return r;
    }
    if (dq == 0) {
        MultiPoly r = MultiPoly::constant(nvars, GaussianRational(1));
        for (int t = 0; t < dp; ++t) r *= q[0];
        return r;
    }

    std::size_t n = static_cast<std::size_t>(dp + dq);
    std::vector<MultiPoly> m(n * n, MultiPoly(nvars));
    auto at = [&](std::size_t i, std::size_t j) -> MultiPoly& { return m[i * n + j]; };
    for (int r = 0; r < dq; ++r)
        for (int c = 0; c <= dp; ++c)
            at(r, r + c) = p[static_cast<std::size_t>(dp - c)];
    for (int r = 0; r < dp; ++r)
        for (int c = 0; c <= dq; ++c)
            at(static_cast<std::size_t>(dq + r), r + c) = q[static_cast<std::size_t>(dq - c)];

    // Bareiss fraction-free elimination over the polynomial ring
    int sign = 1;
    MultiPoly prev = MultiPoly::constant(nvars, GaussianRational(1));
    for (std::size_t kcol = 0; kcol + 1 < n; ++kcol) {
        if (at(kcol, kcol).is_zero()) {
            std::size_t swap_row = kcol + 1;
            while (swap_row < n && at(swap_row, kcol).is_zero()) ++swap_row;
            if (swap_row == n) return MultiPoly(nvars); // singular: resultant 0
            for (std::size_t j = 0; j < n; ++j) std::swap(at(kcol, j), at(swap_row, j));
            sign = -sign;
        }
        for (std::size_t i = kcol + 1; i < n; ++i) {
            for (std::size_t j = kcol + 1; j < n; ++j) {
                MultiPoly num = at(i, j) * at(kcol, kcol) - at(i, kcol) * at(kcol, j);
                at(i, j) = num.is_zero() ? num : num.divide_exact(prev);
            }
            at(i, kcol) = MultiPoly(nvars);
        }
        prev = at(kcol, kcol);
    }
    MultiPoly result = at(n - 1, n - 1);
    return sign < 0 ? -result : result;
}

} // namespace ellip
