#ifndef ELLIP_OPERATOR_HPP
#define ELLIP_OPERATOR_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ellip/linalg.hpp"
#include "ellip/multipoly.hpp"
#include "ellip/rational.hpp"

namespace ellip {

/// Exponent vector alpha with |alpha| = order wherever used as a term key.
using MultiIndex = Exponents;

inline unsigned multi_index_order(const MultiIndex& a) {
    unsigned s = 0;
    for (unsigned x : a) s += x;
    return s;
}

/// Small dense rational matrix (a coefficient A_alpha).
class RatMat {
public:
    RatMat() : rows_(0), cols_(0) {}
    RatMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool is_zero() const;
    double frobenius() const;

    friend bool operator==(const RatMat& a, const RatMat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }

private:
    std::size_t rows_, cols_;
    std::vector<Rational> a_;
};

/// Nonzero rational vector with a float unit-normalized view.
class Direction {
public:
    explicit Direction(std::vector<Rational> components);

    std::size_t dim() const { return comps_.size(); }
    const std::vector<Rational>& components() const { return comps_; }
    const std::vector<double>& unit() const { return unit_; }

    std::string str() const;

private:
    std::vector<Rational> comps_;
    std::vector<double> unit_;
};

/// Homogeneous constant-coefficient operator of order k between fibers
/// of dimension dim_v and dim_w over R^n; a map alpha -> A_alpha.
class Operator {
public:
    Operator(std::size_t n, std::size_t k, std::size_t dim_v, std::size_t dim_w,
             std::map<MultiIndex, RatMat> terms, std::string name = "");

    std::size_t n() const { return n_; }
    std::size_t k() const { return k_; }
    std::size_t dim_v() const { return dim_v_; }
    std::size_t dim_w() const { return dim_w_; }
    const std::map<MultiIndex, RatMat>& terms() const { return terms_; }
    const std::string& name() const { return name_; }
    void set_name(std::string s) { name_ = std::move(s); }

    /// sqrt(sum of squared Frobenius norms of the A_alpha).
    double coefficient_norm() const;

    /// A(xi) at an exact rational frequency.
    GMat symbol_at(const std::vector<Rational>& xi) const;
    /// A(xi + i*nu) at exact rational xi, nu.
    GMat symbol_at_complexified(const std::vector<Rational>& xi,
                                const std::vector<Rational>& nu) const;

    friend bool operator==(const Operator& a, const Operator& b) {
        return a.n_ == b.n_ && a.k_ == b.k_ && a.dim_v_ == b.dim_v_ &&
               a.dim_w_ == b.dim_w_ && a.terms_ == b.terms_;
    }

private:
    std::size_t n_, k_, dim_v_, dim_w_;
    std::map<MultiIndex, RatMat> terms_;
    std::string name_;
};

/// The symbol A(xi) = sum_alpha xi^alpha A_alpha as a polynomial matrix
/// in n real variables.
PolyMatrix symbol_matrix(const Operator& op);

/// A(xi + i*nu) expanded by the multinomial theorem; still a polynomial
/// matrix in n real variables, now with Gaussian-rational coefficients.
PolyMatrix symbol_matrix_complexified(const Operator& op, const Direction& nu);

/// Formal adjoint: (-1)^k sum A_alpha^T d^alpha, fibers swapped.
Operator adjoint(const Operator& op);

/// Induced operator on m-fold exterior powers; order m*k, fiber dimensions
/// C(dim_v, m) and C(dim_w, m). Its symbol is the m-th compound matrix of
/// the symbol of op.
Operator wedge_power(const Operator& op, std::size_t m);

/// Restriction of the symbol to span{d1, d2}: a 2-variable operator with
/// symbol (s, t) -> A(s*d1 + t*d2).
Operator plane_slice(const Operator& op, const std::vector<Rational>& d1,
                     const std::vector<Rational>& d2);

/// Exact linear change of frame: symbol xi -> A(M xi), M given by columns.
/// M must be invertible.
Operator change_frame(const Operator& op, const std::vector<std::vector<Rational>>& columns);

/// Rational orthogonal (Householder) matrix mapping e1 to the exactly-unit
/// rational direction nu; returned as columns. Identity when nu = e1.
std::vector<std::vector<Rational>> householder_frame(const std::vector<Rational>& nu);

/// Resultant operator P for dim_v = 1: the Sylvester resultant in the
/// frame's last variable of w0.A(xi) and w.A(xi), where w0 = A(nu).
/// `frame` columns are rational vectors, the last one being nu; it must be
/// invertible. Returns a polynomial in the n-1 tangential variables.
MultiPoly resultant_P(const Operator& op, const std::vector<std::vector<Rational>>& frame,
                      const std::vector<Rational>& w);

/// Subsets of {0..n-1} of size m in lexicographic order.
std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t m);

unsigned long long binomial(unsigned n, unsigned k);

/// Multi-indices of total order k in n variables, lexicographic order.
std::vector<MultiIndex> multi_indices_of_order(std::size_t n, unsigned k);

} // namespace ellip

#endif
