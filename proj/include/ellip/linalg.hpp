#ifndef ELLIP_LINALG_HPP
#define ELLIP_LINALG_HPP

#include <optional>
#include <vector>

#include "ellip/multipoly.hpp"
#include "ellip/rational.hpp"

namespace ellip {

using GVec = std::vector<GaussianRational>;

/// Dense matrix over Q(i), row-major.
class GMat {
public:
    GMat() : rows_(0), cols_(0) {}
    GMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static GMat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    GaussianRational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const GaussianRational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    GVec apply(const GVec& v) const;
    GMat transpose_conj() const;

    friend bool operator==(const GMat& a, const GMat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }

private:
    std::size_t rows_, cols_;
    std::vector<GaussianRational> a_;
};

struct RankKernel {
    std::size_t rank = 0;
    std::vector<GVec> kernel_basis; // each annihilates the matrix exactly
};

/// Exact Gaussian elimination; rank + kernel dim = cols always.
RankKernel exact_rank_kernel(const GMat& m);

/// One exact solution of m x = b, or nullopt if inconsistent.
std::optional<GVec> solve_linear(const GMat& m, const GVec& b);

/// Linear span of exact vectors in an ambient space.
class Subspace {
public:
    explicit Subspace(std::size_t ambient_dim) : ambient_(ambient_dim) {}
    Subspace(std::size_t ambient_dim, std::vector<GVec> basis);

    std::size_t ambient_dim() const { return ambient_; }
    std::size_t dim() const { return basis_.size(); }
    const std::vector<GVec>& basis() const { return basis_; }

    bool contains(const GVec& v) const;
    bool same_as(const Subspace& other) const; // mutual containment

    static Subspace span_of_columns(const GMat& m);

private:
    std::size_t ambient_;
    std::vector<GVec> basis_; // independent, verified at construction
};

/// Exact intersection of subspaces over a shared ambient space.
Subspace subspace_intersection(const std::vector<Subspace>& spaces);

/// Matrix of multivariate polynomials; all entries share nvars.
class PolyMatrix {
public:
    PolyMatrix() : rows_(0), cols_(0), nvars_(0) {}
    PolyMatrix(std::size_t rows, std::size_t cols, std::size_t nvars)
        : rows_(rows), cols_(cols), nvars_(nvars),
          a_(rows * cols, MultiPoly(nvars)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nvars() const { return nvars_; }

    MultiPoly& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const MultiPoly& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    /// Evaluation commutes with the matrix structure.
    GMat eval_exact(const std::vector<GaussianRational>& point) const;
    std::vector<std::complex<double>> eval(std::span<const std::complex<double>> point) const;

    /// Determinant of the square submatrix rows x cols (cofactor expansion).
    MultiPoly minor_det(const std::vector<std::size_t>& row_idx,
                        const std::vector<std::size_t>& col_idx) const;

    MultiPoly det() const;

private:
    std::size_t rows_, cols_, nvars_;
    std::vector<MultiPoly> a_;
};

/// Resultant of two univariate polynomials with MultiPoly coefficients
/// (index = power of the eliminated variable). Sylvester determinant by
/// fraction-free Bareiss elimination over the coefficient ring.
/// Throws if both polynomials are zero or both have degree < 1.
MultiPoly sylvester_resultant(const std::vector<MultiPoly>& p,
                              const std::vector<MultiPoly>& q);

} // namespace ellip

#endif
