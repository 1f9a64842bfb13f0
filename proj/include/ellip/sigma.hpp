#ifndef ELLIP_SIGMA_HPP
#define ELLIP_SIGMA_HPP

#include <complex>
#include <vector>

#include "ellip/linalg.hpp"

namespace ellip {

using Cplx = std::complex<double>;

struct Box {
    std::vector<double> lo, hi;

    std::vector<double> center() const {
        std::vector<double> c(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
        return c;
    }
    double half_diagonal() const {
        double s = 0;
        for (std::size_t i = 0; i < lo.size(); ++i) {
            double h = 0.5 * (hi[i] - lo[i]);
            s += h * h;
        }
        return std::sqrt(s);
    }
    std::size_t longest_axis() const {
        std::size_t a = 0;
        for (std::size_t i = 1; i < lo.size(); ++i)
            if (hi[i] - lo[i] > hi[a] - lo[a]) a = i;
        return a;
    }
};

/// Float-precision view of a PolyMatrix, laid out for fast evaluation of
/// entries and their gradients over boxes.
class CompiledSymbol {
public:
    explicit CompiledSymbol(const PolyMatrix& pm);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nvars() const { return nvars_; }

    /// Entries at a real point, row-major.
    std::vector<Cplx> eval(const std::vector<double>& x) const;

    /// d(entry)/d(x_axis) at a real point, row-major.
    std::vector<Cplx> eval_derivative(const std::vector<double>& x, std::size_t axis) const;

    /// Frobenius aggregate of per-entry Lipschitz constants over the box:
    /// |M(xi) - M(c)|_F <= lipschitz_frobenius(box) * |xi - c| on the box.
    double lipschitz_frobenius(const Box& box) const;

private:
    struct Term {
        Cplx c;
        double abs_c;
        std::vector<unsigned> e;
    };
    std::size_t rows_, cols_, nvars_;
    unsigned max_deg_;
    std::vector<std::vector<Term>> entries_; // per cell
};

struct SigmaMinPair {
    double sigma;
    std::vector<Cplx> v; // unit right singular vector
};

/// Smallest singular value and vector of a dense complex matrix (row-major),
/// via cyclic Jacobi on the Hermitian Gram matrix.
SigmaMinPair sigma_min_pair(const std::vector<Cplx>& a, std::size_t rows, std::size_t cols);

/// Eigenvalues (ascending) and unitary eigenvector columns of a Hermitian matrix.
struct HermitianEigen {
    std::vector<double> values;
    std::vector<Cplx> vectors; // column-major, n x n
};
HermitianEigen jacobi_hermitian(std::vector<Cplx> h, std::size_t n);

/// Certified lower bound for sigma_min over the box: center evaluation minus
/// a Lipschitz radius bound, clamped at zero.
double sigma_min_lower_bound(const CompiledSymbol& sym, const Box& box);

} // namespace ellip

#endif
