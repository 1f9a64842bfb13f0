#include "ellip/sigma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ellip {

CompiledSymbol::CompiledSymbol(const PolyMatrix& pm)
    : rows_(pm.rows()), cols_(pm.cols()), nvars_(pm.nvars()), max_deg_(0),
      entries_(pm.rows() * pm.cols()) {
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            auto& cell = entries_[i * cols_ + j];
            for (const auto& [e, c] : pm(i, j).terms()) {
                Term t;
                t.c = c.to_complex();
                t.abs_c = std::abs(t.c);
                t.e = e;
                for (unsigned x : e) max_deg_ = std::max(max_deg_, x);
                cell.push_back(std::move(t));
            }
        }
    }
}

std::vector<Cplx> CompiledSymbol::eval(const std::vector<double>& x) const {
    if (x.size() != nvars_) throw std::invalid_argument("CompiledSymbol::eval: dimension");
    // per-axis power tables
    std::vector<double> pow_table(nvars_ * (max_deg_ + 1));
    for (std::size_t j = 0; j < nvars_; ++j) {
        pow_table[j * (max_deg_ + 1)] = 1.0;
        for (unsigned p = 1; p <= max_deg_; ++p)
            pow_table[j * (max_deg_ + 1) + p] = pow_table[j * (max_deg_ + 1) + p - 1] * x[j];
    }
    std::vector<Cplx> out(entries_.size());
    for (std::size_t cell = 0; cell < entries_.size(); ++cell) {
        Cplx acc(0, 0);
        for (const Term& t : entries_[cell]) {
            double mono = 1.0;
            for (std::size_t j = 0; j < nvars_; ++j)
                mono *= pow_table[j * (max_deg_ + 1) + t.e[j]];
            acc += t.c * mono;
        }
        out[cell] = acc;
    }
    return out;
}

std::vector<Cplx> CompiledSymbol::eval_derivative(const std::vector<double>& x,
                                                  std::size_t axis) const {
    std::vector<Cplx> out(entries_.size());
    for (std::size_t cell = 0; cell < entries_.size(); ++cell) {
        Cplx acc(0, 0);
        for (const Term& t : entries_[cell]) {
            if (t.e[axis] == 0) continue;
            double mono = static_cast<double>(t.e[axis]);
            for (std::size_t j = 0; j < nvars_; ++j) {
                unsigned p = t.e[j] - (j == axis ? 1 : 0);
                for (unsigned q = 0; q < p; ++q) mono *= x[j];
            }
            acc += t.c * mono;
        }
        out[cell] = acc;
    }
    return out;
}

double CompiledSymbol::lipschitz_frobenius(const Box& box) const {
    // sup over the box of each |monomial| factor
    std::vector<double> m(nvars_);
    for (std::size_t j = 0; j < nvars_; ++j)
        m[j] = std::max(std::abs(box.lo[j]), std::abs(box.hi[j]));
    double sum_sq = 0;
    for (const auto& cell : entries_) {
        double lip = 0;
        for (const Term& t : cell) {
            for (std::size_t j = 0; j < nvars_; ++j) {
                if (t.e[j] == 0) continue;
                double g = static_cast<double>(t.e[j]);
                for (std::size_t l = 0; l < nvars_; ++l) {
                    unsigned p = t.e[l] - (l == j ? 1 : 0);
                    for (unsigned q = 0; q < p; ++q) g *= m[l];
                }
                lip += t.abs_c * g;
            }
        }
        sum_sq += lip * lip;
    }
    return std::sqrt(sum_sq);
}

HermitianEigen jacobi_hermitian(std::vector<Cplx> h, std::size_t n) {
    std::vector<Cplx> v(n * n, Cplx(0, 0));
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = Cplx(1, 0);
    auto H = [&](std::size_t i, std::size_t j) -> Cplx& { return h[i * n + j]; };
    auto V = [&](std::size_t i, std::size_t j) -> Cplx& { return v[i * n + j]; };

    double scale = 0;
    for (std::size_t i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(h[i]));
    if (scale == 0) scale = 1;

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(H(p, q));
        if (off <= 1e-30 * scale * scale) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = std::abs(H(p, q));
                if (apq <= 1e-18 * scale) continue;
                // absorb the phase of H(p,q) into column q
                Cplx phase = H(p, q) / apq;
                for (std::size_t i = 0; i < n; ++i) {
                    H(i, q) *= std::conj(phase);
                    V(i, q) *= std::conj(phase);
                }
                for (std::size_t j = 0; j < n; ++j) H(q, j) *= phase;
                // now H(p,q) is real; classic symmetric rotation
                double hpq = H(p, q).real();
                double tau = (H(q, q).real() - H(p, p).real()) / (2 * hpq);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
                double c = 1.0 / std::sqrt(1 + t * t);
                double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    Cplx hip = H(i, p), hiq = H(i, q);
                    H(i, p) = c * hip - s * hiq;
                    H(i, q) = s * hip + c * hiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    Cplx hpj = H(p, j), hqj = H(q, j);
                    H(p, j) = c * hpj - s * hqj;
                    H(q, j) = s * hpj + c * hqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    Cplx vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - s * viq;
                    V(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    HermitianEigen out;
    out.values.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = H(i, i).real();
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });
    out.vectors.assign(n * n, Cplx(0, 0));
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = diag[order[c]];
        for (std::size_t i = 0; i < n; ++i) out.vectors[c * n + i] = V(i, order[c]);
    }
    return out;
}

SigmaMinPair sigma_min_pair(const std::vector<Cplx>& a, std::size_t rows, std::size_t cols) {
    if (a.size() != rows * cols) throw std::invalid_argument("sigma_min_pair: shape");
    // Gram matrix A^H A, cols x cols
    std::vector<Cplx> h(cols * cols, Cplx(0, 0));
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            Cplx s(0, 0);
            for (std::size_t r = 0; r < rows; ++r)
                s += std::conj(a[r * cols + i]) * a[r * cols + j];
            h[i * cols + j] = s;
        }
    HermitianEigen eig = jacobi_hermitian(std::move(h), cols);
    SigmaMinPair out;
    out.sigma = std::sqrt(std::max(0.0, eig.values[0]));
    out.v.assign(eig.vectors.begin(), eig.vectors.begin() + cols);
    return out;
}

double sigma_min_lower_bound(const CompiledSymbol& sym, const Box& box) {
    if (box.lo.size() != sym.nvars() || box.hi.size() != sym.nvars())
        throw std::invalid_argument("sigma_min_lower_bound: box dimension");
    std::vector<double> c = box.center();
    SigmaMinPair p = sigma_min_pair(sym.eval(c), sym.rows(), sym.cols());
    double bound = p.sigma - box.half_diagonal() * sym.lipschitz_frobenius(box);
    return std::max(0.0, bound);
}

} // namespace ellip
