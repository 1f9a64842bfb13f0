#include "ellip/operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ellip {

bool RatMat::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Rational& r) { return r.is_zero(); });
}

double RatMat::frobenius() const {
    double s = 0;
    for (const auto& r : a_) {
        double v = r.to_double();
        s += v * v;
    }
    return std::sqrt(s);
}

Direction::Direction(std::vector<Rational> components) : comps_(std::move(components)) {
    double norm2 = 0;
    for (const auto& c : comps_) {
        double v = c.to_double();
        norm2 += v * v;
    }
    if (norm2 == 0) throw std::invalid_argument("Direction: zero vector");
    double inv = 1.0 / std::sqrt(norm2);
    unit_.reserve(comps_.size());
    for (const auto& c : comps_) unit_.push_back(c.to_double() * inv);
}

std::string Direction::str() const {
    std::string s;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        if (i) s += ",";
        s += comps_[i].str();
    }
    return s;
}

Operator::Operator(std::size_t n, std::size_t k, std::size_t dim_v, std::size_t dim_w,
                   std::map<MultiIndex, RatMat> terms, std::string name)
    : n_(n), k_(k), dim_v_(dim_v), dim_w_(dim_w), terms_(std::move(terms)),
      name_(std::move(name)) {
    if (n_ < 1 || k_ < 1 || dim_v_ < 1 || dim_w_ < 1)
        throw std::invalid_argument("Operator: dimensions must be >= 1");
    bool any_nonzero = false;
    for (auto it = terms_.begin(); it != terms_.end();) {
        const auto& [alpha, mat] = *it;
        if (alpha.size() != n_)
            throw std::invalid_argument("Operator: multi-index length != n");
        if (multi_index_order(alpha) != k_)
            throw std::invalid_argument("Operator: |alpha| != k");
        if (mat.rows() != dim_w_ || mat.cols() != dim_v_)
            throw std::invalid_argument("Operator: coefficient shape mismatch");
        if (mat.is_zero()) {
            it = terms_.erase(it);
        } else {
            any_nonzero = true;
            ++it;
        }
    }
    if (!any_nonzero) throw std::invalid_argument("Operator: all coefficients zero");
}

double Operator::coefficient_norm() const {
    double s = 0;
    for (const auto& [a, m] : terms_) {
        double f = m.frobenius();
        s += f * f;
    }
    return std::sqrt(s);
}

GMat Operator::symbol_at(const std::vector<Rational>& xi) const {
    if (xi.size() != n_) throw std::invalid_argument("symbol_at: dimension mismatch");
    GMat out(dim_w_, dim_v_);
    for (const auto& [alpha, mat] : terms_) {
        Rational mono(1);
        for (std::size_t j = 0; j < n_; ++j)
            for (unsigned p = 0; p < alpha[j]; ++p) mono *= xi[j];
        if (mono.is_zero()) continue;
        for (std::size_t i = 0; i < dim_w_; ++i)
            for (std::size_t jj = 0; jj < dim_v_; ++jj)
                out(i, jj) += GaussianRational(mat(i, jj) * mono);
    }
    return out;
}

GMat Operator::symbol_at_complexified(const std::vector<Rational>& xi,
                                      const std::vector<Rational>& nu) const {
    if (xi.size() != n_ || nu.size() != n_)
        throw std::invalid_argument("symbol_at_complexified: dimension mismatch");
    GMat out(dim_w_, dim_v_);
    for (const auto& [alpha, mat] : terms_) {
        GaussianRational mono(1);
        for (std::size_t j = 0; j < n_; ++j) {
            GaussianRational z(xi[j], nu[j]);
            for (unsigned p = 0; p < alpha[j]; ++p) mono *= z;
        }
        if (mono.is_zero()) continue;
        for (std::size_t i = 0; i < dim_w_; ++i)
            for (std::size_t jj = 0; jj < dim_v_; ++jj)
                out(i, jj) += GaussianRational(mat(i, jj)) * mono;
    }
    return out;
}

PolyMatrix symbol_matrix(const Operator& op) {
    PolyMatrix pm(op.dim_w(), op.dim_v(), op.n());
    for (const auto& [alpha, mat] : op.terms())
        for (std::size_t i = 0; i < op.dim_w(); ++i)
            for (std::size_t j = 0; j < op.dim_v(); ++j)
                if (!mat(i, j).is_zero())
                    pm(i, j).add_term(alpha, GaussianRational(mat(i, j)));
    return pm;
}

PolyMatrix symbol_matrix_complexified(const Operator& op, const Direction& nu) {
    if (nu.dim() != op.n())
        throw std::invalid_argument("symbol_matrix_complexified: direction dimension");
    PolyMatrix real = symbol_matrix(op);
    std::vector<MultiPoly> subs;
    subs.reserve(op.n());
    for (std::size_t j = 0; j < op.n(); ++j) {
        MultiPoly s = MultiPoly::variable(op.n(), j);
        s += MultiPoly::constant(op.n(), GaussianRational(Rational(0), nu.components()[j]));
        subs.push_back(std::move(s));
    }
    PolyMatrix pm(op.dim_w(), op.dim_v(), op.n());
    for (std::size_t i = 0; i < op.dim_w(); ++i)
        for (std::size_t j = 0; j < op.dim_v(); ++j)
            pm(i, j) = real(i, j).substitute(subs);
    return pm;
}

Operator adjoint(const Operator& op) {
    std::map<MultiIndex, RatMat> terms;
    bool negate = op.k() % 2 == 1;
    for (const auto& [alpha, mat] : op.terms()) {
        RatMat t(op.dim_v(), op.dim_w());
        for (std::size_t i = 0; i < op.dim_w(); ++i)
            for (std::size_t j = 0; j < op.dim_v(); ++j)
                t(j, i) = negate ? -mat(i, j) : mat(i, j);
        terms.emplace(alpha, std::move(t));
    }
    Operator out(op.n(), op.k(), op.dim_w(), op.dim_v(), std::move(terms));
    if (!op.name().empty()) out.set_name(op.name() + "_adjoint");
    return out;
}

std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t m) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(m);
    if (m > n) return out;
    // lexicographic enumeration
    for (std::size_t i = 0; i < m; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        std::size_t i = m;
        while (i > 0) {
            --i;
            if (cur[i] != i + n - m) break;
            if (i == 0) return out;
        }
        ++cur[i];
        for (std::size_t j = i + 1; j < m; ++j) cur[j] = cur[j - 1] + 1;
    }
}

unsigned long long binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    unsigned long long r = 1;
    for (unsigned i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

std::vector<MultiIndex> multi_indices_of_order(std::size_t n, unsigned k) {
    std::vector<MultiIndex> out;
    MultiIndex cur(n, 0);
    // recursive lexicographic enumeration
    auto rec = [&](auto&& self, std::size_t pos, unsigned rem) -> void {
        if (pos + 1 == n) {
            cur[pos] = rem;
            out.push_back(cur);
            return;
        }
        for (unsigned v = rem + 1; v-- > 0;) {
            cur[pos] = v;
            self(self, pos + 1, rem - v);
        }
    };
    if (n > 0) rec(rec, 0, k);
    return out;
}

namespace {

Rational real_coefficient(const GaussianRational& g, const char* where) {
    if (!g.is_real()) throw std::logic_error(std::string(where) + ": coefficient not real");
    return g.re();
}

// Rebuild an Operator from a homogeneous polynomial symbol matrix.
Operator operator_from_symbol(const PolyMatrix& pm, std::size_t k, const char* where) {
    std::map<MultiIndex, RatMat> terms;
    for (std::size_t i = 0; i < pm.rows(); ++i) {
        for (std::size_t j = 0; j < pm.cols(); ++j) {
            for (const auto& [alpha, c] : pm(i, j).terms()) {
                if (multi_index_order(alpha) != k)
                    throw std::logic_error(std::string(where) + ": symbol not homogeneous");
                auto [it, inserted] =
                    terms.try_emplace(alpha, RatMat(pm.rows(), pm.cols()));
                it->second(i, j) = real_coefficient(c, where);
            }
        }
    }
    return Operator(pm.nvars(), k, pm.cols(), pm.rows(), std::move(terms));
}

} // namespace

Operator wedge_power(const Operator& op, std::size_t m) {
    if (m < 2 || m > op.dim_v())
        throw std::invalid_argument("wedge_power: need 2 <= m <= dim_v");
    PolyMatrix sym = symbol_matrix(op);
    auto row_sets = index_subsets(op.dim_w(), m);
    auto col_sets = index_subsets(op.dim_v(), m);
    PolyMatrix wedge(row_sets.size(), col_sets.size(), op.n());
    for (std::size_t i = 0; i < row_sets.size(); ++i)
        for (std::size_t j = 0; j < col_sets.size(); ++j)
            wedge(i, j) = sym.minor_det(row_sets[i], col_sets[j]);
    Operator out = operator_from_symbol(wedge, op.k() * m, "wedge_power");
    if (!op.name().empty())
        out.set_name("wedge" + std::to_string(m) + "_" + op.name());
    return out;
}

Operator plane_slice(const Operator& op, const std::vector<Rational>& d1,
                     const std::vector<Rational>& d2) {
    if (d1.size() != op.n() || d2.size() != op.n())
        throw std::invalid_argument("plane_slice: direction dimension mismatch");
    GMat dm(op.n(), 2);
    for (std::size_t i = 0; i < op.n(); ++i) {
        dm(i, 0) = GaussianRational(d1[i]);
        dm(i, 1) = GaussianRational(d2[i]);
    }
    if (exact_rank_kernel(dm).rank != 2)
        throw std::invalid_argument("plane_slice: directions linearly dependent");
    PolyMatrix sym = symbol_matrix(op);
    std::vector<MultiPoly> subs;
    subs.reserve(op.n());
    for (std::size_t j = 0; j < op.n(); ++j) {
        MultiPoly s = MultiPoly::variable(2, 0).scaled(GaussianRational(d1[j]));
        s += MultiPoly::variable(2, 1).scaled(GaussianRational(d2[j]));
        subs.push_back(std::move(s));
    }
    PolyMatrix sliced(op.dim_w(), op.dim_v(), 2);
    for (std::size_t i = 0; i < op.dim_w(); ++i)
        for (std::size_t j = 0; j < op.dim_v(); ++j)
            sliced(i, j) = sym(i, j).substitute(subs);
    Operator out = operator_from_symbol(sliced, op.k(), "plane_slice");
    if (!op.name().empty()) out.set_name(op.name() + "_slice");
    return out;
}

Operator change_frame(const Operator& op, const std::vector<std::vector<Rational>>& columns) {
    std::size_t n = op.n();
    if (columns.size() != n) throw std::invalid_argument("change_frame: need n columns");
    GMat m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        if (columns[j].size() != n) throw std::invalid_argument("change_frame: column length");
        for (std::size_t i = 0; i < n; ++i) m(i, j) = GaussianRational(columns[j][i]);
    }
    if (exact_rank_kernel(m).rank != n)
        throw std::invalid_argument("change_frame: matrix is singular");
    PolyMatrix sym = symbol_matrix(op);
    std::vector<MultiPoly> subs;
    subs.reserve(n);
    for (std::size_t row = 0; row < n; ++row) {
        MultiPoly s(n);
        for (std::size_t col = 0; col < n; ++col)
            s += MultiPoly::variable(n, col).scaled(GaussianRational(columns[col][row]));
        subs.push_back(std::move(s));
    }
    PolyMatrix turned(op.dim_w(), op.dim_v(), n);
    for (std::size_t i = 0; i < op.dim_w(); ++i)
        for (std::size_t j = 0; j < op.dim_v(); ++j)
            turned(i, j) = sym(i, j).substitute(subs);
    Operator out = operator_from_symbol(turned, op.k(), "change_frame");
    out.set_name(op.name());
    return out;
}

std::vector<std::vector<Rational>> householder_frame(const std::vector<Rational>& nu) {
    std::size_t n = nu.size();
    Rational norm2(0);
    for (const auto& c : nu) norm2 += c * c;
    if (norm2 != Rational(1))
        throw std::invalid_argument("householder_frame: direction must be exactly unit");
    std::vector<std::vector<Rational>> cols(n, std::vector<Rational>(n));
    std::vector<Rational> w(n);
    Rational wn2(0);
    w[0] = Rational(1) - nu[0];
    for (std::size_t i = 1; i < n; ++i) w[i] = -nu[i];
    for (const auto& c : w) wn2 += c * c;
    if (wn2.is_zero()) {
        for (std::size_t i = 0; i < n; ++i) cols[i][i] = Rational(1);
        return cols;
    }
    // H = I - 2 w w^T / (w^T w); H e1 = nu, H orthogonal and symmetric
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            Rational hij = (i == j ? Rational(1) : Rational(0)) -
                           Rational(2) * w[i] * w[j] / wn2;
            cols[j][i] = hij;
        }
    return cols;
}

MultiPoly resultant_P(const Operator& op, const std::vector<std::vector<Rational>>& frame,
                      const std::vector<Rational>& w) {
    if (op.dim_v() != 1) throw std::invalid_argument("resultant_P: requires dim_v = 1");
    std::size_t n = op.n();
    if (frame.size() != n) throw std::invalid_argument("resultant_P: frame must have n columns");
    if (w.size() != op.dim_w()) throw std::invalid_argument("resultant_P: w dimension mismatch");
    GMat fm(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        if (frame[j].size() != n) throw std::invalid_argument("resultant_P: frame column length");
        for (std::size_t i = 0; i < n; ++i) fm(i, j) = GaussianRational(frame[j][i]);
    }
    if (exact_rank_kernel(fm).rank != n)
        throw std::invalid_argument("resultant_P: frame is singular");

    const std::vector<Rational>& nu = frame.back();
    GMat w0m = op.symbol_at(nu);
    std::vector<Rational> w0(op.dim_w());
    bool w0_zero = true;
    for (std::size_t i = 0; i < op.dim_w(); ++i) {
        w0[i] = real_coefficient(w0m(i, 0), "resultant_P");
        if (!w0[i].is_zero()) w0_zero = false;
    }
    if (w0_zero)
        throw std::domain_error("resultant_P: A(nu) = 0, not boundary elliptic in nu");

    // symbol in frame coordinates: xi = F * (xi'_1..xi'_{n-1}, xi_n)
    PolyMatrix sym = symbol_matrix(op);
    std::vector<MultiPoly> subs;
    subs.reserve(n);
    for (std::size_t jrow = 0; jrow < n; ++jrow) {
        MultiPoly s(n);
        for (std::size_t jcol = 0; jcol < n; ++jcol)
            s += MultiPoly::variable(n, jcol).scaled(GaussianRational(frame[jcol][jrow]));
        subs.push_back(std::move(s));
    }

    MultiPoly p(n), q(n);
    for (std::size_t i = 0; i < op.dim_w(); ++i) {
        MultiPoly entry = sym(i, 0).substitute(subs);
        p += entry.scaled(GaussianRational(w0[i]));
        q += entry.scaled(GaussianRational(w[i]));
    }

    // view p, q as univariate in the last variable with coefficients in xi'
    auto split = [n](const MultiPoly& f) {
        std::vector<MultiPoly> coeffs;
        for (const auto& [e, c] : f.terms()) {
            unsigned deg = e[n - 1];
            if (coeffs.size() <= deg) coeffs.resize(deg + 1, MultiPoly(n - 1));
            Exponents tang(e.begin(), e.end() - 1);
            coeffs[deg].add_term(tang, c);
        }
        return coeffs;
    };
    return sylvester_resultant(split(p), split(q));
}

} // namespace ellip
