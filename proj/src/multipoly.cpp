#include "ellip/multipoly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ellip {

MultiPoly MultiPoly::constant(std::size_t nvars, GaussianRational c) {
    MultiPoly p(nvars);
    if (!c.is_zero()) p.terms_.emplace(Exponents(nvars, 0), std::move(c));
    return p;
}

MultiPoly MultiPoly::variable(std::size_t nvars, std::size_t index, unsigned power) {
    if (index >= nvars) throw std::out_of_range("MultiPoly::variable: index out of range");
    MultiPoly p(nvars);
    Exponents e(nvars, 0);
    e[index] = power;
    p.terms_.emplace(std::move(e), GaussianRational(1));
    return p;
}

MultiPoly MultiPoly::monomial(std::size_t nvars, Exponents e, GaussianRational c) {
    if (e.size() != nvars) throw std::invalid_argument("MultiPoly::monomial: exponent length");
    MultiPoly p(nvars);
    if (!c.is_zero()) p.terms_.emplace(std::move(e), std::move(c));
    return p;
}

std::optional<int> MultiPoly::degree() const {
    if (terms_.empty()) return std::nullopt;
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int t = 0;
        for (unsigned x : e) t += static_cast<int>(x);
        d = std::max(d, t);
    }
    return d;
}

std::optional<int> MultiPoly::homogeneity_degree() const {
    if (terms_.empty()) throw std::domain_error("homogeneity_degree: zero polynomial");
    int d = -1;
    for (const auto& [e, c] : terms_) {
        int t = 0;
        for (unsigned x : e) t += static_cast<int>(x);
        if (d < 0) d = t;
        else if (t != d) return std::nullopt;
    }
    return d;
}

void MultiPoly::add_term(const Exponents& e, const GaussianRational& c) {
    if (e.size() != nvars_) throw std::invalid_argument("MultiPoly::add_term: exponent length");
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    if (nvars_ != o.nvars_) throw std::invalid_argument("MultiPoly: nvars mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    if (nvars_ != o.nvars_) throw std::invalid_argument("MultiPoly: nvars mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    if (a.nvars_ != b.nvars_) throw std::invalid_argument("MultiPoly: nvars mismatch");
    MultiPoly r(a.nvars_);
    Exponents e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t j = 0; j < a.nvars_; ++j) e[j] = ea[j] + eb[j];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

MultiPoly MultiPoly::scaled(const GaussianRational& c) const {
    MultiPoly r(nvars_);
    if (c.is_zero()) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

namespace {

// graded lex, then lex; total order compatible with multiplication
bool exp_less(const Exponents& a, const Exponents& b) {
    long long da = 0, db = 0;
    for (unsigned x : a) da += x;
    for (unsigned x : b) db += x;
    if (da != db) return da < db;
    return a < b;
}

bool divides(const Exponents& d, const Exponents& e) {
    for (std::size_t j = 0; j < d.size(); ++j)
        if (d[j] > e[j]) return false;
    return true;
}

} // namespace

MultiPoly MultiPoly::divide_exact(const MultiPoly& divisor) const {
    if (nvars_ != divisor.nvars_) throw std::invalid_argument("divide_exact: nvars mismatch");
    if (divisor.is_zero()) throw std::domain_error("divide_exact: division by zero polynomial");
    MultiPoly rem = *this;
    MultiPoly quot(nvars_);
    // leading term of the divisor under graded lex
    auto dlead = divisor.terms_.begin();
    for (auto it = divisor.terms_.begin(); it != divisor.terms_.end(); ++it)
        if (exp_less(dlead->first, it->first)) dlead = it;
    while (!rem.is_zero()) {
        auto rlead = rem.terms_.begin();
        for (auto it = rem.terms_.begin(); it != rem.terms_.end(); ++it)
            if (exp_less(rlead->first, it->first)) rlead = it;
        if (!divides(dlead->first, rlead->first))
            throw std::domain_error("divide_exact: not divisible");
        Exponents qe(nvars_);
        for (std::size_t j = 0; j < nvars_; ++j) qe[j] = rlead->first[j] - dlead->first[j];
        GaussianRational qc = rlead->second / dlead->second;
        MultiPoly qterm = MultiPoly::monomial(nvars_, qe, qc);
        quot += qterm;
        rem -= qterm * divisor;
    }
    return quot;
}

std::complex<double> MultiPoly::eval(std::span<const std::complex<double>> point) const {
    if (point.size() != nvars_) throw std::invalid_argument("MultiPoly::eval: dimension mismatch");
    std::complex<double> acc(0.0, 0.0);
    for (const auto& [e, c] : terms_) {
        std::complex<double> m = c.to_complex();
        for (std::size_t j = 0; j < nvars_; ++j)
            for (unsigned p = 0; p < e[j]; ++p) m *= point[j];
        acc += m;
    }
    return acc;
}

GaussianRational MultiPoly::eval_exact(const std::vector<GaussianRational>& point) const {
    if (point.size() != nvars_) throw std::invalid_argument("MultiPoly::eval_exact: dimension mismatch");
    GaussianRational acc(0);
    for (const auto& [e, c] : terms_) {
        GaussianRational m = c;
        for (std::size_t j = 0; j < nvars_; ++j)
            for (unsigned p = 0; p < e[j]; ++p) m *= point[j];
        acc += m;
    }
    return acc;
}

MultiPoly MultiPoly::substitute(const std::vector<MultiPoly>& subs) const {
    if (subs.size() != nvars_) throw std::invalid_argument("MultiPoly::substitute: arity mismatch");
    std::size_t out_vars = subs.empty() ? 0 : subs[0].nvars();
    MultiPoly r(out_vars);
    for (const auto& [e, c] : terms_) {
        MultiPoly m = MultiPoly::constant(out_vars, c);
        for (std::size_t j = 0; j < nvars_; ++j)
            for (unsigned p = 0; p < e[j]; ++p) m *= subs[j];
        r += m;
    }
    return r;
}

std::string MultiPoly::str(const std::string& varname) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        for (std::size_t j = 0; j < e.size(); ++j) {
            if (e[j] == 0) continue;
            os << "*" << varname << j + 1;
            if (e[j] > 1) os << "^" << e[j];
        }
    }
    return os.str();
}

GaussianRational eval_at_rational(const MultiPoly& p, const std::vector<Rational>& point) {
    std::vector<GaussianRational> g;
    g.reserve(point.size());
    for (const auto& r : point) g.emplace_back(r);
    return p.eval_exact(g);
}

Rational rational_approx(double x, std::uint64_t max_den) {
    if (!(max_den >= 1)) throw std::invalid_argument("rational_approx: max_den");
    bool neg = x < 0;
    double v = neg ? -x : x;
    // continued fraction expansion with convergent denominators capped
    BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = v;
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(frac);
        if (fl > 9e17) break;
        BigInt a = static_cast<long long>(fl);
        BigInt p2 = a * p1 + p0;
        BigInt q2 = a * q1 + q0;
        if (q2 > BigInt(max_den)) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double rem = frac - fl;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    if (q1 == 0) return Rational(0);
    Rational r(p1, q1);
    return neg ? -r : r;
}

} // namespace ellip
