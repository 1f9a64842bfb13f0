#ifndef ELLIP_MULTIPOLY_HPP
#define ELLIP_MULTIPOLY_HPP

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ellip/rational.hpp"

namespace ellip {

using Exponents = std::vector<unsigned>;

/// Multivariate polynomial over Q(i), canonical form: no zero coefficients stored.
/// degree() of the zero polynomial is nullopt (the -infinity sentinel).
class MultiPoly {
public:
    using TermMap = std::map<Exponents, GaussianRational>;

    explicit MultiPoly(std::size_t nvars = 0) : nvars_(nvars) {}

    static MultiPoly constant(std::size_t nvars, GaussianRational c);
    static MultiPoly variable(std::size_t nvars, std::size_t index, unsigned power = 1);
    static MultiPoly monomial(std::size_t nvars, Exponents e, GaussianRational c);

    std::size_t nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// Max total degree; nullopt for the zero polynomial.
    std::optional<int> degree() const;

    /// Degree d if every term has |exponent| = d; nullopt if inhomogeneous.
    /// Throws on the zero polynomial (degree is the -inf sentinel, not a class).
    std::optional<int> homogeneity_degree() const;

    void add_term(const Exponents& e, const GaussianRational& c);

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

    MultiPoly scaled(const GaussianRational& c) const;

    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

    /// Exact quotient; throws if the division is not exact.
    MultiPoly divide_exact(const MultiPoly& divisor) const;

    /// Horner-style accumulation of sum c_alpha * point^alpha.
    std::complex<double> eval(std::span<const std::complex<double>> point) const;

    GaussianRational eval_exact(const std::vector<GaussianRational>& point) const;

    /// Substitute variable j -> linear polynomial subs[j] (all in the same ring).
    MultiPoly substitute(const std::vector<MultiPoly>& subs) const;

    std::string str(const std::string& varname = "x") const;

private:
    std::size_t nvars_;
    TermMap terms_;
};

/// p evaluated at a real rational point.
GaussianRational eval_at_rational(const MultiPoly& p, const std::vector<Rational>& point);

} // namespace ellip

#endif
