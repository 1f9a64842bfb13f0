#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <complex>
#include <random>

#include "ellip/linalg.hpp"
#include "ellip/multipoly.hpp"
#include "ellip/rational.hpp"

using namespace ellip;

namespace {

MultiPoly c0(long long v) { return MultiPoly::constant(0, GaussianRational(v)); }

// univariate polynomial over constant ring, as coefficient list (index = power)
using UniPoly = std::vector<MultiPoly>;

UniPoly uni(std::initializer_list<long long> coeffs) {
    UniPoly p;
    for (long long c : coeffs) p.push_back(c0(c));
    return p;
}

UniPoly uni_mul(const UniPoly& a, const UniPoly& b) {
    UniPoly r(a.size() + b.size() - 1, MultiPoly(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

Rational const_value(const MultiPoly& p) {
    if (p.is_zero()) return Rational(0);
    REQUIRE(p.terms().size() == 1);
    REQUIRE(p.terms().begin()->second.is_real());
    return p.terms().begin()->second.re();
}

// independent 3x3 determinant oracle over rationals, cofactor expansion
Rational det3(const std::array<std::array<Rational, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
         - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
         + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

} // namespace

TEST_CASE("rational basics and serialization") {
    Rational r(BigInt(6), BigInt(-4));
    CHECK(r.num() == -3);
    CHECK(r.den() == 2);
    CHECK(r.str() == "-3/2");
    CHECK(Rational::from_string("-3/2") == r);
    CHECK(Rational::from_string("7").str() == "7");
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
    CHECK_THROWS_AS(Rational::from_string("x"), std::invalid_argument);
}

TEST_CASE("gaussian rational field operations") {
    GaussianRational i = GaussianRational::i();
    CHECK((i * i) == GaussianRational(-1));
    GaussianRational z(Rational(3), Rational(-4));
    CHECK(z.conj().conj() == z);
    CHECK((z / z) == GaussianRational(1));
    CHECK((z * z.conj()) == GaussianRational(z.norm2()));
    CHECK_THROWS_AS(z / GaussianRational(0), std::domain_error);
}

TEST_CASE("poly_eval examples") {
    // xi1^2 + xi2^2 at (1, i) -> 0
    MultiPoly p = MultiPoly::variable(2, 0, 2) + MultiPoly::variable(2, 1, 2);
    std::vector<std::complex<double>> pt = {{1, 0}, {0, 1}};
    CHECK(std::abs(p.eval(pt)) == doctest::Approx(0.0).epsilon(1e-14));

    MultiPoly zero(2);
    CHECK(std::abs(zero.eval(pt)) == 0.0);

    MultiPoly xy = MultiPoly::variable(2, 0) * MultiPoly::variable(2, 1);
    std::vector<std::complex<double>> pt2 = {{2, 0}, {3, 0}};
    CHECK(xy.eval(pt2).real() == doctest::Approx(6.0));

    std::vector<std::complex<double>> bad = {{1, 0}};
    CHECK_THROWS_AS(p.eval(bad), std::invalid_argument);
}

TEST_CASE("poly_eval multiplicativity property") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> coef(-4, 4), expo(0, 2);
    for (int trial = 0; trial < 40; ++trial) {
        MultiPoly p(2), q(2);
        for (int t = 0; t < 5; ++t) {
            p.add_term({unsigned(expo(rng)), unsigned(expo(rng))}, GaussianRational(coef(rng)));
            q.add_term({unsigned(expo(rng)), unsigned(expo(rng))}, GaussianRational(coef(rng)));
        }
        std::vector<std::complex<double>> pt = {{0.3 * coef(rng), 0.1}, {-0.2, 0.4}};
        std::complex<double> lhs = (p * q).eval(pt);
        std::complex<double> rhs = p.eval(pt) * q.eval(pt);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("sylvester resultant: hand oracle for (z-2, z^2+1)") {
    // Sylvester matrix of p = z - 2 (deg 1), q = z^2 + 1 (deg 2), 3x3:
    //   [ 1 -2  0 ]
    //   [ 0  1 -2 ]
    //   [ 1  0  1 ]
    std::array<std::array<Rational, 3>, 3> s{{
        {Rational(1), Rational(-2), Rational(0)},
        {Rational(0), Rational(1), Rational(-2)},
        {Rational(1), Rational(0), Rational(1)},
    }};
    Rational oracle = det3(s);
    CHECK(oracle == Rational(5));

    MultiPoly r = sylvester_resultant(uni({-2, 1}), uni({1, 0, 1}));
    CHECK(const_value(r) == oracle);
}

TEST_CASE("sylvester resultant: shared roots give zero") {
    CHECK(sylvester_resultant(uni({1, 1}), uni({1, 1})).is_zero());
    CHECK(sylvester_resultant(uni({1, 0, 1}), uni({1, 0, 1})).is_zero());
    CHECK_THROWS_AS(sylvester_resultant(UniPoly{}, UniPoly{}), std::domain_error);
    CHECK_THROWS_AS(sylvester_resultant(uni({3}), uni({5})), std::domain_error);
}

TEST_CASE("resultant multiplicativity: Res(p*q, r) = Res(p,r) * Res(q,r)") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> coef(-3, 3);
    int done = 0;
    while (done < 25) {
        UniPoly p = uni({coef(rng), coef(rng), 1});
        UniPoly q = uni({coef(rng), 1});
        UniPoly r = uni({coef(rng), coef(rng), 1});
        Rational lhs = const_value(sylvester_resultant(uni_mul(p, q), r));
        Rational rhs = const_value(sylvester_resultant(p, r)) *
                       const_value(sylvester_resultant(q, r));
        CHECK(lhs == rhs);
        ++done;
    }
}

TEST_CASE("exact_rank_kernel examples") {
    SUBCASE("identity 3x3") {
        RankKernel rk = exact_rank_kernel(GMat::identity(3));
        CHECK(rk.rank == 3);
        CHECK(rk.kernel_basis.empty());
    }
    SUBCASE("[[1, i], [-i, 1]] has rank 1") {
        // hand row-reduction oracle: row2 = -i * row1, so rank 1 and the
        // kernel is spanned by (-i, 1): v1 + i*v2 = 0.
        GMat m(2, 2);
        m(0, 0) = GaussianRational(1);
        m(0, 1) = GaussianRational::i();
        m(1, 0) = -GaussianRational::i();
        m(1, 1) = GaussianRational(1);
        RankKernel rk = exact_rank_kernel(m);
        CHECK(rk.rank == 1);
        REQUIRE(rk.kernel_basis.size() == 1);
        GVec mv = m.apply(rk.kernel_basis[0]);
        for (const auto& c : mv) CHECK(c.is_zero());
        Subspace expect(2, {{-GaussianRational::i(), GaussianRational(1)}});
        CHECK(expect.contains(rk.kernel_basis[0]));
    }
    SUBCASE("zero 2x2") {
        RankKernel rk = exact_rank_kernel(GMat(2, 2));
        CHECK(rk.rank == 0);
        CHECK(rk.kernel_basis.size() == 2);
    }
}

TEST_CASE("rank-nullity on random rational matrices") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dim(1, 5), coef(-2, 2);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t r = dim(rng), c = dim(rng);
        GMat m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                m(i, j) = GaussianRational(Rational(coef(rng), 1 + std::abs(coef(rng))),
                                           Rational(coef(rng)));
        RankKernel rk = exact_rank_kernel(m);
        CHECK(rk.rank + rk.kernel_basis.size() == c);
        for (const auto& v : rk.kernel_basis) {
            GVec mv = m.apply(v);
            for (const auto& x : mv) CHECK(x.is_zero());
        }
    }
}

TEST_CASE("subspace intersection examples") {
    auto e = [](std::size_t n, std::size_t j) {
        GVec v(n, GaussianRational(0));
        v[j] = GaussianRational(1);
        return v;
    };
    SUBCASE("span{e1,e2} cap span{e2,e3} = span{e2}") {
        Subspace a(3, {e(3, 0), e(3, 1)});
        Subspace b(3, {e(3, 1), e(3, 2)});
        Subspace x = subspace_intersection({a, b});
        CHECK(x.dim() == 1);
        CHECK(x.contains(e(3, 1)));
    }
    SUBCASE("idempotence") {
        Subspace a(3, {e(3, 0), e(3, 2)});
        CHECK(subspace_intersection({a, a}).same_as(a));
    }
    SUBCASE("transversal lines meet trivially") {
        Subspace a(2, {e(2, 0)});
        Subspace b(2, {e(2, 1)});
        CHECK(subspace_intersection({a, b}).dim() == 0);
    }
    SUBCASE("ambient mismatch is an error") {
        Subspace a(2, {e(2, 0)});
        Subspace b(3, {e(3, 0)});
        CHECK_THROWS_AS(subspace_intersection({a, b}), std::invalid_argument);
    }
}

TEST_CASE("subspace intersection is order independent") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> coef(-2, 2);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 4;
        std::vector<Subspace> spaces;
        for (int s = 0; s < 3; ++s) {
            GMat gen(n, 2);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    gen(i, j) = GaussianRational(coef(rng));
            spaces.push_back(Subspace::span_of_columns(gen));
        }
        Subspace fwd = subspace_intersection(spaces);
        std::vector<Subspace> rev(spaces.rbegin(), spaces.rend());
        Subspace bwd = subspace_intersection(rev);
        CHECK(fwd.same_as(bwd));
        for (const auto& s : spaces)
            for (const auto& v : fwd.basis()) CHECK(s.contains(v));
    }
}

TEST_CASE("homogeneity degree") {
    MultiPoly p = MultiPoly::monomial(2, {2, 1}, GaussianRational(1)) +
                  MultiPoly::monomial(2, {0, 3}, GaussianRational(1));
    CHECK(p.homogeneity_degree() == 3);

    MultiPoly q = MultiPoly::variable(2, 0) + MultiPoly::variable(2, 0, 2);
    CHECK_FALSE(q.homogeneity_degree().has_value());

    CHECK_THROWS_AS(MultiPoly(2).homogeneity_degree(), std::domain_error);
    CHECK_FALSE(MultiPoly(2).degree().has_value());
}

TEST_CASE("exact polynomial division") {
    MultiPoly a = MultiPoly::variable(2, 0, 2) - MultiPoly::variable(2, 1, 2);
    MultiPoly b = MultiPoly::variable(2, 0) - MultiPoly::variable(2, 1);
    MultiPoly q = a.divide_exact(b);
    CHECK(q == MultiPoly::variable(2, 0) + MultiPoly::variable(2, 1));
    CHECK_THROWS_AS(b.divide_exact(a), std::domain_error);
}

TEST_CASE("rational approximation by continued fractions") {
    CHECK(rational_approx(0.5, 64) == Rational(1, 2));
    CHECK(rational_approx(-0.75, 64) == Rational(-3, 4));
    CHECK(rational_approx(1.0 / 3.0, 1000) == Rational(1, 3));
    CHECK(std::abs(rational_approx(0.7071067811865476, 1 << 20).to_double() -
                   0.7071067811865476) < 1e-10);
}
