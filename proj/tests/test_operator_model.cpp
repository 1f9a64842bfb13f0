#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ellip/catalog.hpp"
#include "ellip/operator.hpp"
#include "ellip/parse.hpp"

using namespace ellip;

namespace {

std::vector<Rational> rvec(std::initializer_list<long long> v) {
    std::vector<Rational> r;
    for (long long x : v) r.emplace_back(x);
    return r;
}

// dim_v x m coordinate matrix -> wedge coordinates (lex-ordered m-subsets)
GVec wedge_coords(const GMat& vectors, std::size_t m) {
    auto sets = index_subsets(vectors.rows(), m);
    GVec out;
    out.reserve(sets.size());
    std::vector<std::size_t> cols(m);
    for (std::size_t j = 0; j < m; ++j) cols[j] = j;
    for (const auto& rows : sets) {
        // determinant of the m x m submatrix, cofactor oracle
        PolyMatrix pm(m, m, 0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                pm(i, j) = MultiPoly::constant(0, vectors(rows[i], cols[j]));
        MultiPoly d = pm.det();
        out.push_back(d.is_zero() ? GaussianRational(0) : d.terms().begin()->second);
    }
    return out;
}

} // namespace

TEST_CASE("DSL parses the Cauchy-Riemann operator") {
    Operator op = parse_operator("w1 = d1 u1 - d2 u2 ; w2 = d2 u1 + d1 u2");
    CHECK(op.n() == 2);
    CHECK(op.k() == 1);
    CHECK(op.dim_v() == 2);
    CHECK(op.dim_w() == 2);
    CHECK(op == catalog("cauchy_riemann"));
}

TEST_CASE("JSON parses the Laplacian") {
    std::string src = R"({"n":2,"k":2,"dim_v":1,"dim_w":1,
        "terms":[{"alpha":[2,0],"matrix":[["1"]]},{"alpha":[0,2],"matrix":[["1"]]}]})";
    Operator op = parse_operator(src);
    CHECK(op == catalog("laplacian", {.n = 2}));
}

TEST_CASE("DSL rejects malformed input with location") {
    CHECK_THROWS_AS(parse_operator("w1 = d1 u1 + d1 u2 u3"), ParseError);
    CHECK_THROWS_AS(parse_operator("w1 = d1 u1 + d1 d2 u1"), ParseError); // mixed order
    CHECK_THROWS_AS(parse_operator("w1 = u1"), ParseError);
    CHECK_THROWS_AS(parse_operator(""), ParseError);
    try {
        parse_operator("w1 = d1 u1 +\n d1 u2 u3");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.col() > 1);
    }
}

TEST_CASE("operator JSON round-trip over the whole catalog") {
    for (const auto& name : catalog_names()) {
        CatalogParams p;
        p.n = name == "directional_example" ? 3 : 2;
        p.k = 2;
        Operator op = catalog(name, p);
        Operator back = operator_from_json(operator_to_json(op));
        CHECK(back == op);
        CHECK(back.name() == op.name());
    }
}

TEST_CASE("symbol matrix examples") {
    SUBCASE("laplacian real symbol") {
        PolyMatrix s = symbol_matrix(catalog("laplacian", {.n = 2}));
        REQUIRE(s.rows() == 1);
        REQUIRE(s.cols() == 1);
        MultiPoly expect = MultiPoly::variable(2, 0, 2) + MultiPoly::variable(2, 1, 2);
        CHECK(s(0, 0) == expect);
    }
    SUBCASE("laplacian complexified along e2: (xi1)^2 + (xi2 + i)^2") {
        Direction e2(rvec({0, 1}));
        PolyMatrix s = symbol_matrix_complexified(catalog("laplacian", {.n = 2}), e2);
        MultiPoly expect = MultiPoly::variable(2, 0, 2) + MultiPoly::variable(2, 1, 2);
        expect += MultiPoly::constant(2, GaussianRational(-1));
        expect += MultiPoly::variable(2, 1).scaled(GaussianRational(Rational(0), Rational(2)));
        CHECK(s(0, 0) == expect);
    }
    SUBCASE("gradient real symbol is the frequency column") {
        PolyMatrix s = symbol_matrix(catalog("gradient", {.n = 2}));
        REQUIRE(s.rows() == 2);
        REQUIRE(s.cols() == 1);
        CHECK(s(0, 0) == MultiPoly::variable(2, 0));
        CHECK(s(1, 0) == MultiPoly::variable(2, 1));
    }
}

TEST_CASE("symbol evaluation agrees with direct term sum") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (const auto& name : {"laplacian", "symmetric_gradient", "cauchy_riemann"}) {
        Operator op = catalog(name, {.n = 2});
        PolyMatrix sym = symbol_matrix(op);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<Rational> xi = {Rational(coef(rng), 3), Rational(coef(rng), 2)};
            GMat direct = op.symbol_at(xi);
            std::vector<GaussianRational> pt;
            for (const auto& r : xi) pt.emplace_back(r);
            GMat via_poly = sym.eval_exact(pt);
            CHECK(direct == via_poly);
        }
    }
}

TEST_CASE("complexified symbol at xi = 0 equals i^k A(nu)") {
    Direction nu(rvec({3, 4}));
    for (const auto& name : {"laplacian", "symmetric_gradient"}) {
        Operator op = catalog(name, {.n = 2});
        PolyMatrix c = symbol_matrix_complexified(op, nu);
        std::vector<GaussianRational> zero(2, GaussianRational(0));
        GMat at0 = c.eval_exact(zero);
        GMat anu = op.symbol_at(nu.components());
        GaussianRational ik(1);
        for (std::size_t t = 0; t < op.k(); ++t) ik *= GaussianRational::i();
        for (std::size_t i = 0; i < at0.rows(); ++i)
            for (std::size_t j = 0; j < at0.cols(); ++j)
                CHECK(at0(i, j) == anu(i, j) * ik);
    }
}

TEST_CASE("adjoint examples") {
    SUBCASE("gradient adjoint is negative divergence") {
        Operator adj = adjoint(catalog("gradient", {.n = 2}));
        CHECK(adj.dim_v() == 2);
        CHECK(adj.dim_w() == 1);
        for (const auto& [alpha, mat] : adj.terms()) {
            std::size_t axis = alpha[0] == 1 ? 0 : 1;
            CHECK(mat(0, axis) == Rational(-1));
        }
    }
    SUBCASE("adjoint is an involution on the catalog") {
        for (const auto& name : catalog_names()) {
            CatalogParams p;
            p.n = name == "directional_example" ? 3 : 2;
            Operator op = catalog(name, p);
            CHECK(adjoint(adjoint(op)) == op);
        }
    }
    SUBCASE("laplacian is self-adjoint") {
        Operator lap = catalog("laplacian", {.n = 2});
        CHECK(adjoint(lap) == lap);
    }
}

TEST_CASE("wedge power") {
    SUBCASE("wedge symbol of Cauchy-Riemann at (1,0) is det A(1,0) = 1") {
        Operator cr = catalog("cauchy_riemann");
        Operator w = wedge_power(cr, 2);
        CHECK(w.k() == 2);
        CHECK(w.dim_v() == 1);
        CHECK(w.dim_w() == 1);
        GMat s = w.symbol_at(rvec({1, 0}));
        // determinant oracle: det [[1, 0], [0, 1]] = 1
        CHECK(s(0, 0) == GaussianRational(1));
    }
    SUBCASE("full wedge equals the determinant at random rational frequencies") {
        Operator cr = catalog("cauchy_riemann");
        Operator w = wedge_power(cr, 2);
        std::mt19937_64 rng(23);
        std::uniform_int_distribution<int> coef(-5, 5);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<Rational> xi = {Rational(coef(rng), 2), Rational(coef(rng), 3)};
            GMat a = cr.symbol_at(xi);
            GaussianRational det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
            CHECK(w.symbol_at(xi)(0, 0) == det);
        }
    }
    SUBCASE("wedge symbol is multiplicative on decomposables") {
        Operator eps = catalog("symmetric_gradient", {.n = 2});
        Operator w = wedge_power(eps, 2);
        CHECK(w.k() == 2);
        CHECK(w.dim_v() == 1);
        CHECK(w.dim_w() == 3);
        std::mt19937_64 rng(31);
        std::uniform_int_distribution<int> coef(-3, 3);
        for (int trial = 0; trial < 8; ++trial) {
            std::vector<Rational> xi = {Rational(coef(rng)), Rational(1 + std::abs(coef(rng)))};
            GMat v(2, 2);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    v(i, j) = GaussianRational(Rational(coef(rng)));
            GMat a = eps.symbol_at(xi);
            // (A v1) wedge (A v2) computed by the coordinate oracle
            GMat av(a.rows(), 2);
            for (std::size_t c = 0; c < 2; ++c) {
                GVec col(2);
                for (std::size_t i = 0; i < 2; ++i) col[i] = v(i, c);
                GVec img = a.apply(col);
                for (std::size_t i = 0; i < a.rows(); ++i) av(i, c) = img[i];
            }
            GVec lhs = w.symbol_at(xi).apply(wedge_coords(v, 2));
            GVec rhs = wedge_coords(av, 2);
            REQUIRE(lhs.size() == rhs.size());
            for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == rhs[i]);
        }
    }
    SUBCASE("range checks") {
        CHECK_THROWS_AS(wedge_power(catalog("gradient", {.n = 2}), 2), std::invalid_argument);
        CHECK_THROWS_AS(wedge_power(catalog("cauchy_riemann"), 3), std::invalid_argument);
    }
}

TEST_CASE("plane slice") {
    SUBCASE("3D laplacian sliced by {e1,e2} is the 2D laplacian symbol") {
        Operator lap3 = catalog("laplacian", {.n = 3});
        Operator s = plane_slice(lap3, rvec({1, 0, 0}), rvec({0, 1, 0}));
        CHECK(s == catalog("laplacian", {.n = 2}));
    }
    SUBCASE("directional example sliced by {e1,e2} contains the CR block") {
        Operator d = catalog("directional_example", {.n = 3, .N = 3});
        Operator s = plane_slice(d, rvec({1, 0, 0}), rvec({0, 1, 0}));
        CHECK(s.n() == 2);
        // rows 0 and 1 are d1 u1 - d2 u2 and d1 u2 + d2 u1
        GMat a = s.symbol_at(rvec({1, 0}));
        CHECK(a(0, 0) == GaussianRational(1));
        CHECK(a(1, 1) == GaussianRational(1));
        GMat b = s.symbol_at(rvec({0, 1}));
        CHECK(b(0, 1) == GaussianRational(-1));
        CHECK(b(1, 0) == GaussianRational(1));
    }
    SUBCASE("slice by {e1, e1+e2} evaluated at (1,0) equals A(e1)") {
        Operator eps = catalog("symmetric_gradient", {.n = 2});
        Operator s = plane_slice(eps, rvec({1, 0}), rvec({1, 1}));
        CHECK(s.symbol_at(rvec({1, 0})) == eps.symbol_at(rvec({1, 0})));
    }
    SUBCASE("dependent directions rejected") {
        CHECK_THROWS_AS(plane_slice(catalog("laplacian", {.n = 2}), rvec({1, 1}), rvec({2, 2})),
                        std::invalid_argument);
    }
}

TEST_CASE("catalog conventions") {
    SUBCASE("symmetric gradient strain at xi=(1,0), v=(0,1)") {
        GMat a = catalog("symmetric_gradient", {.n = 2}).symbol_at(rvec({1, 0}));
        GVec v = {GaussianRational(0), GaussianRational(1)};
        GVec strain = a.apply(v);
        // rows (11, 12, 22): sym part of e1 (x) e2 is offdiagonal 1/2
        CHECK(strain[0] == GaussianRational(0));
        CHECK(strain[1] == GaussianRational(Rational(1, 2)));
        CHECK(strain[2] == GaussianRational(0));
    }
    SUBCASE("deviatoric symmetric gradient at xi=(1,0), v=(1,0)") {
        // hand oracle: eps = diag(1,0), subtract tr/2 * Id -> diag(1/2,-1/2)
        GMat a = catalog("dev_symmetric_gradient", {.n = 2}).symbol_at(rvec({1, 0}));
        GVec v = {GaussianRational(1), GaussianRational(0)};
        GVec d = a.apply(v);
        CHECK(d[0] == GaussianRational(Rational(1, 2)));
        CHECK(d[1] == GaussianRational(0));
        CHECK(d[2] == GaussianRational(Rational(-1, 2)));
    }
    SUBCASE("directional example block structure") {
        Operator d = catalog("directional_example", {.n = 3, .N = 3});
        CHECK(d.dim_v() == 3);
        CHECK(d.dim_w() == ((3 - 1) * 3 - 1) * 2);
        // first two flattened rows: d1 u1 - d2 u2 | d1 u2 + d2 u1
        GMat a1 = d.symbol_at(rvec({1, 0, 0}));
        GMat a2 = d.symbol_at(rvec({0, 1, 0}));
        CHECK(a1(0, 0) == GaussianRational(1));
        CHECK(a2(0, 1) == GaussianRational(-1));
        CHECK(a1(1, 1) == GaussianRational(1));
        CHECK(a2(1, 0) == GaussianRational(1));
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(catalog("unknown_name"), std::invalid_argument);
        CHECK_THROWS_AS(catalog("directional_example", {.n = 2, .N = 3}), std::invalid_argument);
        CHECK_THROWS_AS(catalog("dev_symmetric_gradient", {.n = 1}), std::invalid_argument);
    }
    SUBCASE("every catalog term key has |alpha| = k") {
        for (const auto& name : catalog_names()) {
            CatalogParams p;
            p.n = name == "directional_example" ? 3 : 2;
            p.k = 3;
            Operator op = catalog(name, p);
            for (const auto& [alpha, mat] : op.terms())
                CHECK(multi_index_order(alpha) == op.k());
        }
    }
}

TEST_CASE("resultant operator P") {
    // scalar operator A = (d1^2, d2^2, d1 d2) on R^2
    std::map<MultiIndex, RatMat> terms;
    RatMat m1(3, 1), m2(3, 1), m3(3, 1);
    m1(0, 0) = Rational(1);
    m2(1, 0) = Rational(1);
    m3(2, 0) = Rational(1);
    terms.emplace(MultiIndex{2, 0}, m1);
    terms.emplace(MultiIndex{0, 2}, m2);
    terms.emplace(MultiIndex{1, 1}, m3);
    Operator op(2, 2, 1, 3, terms);

    std::vector<std::vector<Rational>> frame = {rvec({1, 0}), rvec({0, 1})}; // nu = e2

    SUBCASE("generic w gives a nonzero polynomial of homogeneity degree k^2 = 4") {
        // oracle: p = xi2^2 has double root 0, so Res = q(0)^2 = (w1 xi1^2)^2
        MultiPoly r = resultant_P(op, frame, rvec({3, 5, 7}));
        CHECK_FALSE(r.is_zero());
        CHECK(r.homogeneity_degree() == 4);
        MultiPoly oracle = MultiPoly::monomial(1, {4}, GaussianRational(9));
        CHECK(r == oracle);
    }
    SUBCASE("w = w0 gives the zero resultant") {
        CHECK(resultant_P(op, frame, rvec({0, 1, 0})).is_zero());
    }
    SUBCASE("A(nu) = 0 is an error") {
        std::map<MultiIndex, RatMat> t2;
        RatMat mm(1, 1);
        mm(0, 0) = Rational(1);
        t2.emplace(MultiIndex{2, 0}, mm);
        Operator d11(2, 2, 1, 1, t2); // A = d1^2, A(e2) = 0
        CHECK_THROWS_AS(resultant_P(d11, frame, rvec({1})), std::domain_error);
    }
}

TEST_CASE("resultant P vanishes exactly on the shared-root locus") {
    // A = (d3^2 - d1^2, d2^2) on R^3, nu = e3: p = w0.A = xi3^2 - xi1^2 with
    // roots +-xi1. With w = (1,1): q = xi3^2 - xi1^2 + xi2^2, and the root is
    // shared exactly where xi2 = 0. Oracle: Res = q(xi1) * q(-xi1) = xi2^4.
    std::map<MultiIndex, RatMat> terms;
    RatMat a(2, 1), b(2, 1), c(2, 1);
    a(0, 0) = Rational(1);
    b(0, 0) = Rational(-1);
    c(1, 0) = Rational(1);
    terms.emplace(MultiIndex{0, 0, 2}, a);
    terms.emplace(MultiIndex{2, 0, 0}, b);
    terms.emplace(MultiIndex{0, 2, 0}, c);
    Operator op(3, 2, 1, 2, terms);
    std::vector<std::vector<Rational>> frame = {rvec({1, 0, 0}), rvec({0, 1, 0}),
                                                rvec({0, 0, 1})};
    MultiPoly r = resultant_P(op, frame, rvec({1, 1}));
    MultiPoly oracle = MultiPoly::monomial(2, {0, 4}, GaussianRational(1));
    CHECK(r == oracle);
    // vanishes at the shared-root frequency (1, 0), not at (0, 1)
    CHECK(eval_at_rational(r, {Rational(1), Rational(0)}).is_zero());
    CHECK_FALSE(eval_at_rational(r, {Rational(0), Rational(1)}).is_zero());
}
