#include "ellip/catalog.hpp"

#include <stdexcept>

namespace ellip {

namespace {

MultiIndex unit_alpha(std::size_t n, std::size_t j, unsigned power = 1) {
    MultiIndex a(n, 0);
    a[j] = power;
    return a;
}

Operator make_gradient(std::size_t n) {
    std::map<MultiIndex, RatMat> terms;
    for (std::size_t j = 0; j < n; ++j) {
        RatMat m(n, 1);
        m(j, 0) = Rational(1);
        terms.emplace(unit_alpha(n, j), std::move(m));
    }
    return Operator(n, 1, 1, n, std::move(terms), "gradient");
}

Operator make_kth_gradient(std::size_t n, std::size_t k) {
    auto alphas = multi_indices_of_order(n, static_cast<unsigned>(k));
    std::map<MultiIndex, RatMat> terms;
    for (std::size_t r = 0; r < alphas.size(); ++r) {
        RatMat m(alphas.size(), 1);
        m(r, 0) = Rational(1);
        terms.emplace(alphas[r], std::move(m));
    }
    return Operator(n, k, 1, alphas.size(), std::move(terms), "kth_gradient");
}

Operator make_divergence(std::size_t n) {
    std::map<MultiIndex, RatMat> terms;
    for (std::size_t j = 0; j < n; ++j) {
        RatMat m(1, n);
        m(0, j) = Rational(1);
        terms.emplace(unit_alpha(n, j), std::move(m));
    }
    return Operator(n, 1, n, 1, std::move(terms), "divergence");
}

Operator make_laplacian(std::size_t n) {
    std::map<MultiIndex, RatMat> terms;
    for (std::size_t j = 0; j < n; ++j) {
        RatMat m(1, 1);
        m(0, 0) = Rational(1);
        terms.emplace(unit_alpha(n, j, 2), std::move(m));
    }
    return Operator(n, 2, 1, 1, std::move(terms), "laplacian");
}

Operator make_cauchy_riemann() {
    // w1 = d1 u1 - d2 u2,  w2 = d2 u1 + d1 u2
    RatMat a1(2, 2), a2(2, 2);
    a1(0, 0) = Rational(1);
    a1(1, 1) = Rational(1);
    a2(0, 1) = Rational(-1);
    a2(1, 0) = Rational(1);
    std::map<MultiIndex, RatMat> terms;
    terms.emplace(unit_alpha(2, 0), std::move(a1));
    terms.emplace(unit_alpha(2, 1), std::move(a2));
    return Operator(2, 1, 2, 2, std::move(terms), "cauchy_riemann");
}

// rows over pairs i <= j in lexicographic order
std::size_t sym_row(std::size_t n, std::size_t i, std::size_t j) {
    // i <= j assumed
    std::size_t r = 0;
    for (std::size_t a = 0; a < i; ++a) r += n - a;
    return r + (j - i);
}

Operator make_symmetric_gradient(std::size_t n, bool deviatoric) {
    if (n < 2) throw std::invalid_argument("catalog: symmetric gradient needs n >= 2");
    std::size_t rows = n * (n + 1) / 2;
    std::map<MultiIndex, RatMat> terms;
    for (std::size_t l = 0; l < n; ++l) terms.emplace(unit_alpha(n, l), RatMat(rows, n));
    // eps(u)_{ij} = (d_i u_j + d_j u_i) / 2
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            std::size_t r = sym_row(n, i, j);
            auto& mi = terms.at(unit_alpha(n, i));
            mi(r, j) += Rational(1, 2);
            auto& mj = terms.at(unit_alpha(n, j));
            mj(r, i) += Rational(1, 2);
        }
    }
    if (deviatoric) {
        // subtract div(u)/n on the diagonal rows
        Rational inv_n(1, static_cast<long long>(n));
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = sym_row(n, i, i);
            for (std::size_t l = 0; l < n; ++l)
                terms.at(unit_alpha(n, l))(r, l) -= inv_n;
        }
    }
    return Operator(n, 1, n, rows, std::move(terms),
                    deviatoric ? "dev_symmetric_gradient" : "symmetric_gradient");
}

Operator make_directional_example(std::size_t n, std::size_t N) {
    if (n < 3 || N < 3)
        throw std::invalid_argument("catalog: directional_example needs n >= 3 and N >= 3");
    std::size_t pair_rows = (N - 1) * n - 1; // two columns per row, flattened row-wise
    std::size_t dim_w = pair_rows * 2;
    std::map<MultiIndex, RatMat> terms;
    for (std::size_t l = 0; l < n; ++l) terms.emplace(unit_alpha(n, l), RatMat(dim_w, N));
    auto at = [&](std::size_t l) -> RatMat& { return terms.at(unit_alpha(n, l)); };
    // row 0: [ d1 u1 - d2 u2 | d1 u2 + d2 u1 ]
    at(0)(0, 0) = Rational(1);
    at(1)(0, 1) = Rational(-1);
    at(0)(1, 1) = Rational(1);
    at(1)(1, 0) = Rational(1);
    // rows 1..n-2: [ d_{j} u1 | d_{j} u2 ] for j = 3..n
    for (std::size_t j = 2; j < n; ++j) {
        std::size_t r = j - 1;
        at(j)(2 * r, 0) = Rational(1);
        at(j)(2 * r + 1, 1) = Rational(1);
    }
    // rows for u_3..u_N: [ grad u_m | 0 ], explicit zero column kept
    std::size_t r = n - 1;
    for (std::size_t m = 2; m < N; ++m)
        for (std::size_t l = 0; l < n; ++l, ++r)
            at(l)(2 * r, m) = Rational(1);
    return Operator(n, 1, N, dim_w, std::move(terms), "directional_example");
}

} // namespace

std::vector<std::string> catalog_names() {
    return {"gradient", "kth_gradient", "divergence", "laplacian", "cauchy_riemann",
            "symmetric_gradient", "dev_symmetric_gradient", "directional_example"};
}

std::string catalog_schema(const std::string& name) {
    if (name == "gradient") return "gradient --n INT>=1";
    if (name == "kth_gradient") return "kth_gradient --n INT>=1 --k INT>=1";
    if (name == "divergence") return "divergence --n INT>=1";
    if (name == "laplacian") return "laplacian --n INT>=1";
    if (name == "cauchy_riemann") return "cauchy_riemann (n=2 fixed)";
    if (name == "symmetric_gradient") return "symmetric_gradient --n INT>=2";
    if (name == "dev_symmetric_gradient") return "dev_symmetric_gradient --n INT>=2";
    if (name == "directional_example") return "directional_example --n INT>=3 --N INT>=3";
    throw std::invalid_argument("catalog: unknown name " + name);
}

Operator catalog(const std::string& name, const CatalogParams& params) {
    if (name == "gradient") return make_gradient(params.n);
    if (name == "kth_gradient") return make_kth_gradient(params.n, params.k);
    if (name == "divergence") return make_divergence(params.n);
    if (name == "laplacian") return make_laplacian(params.n);
    if (name == "cauchy_riemann") {
        if (params.n != 2)
            throw std::invalid_argument("catalog: cauchy_riemann is defined for n = 2");
        return make_cauchy_riemann();
    }
    if (name == "symmetric_gradient") return make_symmetric_gradient(params.n, false);
    if (name == "dev_symmetric_gradient") return make_symmetric_gradient(params.n, true);
    if (name == "directional_example") return make_directional_example(params.n, params.N);
    throw std::invalid_argument("catalog: unknown name " + name);
}

} // namespace ellip
