#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "ellip/catalog.hpp"
#include "ellip/grid.hpp"

using namespace ellip;

namespace {

FieldEvaluator scalar(const std::function<double(const std::vector<double>&)>& f) {
    return [f](const std::vector<double>& x, std::vector<Cplx>& out) { out[0] = f(x); };
}

double bump1(double t, double width) {
    double s = t / width;
    return std::abs(s) < 1 ? std::exp(-1.0 / (1 - s * s)) : 0.0;
}

} // namespace

TEST_CASE("sample_field basics") {
    std::vector<std::array<double, 2>> box = {{0, 1}, {0, 1}};
    SUBCASE("zero field") {
        GridField u = sample_field(scalar([](const std::vector<double>&) { return 0.0; }),
                                   box, 0.5, 1);
        for (const auto& v : u.raw()) CHECK(v == Cplx(0, 0));
    }
    SUBCASE("coordinate function replicates along the other axis") {
        GridField u = sample_field(scalar([](const std::vector<double>& x) { return x[0]; }),
                                   box, 0.5, 1);
        REQUIRE(u.counts() == std::vector<std::size_t>{3, 3});
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(u.at({i, j}, 0).real() == doctest::Approx(0.5 * i));
    }
    SUBCASE("bump peak lands on the nearest lattice point") {
        GridField u = sample_field(
            scalar([](const std::vector<double>& x) {
                return bump1(x[0] - 0.5, 0.4) * bump1(x[1] - 0.5, 0.4);
            }),
            box, 0.25, 1);
        double peak = 0;
        std::size_t arg = 0;
        for (std::size_t f = 0; f < u.point_count(); ++f)
            if (std::abs(u.raw()[f]) > peak) {
                peak = std::abs(u.raw()[f]);
                arg = f;
            }
        CHECK(arg == u.flat_index({2, 2}));
    }
    CHECK_THROWS_AS(GridField(box, -0.1, 1), std::invalid_argument);
}

TEST_CASE("apply_operator_fd exactness") {
    std::vector<std::array<double, 2>> box = {{-1, 1}, {-1, 1}};
    SUBCASE("gradient of x1 is e1 exactly") {
        GridField u = sample_field(scalar([](const std::vector<double>& x) { return x[0]; }),
                                   box, 0.125, 1);
        GridField g = apply_operator_fd(catalog("gradient", {.n = 2}), u);
        for (std::size_t i = 1; i + 1 < 17; ++i)
            for (std::size_t j = 1; j + 1 < 17; ++j) {
                CHECK(g.at({i, j}, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(std::abs(g.at({i, j}, 1)) < 1e-12);
            }
    }
    SUBCASE("laplacian of |x|^2 is 4 exactly in the interior") {
        GridField u = sample_field(
            scalar([](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; }),
            box, 0.125, 1);
        GridField g = apply_operator_fd(catalog("laplacian", {.n = 2}), u);
        for (std::size_t i = g.valid_lo[0]; i + g.valid_hi[0] < 17; ++i)
            for (std::size_t j = g.valid_lo[1]; j + g.valid_hi[1] < 17; ++j)
                CHECK(g.at({i, j}, 0).real() == doctest::Approx(4.0).epsilon(1e-11));
    }
    SUBCASE("exact on total degree <= k+1 polynomials (central interior)") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> coef(-2, 2);
        // k = 2 scalar operator d1^2 + d1 d2
        std::map<MultiIndex, RatMat> terms;
        RatMat m1(1, 1), m2(1, 1);
        m1(0, 0) = Rational(1);
        m2(0, 0) = Rational(1);
        terms.emplace(MultiIndex{2, 0}, m1);
        terms.emplace(MultiIndex{1, 1}, m2);
        Operator op(2, 2, 1, 1, terms);
        for (int trial = 0; trial < 5; ++trial) {
            double c30 = coef(rng), c21 = coef(rng), c12 = coef(rng), c03 = coef(rng);
            double c20 = coef(rng), c11 = coef(rng);
            auto poly = [&](const std::vector<double>& x) {
                return c30 * x[0] * x[0] * x[0] + c21 * x[0] * x[0] * x[1] +
                       c12 * x[0] * x[1] * x[1] + c03 * x[1] * x[1] * x[1] +
                       c20 * x[0] * x[0] + c11 * x[0] * x[1];
            };
            auto exact = [&](const std::vector<double>& x) {
                // d1^2 p + d1 d2 p
                return 6 * c30 * x[0] + 2 * c21 * x[1] + 2 * c20 +
                       (2 * c21 * x[0] + 2 * c12 * x[1] + c11);
            };
            GridField u = sample_field(scalar(poly), box, 0.25, 1);
            GridField g = apply_operator_fd(op, u, FdScheme::Central);
            for (std::size_t i = g.valid_lo[0]; i + g.valid_hi[0] < g.counts()[0]; ++i)
                for (std::size_t j = g.valid_lo[1]; j + g.valid_hi[1] < g.counts()[1]; ++j) {
                    std::vector<double> x = g.point({i, j});
                    CHECK(std::abs(g.at({i, j}, 0).real() - exact(x)) < 1e-10);
                }
        }
    }
    SUBCASE("grid too small for the stencil") {
        GridField u(std::vector<std::array<double, 2>>{{0, 0.1}, {0, 0.1}}, 0.1, 1);
        CHECK_THROWS_AS(apply_operator_fd(catalog("laplacian", {.n = 2}), u),
                        std::invalid_argument);
    }
}

TEST_CASE("lp_norm") {
    std::vector<std::array<double, 2>> box = {{0, 1}, {0, 1}};
    SUBCASE("unit field on the unit box") {
        double h = 1.0 / 64;
        GridField u = sample_field(scalar([](const std::vector<double>&) { return 1.0; }),
                                   box, h, 1);
        CHECK(lp_norm(u, 1.0) == doctest::Approx(1.0).epsilon(0.05));
        CHECK(lp_norm(u, std::numeric_limits<double>::infinity()) == doctest::Approx(1.0));
    }
    SUBCASE("zero field") {
        GridField u(box, 0.25, 1);
        CHECK(lp_norm(u, 1.0) == 0.0);
    }
    SUBCASE("bump against a refined-grid oracle") {
        auto f = scalar([](const std::vector<double>& x) {
            return bump1(x[0] - 0.5, 0.45) * bump1(x[1] - 0.5, 0.45);
        });
        double coarse = lp_norm(sample_field(f, box, 1.0 / 32, 1), 1.0);
        double fine = lp_norm(sample_field(f, box, 1.0 / 256, 1), 1.0);
        CHECK(std::abs(coarse - fine) <= 0.01 * fine);
    }
}

TEST_CASE("finite_difference_delta") {
    std::vector<std::array<double, 2>> box1 = {{-1, 1}};
    double h = 1.0 / 16;
    SUBCASE("first difference shifts and subtracts") {
        GridField u = sample_field(scalar([](const std::vector<double>& x) { return x[0] * x[0]; }),
                                   box1, h, 1);
        GridField d = finite_difference_delta(u, {h}, 1);
        // interior check: u(x+h) - u(x)
        for (std::size_t i = 0; i + 1 < u.counts()[0]; ++i) {
            double x = -1 + h * i;
            CHECK(d.at({i}, 0).real() ==
                  doctest::Approx((x + h) * (x + h) - x * x).epsilon(1e-12));
        }
    }
    SUBCASE("second difference annihilates affine functions") {
        GridField u = sample_field(
            scalar([](const std::vector<double>& x) { return 3 * x[0] - 2; }), box1, h, 1);
        GridField d = finite_difference_delta(u, {2 * h}, 2);
        for (std::size_t i = 0; i + 4 < u.counts()[0]; ++i)
            CHECK(std::abs(d.at({i}, 0)) < 1e-12);
    }
    SUBCASE("constants vanish for every order (binomial identity)") {
        GridField u = sample_field(scalar([](const std::vector<double>&) { return 7.0; }),
                                   box1, h, 1);
        for (unsigned k = 1; k <= 4; ++k) {
            GridField d = finite_difference_delta(u, {h}, k);
            for (std::size_t i = 0; i + k < u.counts()[0]; ++i)
                CHECK(std::abs(d.at({i}, 0)) < 1e-12);
        }
    }
    SUBCASE("non-lattice offsets are rejected") {
        GridField u(box1, h, 1);
        CHECK_THROWS_AS(finite_difference_delta(u, {1.37 * h}, 1), std::invalid_argument);
    }
}

TEST_CASE("besov_seminorm") {
    SUBCASE("zero field") {
        GridField u(std::vector<std::array<double, 2>>{{-1, 1}}, 0.125, 1);
        CHECK(besov_seminorm(u, 0.5, 1).value == 0.0);
    }
    SUBCASE("scaling law within 5 percent") {
        // |u(lambda .)|_{B^s} = lambda^{s-m} |u|_{B^s}; the dilated field is
        // sampled on the correspondingly scaled box (same spacing)
        double h = 1.0 / 256;
        for (double s : {0.5, 1.0, 1.5}) {
            GridField u = sample_field(
                scalar([](const std::vector<double>& x) { return bump1(x[0], 0.9); }),
                {{-2, 2}}, h, 1);
            GridField u2 = sample_field(
                scalar([](const std::vector<double>& x) { return bump1(2 * x[0], 0.9); }),
                {{-1, 1}}, h, 1);
            double b = besov_seminorm(u, s, 2).value;
            double b2 = besov_seminorm(u2, s, 2).value;
            CHECK(b2 / b == doctest::Approx(std::pow(2.0, s - 1.0)).epsilon(0.05));
        }
    }
    SUBCASE("bump value against a Richardson-extrapolated oracle") {
        // the lattice truncation of the |h|^{-(1+s)} weight converges at the
        // fractional rate h^{1-s}; extrapolate with the measured order
        auto f = scalar([](const std::vector<double>& x) { return bump1(x[0], 0.8); });
        double v1 = besov_seminorm(sample_field(f, {{-1.5, 1.5}}, 1.0 / 64, 1), 0.5, 1).value;
        double v2 = besov_seminorm(sample_field(f, {{-1.5, 1.5}}, 1.0 / 128, 1), 0.5, 1).value;
        double v4 = besov_seminorm(sample_field(f, {{-1.5, 1.5}}, 1.0 / 256, 1), 0.5, 1).value;
        double rate = std::log2(std::abs(v1 - v2) / std::abs(v2 - v4));
        CHECK(rate > 0.4); // converging under refinement
        double oracle = v4 + (v4 - v2) / (std::pow(2.0, rate) - 1.0);
        CHECK(std::abs(v2 - oracle) <= 0.02 * std::abs(oracle));
    }
    SUBCASE("order must exceed smoothness") {
        GridField u(std::vector<std::array<double, 2>>{{-1, 1}}, 0.125, 1);
        CHECK_THROWS_AS(besov_seminorm(u, 1.5, 1), std::invalid_argument);
    }
}

TEST_CASE("field file round-trip") {
    std::vector<std::array<double, 2>> box = {{-1, 1}, {0, 1}};
    GridField u = sample_field(
        [](const std::vector<double>& x, std::vector<Cplx>& out) {
            out[0] = Cplx(x[0], x[1]);
            out[1] = Cplx(std::sin(x[0]), 0);
        },
        box, 0.25, 2, 1);
    std::string path = "/tmp/ellip_test_field.efld";
    write_field(u, path, 1);
    GridField v = read_field(path);
    REQUIRE(v.raw().size() == u.raw().size());
    CHECK(v.dim() == 2);
    CHECK(v.boundary_axis() == std::optional<std::size_t>(1));
    for (std::size_t i = 0; i < u.raw().size(); ++i)
        CHECK(std::abs(u.raw()[i] - v.raw()[i]) < 1e-15);
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("fd_weights") {
    std::vector<double> w = fd_weights({-1, 0, 1}, 1);
    CHECK(w[0] == doctest::Approx(-0.5));
    CHECK(w[1] == doctest::Approx(0.0));
    CHECK(w[2] == doctest::Approx(0.5));
    std::vector<double> w2 = fd_weights({-1, 0, 1}, 2);
    CHECK(w2[0] == doctest::Approx(1.0));
    CHECK(w2[1] == doctest::Approx(-2.0));
    CHECK(w2[2] == doctest::Approx(1.0));
    std::vector<double> wf = fd_weights({0, 1}, 1);
    CHECK(wf[0] == doctest::Approx(-1.0));
    CHECK(wf[1] == doctest::Approx(1.0));
}
