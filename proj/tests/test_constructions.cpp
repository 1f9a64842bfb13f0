#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ellip/constructions.hpp"
#include "ellip/grid.hpp"

using namespace ellip;

namespace {

double bump1(double t, double width) {
    double s = t / width;
    return std::abs(s) < 1 ? std::exp(-1.0 / (1 - s * s)) : 0.0;
}

GridField boundary_bump(double width, double h = 1.0 / 64) {
    return sample_field(
        [width](const std::vector<double>& x, std::vector<Cplx>& out) {
            out[0] = bump1(x[0], width);
        },
        {{-2, 2}}, h, 1);
}

double trace_error(const GridField& u, unsigned j, const GridField& expect) {
    GridField tr = normal_trace_fd(u, j);
    double worst = 0;
    for (std::size_t i = 0; i < tr.point_count(); ++i)
        worst = std::max(worst, std::abs(tr.raw()[i] - expect.raw()[i]));
    return worst;
}

} // namespace

TEST_CASE("vandermonde_coefficients") {
    SUBCASE("k = 1") {
        auto mu = vandermonde_coefficients({Rational(1)});
        CHECK(mu[0][0] == Rational(1));
    }
    SUBCASE("k = 2, lambda = (1,2): hand inverse of [[1,1],[1,2]]") {
        auto mu = vandermonde_coefficients({Rational(1), Rational(2)});
        CHECK(mu[0][0] == Rational(2));
        CHECK(mu[1][0] == Rational(-1));
        CHECK(mu[0][1] == Rational(-1));
        CHECK(mu[1][1] == Rational(1));
    }
    SUBCASE("k = 3: defining system holds exactly") {
        std::vector<Rational> l = {Rational(1), Rational(2), Rational(3)};
        auto mu = vandermonde_coefficients(l);
        for (int j = 0; j < 3; ++j)
            for (int ell = 0; ell < 3; ++ell) {
                Rational acc(0);
                for (int i = 0; i < 3; ++i) {
                    Rational p(1);
                    for (int t = 0; t < ell; ++t) p *= l[i];
                    acc += mu[i][j] * p;
                }
                CHECK(acc == Rational(j == ell ? 1 : 0));
            }
    }
    CHECK_THROWS_AS(vandermonde_coefficients({Rational(2), Rational(2)}), std::invalid_argument);
    CHECK_THROWS_AS(vandermonde_coefficients({Rational(-1)}), std::invalid_argument);
}

TEST_CASE("theta cutoff shape") {
    CHECK(theta_cutoff(0.0, 4, 5) == 1.0);
    CHECK(theta_cutoff(1.0, 4, 5) == 0.0);
    CHECK(theta_cutoff(-1.2, 4, 5) == 0.0);
    // flat derivatives at zero: finite differences of orders 1..3 vanish fast
    double h = 1e-3;
    double d1 = (theta_cutoff(h, 4, 5) - theta_cutoff(-h, 4, 5)) / (2 * h);
    CHECK(std::abs(d1) < 1e-6);
}

TEST_CASE("layer_extension_top") {
    GridField g = boundary_bump(1.0);
    SUBCASE("k = 1 attains the boundary value exactly at the face") {
        auto ext = layer_extension_top(g, 1, 0.5);
        for (std::size_t i = 0; i < g.counts()[0]; ++i) {
            std::vector<double> xt = {g.box()[0][0] + g.h() * i};
            CHECK(std::abs(ext->eval(xt, 0.0, 0) - g.at({i}, 0)) < 1e-14);
        }
    }
    SUBCASE("k = 2, g = 1: discrete normal derivative converges at O(h)") {
        double errors[2];
        int t = 0;
        for (double h : {1.0 / 32, 1.0 / 64}) {
            GridField one = sample_field(
                [](const std::vector<double>&, std::vector<Cplx>& out) { out[0] = 1.0; },
                {{-1, 1}}, h, 1);
            auto ext = layer_extension_top(one, 2, 0.5);
            GridField u = render_extension(*ext, one, 0.5);
            GridField tr = normal_trace_fd(u, 1);
            double worst = 0;
            for (std::size_t i = 0; i < tr.point_count(); ++i)
                worst = std::max(worst, std::abs(tr.raw()[i] - Cplx(1, 0)));
            errors[t++] = worst;
        }
        CHECK(errors[1] < errors[0]);
        CHECK(errors[0] / errors[1] > 1.5); // roughly first order
    }
    SUBCASE("lower normal derivatives vanish at the face (discretely to O(h))") {
        auto ext = layer_extension_top(g, 3, 0.5);
        GridField u = render_extension(*ext, g, 0.5);
        GridField zero(g.box(), g.h(), 1);
        CHECK(trace_error(u, 0, zero) < 1e-12); // the x_n^2 factor is exact at 0
        CHECK(trace_error(u, 1, zero) < 0.25 * g.h());
    }
    CHECK_THROWS_AS(layer_extension_top(g, 2, -1.0), std::invalid_argument);
}

TEST_CASE("layer_extension_besov") {
    GridField g = boundary_bump(1.0);
    SUBCASE("j = 0 is the identity at the face") {
        auto ext = layer_extension_besov(g, 0, 2);
        for (std::size_t i = 0; i < g.counts()[0]; ++i) {
            std::vector<double> xt = {g.box()[0][0] + g.h() * i};
            CHECK(std::abs(ext->eval(xt, 0.0, 0) - g.at({i}, 0)) < 1e-14);
        }
    }
    SUBCASE("j = 1, k = 3: first normal trace reproduces g at O(h)") {
        double errors[2];
        int t = 0;
        for (double h : {1.0 / 32, 1.0 / 64}) {
            GridField gb = boundary_bump(1.0, h);
            auto ext = layer_extension_besov(gb, 1, 3);
            GridField u = render_extension(*ext, gb, 0.5);
            errors[t++] = trace_error(u, 1, gb);
        }
        CHECK(errors[1] < errors[0]);
        CHECK(errors[0] / errors[1] > 1.5);
    }
    SUBCASE("traces below j vanish") {
        auto ext = layer_extension_besov(g, 1, 3);
        GridField u = render_extension(*ext, g, 0.5);
        GridField zero(g.box(), g.h(), 1);
        CHECK(trace_error(u, 0, zero) < 1e-12);
    }
    CHECK_THROWS_AS(layer_extension_besov(g, 2, 3), std::invalid_argument);
}

TEST_CASE("superpose_extension") {
    SUBCASE("k = 1 reduces to the top layer") {
        GridField g = boundary_bump(1.0);
        ExtensionRecipe r = ExtensionRecipe::make(1);
        auto sup = superpose_extension({g}, r);
        auto top = layer_extension_top(g, 1, r.epsilon);
        std::vector<double> xt = {0.25};
        for (double xn : {0.0, 0.1, 0.3})
            CHECK(std::abs(sup->eval(xt, xn, 0) - top->eval(xt, xn, 0)) < 1e-12);
    }
    SUBCASE("k = 2: both traces reproduced, error halves under refinement") {
        double e0[2], e1[2];
        int t = 0;
        for (double h : {1.0 / 32, 1.0 / 64}) {
            GridField g0 = boundary_bump(1.0, h);
            GridField g1(g0.box(), h, 1); // zero
            ExtensionRecipe r = ExtensionRecipe::make(2);
            auto sup = superpose_extension({g0, g1}, r);
            GridField u = render_extension(*sup, g0, 1.0);
            e0[t] = trace_error(u, 0, g0);
            e1[t] = trace_error(u, 1, g1);
            ++t;
        }
        CHECK(e0[0] < 1e-10); // trace 0 is matched by construction at the face
        CHECK(e1[1] < e1[0]);
        CHECK(e1[0] / e1[1] > 1.5);
    }
    SUBCASE("zero data extends to the zero field") {
        GridField z({{-2.0, 2.0}}, 1.0 / 32, 1);
        ExtensionRecipe r = ExtensionRecipe::make(3);
        auto sup = superpose_extension({z, z, z}, r);
        GridField u = render_extension(*sup, z, 0.5);
        for (const auto& v : u.raw()) CHECK(std::abs(v) < 1e-14);
    }
    SUBCASE("linearity on the lattice") {
        GridField a = boundary_bump(1.0, 1.0 / 32);
        GridField b = boundary_bump(0.7, 1.0 / 32);
        GridField ab = a;
        for (std::size_t i = 0; i < ab.raw().size(); ++i) ab.raw()[i] += b.raw()[i];
        ExtensionRecipe r = ExtensionRecipe::make(2);
        GridField z(a.box(), a.h(), 1);
        GridField ua = render_extension(*superpose_extension({a, z}, r), a, 0.5);
        GridField ub = render_extension(*superpose_extension({b, z}, r), a, 0.5);
        GridField uab = render_extension(*superpose_extension({ab, z}, r), a, 0.5);
        for (std::size_t i = 0; i < ua.raw().size(); ++i)
            CHECK(std::abs(uab.raw()[i] - ua.raw()[i] - ub.raw()[i]) < 1e-10);
    }
}

TEST_CASE("kernel profile and sobolev kernel") {
    KernelProfile prof = KernelProfile::make(2);
    SUBCASE("normalization verified by an independent quadrature") {
        // trapezoid re-quadrature of the circle average at fixed resolution
        std::size_t m = 1 << 18;
        double acc = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double a = 2 * M_PI * (static_cast<double>(i) + 0.5) / m;
            acc += prof.phi(std::sin(a));
        }
        acc *= 2 * M_PI / m;
        CHECK(std::abs(acc - 1.0) <= 1e-8);
    }
    SUBCASE("vanishes outside the cone and on the lower halfplane") {
        CHECK(sobolev_kernel(2, 1, prof, {0.5, -0.2}, {0}) == 0.0);
        CHECK(sobolev_kernel(2, 1, prof, {1.0, 0.4}, {0}) == 0.0); // y_n < |y|/2
        CHECK(sobolev_kernel(2, 1, prof, {0.1, 0.9}, {0}) != 0.0);
    }
    SUBCASE("homogeneity of degree k - n at 100 random points") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1, 1);
        for (std::size_t k : {std::size_t(1), std::size_t(2)}) {
            KernelProfile p2 = KernelProfile::make(2);
            int found = 0;
            while (found < 100) {
                std::vector<double> y = {u(rng), std::abs(u(rng)) + 0.05};
                std::vector<std::size_t> slots(k, rng() % 2);
                double v = sobolev_kernel(2, k, p2, y, slots);
                if (v == 0.0) continue;
                ++found;
                std::vector<double> y2 = {2 * y[0], 2 * y[1]};
                double v2 = sobolev_kernel(2, k, p2, y2, slots);
                double expect = std::pow(2.0, static_cast<double>(k) - 2.0) * v;
                CHECK(std::abs(v2 - expect) <= 1e-12 * std::abs(expect));
            }
        }
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(sobolev_kernel(2, 1, prof, {0.0, 0.0}, {0}), std::invalid_argument);
        CHECK_THROWS_AS(sobolev_kernel(2, 1, prof, {0.1, 0.9}, {0, 1}), std::invalid_argument);
    }
}

TEST_CASE("quadrature utilities") {
    SUBCASE("gauss nodes integrate high-degree polynomials") {
        std::vector<double> x, w;
        gauss_legendre(16, x, w);
        double acc = 0;
        for (std::size_t i = 0; i < 16; ++i) acc += w[i] * std::pow(x[i], 10);
        CHECK(acc == doctest::Approx(2.0 / 11).epsilon(1e-12));
    }
    SUBCASE("adaptive simpson on a smooth integrand") {
        double v = adaptive_simpson([](double t) { return std::sin(t); }, 0, M_PI, 1e-12);
        CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
    }
    SUBCASE("sphere average of a constant is the sphere measure") {
        double s1 = sphere_average(2, [](double) { return 1.0; });
        CHECK(s1 == doctest::Approx(2 * M_PI).epsilon(1e-9));
        double s2 = sphere_average(3, [](double) { return 1.0; });
        CHECK(s2 == doctest::Approx(4 * M_PI).epsilon(1e-9));
    }
}
