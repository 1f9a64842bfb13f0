#include "ellip/constructions.hpp"

#include <cmath>
#include <stdexcept>

#include "ellip/linalg.hpp"

namespace ellip {

std::vector<std::vector<Rational>> vandermonde_coefficients(const std::vector<Rational>& lambdas) {
    std::size_t k = lambdas.size();
    if (k == 0) throw std::invalid_argument("vandermonde_coefficients: empty lambda list");
    for (std::size_t i = 0; i < k; ++i) {
        if (lambdas[i].sign() <= 0)
            throw std::invalid_argument("vandermonde_coefficients: lambdas must be positive");
        for (std::size_t j = i + 1; j < k; ++j)
            if (lambdas[i] == lambdas[j])
                throw std::invalid_argument("vandermonde_coefficients: repeated lambda (singular system)");
    }
    // M[l][i] = lambda_i^l; mu = M^{-1} solved column by column
    GMat m(k, k);
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t i = 0; i < k; ++i) {
            Rational p(1);
            for (std::size_t t = 0; t < l; ++t) p *= lambdas[i];
            m(l, i) = GaussianRational(p);
        }
    std::vector<std::vector<Rational>> mu(k, std::vector<Rational>(k));
    for (std::size_t j = 0; j < k; ++j) {
        GVec e(k, GaussianRational(0));
        e[j] = GaussianRational(1);
        auto sol = solve_linear(m, e);
        if (!sol) throw std::invalid_argument("vandermonde_coefficients: singular system");
        for (std::size_t i = 0; i < k; ++i) mu[i][j] = (*sol)[i].re();
    }
    // exact back-substitution of the defining system
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t l = 0; l < k; ++l) {
            Rational acc(0);
            for (std::size_t i = 0; i < k; ++i) {
                Rational p(1);
                for (std::size_t t = 0; t < l; ++t) p *= lambdas[i];
                acc += mu[i][j] * p;
            }
            if (acc != Rational(j == l ? 1 : 0))
                throw std::logic_error("vandermonde_coefficients: verification failed");
        }
    return mu;
}

ExtensionRecipe ExtensionRecipe::make(std::size_t k, std::vector<Rational> lambdas,
                                      double epsilon) {
    if (k == 0) throw std::invalid_argument("ExtensionRecipe: k >= 1 required");
    if (epsilon <= 0) throw std::invalid_argument("ExtensionRecipe: epsilon must be positive");
    ExtensionRecipe r;
    r.k = k;
    if (lambdas.empty())
        for (std::size_t i = 1; i <= k; ++i) lambdas.emplace_back(static_cast<long long>(i));
    if (lambdas.size() != k)
        throw std::invalid_argument("ExtensionRecipe: need k dilation factors");
    r.lambdas = std::move(lambdas);
    r.mu = vandermonde_coefficients(r.lambdas);
    r.epsilon = epsilon;
    r.theta_flat = 2 * static_cast<unsigned>((k + 1) / 2);
    if (r.theta_flat < 2) r.theta_flat = 2;
    r.theta_power = static_cast<unsigned>(k) + 2;
    return r;
}

double theta_cutoff(double t, unsigned flat, unsigned power) {
    double a = std::abs(t);
    if (a >= 1.0) return 0.0;
    double base = 1.0 - std::pow(a, static_cast<double>(flat));
    return std::pow(base, static_cast<double>(power));
}

namespace {

double factorial(std::size_t m) {
    double f = 1;
    for (std::size_t i = 2; i <= m; ++i) f *= static_cast<double>(i);
    return f;
}

class TopExtension final : public BoundaryExtension {
public:
    TopExtension(const GridField& g, std::size_t k, double epsilon)
        : g_(g), k_(k), eps_(epsilon) {
        if (epsilon <= 0) throw std::invalid_argument("layer_extension_top: epsilon <= 0");
        flat_ = 2 * static_cast<unsigned>((k + 1) / 2);
        if (flat_ < 2) flat_ = 2;
        power_ = static_cast<unsigned>(k) + 2;
        inv_fact_ = 1.0 / factorial(k - 1);
    }
    std::size_t components() const override { return g_.components(); }
    Cplx eval(const std::vector<double>& xt, double xn, std::size_t comp) const override {
        double th = theta_cutoff(xn / eps_, flat_, power_);
        if (th == 0) return Cplx(0, 0);
        double w = th * std::pow(xn, static_cast<double>(k_ - 1)) * inv_fact_;
        return w * g_.interpolate(xt, comp);
    }

private:
    GridField g_;
    std::size_t k_;
    double eps_;
    unsigned flat_, power_;
    double inv_fact_;
};

class BesovExtension final : public BoundaryExtension {
public:
    BesovExtension(const GridField& g, std::size_t j, std::size_t k) : g_(g), j_(j) {
        if (k < 2 || j > k - 2)
            throw std::invalid_argument("layer_extension_besov: need 0 <= j <= k-2");
        gauss_legendre(16, nodes_, weights_);
        // normalization of (1 - |s|^2)^(k+2) over the unit ball, by the same
        // quadrature that evaluates the convolution
        mpow_ = static_cast<double>(k) + 2;
        std::size_t m = g_.dim();
        double mass = quad_mass(m);
        inv_mass_ = 1.0 / mass;
        inv_fact_ = 1.0 / factorial(j);
    }
    std::size_t components() const override { return g_.components(); }
    Cplx eval(const std::vector<double>& xt, double xn, std::size_t comp) const override {
        Cplx v = xn == 0 ? g_.interpolate(xt, comp) : mollify(xt, xn, comp);
        double w = j_ == 0 ? 1.0 : std::pow(xn, static_cast<double>(j_)) * inv_fact_;
        return w * v;
    }

private:
    double rho(double r2) const { return r2 >= 1.0 ? 0.0 : std::pow(1.0 - r2, mpow_); }

    double quad_mass(std::size_t m) const {
        // integral of rho over [-1,1]^m by tensor Gauss quadrature
        if (m == 1) {
            double s = 0;
            for (std::size_t i = 0; i < nodes_.size(); ++i)
                s += weights_[i] * rho(nodes_[i] * nodes_[i]);
            return s;
        }
        double s = 0;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            for (std::size_t l = 0; l < nodes_.size(); ++l)
                s += weights_[i] * weights_[l] *
                     rho(nodes_[i] * nodes_[i] + nodes_[l] * nodes_[l]);
        return s;
    }

    Cplx mollify(const std::vector<double>& xt, double t, std::size_t comp) const {
        std::size_t m = g_.dim();
        Cplx acc(0, 0);
        std::vector<double> y(m);
        if (m == 1) {
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                y[0] = xt[0] - t * nodes_[i];
                acc += weights_[i] * rho(nodes_[i] * nodes_[i]) * g_.interpolate(y, comp);
            }
        } else if (m == 2) {
            for (std::size_t i = 0; i < nodes_.size(); ++i)
                for (std::size_t l = 0; l < nodes_.size(); ++l) {
                    double r2 = nodes_[i] * nodes_[i] + nodes_[l] * nodes_[l];
                    if (r2 >= 1.0) continue;
                    y[0] = xt[0] - t * nodes_[i];
                    y[1] = xt[1] - t * nodes_[l];
                    acc += weights_[i] * weights_[l] * rho(r2) * g_.interpolate(y, comp);
                }
        } else {
            throw std::invalid_argument("layer_extension_besov: boundary dimension > 2");
        }
        return acc * inv_mass_;
    }

    GridField g_;
    std::size_t j_;
    double mpow_, inv_mass_, inv_fact_;
    std::vector<double> nodes_, weights_;
};

class Superposition final : public BoundaryExtension {
public:
    Superposition(const std::vector<GridField>& traces, const ExtensionRecipe& recipe)
        : recipe_(recipe) {
        if (traces.size() != recipe.k)
            throw std::invalid_argument("superpose_extension: need k boundary fields");
        for (const auto& g : traces) {
            if (g.box() != traces[0].box() || g.h() != traces[0].h() ||
                g.components() != traces[0].components())
                throw std::invalid_argument("superpose_extension: boundary grid mismatch");
        }
        for (std::size_t j = 0; j < recipe.k; ++j) {
            if (j + 1 == recipe.k)
                parts_.push_back(layer_extension_top(traces[j], recipe.k, recipe.epsilon));
            else
                parts_.push_back(layer_extension_besov(traces[j], j, recipe.k));
        }
        for (const auto& l : recipe.lambdas) lambda_f_.push_back(l.to_double());
        mu_f_.resize(recipe.k, std::vector<double>(recipe.k));
        for (std::size_t i = 0; i < recipe.k; ++i)
            for (std::size_t j = 0; j < recipe.k; ++j) mu_f_[i][j] = recipe.mu[i][j].to_double();
    }
    std::size_t components() const override { return parts_[0]->components(); }
    Cplx eval(const std::vector<double>& xt, double xn, std::size_t comp) const override {
        Cplx acc(0, 0);
        for (std::size_t j = 0; j < recipe_.k; ++j)
            for (std::size_t i = 0; i < recipe_.k; ++i)
                acc += mu_f_[i][j] * parts_[j]->eval(xt, lambda_f_[i] * xn, comp);
        return acc;
    }

private:
    ExtensionRecipe recipe_;
    std::vector<std::unique_ptr<BoundaryExtension>> parts_;
    std::vector<double> lambda_f_;
    std::vector<std::vector<double>> mu_f_;
};

} // namespace

std::unique_ptr<BoundaryExtension> layer_extension_top(const GridField& g, std::size_t k,
                                                       double epsilon) {
    return std::make_unique<TopExtension>(g, k, epsilon);
}

std::unique_ptr<BoundaryExtension> layer_extension_besov(const GridField& g, std::size_t j,
                                                         std::size_t k) {
    return std::make_unique<BesovExtension>(g, j, k);
}

std::unique_ptr<BoundaryExtension> superpose_extension(const std::vector<GridField>& traces,
                                                       const ExtensionRecipe& recipe) {
    return std::make_unique<Superposition>(traces, recipe);
}

GridField render_extension(const BoundaryExtension& ext, const GridField& gref, double height) {
    std::vector<std::array<double, 2>> box = gref.box();
    box.push_back({0.0, height});
    GridField u(box, gref.h(), ext.components(), box.size() - 1);
    std::size_t d = u.dim();
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> xt(d - 1);
    std::size_t total = u.point_count();
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (std::size_t j = 0; j + 1 < d; ++j) xt[j] = u.box()[j][0] + u.h() * idx[j];
        double xn = u.h() * idx[d - 1];
        for (std::size_t c = 0; c < u.components(); ++c)
            u.raw()[flat * u.components() + c] = ext.eval(xt, xn, c);
        std::size_t j = d;
        while (j > 0) {
            --j;
            if (++idx[j] < u.counts()[j]) break;
            idx[j] = 0;
        }
    }
    return u;
}

GridField normal_trace_fd(const GridField& u, unsigned j) {
    if (!u.boundary_axis()) throw std::invalid_argument("normal_trace_fd: no boundary axis");
    std::size_t axis = *u.boundary_axis();
    std::vector<double> nodes;
    for (unsigned t = 0; t <= j; ++t) nodes.push_back(static_cast<double>(t));
    std::vector<double> w = fd_weights(nodes, j);
    double hj = std::pow(u.h(), static_cast<double>(j));

    std::vector<std::array<double, 2>> bbox;
    std::vector<std::size_t> keep;
    for (std::size_t a = 0; a < u.dim(); ++a)
        if (a != axis) {
            bbox.push_back(u.box()[a]);
            keep.push_back(a);
        }
    GridField g(bbox, u.h(), u.components());
    std::size_t d = g.dim();
    std::vector<std::size_t> idx(d, 0);
    std::size_t total = g.point_count();
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::vector<std::size_t> full(u.dim(), 0);
        for (std::size_t a = 0; a < d; ++a) full[keep[a]] = idx[a];
        for (std::size_t c = 0; c < u.components(); ++c) {
            Cplx acc(0, 0);
            for (unsigned t = 0; t <= j; ++t) {
                full[axis] = t;
                acc += w[t] * u.at(full, c);
            }
            g.raw()[flat * g.components() + c] = acc / hj;
        }
        std::size_t a = d;
        while (a > 0) {
            --a;
            if (++idx[a] < g.counts()[a]) break;
            idx[a] = 0;
        }
    }
    return g;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    auto simpson = [&](double x0, double x2) {
        double x1 = 0.5 * (x0 + x2);
        return (x2 - x0) / 6.0 * (f(x0) + 4 * f(x1) + f(x2));
    };
    std::function<double(double, double, double, double, int)> rec =
        [&](double x0, double x2, double whole, double eps, int depth) -> double {
        double x1 = 0.5 * (x0 + x2);
        double left = simpson(x0, x1), right = simpson(x1, x2);
        if (depth > 40 || std::abs(left + right - whole) < 15 * eps)
            return left + right + (left + right - whole) / 15.0;
        return rec(x0, x1, left, eps / 2, depth + 1) + rec(x1, x2, right, eps / 2, depth + 1);
    };
    return rec(a, b, simpson(a, b), tol, 0);
}

double sphere_average(std::size_t n, const std::function<double(double)>& f, double tol) {
    if (n < 2) throw std::invalid_argument("sphere_average: n >= 2");
    // |S^{n-2}| * int_0^pi f(cos a) sin^{n-2}(a) da
    double m = static_cast<double>(n) - 2;
    double surface;
    if (n == 2) surface = 2.0;
    else if (n == 3) surface = 2 * M_PI;
    else if (n == 4) surface = 4 * M_PI;
    else {
        surface = 2 * std::pow(M_PI, (m + 1) / 2) / std::tgamma((m + 1) / 2);
    }
    auto integrand = [&](double a) { return f(std::cos(a)) * std::pow(std::sin(a), m); };
    return surface * adaptive_simpson(integrand, 0.0, M_PI, tol);
}

double KernelProfile::phi(double t) const {
    if (t <= 0.5 || t >= 1.0) return 0.0;
    double b = (2 * t - 1) * (2 - 2 * t);
    return normalization * std::pow(b, static_cast<double>(power));
}

KernelProfile KernelProfile::make(std::size_t n, unsigned power, double tol) {
    KernelProfile p;
    p.n = n;
    p.power = power;
    p.normalization = 1.0;
    double raw = sphere_average(n, [&](double t) { return p.phi(t); }, tol);
    if (!(raw > 0)) throw std::logic_error("KernelProfile: degenerate profile");
    p.normalization = 1.0 / raw;
    return p;
}

double sobolev_kernel(std::size_t n, std::size_t k, const KernelProfile& profile,
                      const std::vector<double>& y, const std::vector<std::size_t>& slots) {
    if (y.size() != n) throw std::invalid_argument("sobolev_kernel: point dimension");
    if (slots.size() != k) throw std::invalid_argument("sobolev_kernel: slot count != k");
    double r2 = 0;
    for (double c : y) r2 += c * c;
    if (r2 == 0) throw std::invalid_argument("sobolev_kernel: y = 0");
    double r = std::sqrt(r2);
    if (y[n - 1] <= 0.5 * r) return 0.0; // support in the upward cone
    double phi = profile.phi(y[n - 1] / r);
    if (phi == 0) return 0.0;
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    double val = sign / factorial(k - 1) * phi * std::pow(r, static_cast<double>(k) - n);
    for (std::size_t s : slots) {
        if (s >= n) throw std::invalid_argument("sobolev_kernel: slot index");
        val *= y[s] / r;
    }
    return val;
}

void gauss_legendre(std::size_t count, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(count);
    weights.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        // Newton iteration from the Chebyshev estimate
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(count) + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < count; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = count * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

} // namespace ellip
