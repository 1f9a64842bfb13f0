#include "ellip/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>

#include "ellip/catalog.hpp"

namespace ellip {

namespace {

// splitmix64: the single seed drives every randomized experiment
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform(double a, double b) {
        return a + (b - a) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
};

double factorial(unsigned m) {
    double f = 1;
    for (unsigned i = 2; i <= m; ++i) f *= i;
    return f;
}

// polynomial in one variable, for smoothstep derivatives
struct Poly1 {
    std::vector<double> c; // ascending
    double eval(double x) const {
        double acc = 0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    }
    Poly1 derivative() const {
        Poly1 d;
        for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(c[i] * static_cast<double>(i));
        if (d.c.empty()) d.c.push_back(0.0);
        return d;
    }
};

// S_p: [0,1] -> [0,1], C^p at both ends; S_p' proportional to x^p (1-x)^p
struct Smoothstep {
    std::vector<Poly1> derivs; // derivs[m] = S^{(m)}, m >= 1; S itself from integral
    Poly1 s;                   // S
    explicit Smoothstep(unsigned p) {
        // x^p (1-x)^p with (1-x)^p expanded, coefficients C(p,j)(-1)^j
        Poly1 sp;
        sp.c.assign(2 * p + 1, 0.0);
        double cpj = 1;
        for (unsigned j = 0; j <= p; ++j) {
            sp.c[p + j] = cpj * ((j % 2 == 0) ? 1.0 : -1.0);
            cpj = cpj * (p - j) / (j + 1);
        }
        // normalize the integral to 1 and integrate for S
        Poly1 integral;
        integral.c.assign(sp.c.size() + 1, 0.0);
        for (std::size_t i = 0; i < sp.c.size(); ++i)
            integral.c[i + 1] = sp.c[i] / static_cast<double>(i + 1);
        double mass = integral.eval(1.0);
        for (auto& v : integral.c) v /= mass;
        for (auto& v : sp.c) v /= mass;
        s = integral;
        derivs.push_back(sp);
        for (unsigned m = 1; m < p + 2; ++m) derivs.push_back(derivs.back().derivative());
    }
    double value(unsigned m, double x) const {
        if (x <= 0) return m == 0 ? 0.0 : 0.0;
        if (x >= 1) return m == 0 ? 1.0 : 0.0;
        if (m == 0) return s.eval(x);
        if (m - 1 < derivs.size()) return derivs[m - 1].eval(x);
        return 0.0;
    }
};

} // namespace

FitResult fit_curve(const std::vector<double>& abscissae, const std::vector<double>& ordinates,
                    const std::string& model) {
    if (abscissae.size() != ordinates.size() || abscissae.size() < 3)
        throw std::invalid_argument("fit_curve: need >= 3 matched points");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < abscissae.size(); ++i) {
        if (model == "log") {
            xs.push_back(std::log(1.0 / abscissae[i]));
            ys.push_back(ordinates[i]);
        } else if (model == "power") {
            if (!(std::abs(ordinates[i]) > 0)) continue;
            xs.push_back(std::log(abscissae[i]));
            ys.push_back(std::log(std::abs(ordinates[i])));
        } else {
            throw std::invalid_argument("fit_curve: unknown model " + model);
        }
    }
    FitResult fit;
    fit.model = model;
    if (xs.size() < 2) {
        fit.slope = -std::numeric_limits<double>::infinity();
        fit.r2 = 1.0;
        return fit;
    }
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, mean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double pred = fit.slope * xs[i] + fit.intercept;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

void write_curve_csv(const ExperimentCurve& curve, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_curve_csv: cannot open " + path);
    os.precision(17);
    os << "# model=" << curve.fit.model << " slope=" << curve.fit.slope
       << " intercept=" << curve.fit.intercept << " r2=" << curve.fit.r2 << "\n";
    os << "abscissa,ordinate,fit_residual\n";
    for (std::size_t i = 0; i < curve.abscissae.size(); ++i) {
        double x = curve.fit.model == "log" ? std::log(1.0 / curve.abscissae[i])
                                            : std::log(curve.abscissae[i]);
        double y = curve.fit.model == "log" ? curve.ordinates[i]
                                            : std::log(std::abs(curve.ordinates[i]));
        double res = y - (curve.fit.slope * x + curve.fit.intercept);
        os << curve.abscissae[i] << "," << curve.ordinates[i] << "," << res << "\n";
    }
}

// ---------------------------------------------------------------------------
// counterexample family
// ---------------------------------------------------------------------------

CounterexampleField::CounterexampleField(const Operator& op, const Direction& nu,
                                         std::vector<Cplx> eta, std::vector<Cplx> v,
                                         double epsilon, CounterexampleVariant variant,
                                         double witness_tol, bool enforce_witness)
    : op_rot_(op), n_(op.n()), k_(op.k()), eps_(epsilon), variant_(variant),
      v_(std::move(v)) {
    if (!(epsilon > 0 && epsilon < 1))
        throw std::invalid_argument("counterexample_field: eps must lie in (0,1)");
    if (eta.size() != n_ || v_.size() != op.dim_v())
        throw std::invalid_argument("counterexample_field: witness dimensions");

    // the witness must annihilate the complexified symbol
    Witness w;
    for (std::size_t j = 0; j < n_; ++j)
        w.frequency.push_back(eta[j] + Cplx(0, 1) * nu.components()[j].to_double());
    double vn = 0;
    for (const auto& c : v_) vn += std::norm(c);
    vn = std::sqrt(vn);
    if (vn == 0) throw std::invalid_argument("counterexample_field: zero kernel vector");
    for (auto& c : v_) c /= vn;
    w.kernel_vector = v_;
    if (enforce_witness && witness_residual(op, w) > witness_tol)
        throw std::invalid_argument("counterexample_field: witness residual too large");

    // rotate the frame so the halfspace face is {y_1 = 0}
    auto frame = householder_frame(nu.components());
    op_rot_ = change_frame(op, frame);
    std::vector<Cplx> eta_rot(n_, Cplx(0, 0));
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            eta_rot[i] += frame[i][j].to_double() * eta[j]; // H^T = H columns as rows
    // z(y) = y_1 - i <eta_rot, y>; d z / d y_j
    for (std::size_t j = 0; j < n_; ++j)
        w_.push_back((j == 0 ? Cplx(1, 0) : Cplx(0, 0)) - Cplx(0, 1) * eta_rot[j]);

    cutoff_power_ = static_cast<unsigned>(k_) + 2;

    alpha_ = -2.0 * (static_cast<double>(n_) - 1.0) / static_cast<double>(n_);
    // at n = 2 the Sobolev exponent is exactly -1 and the antiderivative
    // chain is the logarithmic one of the trace family
    bool logarithmic = variant_ == CounterexampleVariant::Trace ||
                       std::abs(alpha_ + 1.0) < 1e-14;
    if (logarithmic) {
        // f^{(k-1)} = w^{-1}; integrate k-1 times over the basis w^p (log w)^{0,1}
        std::vector<std::pair<int, bool>> keys = {{-1, false}};
        std::vector<Cplx> coeffs = {Cplx(1, 0)};
        for (std::size_t it = 1; it < k_; ++it) {
            std::vector<std::pair<int, bool>> nk;
            std::vector<Cplx> nc;
            auto push = [&](int p, bool lg, Cplx c) {
                for (std::size_t t = 0; t < nk.size(); ++t)
                    if (nk[t] == std::make_pair(p, lg)) {
                        nc[t] += c;
                        return;
                    }
                nk.emplace_back(p, lg);
                nc.push_back(c);
            };
            for (std::size_t t = 0; t < keys.size(); ++t) {
                auto [p, lg] = keys[t];
                Cplx c = coeffs[t];
                if (!lg) {
                    if (p == -1) push(0, true, c);
                    else push(p + 1, false, c / static_cast<double>(p + 1));
                } else {
                    push(p + 1, true, c / static_cast<double>(p + 1));
                    push(p + 1, false, -c / static_cast<double>((p + 1) * (p + 1)));
                }
            }
            keys = std::move(nk);
            coeffs = std::move(nc);
        }
        f_terms_keys_ = std::move(keys);
        f_terms_coeffs_ = std::move(coeffs);
    }
}

Cplx CounterexampleField::f_derivative(unsigned m, Cplx z) const {
    Cplx w = z + 2.0 * eps_;
    if (f_terms_keys_.empty()) {
        // f = c w^{alpha+k-1} with c clearing the antiderivative factors
        double e = alpha_ + static_cast<double>(k_) - 1.0;
        double c = 1.0;
        for (std::size_t j = 1; j < k_; ++j) c /= (alpha_ + static_cast<double>(j));
        double fac = 1.0;
        for (unsigned i = 0; i < m; ++i) {
            fac *= e;
            e -= 1.0;
        }
        return c * fac * std::pow(w, Cplx(e, 0));
    }
    // differentiate the term list m times, then evaluate
    std::vector<std::pair<int, bool>> keys = f_terms_keys_;
    std::vector<Cplx> coeffs = f_terms_coeffs_;
    for (unsigned it = 0; it < m; ++it) {
        std::vector<std::pair<int, bool>> nk;
        std::vector<Cplx> nc;
        auto push = [&](int p, bool lg, Cplx c) {
            if (c == Cplx(0, 0)) return;
            for (std::size_t t = 0; t < nk.size(); ++t)
                if (nk[t] == std::make_pair(p, lg)) {
                    nc[t] += c;
                    return;
                }
            nk.emplace_back(p, lg);
            nc.push_back(c);
        };
        for (std::size_t t = 0; t < keys.size(); ++t) {
            auto [p, lg] = keys[t];
            Cplx c = coeffs[t];
            if (p != 0) push(p - 1, lg, c * static_cast<double>(p));
            if (lg) push(p - 1, false, c);
        }
        keys = std::move(nk);
        coeffs = std::move(nc);
    }
    Cplx lw = std::log(w);
    Cplx acc(0, 0);
    for (std::size_t t = 0; t < keys.size(); ++t) {
        auto [p, lg] = keys[t];
        Cplx term = coeffs[t] * std::pow(w, Cplx(static_cast<double>(p), 0));
        if (lg) term *= lw;
        acc += term;
    }
    return acc;
}

Cplx CounterexampleField::holomorphic_coordinate(const std::vector<double>& y) const {
    Cplx z(0, 0);
    for (std::size_t j = 0; j < n_; ++j) z += w_[j] * y[j];
    return z;
}

double CounterexampleField::cutoff(const std::vector<double>& y, const MultiIndex& deriv) const {
    static thread_local std::map<unsigned, std::unique_ptr<Smoothstep>> cache;
    auto& slot = cache[cutoff_power_];
    if (!slot) slot = std::make_unique<Smoothstep>(cutoff_power_);
    const Smoothstep* ss = slot.get();
    auto r = [&](unsigned m, double t) {
        double a = std::abs(t);
        if (a <= 1.0) return m == 0 ? 1.0 : 0.0;
        if (a >= 2.0) return 0.0;
        double sgn = t < 0 ? -1.0 : 1.0;
        // d^m/dt^m S(2 - |t|): the inner derivative contributes (-sgn)^m
        return ss->value(m, 2.0 - a) * ((m % 2 == 1) ? -sgn : 1.0);
    };
    auto phi = [&](unsigned m, double t) {
        if (t >= -eps_) return m == 0 ? 1.0 : 0.0;
        if (t <= -2.0 * eps_) return 0.0;
        return ss->value(m, (t + 2.0 * eps_) / eps_) / std::pow(eps_, static_cast<double>(m));
    };
    double acc = 1.0;
    for (std::size_t j = 0; j < n_; ++j) {
        unsigned m = deriv[j];
        double factor;
        if (j == 0) {
            // Leibniz across r(y_1) phi_eps(y_1)
            factor = 0.0;
            for (unsigned i = 0; i <= m; ++i)
                factor += static_cast<double>(binomial(m, i)) * r(i, y[j]) * phi(m - i, y[j]);
        } else {
            factor = r(m, y[j]);
        }
        acc *= factor;
        if (acc == 0.0) return 0.0;
    }
    return acc;
}

Cplx CounterexampleField::value_at(const std::vector<double>& y, std::size_t comp) const {
    MultiIndex zero(n_, 0);
    double psi = cutoff(y, zero);
    if (psi == 0.0) return Cplx(0, 0);
    return psi * f_derivative(0, holomorphic_coordinate(y)) * v_[comp];
}

// d^beta u as a vector over the fiber components
std::vector<Cplx> CounterexampleField::derivative_tensor_row(const std::vector<double>& y,
                                                             const MultiIndex& beta) const {
    std::vector<Cplx> out(v_.size(), Cplx(0, 0));
    // Leibniz: sum over gamma <= beta of C(beta,gamma) d^{beta-gamma} psi f^{(|gamma|)} w^gamma v
    MultiIndex gamma(n_, 0);
    Cplx z = holomorphic_coordinate(y);
    bool any = false;
    while (true) {
        MultiIndex psi_idx(n_);
        bool ok = true;
        for (std::size_t j = 0; j < n_; ++j) {
            if (gamma[j] > beta[j]) ok = false;
            else psi_idx[j] = beta[j] - gamma[j];
        }
        if (ok) {
            double psi = cutoff(y, psi_idx);
            if (psi != 0.0) {
                double mult = 1;
                unsigned order = 0;
                Cplx wg(1, 0);
                for (std::size_t j = 0; j < n_; ++j) {
                    mult *= static_cast<double>(binomial(beta[j], gamma[j]));
                    order += gamma[j];
                    for (unsigned p = 0; p < gamma[j]; ++p) wg *= w_[j];
                }
                Cplx scale = mult * psi * f_derivative(order, z) * wg;
                for (std::size_t c = 0; c < v_.size(); ++c) out[c] += scale * v_[c];
                any = true;
            }
        }
        // next gamma <= beta (odometer)
        std::size_t j = n_;
        bool done = true;
        while (j > 0) {
            --j;
            if (gamma[j] < beta[j]) {
                ++gamma[j];
                for (std::size_t l = j + 1; l < n_; ++l) gamma[l] = 0;
                done = false;
                break;
            }
        }
        if (done) break;
    }
    (void)any;
    return out;
}

namespace {

std::vector<std::array<double, 2>> default_box(std::size_t n) {
    return std::vector<std::array<double, 2>>(n, {-2.0, 2.0});
}

template <typename F>
void for_each_lattice(const GridField& g, F&& f) {
    std::size_t d = g.dim();
    std::vector<std::size_t> idx(d, 0);
    std::size_t total = g.point_count();
    std::vector<double> x(d);
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (std::size_t j = 0; j < d; ++j) x[j] = g.box()[j][0] + g.h() * idx[j];
        f(flat, idx, x);
        std::size_t j = d;
        while (j > 0) {
            --j;
            if (++idx[j] < g.counts()[j]) break;
            idx[j] = 0;
        }
    }
}

} // namespace

GridField CounterexampleField::sample(double h) const {
    GridField u(default_box(n_), h, v_.size(), 0);
    for_each_lattice(u, [&](std::size_t flat, const std::vector<std::size_t>&,
                            const std::vector<double>& x) {
        for (std::size_t c = 0; c < v_.size(); ++c)
            u.raw()[flat * v_.size() + c] = value_at(x, c);
    });
    return u;
}

GridField CounterexampleField::operator_field(double h) const {
    GridField out(default_box(n_), h, op_rot_.dim_w(), 0);
    for_each_lattice(out, [&](std::size_t flat, const std::vector<std::size_t>&,
                              const std::vector<double>& x) {
        for (const auto& [alpha, mat] : op_rot_.terms()) {
            std::vector<Cplx> dv = derivative_tensor_row(x, alpha);
            for (std::size_t i = 0; i < op_rot_.dim_w(); ++i) {
                Cplx acc(0, 0);
                for (std::size_t j = 0; j < op_rot_.dim_v(); ++j)
                    acc += mat(i, j).to_double() * dv[j];
                out.raw()[flat * op_rot_.dim_w() + i] += acc;
            }
        }
    });
    return out;
}

GridField CounterexampleField::derivative_magnitude(double h) const {
    GridField out(default_box(n_), h, 1, 0);
    auto betas = multi_indices_of_order(n_, static_cast<unsigned>(k_ - 1));
    std::vector<double> mult;
    for (const auto& b : betas) {
        double m = factorial(static_cast<unsigned>(k_ - 1));
        for (unsigned e : b) m /= factorial(e);
        mult.push_back(m);
    }
    for_each_lattice(out, [&](std::size_t flat, const std::vector<std::size_t>&,
                              const std::vector<double>& x) {
        double mag2 = 0;
        for (std::size_t t = 0; t < betas.size(); ++t) {
            std::vector<Cplx> dv = derivative_tensor_row(x, betas[t]);
            for (const Cplx& c : dv) mag2 += mult[t] * std::norm(c);
        }
        out.raw()[flat] = std::sqrt(mag2);
    });
    return out;
}

double CounterexampleField::face_l1(double h) const {
    // the face integrand peaks at scale eps around the singular line, so the
    // tangential quadrature is refined to resolve it
    double hf = std::min(h, eps_ / 2);
    auto betas = multi_indices_of_order(n_, static_cast<unsigned>(k_ - 1));
    std::vector<double> mult;
    for (const auto& b : betas) {
        double m = factorial(static_cast<unsigned>(k_ - 1));
        for (unsigned e : b) m /= factorial(e);
        mult.push_back(m);
    }
    long long half = static_cast<long long>(std::llround(2.0 / hf));
    std::vector<double> y(n_, 0.0);
    double acc = 0, comp = 0;
    std::vector<long long> idx(n_ - 1, -half);
    while (true) {
        for (std::size_t j = 0; j + 1 < n_; ++j) y[j + 1] = hf * static_cast<double>(idx[j]);
        double mag2 = 0;
        for (std::size_t t = 0; t < betas.size(); ++t) {
            std::vector<Cplx> dv = derivative_tensor_row(y, betas[t]);
            for (const Cplx& c : dv) mag2 += mult[t] * std::norm(c);
        }
        double term = std::sqrt(mag2) * std::pow(hf, static_cast<double>(n_ - 1));
        double yk = term - comp;
        double tk = acc + yk;
        comp = (tk - acc) - yk;
        acc = tk;
        std::size_t j = n_ - 1;
        bool done = true;
        while (j > 0) {
            --j;
            if (++idx[j] <= half) { done = false; break; }
            idx[j] = -half;
        }
        if (done) break;
    }
    return acc;
}

namespace {

// |A u| or |D^{k-1} u| pointwise magnitude hooks for the quadratures
enum class Integrand { OperatorImage, DerivativeMagnitude };

} // namespace

double CounterexampleField::halfspace_lp(double h, double p, bool operator_image) const {
    auto betas = multi_indices_of_order(n_, static_cast<unsigned>(k_ - 1));
    std::vector<double> mult;
    for (const auto& b : betas) {
        double m = factorial(static_cast<unsigned>(k_ - 1));
        for (unsigned e : b) m /= factorial(e);
        mult.push_back(m);
    }
    auto magnitude = [&](const std::vector<double>& y) {
        double mag2 = 0;
        if (operator_image) {
            std::vector<Cplx> out(op_rot_.dim_w(), Cplx(0, 0));
            for (const auto& [alpha, mat] : op_rot_.terms()) {
                std::vector<Cplx> dv = derivative_tensor_row(y, alpha);
                for (std::size_t i = 0; i < op_rot_.dim_w(); ++i)
                    for (std::size_t j = 0; j < op_rot_.dim_v(); ++j)
                        out[i] += mat(i, j).to_double() * dv[j];
            }
            for (const Cplx& c : out) mag2 += std::norm(c);
        } else {
            for (std::size_t t = 0; t < betas.size(); ++t) {
                std::vector<Cplx> dv = derivative_tensor_row(y, betas[t]);
                for (const Cplx& c : dv) mag2 += mult[t] * std::norm(c);
            }
        }
        return std::pow(std::sqrt(mag2), p);
    };

    // base lattice over the halfspace part of the box
    double acc = 0, comp = 0;
    auto add = [&](double term) {
        double yk = term - comp;
        double tk = acc + yk;
        comp = (tk - acc) - yk;
        acc = tk;
    };
    long long half = static_cast<long long>(std::llround(2.0 / h));
    double rho0 = 8 * h;
    double fine = std::max(eps_ / 2, h / 16);
    bool refine = n_ == 2 && fine < h;
    std::vector<double> y(n_, 0.0);
    std::vector<long long> idx(n_, 0);
    for (std::size_t j = 0; j < n_; ++j) idx[j] = j == 0 ? 0 : -half;
    while (true) {
        double r2 = 0;
        for (std::size_t j = 0; j < n_; ++j) {
            y[j] = h * static_cast<double>(idx[j]);
            r2 += y[j] * y[j];
        }
        if (!(refine && r2 < rho0 * rho0))
            add(magnitude(y) * std::pow(h, static_cast<double>(n_)));
        std::size_t j = n_;
        bool done = true;
        while (j > 0) {
            --j;
            if (++idx[j] <= half) { done = false; break; }
            idx[j] = j == 0 ? 0 : -half;
        }
        if (done) break;
    }
    if (refine) {
        // resolve the near-origin spike at the eps scale
        long long fh = static_cast<long long>(std::ceil(rho0 / fine));
        for (long long i0 = 0; i0 <= fh; ++i0) {
            for (long long i1 = -fh; i1 <= fh; ++i1) {
                double y0 = fine * static_cast<double>(i0);
                double y1 = fine * static_cast<double>(i1);
                if (y0 * y0 + y1 * y1 >= rho0 * rho0) continue;
                add(magnitude({y0, y1}) * fine * fine);
            }
        }
    }
    return std::pow(acc, 1.0 / p);
}

double CounterexampleField::halfspace_l1_Au(double h) const {
    return halfspace_lp(h, 1.0, true);
}

double CounterexampleField::face_prefactor() const {
    if (n_ != 2) return 0.0;
    double wnorm2 = 0;
    for (const Cplx& c : w_) wnorm2 += std::norm(c);
    double eta_tang = std::abs(w_[1].imag()); // |eta_rot . e2| on the face
    if (eta_tang == 0) return 0.0;
    return 2.0 * std::pow(std::sqrt(wnorm2), static_cast<double>(k_ - 1)) / eta_tang;
}

TraceBlowupResult trace_blowup_experiment(const Operator& op, const Direction& nu,
                                          const std::vector<double>& eps_list, double h,
                                          std::uint64_t seed, const Budgets& budgets) {
    if (eps_list.size() < 3)
        throw std::invalid_argument("trace_blowup_experiment: need >= 3 epsilons");
    Verdict boundary = check_boundary_ellipticity(op, nu, budgets);

    TraceBlowupResult out;
    std::vector<Cplx> v;
    std::vector<Cplx> eta(op.n(), Cplx(0, 0));
    if (boundary.fails() && boundary.witness) {
        out.blowup_variant = true;
        const Witness& w = *boundary.witness;
        for (std::size_t j = 0; j < op.n(); ++j) eta[j] = Cplx(w.frequency[j].real(), 0);
        v = w.kernel_vector;
    } else {
        // bounded-ratio variant: a transversal plane and a seeded generic v
        out.blowup_variant = false;
        Rng rng(seed);
        std::size_t best = 0;
        for (std::size_t j = 1; j < op.n(); ++j)
            if (std::abs(nu.unit()[j]) < std::abs(nu.unit()[best])) best = j;
        eta[best] = Cplx(1, 0);
        v.resize(op.dim_v());
        double norm = 0;
        for (auto& c : v) {
            c = Cplx(rng.uniform(-1, 1), 0);
            norm += std::norm(c);
        }
        for (auto& c : v) c /= std::sqrt(norm);
    }

    double prefactor = 0;
    for (double eps : eps_list) {
        CounterexampleField field(op, nu, eta, v, eps, CounterexampleVariant::Trace,
                                  budgets.witness_tol, out.blowup_variant);
        double face = field.face_l1(h);
        double denom = field.halfspace_l1_Au(h);
        out.curve.abscissae.push_back(eps);
        out.denominators.push_back(denom);
        out.curve.ordinates.push_back(face / denom);
        prefactor = field.face_prefactor();
    }
    out.curve.fit = fit_curve(out.curve.abscissae, out.curve.ordinates, "log");
    out.denom_min = *std::min_element(out.denominators.begin(), out.denominators.end());
    out.denom_max = *std::max_element(out.denominators.begin(), out.denominators.end());
    if (prefactor > 0) {
        double geo = 0;
        for (double d : out.denominators) geo += std::log(d);
        geo = std::exp(geo / static_cast<double>(out.denominators.size()));
        out.normalized_slope = out.curve.fit.slope * geo / prefactor;
    }
    return out;
}

SobolevRatioResult sobolev_ratio_experiment(const Operator& op, const Direction& nu,
                                            const std::vector<GridField>& fields) {
    if (fields.empty()) throw std::invalid_argument("sobolev_ratio_experiment: no fields");
    Operator rotated = change_frame(op, householder_frame(nu.components()));
    double q = static_cast<double>(op.n()) / (static_cast<double>(op.n()) - 1.0);

    auto ratio_of = [&](const GridField& u) {
        GridField au = apply_operator_fd(rotated, u);
        GridField mag = derivative_magnitude_fd(u, static_cast<unsigned>(op.k() - 1));
        double num = lp_norm(mag, q, NormRegion::Halfspace);
        double den = lp_norm(au, 1.0, NormRegion::Halfspace);
        if (den == 0) throw std::domain_error("sobolev_ratio_experiment: A u vanishes on the grid");
        return num / den;
    };

    SobolevRatioResult out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        double r = ratio_of(fields[i]);
        out.curve.abscissae.push_back(static_cast<double>(i + 1));
        out.curve.ordinates.push_back(r);
        out.max_ratio = std::max(out.max_ratio, r);
    }
    out.curve.fit = out.curve.ordinates.size() >= 3
                        ? fit_curve(out.curve.abscissae, out.curve.ordinates, "power")
                        : FitResult{"power", 0, 0, 1};

    // dilation invariance: u_2(x) = u(2x) on the halved box, same spacing
    const GridField& u0 = fields[0];
    std::vector<std::array<double, 2>> half_box;
    for (const auto& [lo, hi] : u0.box()) half_box.push_back({lo / 2, hi / 2});
    GridField u2(half_box, u0.h(), u0.components(), u0.boundary_axis());
    std::size_t d = u2.dim();
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    for (std::size_t flat = 0; flat < u2.point_count(); ++flat) {
        for (std::size_t j = 0; j < d; ++j) x[j] = 2.0 * (u2.box()[j][0] + u2.h() * idx[j]);
        for (std::size_t c = 0; c < u2.components(); ++c)
            u2.raw()[flat * u2.components() + c] = u0.interpolate(x, c);
        std::size_t j = d;
        while (j > 0) {
            --j;
            if (++idx[j] < u2.counts()[j]) break;
            idx[j] = 0;
        }
    }
    double r0 = ratio_of(u0), r2 = ratio_of(u2);
    out.dilation_spread = std::abs(r2 - r0) / r0;
    return out;
}

SobolevRatioResult sobolev_counterexample_experiment(const Operator& op, const Direction& nu,
                                                     const std::vector<double>& eps_list,
                                                     double h, const Budgets& budgets) {
    Verdict boundary = check_boundary_ellipticity(op, nu, budgets);
    if (!boundary.fails() || !boundary.witness)
        throw std::invalid_argument(
            "sobolev_counterexample_experiment: needs a boundary ellipticity witness");
    const Witness& w = *boundary.witness;
    std::vector<Cplx> eta(op.n());
    for (std::size_t j = 0; j < op.n(); ++j) eta[j] = Cplx(w.frequency[j].real(), 0);

    SobolevRatioResult out;
    double q = static_cast<double>(op.n()) / (static_cast<double>(op.n()) - 1.0);
    for (double eps : eps_list) {
        CounterexampleField field(op, nu, eta, w.kernel_vector, eps,
                                  CounterexampleVariant::Sobolev, budgets.witness_tol);
        double num = field.halfspace_lp(h, q, false);
        double den = field.halfspace_lp(h, 1.0, true);
        out.curve.abscissae.push_back(eps);
        out.curve.ordinates.push_back(num / den);
        out.max_ratio = std::max(out.max_ratio, num / den);
    }
    out.curve.fit = fit_curve(out.curve.abscissae, out.curve.ordinates, "log");
    return out;
}

RepresentationResult verify_representation(
    const std::function<double(const std::vector<double>&)>& u,
    const std::function<std::vector<double>(const std::vector<double>&)>& grad_u,
    const KernelProfile& profile, double h, double support_radius) {
    RepresentationResult out;
    double r0 = 2 * h;
    // angular moments for the polar treatment of the singular cell:
    // int_{|y|<r0} K_1(y)[j] dy = r0 * J_j
    double j1 = adaptive_simpson(
        [&](double a) { return -profile.phi(std::sin(a)) * std::cos(a); }, 0, 2 * M_PI, 1e-12);
    double j2 = adaptive_simpson(
        [&](double a) { return -profile.phi(std::sin(a)) * std::sin(a); }, 0, 2 * M_PI, 1e-12);

    double ymax = support_radius + 1.0;
    long long half = static_cast<long long>(std::ceil(ymax / h));
    double umax = 0;
    for (double px : {-0.4, -0.2, 0.0, 0.2, 0.4})
        for (double py : {-0.4, -0.2, 0.0, 0.2, 0.4})
            umax = std::max(umax, std::abs(u({px, py})));
    if (umax == 0) umax = 1;

    for (double px : {-0.4, -0.2, 0.0, 0.2, 0.4}) {
        for (double py : {-0.4, -0.2, 0.0, 0.2, 0.4}) {
            std::vector<double> x = {px, py};
            double acc = 0;
            for (long long iy = 1; iy <= half; ++iy) {     // cone support: y_2 > 0
                double y2 = iy * h;
                for (long long ix = -half; ix <= half; ++ix) {
                    double y1 = ix * h;
                    double r = std::sqrt(y1 * y1 + y2 * y2);
                    if (r <= r0 || y2 <= 0.5 * r) continue;
                    std::vector<double> xy = {x[0] + y1, x[1] + y2};
                    if (xy[0] * xy[0] + xy[1] * xy[1] > support_radius * support_radius)
                        continue;
                    std::vector<double> g = grad_u(xy);
                    double k1 = sobolev_kernel(2, 1, profile, {y1, y2}, {0});
                    double k2 = sobolev_kernel(2, 1, profile, {y1, y2}, {1});
                    acc += (k1 * g[0] + k2 * g[1]) * h * h;
                }
            }
            std::vector<double> g0 = grad_u(x);
            acc += r0 * (j1 * g0[0] + j2 * g0[1]);
            double err = std::abs(acc - u(x)) / umax;
            out.probe_errors.push_back(err);
            out.max_rel_error = std::max(out.max_rel_error, err);
        }
    }
    return out;
}

KernelDecayResult kernel_decay_check(const std::function<double(double)>& kernel_line,
                                     std::size_t n, double s) {
    if (n != 2) throw std::invalid_argument("kernel_decay_check: implemented for n = 2");
    KernelDecayResult out;
    std::vector<double> rs, vals;
    const double floor_val = 1e-280;
    bool any = false;
    for (int i = 0; i <= 24; ++i) {
        double r = 4.0 * std::pow(64.0 / 4.0, i / 24.0);
        double v = std::max(std::abs(kernel_line(r)), std::abs(kernel_line(-r)));
        rs.push_back(r);
        vals.push_back(v);
        if (v > floor_val) any = true;
    }
    if (!any) {
        out.fitted_exponent = -std::numeric_limits<double>::infinity();
        out.below_floor = true;
    } else {
        FitResult fit = fit_curve(rs, vals, "power");
        out.fitted_exponent = fit.slope;
    }
    // shell L1 quadratures over |y'| in [R, 2R]
    for (double R = 1; R <= 64; R *= 2) {
        auto f = [&](double t) { return std::abs(kernel_line(t)) + std::abs(kernel_line(-t)); };
        out.shell_l1.push_back(adaptive_simpson(f, R, 2 * R, 1e-12));
    }
    if (s > 1) {
        // Besov stabilization of the line restriction under domain growth
        double prev = 0;
        for (double T : {4.0, 8.0, 16.0}) {
            double hh = 1.0 / 32;
            GridField line({{-T, T}}, hh, 1);
            for (std::size_t i = 0; i < line.counts()[0]; ++i)
                line.at({i}, 0) = kernel_line(-T + hh * static_cast<double>(i));
            double b = besov_seminorm(line, s - 1, static_cast<unsigned>(std::floor(s)) + 1).value;
            out.besov_tail.push_back(std::abs(b - prev));
            prev = b;
        }
    }
    return out;
}

double epsD_null_residual(double h) {
    auto f = [](const std::vector<double>& x, std::vector<Cplx>& o) {
        double r2 = x[0] * x[0] + x[1] * x[1];
        if (r2 < 0.15 * 0.15) {
            o[0] = o[1] = 0;
            return;
        }
        o[0] = x[0] / r2;
        o[1] = -x[1] / r2;
    };
    GridField u = sample_field(f, {{-2, 2}, {-2, 2}}, h, 2, 0);
    GridField d = apply_operator_fd(catalog("dev_symmetric_gradient", {.n = 2}), u,
                                    FdScheme::Central);
    double worst = 0;
    std::size_t d0 = d.counts()[0], d1 = d.counts()[1];
    for (std::size_t i = 1; i + 1 < d0; ++i)
        for (std::size_t j = 1; j + 1 < d1; ++j) {
            double x0 = d.box()[0][0] + h * static_cast<double>(i);
            double x1 = d.box()[1][0] + h * static_cast<double>(j);
            if (x0 * x0 + x1 * x1 < (0.25 + 2 * h) * (0.25 + 2 * h)) continue;
            double mag = 0;
            for (std::size_t c = 0; c < d.components(); ++c)
                mag += std::norm(d.at({i, j}, c));
            worst = std::max(worst, std::sqrt(mag));
        }
    return worst;
}

ExperimentCurve epsD_truncation_face_growth(const std::vector<double>& radii, double face_h) {
    ExperimentCurve out;
    static const Smoothstep ss(3);
    for (double R : radii) {
        double acc = 0;
        long long half = static_cast<long long>(std::ceil(2 * R / face_h));
        for (long long i = -half; i <= half; ++i) {
            double t = i * face_h;
            double a = std::abs(t);
            if (a < 0.25) continue; // the annulus grid removes the ball of radius 1/4
            double eta = a <= R ? 1.0 : (a >= 2 * R ? 0.0 : ss.value(0, (2 * R - a) / R));
            acc += eta / a * face_h;
        }
        out.abscissae.push_back(R);
        out.ordinates.push_back(acc);
    }
    // face norm ~ 2 log R: fit the ordinate against log R
    std::vector<double> inv;
    for (double R : radii) inv.push_back(1.0 / R);
    out.fit = fit_curve(inv, out.ordinates, "log"); // log(1/(1/R)) = log R
    return out;
}

} // namespace ellip
