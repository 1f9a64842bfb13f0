#include "ellip/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "ellip/catalog.hpp"
#include "ellip/parse.hpp"

namespace ellip {

namespace {

double cplx_vec_norm(const std::vector<Cplx>& v) {
    double s = 0;
    for (const Cplx& c : v) s += std::norm(c);
    return std::sqrt(s);
}

// residual normalization |coefficients| (1 + |zeta|)^k
double residual_scale(const Operator& op, double freq_norm) {
    return op.coefficient_norm() * std::pow(1.0 + freq_norm, static_cast<double>(op.k()));
}

std::vector<Rational> zero_rational(std::size_t n) { return std::vector<Rational>(n); }

} // namespace

// ---------------------------------------------------------------------------
// witness refinement: descent on sigma_min^2, Gauss-Newton polish, then an
// exact rational kernel solve at rounded frequencies
// ---------------------------------------------------------------------------

namespace {

struct Refiner {
    const Operator& op;
    const CompiledSymbol& sym;
    // when complexified, nu holds the exact imaginary part of the frequency
    const std::vector<Rational>* nu;
    const Budgets& budgets;

    double sigma_at(const std::vector<double>& x) const {
        return sigma_min_pair(sym.eval(x), sym.rows(), sym.cols()).sigma;
    }

    // gradient of lambda_min(A^H A) via the smallest eigenpair
    std::vector<double> grad(const std::vector<double>& x, const SigmaMinPair& p) const {
        std::size_t n = sym.nvars();
        std::vector<double> g(n, 0.0);
        std::vector<Cplx> a = sym.eval(x);
        for (std::size_t axis = 0; axis < n; ++axis) {
            std::vector<Cplx> da = sym.eval_derivative(x, axis);
            // d lambda = 2 Re <A v, dA v>
            Cplx acc(0, 0);
            for (std::size_t r = 0; r < sym.rows(); ++r) {
                Cplx av(0, 0), dav(0, 0);
                for (std::size_t c = 0; c < sym.cols(); ++c) {
                    av += a[r * sym.cols() + c] * p.v[c];
                    dav += da[r * sym.cols() + c] * p.v[c];
                }
                acc += std::conj(av) * dav;
            }
            g[axis] = 2 * acc.real();
        }
        return g;
    }

    // Gauss-Newton on F(x) = A(x) v with v refreshed per step
    void polish(std::vector<double>& x) const {
        std::size_t n = sym.nvars(), rows = sym.rows(), cols = sym.cols();
        for (int it = 0; it < 12; ++it) {
            std::vector<Cplx> a = sym.eval(x);
            SigmaMinPair p = sigma_min_pair(a, rows, cols);
            if (p.sigma < 1e-14) return;
            std::vector<Cplx> f(rows, Cplx(0, 0));
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c) f[r] += a[r * cols + c] * p.v[c];
            // real normal equations for the step
            std::vector<double> jtj(n * n, 0.0), jtf(n, 0.0);
            std::vector<std::vector<Cplx>> jcols(n);
            for (std::size_t axis = 0; axis < n; ++axis) {
                std::vector<Cplx> da = sym.eval_derivative(x, axis);
                std::vector<Cplx> col(rows, Cplx(0, 0));
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t c = 0; c < cols; ++c)
                        col[r] += da[r * cols + c] * p.v[c];
                jcols[axis] = std::move(col);
            }
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    double s = 0;
                    for (std::size_t r = 0; r < rows; ++r)
                        s += (std::conj(jcols[i][r]) * jcols[j][r]).real();
                    jtj[i * n + j] = s;
                }
                double s = 0;
                for (std::size_t r = 0; r < rows; ++r)
                    s += (std::conj(jcols[i][r]) * f[r]).real();
                jtf[i] = s;
            }
            for (std::size_t i = 0; i < n; ++i) jtj[i * n + i] += 1e-12;
            // solve the tiny SPD system by Gaussian elimination
            std::vector<double> step(jtf);
            for (std::size_t c = 0; c < n; ++c) {
                std::size_t piv = c;
                for (std::size_t r = c + 1; r < n; ++r)
                    if (std::abs(jtj[r * n + c]) > std::abs(jtj[piv * n + c])) piv = r;
                if (std::abs(jtj[piv * n + c]) < 1e-300) return;
                if (piv != c) {
                    for (std::size_t j = 0; j < n; ++j) std::swap(jtj[c * n + j], jtj[piv * n + j]);
                    std::swap(step[c], step[piv]);
                }
                for (std::size_t r = c + 1; r < n; ++r) {
                    double f2 = jtj[r * n + c] / jtj[c * n + c];
                    for (std::size_t j = c; j < n; ++j) jtj[r * n + j] -= f2 * jtj[c * n + j];
                    step[r] -= f2 * step[c];
                }
            }
            for (std::size_t c = n; c-- > 0;) {
                for (std::size_t j = c + 1; j < n; ++j) step[c] -= jtj[c * n + j] * step[j];
                step[c] /= jtj[c * n + c];
            }
            double before = p.sigma;
            std::vector<double> xn = x;
            for (std::size_t i = 0; i < n; ++i) xn[i] -= step[i];
            if (sigma_at(xn) < before) x = std::move(xn);
            else return;
        }
    }

    // descent + polish + exact solve; returns a witness if one verifies
    std::optional<Witness> refine(std::vector<double> x) const {
        double fx = sigma_at(x);
        double eta = 0.25;
        for (int it = 0; it < budgets.descent_steps; ++it) {
            SigmaMinPair p = sigma_min_pair(sym.eval(x), sym.rows(), sym.cols());
            std::vector<double> g = grad(x, p);
            double gn = 0;
            for (double v : g) gn += v * v;
            gn = std::sqrt(gn);
            if (gn < 1e-16) break;
            bool improved = false;
            for (int bt = 0; bt < 20; ++bt) {
                std::vector<double> xn = x;
                for (std::size_t i = 0; i < x.size(); ++i) xn[i] -= eta * g[i] / gn;
                double fn = sigma_at(xn);
                if (fn < fx) {
                    x = std::move(xn);
                    fx = fn;
                    improved = true;
                    eta *= 1.3;
                    break;
                }
                eta *= 0.5;
            }
            if (!improved) break;
        }
        polish(x);

        // exact kernel solve at nearby rational frequencies
        for (std::uint64_t max_den : {1ull, 4ull, 16ull, 256ull, 65536ull, 1ull << 24}) {
            std::vector<Rational> xr(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) xr[i] = rational_approx(x[i], max_den);
            GMat a = nu ? op.symbol_at_complexified(xr, *nu) : op.symbol_at(xr);
            bool all_zero_freq = true;
            for (const auto& r : xr)
                if (!r.is_zero()) all_zero_freq = false;
            if (all_zero_freq && !nu) continue; // xi = 0 is not a valid real witness
            RankKernel rk = exact_rank_kernel(a);
            if (!rk.kernel_basis.empty()) {
                Witness w;
                w.exact = true;
                w.residual = 0;
                for (std::size_t i = 0; i < xr.size(); ++i) {
                    Rational im = nu ? (*nu)[i] : Rational(0);
                    w.frequency_exact.emplace_back(xr[i], im);
                    w.frequency.push_back(w.frequency_exact.back().to_complex());
                }
                w.kernel_exact = rk.kernel_basis[0];
                for (const auto& g : w.kernel_exact) w.kernel_vector.push_back(g.to_complex());
                double kn = cplx_vec_norm(w.kernel_vector);
                for (auto& c : w.kernel_vector) c /= kn;
                return w;
            }
        }

        // float witness, verified against the residual tolerance
        SigmaMinPair p = sigma_min_pair(sym.eval(x), sym.rows(), sym.cols());
        std::vector<Cplx> freq(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            freq[i] = Cplx(x[i], nu ? (*nu)[i].to_double() : 0.0);
        double scale = residual_scale(op, cplx_vec_norm(freq));
        double residual = p.sigma / scale;
        if (residual <= budgets.witness_tol) {
            Witness w;
            w.frequency = std::move(freq);
            w.kernel_vector = p.v;
            w.residual = residual;
            return w;
        }
        return std::nullopt;
    }
};

BnBOutcome branch_and_bound(const CompiledSymbol& sym, std::vector<Box> boxes,
                            const Refiner& refiner, std::optional<Witness>& witness_out,
                            std::size_t budget, double coeff_scale) {
    BnBOutcome out{BnBOutcome::Status::BudgetExhausted, 0, 0, {}, 0};
    double certified = std::numeric_limits<double>::infinity();
    double ub = std::numeric_limits<double>::infinity();
    std::vector<double> best_point;
    double last_witness_attempt_ub = std::numeric_limits<double>::infinity();
    std::deque<Box> queue(boxes.begin(), boxes.end());
    // relative gap: a box retires once its bound reaches rel_gap * incumbent
    const double rel_gap = 0.8;

    std::vector<Box> wave;
    while (!queue.empty() && out.boxes_explored < budget) {
        wave.clear();
        while (!queue.empty()) {
            wave.push_back(std::move(queue.front()));
            queue.pop_front();
        }
        for (const Box& box : wave) {
            if (out.boxes_explored >= budget) {
                queue.push_back(box);
                continue;
            }
            ++out.boxes_explored;
            std::vector<double> c = box.center();
            SigmaMinPair p = sigma_min_pair(sym.eval(c), sym.rows(), sym.cols());
            if (p.sigma < ub || (p.sigma == ub && c < best_point)) {
                ub = p.sigma;
                best_point = c;
            }
            double bound = p.sigma - box.half_diagonal() * sym.lipschitz_frobenius(box);
            if (bound > 0 && bound >= rel_gap * ub) {
                certified = std::min(certified, bound);
                continue;
            }
            std::size_t axis = box.longest_axis();
            double mid = 0.5 * (box.lo[axis] + box.hi[axis]);
            Box lo_child = box, hi_child = box;
            lo_child.hi[axis] = mid;
            hi_child.lo[axis] = mid;
            queue.push_back(std::move(lo_child));
            queue.push_back(std::move(hi_child));
        }
        // wave boundary: attempt a witness when the incumbent looks like a zero
        if (ub < 0.05 * coeff_scale && ub < 0.75 * last_witness_attempt_ub) {
            last_witness_attempt_ub = ub;
            witness_out = refiner.refine(best_point);
            if (witness_out) {
                out.status = BnBOutcome::Status::WitnessFound;
                out.best_sigma = ub;
                out.best_point = best_point;
                return out;
            }
        }
    }
    out.best_sigma = ub;
    out.best_point = best_point;
    if (queue.empty()) {
        out.status = BnBOutcome::Status::Certified;
        out.lower_bound = certified;
    } else if (ub < 0.05 * coeff_scale) {
        // last resort before reporting budget exhaustion
        witness_out = refiner.refine(best_point);
        if (witness_out) out.status = BnBOutcome::Status::WitnessFound;
    }
    return out;
}

// shell {1/2 <= |xi|_inf <= 1} as a union of side-1/2 boxes
std::vector<Box> shell_boxes(std::size_t n) {
    std::vector<Box> out;
    std::vector<int> idx(n, 0);
    while (true) {
        bool inner = true;
        for (std::size_t j = 0; j < n; ++j)
            if (idx[j] == 0 || idx[j] == 3) inner = false;
        if (!inner) {
            Box b;
            b.lo.resize(n);
            b.hi.resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                b.lo[j] = -1.0 + 0.5 * idx[j];
                b.hi[j] = b.lo[j] + 0.5;
            }
            out.push_back(std::move(b));
        }
        std::size_t j = 0;
        while (j < n && ++idx[j] == 4) idx[j++] = 0;
        if (j == n) break;
    }
    return out;
}

} // namespace

Verdict check_real_ellipticity(const Operator& op, const Budgets& budgets) {
    CompiledSymbol sym(symbol_matrix(op));
    Refiner refiner{op, sym, nullptr, budgets};
    std::optional<Witness> witness;
    BnBOutcome bb = branch_and_bound(sym, shell_boxes(op.n()), refiner, witness,
                                     budgets.boxes, op.coefficient_norm());
    Verdict v;
    v.boxes_used = bb.boxes_explored;
    switch (bb.status) {
    case BnBOutcome::Status::Certified: {
        v.status = Verdict::Status::Holds;
        Certificate c;
        c.kind = Certificate::Kind::SphereMin;
        c.lower_bound = bb.lower_bound;
        c.boxes_explored = bb.boxes_explored;
        v.certificate = std::move(c);
        break;
    }
    case BnBOutcome::Status::WitnessFound:
        v.status = Verdict::Status::Fails;
        v.witness = std::move(witness);
        break;
    case BnBOutcome::Status::BudgetExhausted:
        v.status = Verdict::Status::Inconclusive;
        v.note = "box budget exhausted";
        break;
    }
    return v;
}

double boundary_radius_bound(const Operator& op, const Direction& nu, double m0) {
    if (!(m0 > 0)) throw std::invalid_argument("boundary_radius_bound: m0 must be positive");
    double B = 0;
    for (const auto& [alpha, mat] : op.terms()) {
        double prod = 1;
        for (std::size_t j = 0; j < op.n(); ++j) {
            double nj = std::abs(nu.components()[j].to_double());
            for (unsigned p = 0; p < alpha[j]; ++p) prod *= 1.0 + nj;
        }
        B += mat.frobenius() * (prod - 1.0);
    }
    double k = static_cast<double>(op.k());
    // smallest R >= 1 with m0 R^k >= B (1+R)^{k-1} + m0
    auto gap = [&](double r) {
        return m0 * std::pow(r, k) - B * std::pow(1.0 + r, k - 1) - m0;
    };
    double hi = 1.0;
    while (gap(hi) < 0 && hi < 1e12) hi *= 2;
    double lo = hi > 1.0 ? hi / 2 : 1.0;
    if (gap(lo) >= 0) return lo;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (gap(mid) >= 0 ? hi : lo) = mid;
    }
    return hi;
}

namespace {

Verdict boundary_check_with_real(const Operator& op, const Direction& nu,
                                 const Verdict& real_verdict, const Budgets& budgets) {
    CompiledSymbol sym(symbol_matrix_complexified(op, nu));
    std::vector<Rational> nu_comps = nu.components();
    Refiner refiner{op, sym, &nu_comps, budgets};

    double radius;
    bool certifiable = real_verdict.holds() && real_verdict.certificate;
    if (certifiable) {
        radius = boundary_radius_bound(op, nu, real_verdict.certificate->lower_bound);
    } else {
        radius = 8; // witness search only; Holds is out of reach without m0
    }
    Box ball;
    ball.lo.assign(op.n(), -radius);
    ball.hi.assign(op.n(), radius);
    // split once per axis so the first wave sees 2^n boxes
    std::vector<Box> boxes{ball};
    for (std::size_t axis = 0; axis < op.n(); ++axis) {
        std::vector<Box> next;
        for (const Box& b : boxes) {
            double mid = 0.5 * (b.lo[axis] + b.hi[axis]);
            Box l = b, h = b;
            l.hi[axis] = mid;
            h.lo[axis] = mid;
            next.push_back(std::move(l));
            next.push_back(std::move(h));
        }
        boxes = std::move(next);
    }

    std::optional<Witness> witness;
    BnBOutcome bb = branch_and_bound(sym, std::move(boxes), refiner, witness,
                                     budgets.boxes, op.coefficient_norm());
    Verdict v;
    v.boxes_used = bb.boxes_explored;
    switch (bb.status) {
    case BnBOutcome::Status::Certified: {
        if (!certifiable) {
            // cannot happen: without m0 the ball is not exhaustive evidence
            v.status = Verdict::Status::Inconclusive;
            v.note = "no ellipticity constant; search region not exhaustive";
            break;
        }
        v.status = Verdict::Status::Holds;
        Certificate c;
        c.kind = Certificate::Kind::BallMin;
        c.radius = radius;
        c.lower_bound = bb.lower_bound;
        c.boxes_explored = bb.boxes_explored;
        v.certificate = std::move(c);
        break;
    }
    case BnBOutcome::Status::WitnessFound:
        v.status = Verdict::Status::Fails;
        v.witness = std::move(witness);
        break;
    case BnBOutcome::Status::BudgetExhausted:
        v.status = Verdict::Status::Inconclusive;
        v.note = "box budget exhausted";
        break;
    }
    return v;
}

} // namespace

Verdict check_boundary_ellipticity(const Operator& op, const Direction& nu,
                                   const Budgets& budgets) {
    if (nu.dim() != op.n())
        throw std::invalid_argument("check_boundary_ellipticity: direction dimension");
    Verdict real_verdict = check_real_ellipticity(op, budgets);
    return boundary_check_with_real(op, nu, real_verdict, budgets);
}

NormalizedComplexDirection normalize_complex_direction(
    const std::vector<Rational>& xi1, const std::vector<Rational>& xi2,
    const std::vector<Rational>* nu_target) {
    std::size_t n = xi1.size();
    if (xi2.size() != n) throw std::invalid_argument("normalize_complex_direction: dimensions");
    GMat pair(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        pair(i, 0) = GaussianRational(xi1[i]);
        pair(i, 1) = GaussianRational(xi2[i]);
    }
    if (exact_rank_kernel(pair).rank != 2)
        throw std::invalid_argument("normalize_complex_direction: inputs linearly dependent");

    // lambda = a + ib with b xi1 + a xi2 = nu; then lambda (xi1 + i xi2) = xi + i nu
    GMat sys(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        sys(i, 0) = GaussianRational(xi2[i]); // coefficient of a
        sys(i, 1) = GaussianRational(xi1[i]); // coefficient of b
    }
    auto try_target = [&](const std::vector<Rational>& target)
        -> std::optional<NormalizedComplexDirection> {
        GVec rhs;
        rhs.reserve(n);
        for (const auto& r : target) rhs.emplace_back(r);
        auto sol = solve_linear(sys, rhs);
        if (!sol) return std::nullopt;
        Rational a = sol->at(0).re(), b = sol->at(1).re();
        if (a.is_zero() && b.is_zero()) return std::nullopt;
        NormalizedComplexDirection out;
        out.lambda = GaussianRational(a, b);
        out.nu = target;
        out.xi.resize(n);
        for (std::size_t i = 0; i < n; ++i) out.xi[i] = a * xi1[i] - b * xi2[i];
        return out;
    };

    if (nu_target) {
        if (nu_target->size() != n)
            throw std::invalid_argument("normalize_complex_direction: target dimension");
        auto r = try_target(*nu_target);
        if (!r) throw std::invalid_argument("normalize_complex_direction: target not in span");
        return *r;
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Rational> ej = zero_rational(n);
        ej[j] = Rational(1);
        if (auto r = try_target(ej)) return *r;
    }
    // no coordinate vector in the span: fall back to xi2 itself (lambda = 1)
    auto r = try_target(xi2);
    if (!r) throw std::logic_error("normalize_complex_direction: unreachable");
    return *r;
}

std::vector<Direction> direction_schedule(std::size_t n, std::size_t count) {
    std::vector<Direction> out;
    for (std::size_t j = 0; j < n && out.size() < count; ++j) {
        std::vector<Rational> e = zero_rational(n);
        e[j] = Rational(1);
        out.emplace_back(std::move(e));
    }
    // stereographic images of a rational van der Corput sequence; the points
    // are exactly unit vectors
    static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    auto vdc = [](std::size_t idx, unsigned base) {
        Rational r(0);
        Rational scale(1, base);
        ++idx;
        while (idx > 0) {
            r += scale * Rational(static_cast<long long>(idx % base));
            scale *= Rational(1, base);
            idx /= base;
        }
        return r;
    };
    for (std::size_t s = 0; out.size() < count; ++s) {
        std::vector<Rational> t(n - 1);
        Rational norm2(0);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            t[j] = Rational(3) * (vdc(s, primes[j % 8]) - Rational(1, 2));
            norm2 += t[j] * t[j];
        }
        std::vector<Rational> nu(n);
        Rational denom = norm2 + Rational(1);
        for (std::size_t j = 0; j + 1 < n; ++j) nu[j] = Rational(2) * t[j] / denom;
        nu[n - 1] = (norm2 - Rational(1)) / denom;
        out.emplace_back(std::move(nu));
    }
    return out;
}

namespace {

// root of a univariate complex polynomial (ascending coefficients),
// Durand-Kerner with a deterministic start
std::vector<Cplx> poly_roots(std::vector<Cplx> coeffs) {
    while (!coeffs.empty() && std::abs(coeffs.back()) < 1e-300) coeffs.pop_back();
    if (coeffs.size() < 2) return {};
    std::size_t deg = coeffs.size() - 1;
    for (auto& c : coeffs) c /= coeffs.back();
    std::vector<Cplx> z(deg);
    Cplx seed(0.4, 0.9);
    z[0] = seed;
    for (std::size_t i = 1; i < deg; ++i) z[i] = z[i - 1] * seed;
    auto peval = [&](Cplx x) {
        Cplx acc(0, 0);
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
        return acc;
    };
    for (int it = 0; it < 200; ++it) {
        double moved = 0;
        for (std::size_t i = 0; i < deg; ++i) {
            Cplx denom(1, 0);
            for (std::size_t j = 0; j < deg; ++j)
                if (j != i) denom *= z[i] - z[j];
            Cplx delta = peval(z[i]) / denom;
            z[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    return z;
}

// scalar symbol shortcut: a homogeneous polynomial in >= 2 complex variables
// always has a nontrivial zero, found along the pencil z e1 + e2
std::optional<Witness> scalar_c_witness(const Operator& op, const Budgets& budgets) {
    PolyMatrix sym = symbol_matrix(op);
    const MultiPoly& poly = sym(0, 0);
    std::size_t n = op.n();

    std::vector<Rational> e1 = zero_rational(n);
    e1[0] = Rational(1);
    GMat at_e1 = op.symbol_at(e1);
    Witness w;
    if (at_e1(0, 0).is_zero()) {
        w.exact = true;
        w.residual = 0;
        for (std::size_t i = 0; i < n; ++i) w.frequency_exact.emplace_back(e1[i]);
        w.kernel_exact = {GaussianRational(1)};
    } else {
        // q(z) = A(z e1 + e2), degree exactly k
        std::vector<Cplx> coeffs(op.k() + 1, Cplx(0, 0));
        for (const auto& [e, c] : poly.terms()) {
            bool pencil = true;
            for (std::size_t j = 2; j < n; ++j)
                if (e[j] != 0) pencil = false;
            if (!pencil) continue;
            coeffs[e[0]] += c.to_complex();
        }
        std::vector<Cplx> roots = poly_roots(coeffs);
        if (roots.empty()) return std::nullopt;
        Cplx z0 = roots.front();
        for (const Cplx& r : roots)
            if (std::abs(r) < std::abs(z0)) z0 = r;
        // exact verification at a rounded Gaussian rational
        for (std::uint64_t max_den : {16ull, 65536ull, 1ull << 30}) {
            GaussianRational zr(rational_approx(z0.real(), max_den),
                                rational_approx(z0.imag(), max_den));
            std::vector<GaussianRational> zeta(n, GaussianRational(0));
            zeta[0] = zr;
            zeta[1] = GaussianRational(1);
            if (poly.eval_exact(zeta).is_zero()) {
                w.exact = true;
                w.residual = 0;
                w.frequency_exact = zeta;
                w.kernel_exact = {GaussianRational(1)};
                break;
            }
        }
        if (!w.exact) {
            std::vector<Cplx> zeta(n, Cplx(0, 0));
            zeta[0] = z0;
            zeta[1] = Cplx(1, 0);
            double scale = residual_scale(op, cplx_vec_norm(zeta));
            double res = std::abs(poly.eval(zeta)) / scale;
            if (res > budgets.witness_tol) return std::nullopt;
            w.frequency = zeta;
            w.kernel_vector = {Cplx(1, 0)};
            w.residual = res;
            return w;
        }
    }
    for (const auto& g : w.frequency_exact) w.frequency.push_back(g.to_complex());
    w.kernel_vector = {Cplx(1, 0)};
    return w;
}

} // namespace

Verdict check_C_ellipticity(const Operator& op, const Budgets& budgets) {
    Verdict v;
    if (op.dim_w() == 1 && op.dim_v() == 1 && op.n() >= 2) {
        auto w = scalar_c_witness(op, budgets);
        if (w) {
            v.status = Verdict::Status::Fails;
            v.witness = std::move(w);
            v.note = "scalar symbol: zero located along a pencil";
            return v;
        }
        v.status = Verdict::Status::Inconclusive;
        v.note = "scalar pencil root did not verify";
        return v;
    }

    Verdict real_verdict = check_real_ellipticity(op, budgets);
    if (real_verdict.fails()) {
        // a real kernel frequency is also a complex one
        v.status = Verdict::Status::Fails;
        v.witness = real_verdict.witness;
        v.note = "real kernel frequency reused";
        return v;
    }

    // each sampled boundary run is a check of its own and gets the full box
    // budget; failing directions exit the loop immediately
    Budgets per_direction = budgets;
    std::vector<Direction> dirs = direction_schedule(op.n(), budgets.direction_samples);
    std::size_t held = 0;
    bool any_inconclusive = false;
    for (const Direction& nu : dirs) {
        Verdict b = boundary_check_with_real(op, nu, real_verdict, per_direction);
        if (b.fails()) {
            v.status = Verdict::Status::Fails;
            v.witness = b.witness;
            v.note = "boundary ellipticity fails along " + nu.str();
            return v;
        }
        if (b.holds()) ++held;
        else any_inconclusive = true;
    }
    if (!real_verdict.holds() || any_inconclusive) {
        v.status = Verdict::Status::Inconclusive;
        v.note = real_verdict.holds() ? "some sampled directions inconclusive"
                                      : "real ellipticity undecided";
        return v;
    }
    v.status = Verdict::Status::HoldsSampled;
    v.note = "sampled over " + std::to_string(held) + " directions";
    return v;
}

Verdict check_cancellation(const Operator& op, const Budgets& budgets) {
    Verdict real_verdict = check_real_ellipticity(op, budgets);
    Verdict v;
    if (!real_verdict.holds()) {
        v.status = Verdict::Status::Inconclusive;
        v.note = "cancellation test requires the R-ellipticity certificate";
        return v;
    }

    std::size_t stable_needed = 3 * op.n();
    std::vector<Direction> schedule = direction_schedule(op.n(), 16 + 8 * op.n());
    std::vector<Direction> used;
    std::optional<Subspace> inter;
    std::size_t stable_run = 0;
    std::size_t cursor = 0;
    PolyMatrix sym = symbol_matrix(op);

    auto image_at = [&](const Direction& d) {
        GMat a = op.symbol_at(d.components());
        return Subspace::span_of_columns(a);
    };

    for (int round = 0; round < 200; ++round) {
        Direction d = cursor < schedule.size() ? schedule[cursor]
                                               : direction_schedule(op.n(), cursor + 1).back();
        ++cursor;
        Subspace img = image_at(d);
        std::size_t before = inter ? inter->dim() : op.dim_w();
        inter = inter ? subspace_intersection({*inter, img}) : img;
        used.push_back(d);
        if (inter->dim() == 0) {
            v.status = Verdict::Status::Holds;
            Certificate c;
            c.kind = Certificate::Kind::CancellationDirections;
            c.directions = used;
            v.certificate = std::move(c);
            return v;
        }
        stable_run = inter->dim() == before ? stable_run + 1 : 0;
        if (stable_run < stable_needed) continue;

        // stabilized at d > 0: try to certify non-cancellation for a basis vector
        GVec w_exact = inter->basis()[0];
        std::vector<Rational> w(op.dim_w());
        for (std::size_t i = 0; i < op.dim_w(); ++i) w[i] = w_exact[i].re();

        PolyMatrix aug(op.dim_w(), op.dim_v() + 1, op.n());
        for (std::size_t i = 0; i < op.dim_w(); ++i) {
            for (std::size_t j = 0; j < op.dim_v(); ++j) aug(i, j) = sym(i, j);
            aug(i, op.dim_v()) = MultiPoly::constant(op.n(), w_exact[i]);
        }
        std::vector<MultiPoly> minors;
        bool all_zero = true;
        MultiPoly offending(op.n());
        if (op.dim_w() >= op.dim_v() + 1) {
            auto rows_sets = index_subsets(op.dim_w(), op.dim_v() + 1);
            std::vector<std::size_t> cols(op.dim_v() + 1);
            for (std::size_t j = 0; j <= op.dim_v(); ++j) cols[j] = j;
            for (const auto& rows : rows_sets) {
                MultiPoly d2 = aug.minor_det(rows, cols);
                if (!d2.is_zero()) {
                    all_zero = false;
                    offending = d2;
                    break;
                }
                minors.push_back(std::move(d2));
            }
        }
        if (all_zero) {
            // rank [A(xi) | w] = dim_v = rank A(xi) on xi != 0, so w lies in
            // every image and the intersection cannot shrink to zero
            v.status = Verdict::Status::Fails;
            Certificate c;
            c.kind = Certificate::Kind::NoncancellationIdentity;
            c.identity_minors = std::move(minors);
            c.noncancel_w = std::move(w);
            v.certificate = std::move(c);
            return v;
        }
        // find a rational frequency where the offending minor is nonzero and
        // keep intersecting there
        bool found = false;
        for (std::size_t probe = cursor; probe < cursor + 64 && !found; ++probe) {
            Direction d3 = direction_schedule(op.n(), probe + 1).back();
            if (!eval_at_rational(offending, d3.components()).is_zero()) {
                schedule.push_back(d3);
                cursor = schedule.size() - 1;
                found = true;
            }
        }
        stable_run = 0;
    }
    v.status = Verdict::Status::Inconclusive;
    v.note = "image intersection did not stabilize";
    return v;
}

double witness_residual(const Operator& op, const Witness& w) {
    // direct symbol evaluation, independent of the search path
    std::size_t n = op.n();
    std::vector<Cplx> av(op.dim_w(), Cplx(0, 0));
    for (const auto& [alpha, mat] : op.terms()) {
        Cplx mono(1, 0);
        for (std::size_t j = 0; j < n; ++j)
            for (unsigned p = 0; p < alpha[j]; ++p) mono *= w.frequency[j];
        for (std::size_t i = 0; i < op.dim_w(); ++i)
            for (std::size_t j = 0; j < op.dim_v(); ++j)
                av[i] += mono * mat(i, j).to_double() * w.kernel_vector[j];
    }
    return cplx_vec_norm(av) / residual_scale(op, cplx_vec_norm(w.frequency));
}

TaxonomyReport classify(const Operator& op, const std::vector<Direction>& directions,
                        const Budgets& budgets) {
    TaxonomyReport rep;
    rep.real_elliptic = check_real_ellipticity(op, budgets);
    for (const Direction& nu : directions)
        rep.boundary_elliptic.emplace_back(nu,
                                           boundary_check_with_real(op, nu, rep.real_elliptic,
                                                                    budgets));
    rep.c_elliptic = check_C_ellipticity(op, budgets);
    rep.canceling = check_cancellation(op, budgets);

    rep.chain_consistent = true;
    if (rep.c_elliptic.holds()) {
        for (const auto& [nu, verdict] : rep.boundary_elliptic)
            if (verdict.fails()) {
                rep.chain_consistent = false;
                rep.diagnostic = "C-elliptic yet boundary ellipticity fails along " + nu.str();
            }
    }
    bool some_boundary_holds = false;
    for (const auto& [nu, verdict] : rep.boundary_elliptic)
        if (verdict.holds()) some_boundary_holds = true;
    // boundary + interior ellipticity force cancellation only in n >= 2;
    // on the line no operator cancels
    if (op.n() >= 2 && some_boundary_holds && rep.real_elliptic.holds() &&
        rep.canceling.fails()) {
        rep.chain_consistent = false;
        rep.diagnostic = "elliptic and boundary elliptic but not canceling";
    }
    if (op.n() == 1)
        rep.note = "n=1: boundary ellipticity trivially reduces to A(nu) != 0";
    return rep;
}

namespace {

nlohmann::json cvec_to_json(const std::vector<Cplx>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Cplx& c : v) arr.push_back({c.real(), c.imag()});
    return arr;
}

nlohmann::json witness_to_json(const Witness& w) {
    nlohmann::json j;
    j["frequency"] = cvec_to_json(w.frequency);
    j["kernel_vector"] = cvec_to_json(w.kernel_vector);
    j["residual"] = w.residual;
    j["exact"] = w.exact;
    if (!w.frequency_exact.empty()) {
        nlohmann::json fe = nlohmann::json::array();
        for (const auto& g : w.frequency_exact) fe.push_back(gaussian_to_json(g));
        j["frequency_exact"] = std::move(fe);
        nlohmann::json ke = nlohmann::json::array();
        for (const auto& g : w.kernel_exact) ke.push_back(gaussian_to_json(g));
        j["kernel_exact"] = std::move(ke);
    }
    return j;
}

nlohmann::json certificate_to_json(const Certificate& c) {
    nlohmann::json j;
    switch (c.kind) {
    case Certificate::Kind::SphereMin:
        j["kind"] = "sphere_min";
        j["lower_bound"] = c.lower_bound;
        j["boxes_explored"] = c.boxes_explored;
        break;
    case Certificate::Kind::BallMin:
        j["kind"] = "ball_min";
        j["radius"] = c.radius;
        j["lower_bound"] = c.lower_bound;
        j["boxes_explored"] = c.boxes_explored;
        break;
    case Certificate::Kind::CancellationDirections: {
        j["kind"] = "cancellation_directions";
        nlohmann::json dirs = nlohmann::json::array();
        for (const auto& d : c.directions) {
            nlohmann::json one = nlohmann::json::array();
            for (const auto& r : d.components()) one.push_back(r.str());
            dirs.push_back(std::move(one));
        }
        j["directions"] = std::move(dirs);
        break;
    }
    case Certificate::Kind::NoncancellationIdentity: {
        j["kind"] = "noncancellation_identity";
        j["identity_minor_count"] = c.identity_minors.size();
        nlohmann::json wv = nlohmann::json::array();
        for (const auto& r : c.noncancel_w) wv.push_back(r.str());
        j["persistent_image_vector"] = std::move(wv);
        break;
    }
    }
    return j;
}

nlohmann::json verdict_to_json(const Verdict& v) {
    nlohmann::json j;
    switch (v.status) {
    case Verdict::Status::Holds: j["status"] = "holds"; break;
    case Verdict::Status::HoldsSampled:
        j["status"] = "holds";
        j["sampled"] = true;
        break;
    case Verdict::Status::Fails: j["status"] = "fails"; break;
    case Verdict::Status::Inconclusive:
        j["status"] = "inconclusive";
        j["depth"] = v.boxes_used;
        break;
    }
    if (v.certificate) j["certificate"] = certificate_to_json(*v.certificate);
    if (v.witness) j["witness"] = witness_to_json(*v.witness);
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

} // namespace

nlohmann::json report_to_json(const TaxonomyReport& report, const Operator& op,
                              const Budgets& budgets) {
    nlohmann::json j;
    j["operator"] = operator_to_json(op);
    j["real_elliptic"] = verdict_to_json(report.real_elliptic);
    nlohmann::json boundary = nlohmann::json::array();
    for (const auto& [nu, verdict] : report.boundary_elliptic) {
        nlohmann::json b = verdict_to_json(verdict);
        nlohmann::json d = nlohmann::json::array();
        for (const auto& r : nu.components()) d.push_back(r.str());
        b["direction"] = std::move(d);
        boundary.push_back(std::move(b));
    }
    j["boundary_elliptic"] = std::move(boundary);
    j["c_elliptic"] = verdict_to_json(report.c_elliptic);
    j["canceling"] = verdict_to_json(report.canceling);
    j["chain_consistent"] = report.chain_consistent;
    if (!report.diagnostic.empty()) j["diagnostic"] = report.diagnostic;
    if (!report.note.empty()) j["note"] = report.note;
    j["defaults"] = {{"boxes", budgets.boxes},
                     {"witness_tol", budgets.witness_tol},
                     {"descent_steps", budgets.descent_steps},
                     {"direction_samples", budgets.direction_samples}};
    return j;
}

} // namespace ellip
