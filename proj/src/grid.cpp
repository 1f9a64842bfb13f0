#include "ellip/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ellip {

GridField::GridField(std::vector<std::array<double, 2>> box, double h, std::size_t components,
                     std::optional<std::size_t> boundary_axis)
    : box_(std::move(box)), h_(h), components_(components), boundary_axis_(boundary_axis) {
    if (h_ <= 0) throw std::invalid_argument("GridField: h must be positive");
    if (components_ == 0) throw std::invalid_argument("GridField: needs components");
    counts_.reserve(box_.size());
    for (const auto& [lo, hi] : box_) {
        if (hi <= lo) throw std::invalid_argument("GridField: empty box axis");
        double steps = (hi - lo) / h_;
        auto count = static_cast<std::size_t>(std::llround(steps)) + 1;
        if (std::abs(steps - std::round(steps)) > 1e-9)
            throw std::invalid_argument("GridField: box not aligned to spacing");
        counts_.push_back(count);
    }
    values_.assign(point_count() * components_, Cplx(0, 0));
    valid_lo.assign(box_.size(), 0);
    valid_hi.assign(box_.size(), 0);
}

std::size_t GridField::point_count() const {
    std::size_t n = 1;
    for (std::size_t c : counts_) n *= c;
    return n;
}

std::size_t GridField::flat_index(const std::vector<std::size_t>& idx) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < counts_.size(); ++j) flat = flat * counts_[j] + idx[j];
    return flat;
}

Cplx& GridField::at(const std::vector<std::size_t>& idx, std::size_t comp) {
    return values_[flat_index(idx) * components_ + comp];
}

const Cplx& GridField::at(const std::vector<std::size_t>& idx, std::size_t comp) const {
    return values_[flat_index(idx) * components_ + comp];
}

std::vector<double> GridField::point(const std::vector<std::size_t>& idx) const {
    std::vector<double> x(counts_.size());
    for (std::size_t j = 0; j < counts_.size(); ++j) x[j] = box_[j][0] + h_ * idx[j];
    return x;
}

Cplx GridField::interpolate(const std::vector<double>& x, std::size_t comp) const {
    std::size_t d = dim();
    std::vector<std::size_t> base(d);
    std::vector<double> frac(d);
    for (std::size_t j = 0; j < d; ++j) {
        double t = (x[j] - box_[j][0]) / h_;
        if (t < -1e-12 || t > counts_[j] - 1 + 1e-12) return Cplx(0, 0);
        t = std::min(std::max(t, 0.0), static_cast<double>(counts_[j] - 1));
        base[j] = counts_[j] >= 2
                      ? std::min(static_cast<std::size_t>(std::floor(t)), counts_[j] - 2)
                      : 0;
        frac[j] = t - static_cast<double>(base[j]);
    }
    Cplx acc(0, 0);
    std::size_t corners = std::size_t(1) << d;
    std::vector<std::size_t> idx(d);
    for (std::size_t c = 0; c < corners; ++c) {
        double w = 1;
        for (std::size_t j = 0; j < d; ++j) {
            bool hi = (c >> j) & 1;
            if (counts_[j] == 1 && hi) { w = 0; break; }
            idx[j] = base[j] + (hi ? 1 : 0);
            w *= hi ? frac[j] : 1 - frac[j];
        }
        if (w != 0) acc += w * at(idx, comp);
    }
    return acc;
}

GridField sample_field(const FieldEvaluator& f, std::vector<std::array<double, 2>> box,
                       double h, std::size_t components,
                       std::optional<std::size_t> boundary_axis) {
    GridField u(std::move(box), h, components, boundary_axis);
    std::size_t d = u.dim();
    std::vector<std::size_t> idx(d, 0);
    std::vector<Cplx> val(components);
    std::vector<double> x(d);
    std::size_t total = u.point_count();
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (std::size_t j = 0; j < d; ++j) x[j] = u.box()[j][0] + u.h() * idx[j];
        f(x, val);
        for (std::size_t c = 0; c < components; ++c)
            u.raw()[flat * components + c] = val[c];
        std::size_t j = d;
        while (j > 0) {
            --j;
            if (++idx[j] < u.counts()[j]) break;
            idx[j] = 0;
        }
    }
    return u;
}

std::vector<double> fd_weights(const std::vector<double>& nodes, unsigned m) {
    // Fornberg's recursion for weights of the m-th derivative at 0
    std::size_t nn = nodes.size();
    if (nn < m + 1) throw std::invalid_argument("fd_weights: not enough nodes");
    std::vector<std::vector<double>> c(nn, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = nodes[0];
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < nn; ++i) {
        unsigned mn = std::min<unsigned>(static_cast<unsigned>(i), m);
        double c2 = 1.0, c5 = c4;
        c4 = nodes[i];
        for (std::size_t j = 0; j < i; ++j) {
            double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (unsigned s = mn; s >= 1; --s)
                    c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (unsigned s = mn; s >= 1; --s)
                c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nn);
    for (std::size_t i = 0; i < nn; ++i) w[i] = c[i][m];
    return w;
}

namespace {

struct AxisStencils {
    std::vector<double> central_w;
    std::vector<long long> central_off;
    std::vector<double> forward_w, backward_w;
    std::vector<long long> forward_off, backward_off;
};

AxisStencils make_stencils(unsigned m) {
    AxisStencils s;
    long long half = (m % 2 == 0) ? m / 2 : (m + 1) / 2;
    std::vector<double> nodes;
    for (long long o = -half; o <= half; ++o) {
        s.central_off.push_back(o);
        nodes.push_back(static_cast<double>(o));
    }
    s.central_w = fd_weights(nodes, m);
    nodes.clear();
    for (long long o = 0; o <= static_cast<long long>(m); ++o) {
        s.forward_off.push_back(o);
        nodes.push_back(static_cast<double>(o));
    }
    s.forward_w = fd_weights(nodes, m);
    nodes.clear();
    for (long long o = -static_cast<long long>(m); o <= 0; ++o) {
        s.backward_off.push_back(o);
        nodes.push_back(static_cast<double>(o));
    }
    s.backward_w = fd_weights(nodes, m);
    return s;
}

// m-th derivative along one axis; near-edge points fall back to one-sided
// stencils (scheme OneSided) or zero extension (scheme Central)
GridField diff_axis(const GridField& u, std::size_t axis, unsigned m, FdScheme scheme) {
    GridField out = u;
    const AxisStencils st = make_stencils(m);
    double hm = std::pow(u.h(), static_cast<double>(m));
    std::size_t d = u.dim();
    std::size_t comps = u.components();
    std::vector<std::size_t> idx(d, 0);
    std::size_t total = u.point_count();
    long long count = static_cast<long long>(u.counts()[axis]);
    for (std::size_t flat = 0; flat < total; ++flat) {
        long long i = static_cast<long long>(idx[axis]);
        const std::vector<double>* w = &st.central_w;
        const std::vector<long long>* off = &st.central_off;
        bool zero_extend = false;
        if (i + st.central_off.front() < 0 || i + st.central_off.back() >= count) {
            if (scheme == FdScheme::OneSidedAtBoundary) {
                if (i + st.central_off.front() < 0) {
                    w = &st.forward_w;
                    off = &st.forward_off;
                } else {
                    w = &st.backward_w;
                    off = &st.backward_off;
                }
                if (i + off->front() < 0 || i + off->back() >= count) zero_extend = true;
            } else {
                zero_extend = true;
            }
        }
        for (std::size_t c = 0; c < comps; ++c) {
            Cplx acc(0, 0);
            std::vector<std::size_t> nidx = idx;
            for (std::size_t t = 0; t < off->size(); ++t) {
                long long ni = i + (*off)[t];
                if (ni < 0 || ni >= count) {
                    if (!zero_extend) throw std::logic_error("diff_axis: stencil out of range");
                    continue;
                }
                nidx[axis] = static_cast<std::size_t>(ni);
                acc += (*w)[t] * u.at(nidx, c);
            }
            out.at(idx, c) = acc / hm;
        }
        std::size_t j = d;
        while (j > 0) {
            --j;
            if (++idx[j] < u.counts()[j]) break;
            idx[j] = 0;
        }
    }
    return out;
}

} // namespace

GridField apply_operator_fd(const Operator& op, const GridField& u, FdScheme scheme) {
    if (u.dim() != op.n()) throw std::invalid_argument("apply_operator_fd: dimension mismatch");
    if (u.components() != op.dim_v())
        throw std::invalid_argument("apply_operator_fd: component mismatch");
    for (std::size_t j = 0; j < u.dim(); ++j)
        if (u.counts()[j] < op.k() + 1)
            throw std::invalid_argument("apply_operator_fd: grid too small for stencil");

    GridField out(u.box(), u.h(), op.dim_w(), u.boundary_axis());
    std::size_t total = u.point_count();
    for (const auto& [alpha, mat] : op.terms()) {
        GridField der = u;
        for (std::size_t axis = 0; axis < op.n(); ++axis)
            if (alpha[axis] > 0) der = diff_axis(der, axis, alpha[axis], scheme);
        std::vector<double> m(op.dim_w() * op.dim_v());
        for (std::size_t i = 0; i < op.dim_w(); ++i)
            for (std::size_t j = 0; j < op.dim_v(); ++j) m[i * op.dim_v() + j] = mat(i, j).to_double();
        for (std::size_t flat = 0; flat < total; ++flat)
            for (std::size_t i = 0; i < op.dim_w(); ++i) {
                Cplx acc(0, 0);
                for (std::size_t j = 0; j < op.dim_v(); ++j)
                    acc += m[i * op.dim_v() + j] * der.raw()[flat * op.dim_v() + j];
                out.raw()[flat * op.dim_w() + i] += acc;
            }
    }
    // central-stencil validity margins
    for (std::size_t axis = 0; axis < op.n(); ++axis) {
        unsigned worst = 0;
        for (const auto& [alpha, mat] : op.terms()) {
            unsigned m = alpha[axis];
            unsigned half = (m % 2 == 0) ? m / 2 : (m + 1) / 2;
            worst = std::max(worst, half);
        }
        out.valid_lo[axis] = worst;
        out.valid_hi[axis] = worst;
    }
    return out;
}

GridField derivative_magnitude_fd(const GridField& u, unsigned m, FdScheme scheme) {
    GridField out(u.box(), u.h(), 1, u.boundary_axis());
    if (m == 0) {
        for (std::size_t flat = 0; flat < u.point_count(); ++flat) {
            double mag2 = 0;
            for (std::size_t c = 0; c < u.components(); ++c)
                mag2 += std::norm(u.raw()[flat * u.components() + c]);
            out.raw()[flat] = std::sqrt(mag2);
        }
        return out;
    }
    std::vector<double> acc(u.point_count(), 0.0);
    for (const MultiIndex& beta : multi_indices_of_order(u.dim(), m)) {
        double mult = 1;
        for (unsigned i = 2; i <= m; ++i) mult *= i;
        for (unsigned e : beta)
            for (unsigned i = 2; i <= e; ++i) mult /= i;
        GridField der = u;
        for (std::size_t axis = 0; axis < u.dim(); ++axis)
            if (beta[axis] > 0) der = diff_axis(der, axis, beta[axis], scheme);
        for (std::size_t flat = 0; flat < u.point_count(); ++flat)
            for (std::size_t c = 0; c < u.components(); ++c)
                acc[flat] += mult * std::norm(der.raw()[flat * u.components() + c]);
    }
    for (std::size_t flat = 0; flat < u.point_count(); ++flat)
        out.raw()[flat] = std::sqrt(acc[flat]);
    return out;
}

namespace {

struct Kahan {
    double sum = 0, comp = 0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

} // namespace

double lp_norm(const GridField& u, double p, NormRegion region) {
    if (!(p >= 1) && !std::isinf(p)) throw std::invalid_argument("lp_norm: p >= 1 required");
    std::size_t d = u.dim();
    std::size_t axis = 0;
    std::size_t face_index = 0;
    if (region != NormRegion::Full) {
        if (!u.boundary_axis()) throw std::invalid_argument("lp_norm: no boundary axis set");
        axis = *u.boundary_axis();
        double t = (0.0 - u.box()[axis][0]) / u.h();
        face_index = static_cast<std::size_t>(std::llround(t));
        if (std::abs(t - std::round(t)) > 1e-9 || face_index >= u.counts()[axis])
            throw std::invalid_argument("lp_norm: face not on the lattice");
    }
    double cell = std::pow(u.h(), region == NormRegion::Face ? d - 1.0 : static_cast<double>(d));
    Kahan acc;
    double sup = 0;
    std::vector<std::size_t> idx(d, 0);
    std::size_t total = u.point_count();
    for (std::size_t flat = 0; flat < total; ++flat) {
        bool in_region = true;
        if (region == NormRegion::Face) in_region = idx[axis] == face_index;
        else if (region == NormRegion::Halfspace) in_region = idx[axis] >= face_index;
        if (in_region) {
            double mag2 = 0;
            for (std::size_t c = 0; c < u.components(); ++c)
                mag2 += std::norm(u.raw()[flat * u.components() + c]);
            double mag = std::sqrt(mag2);
            if (std::isinf(p)) sup = std::max(sup, mag);
            else acc.add(std::pow(mag, p));
        }
        std::size_t j = d;
        while (j > 0) {
            --j;
            if (++idx[j] < u.counts()[j]) break;
            idx[j] = 0;
        }
    }
    if (std::isinf(p)) return sup;
    return std::pow(acc.sum * cell, 1.0 / p);
}

GridField finite_difference_delta(const GridField& u, const std::vector<double>& hvec,
                                  unsigned k) {
    if (hvec.size() != u.dim()) throw std::invalid_argument("finite_difference_delta: offset dim");
    std::vector<long long> steps(u.dim());
    for (std::size_t j = 0; j < u.dim(); ++j) {
        double t = hvec[j] / u.h();
        steps[j] = std::llround(t);
        if (std::abs(t - std::round(t)) > 1e-9)
            throw std::invalid_argument("finite_difference_delta: offset not on the lattice");
    }
    GridField out(u.box(), u.h(), u.components(), u.boundary_axis());
    std::vector<double> binom(k + 1);
    for (unsigned i = 0; i <= k; ++i) {
        double sign = ((k - i) % 2 == 0) ? 1.0 : -1.0;
        binom[i] = sign * static_cast<double>(binomial(k, i));
    }
    std::size_t d = u.dim();
    std::vector<std::size_t> idx(d, 0);
    std::size_t total = u.point_count();
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (std::size_t c = 0; c < u.components(); ++c) {
            Cplx acc(0, 0);
            for (unsigned i = 0; i <= k; ++i) {
                std::vector<std::size_t> nidx = idx;
                bool inside = true;
                for (std::size_t j = 0; j < d && inside; ++j) {
                    long long ni = static_cast<long long>(idx[j]) +
                                   static_cast<long long>(i) * steps[j];
                    if (ni < 0 || ni >= static_cast<long long>(u.counts()[j])) inside = false;
                    else nidx[j] = static_cast<std::size_t>(ni);
                }
                if (inside) acc += binom[i] * u.at(nidx, c); // zero extension otherwise
            }
            out.at(idx, c) = acc;
        }
        std::size_t j = d;
        while (j > 0) {
            --j;
            if (++idx[j] < u.counts()[j]) break;
            idx[j] = 0;
        }
    }
    return out;
}

BesovValue besov_seminorm(const GridField& u, double s, unsigned k) {
    if (!(s > 0) || !(static_cast<double>(k) > s))
        throw std::invalid_argument("besov_seminorm: need 0 < s < k");
    std::size_t m = u.dim();
    double diam2 = 0;
    for (const auto& [lo, hi] : u.box()) diam2 += (hi - lo) * (hi - lo);
    double diam = std::sqrt(diam2);
    long long max_steps = static_cast<long long>(std::floor(diam / u.h()));

    Kahan acc;
    if (m == 1) {
        // exact per-cell integration of the weight, with the local model
        // G(h) ~ G(qh) (|h|/|qh|)^k resolving the cells nearest zero;
        // G(h) = integral of |Delta_h^k u|
        double kd = static_cast<double>(k);
        auto wpow = [&](double a, double b) {
            return (std::pow(b, kd - s) - std::pow(a, kd - s)) / (kd - s);
        };
        for (long long qs = 1; qs <= max_steps; ++qs) {
            double len = qs * u.h();
            if (len > diam) break;
            double cell_lo = (qs - 0.5) * u.h();
            double cell_hi = std::min((qs + 0.5) * u.h(), diam);
            double w = wpow(cell_lo, cell_hi);
            if (qs == 1) w += wpow(0.0, 0.5 * u.h()); // inner correction
            for (double sign : {1.0, -1.0}) {
                GridField delta = finite_difference_delta(u, {sign * len}, k);
                double g = lp_norm(delta, 1.0, NormRegion::Full);
                acc.add(g / std::pow(len, kd) * w);
            }
        }
    } else {
        std::vector<long long> q(m, -max_steps);
        while (true) {
            bool zero = true;
            double len2 = 0;
            for (std::size_t j = 0; j < m; ++j) {
                if (q[j] != 0) zero = false;
                len2 += static_cast<double>(q[j]) * q[j];
            }
            double len = std::sqrt(len2) * u.h();
            if (!zero && len <= diam) {
                std::vector<double> offset(m);
                for (std::size_t j = 0; j < m; ++j) offset[j] = q[j] * u.h();
                GridField delta = finite_difference_delta(u, offset, k);
                double l1 = lp_norm(delta, 1.0, NormRegion::Full);
                acc.add(l1 * std::pow(u.h(), static_cast<double>(m)) /
                        std::pow(len, static_cast<double>(m) + s));
            }
            std::size_t j = m;
            bool done = true;
            while (j > 0) {
                --j;
                if (++q[j] <= max_steps) { done = false; break; }
                q[j] = -max_steps;
            }
            if (done) break;
        }
    }
    // tail: |Delta^k u| <= 2^k |u|_1 and the radial integral of |h|^{-(m+s)}
    double sphere = m == 1 ? 2.0 : (m == 2 ? 2 * M_PI : 4 * M_PI);
    double tail = std::pow(2.0, k) * lp_norm(u, 1.0, NormRegion::Full) * sphere *
                  std::pow(diam, -s) / s;
    return {acc.sum, tail};
}

void write_field(const GridField& u, const std::string& path, std::size_t op_order) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_field: cannot open " + path);
    os.precision(17);
    long long axis = u.boundary_axis() ? static_cast<long long>(*u.boundary_axis()) : -1;
    os << "EFLD1 " << u.dim() << " " << op_order << " " << u.components() << " " << u.h()
       << " " << axis << "\n";
    for (std::size_t j = 0; j < u.dim(); ++j)
        os << u.box()[j][0] << " " << u.box()[j][1] << " " << u.counts()[j] << "\n";
    const auto& v = u.raw();
    for (std::size_t i = 0; i < v.size(); ++i)
        os << v[i].real() << " " << v[i].imag() << (i + 1 == v.size() ? "\n" : " ");
    os.close();

    nlohmann::json side;
    side["format"] = "EFLD1";
    side["n"] = u.dim();
    side["k"] = op_order;
    side["dim_v"] = u.components();
    side["h"] = u.h();
    nlohmann::json box = nlohmann::json::array();
    for (const auto& [lo, hi] : u.box()) box.push_back({lo, hi});
    side["box"] = std::move(box);
    if (u.boundary_axis()) side["boundary_axis"] = *u.boundary_axis();
    std::ofstream js(path + ".json");
    js << side.dump(2) << "\n";
}

GridField read_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_field: cannot open " + path);
    std::string magic;
    std::size_t n, k, dim_v;
    double h;
    long long axis;
    is >> magic >> n >> k >> dim_v >> h >> axis;
    if (magic != "EFLD1") throw std::runtime_error("read_field: bad magic");
    std::vector<std::array<double, 2>> box(n);
    std::vector<std::size_t> counts(n);
    for (std::size_t j = 0; j < n; ++j) is >> box[j][0] >> box[j][1] >> counts[j];
    std::optional<std::size_t> baxis;
    if (axis >= 0) baxis = static_cast<std::size_t>(axis);
    GridField u(box, h, dim_v, baxis);
    for (auto& c : u.raw()) {
        double re, im;
        is >> re >> im;
        c = Cplx(re, im);
    }
    if (!is) throw std::runtime_error("read_field: truncated values");
    return u;
}

} // namespace ellip
