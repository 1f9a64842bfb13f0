#ifndef ELLIP_GRID_HPP
#define ELLIP_GRID_HPP

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ellip/operator.hpp"
#include "ellip/sigma.hpp"

namespace ellip {

/// Sampled vector-valued function on a uniform rectangular lattice.
/// values are row-major over lattice points, `components` entries per point.
class GridField {
public:
    GridField() = default;
    GridField(std::vector<std::array<double, 2>> box, double h, std::size_t components,
              std::optional<std::size_t> boundary_axis = std::nullopt);

    std::size_t dim() const { return box_.size(); }
    double h() const { return h_; }
    std::size_t components() const { return components_; }
    const std::vector<std::array<double, 2>>& box() const { return box_; }
    const std::vector<std::size_t>& counts() const { return counts_; }
    std::optional<std::size_t> boundary_axis() const { return boundary_axis_; }
    std::size_t point_count() const;

    Cplx& at(const std::vector<std::size_t>& idx, std::size_t comp);
    const Cplx& at(const std::vector<std::size_t>& idx, std::size_t comp) const;
    std::vector<Cplx>& raw() { return values_; }
    const std::vector<Cplx>& raw() const { return values_; }

    std::vector<double> point(const std::vector<std::size_t>& idx) const;
    std::size_t flat_index(const std::vector<std::size_t>& idx) const;

    /// Multilinear interpolation with zero extension outside the box.
    Cplx interpolate(const std::vector<double>& x, std::size_t comp) const;

    /// valid central-stencil margins, per axis, set by apply_operator_fd
    std::vector<std::size_t> valid_lo, valid_hi;

private:
    std::vector<std::array<double, 2>> box_;
    double h_ = 0;
    std::size_t components_ = 0;
    std::vector<std::size_t> counts_;
    std::optional<std::size_t> boundary_axis_;
    std::vector<Cplx> values_;
};

using FieldEvaluator = std::function<void(const std::vector<double>& x, std::vector<Cplx>& out)>;

GridField sample_field(const FieldEvaluator& f, std::vector<std::array<double, 2>> box,
                       double h, std::size_t components,
                       std::optional<std::size_t> boundary_axis = std::nullopt);

enum class FdScheme { Central, OneSidedAtBoundary };

/// Finite-difference application of the operator symbol; consistency order
/// >= 2 with central stencils in the interior, >= 1 with one-sided stencils
/// at the halfspace face.
GridField apply_operator_fd(const Operator& op, const GridField& u,
                            FdScheme scheme = FdScheme::OneSidedAtBoundary);

enum class NormRegion { Full, Face, Halfspace };

/// Riemann-sum L^p norm (p = inf supported) over the region; Halfspace
/// restricts to lattice points with nonnegative boundary-axis coordinate,
/// Face to the zero slice of the boundary axis. Compensated summation keeps
/// the result independent of loop scheduling.
double lp_norm(const GridField& u, double p, NormRegion region = NormRegion::Full);

/// Alternating binomial difference of order k with lattice offset steps:
/// offsets must be integer multiples of h per axis; zero extension applies.
GridField finite_difference_delta(const GridField& u, const std::vector<double>& hvec,
                                  unsigned k);

struct BesovValue {
    double value;
    double tail_bound; // analytic bound for the truncated outer integral
};

/// Besov seminorm B^s_{1,1} by the double Riemann sum over lattice points and
/// lattice offsets, outer integral truncated at the box diameter.
BesovValue besov_seminorm(const GridField& u, double s, unsigned k);

/// Frobenius magnitude of the full m-th derivative tensor (all components,
/// multinomial multiplicities included), one scalar per lattice point.
GridField derivative_magnitude_fd(const GridField& u, unsigned m,
                                  FdScheme scheme = FdScheme::OneSidedAtBoundary);

/// Fornberg finite-difference weights for the m-th derivative at 0 on the
/// given nodes (in units of h).
std::vector<double> fd_weights(const std::vector<double>& nodes, unsigned m);

/// "EFLD1" text format plus JSON sidecar metadata.
void write_field(const GridField& u, const std::string& path, std::size_t op_order = 0);
GridField read_field(const std::string& path);

} // namespace ellip

#endif
