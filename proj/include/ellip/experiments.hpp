#ifndef ELLIP_EXPERIMENTS_HPP
#define ELLIP_EXPERIMENTS_HPP

#include <functional>
#include <string>
#include <vector>

#include "ellip/constructions.hpp"
#include "ellip/grid.hpp"
#include "ellip/taxonomy.hpp"

namespace ellip {

struct FitResult {
    std::string model;  // "log" or "power"
    double slope = 0;   // growth exponent for "power"
    double intercept = 0;
    double r2 = 0;
};

/// (abscissa, ordinate) series with a least-squares fit; the fit is always
/// recomputed from the stored points.
struct ExperimentCurve {
    std::vector<double> abscissae;
    std::vector<double> ordinates;
    FitResult fit;
};

/// model "log": ordinate against log(1/abscissa); "power": log-log.
FitResult fit_curve(const std::vector<double>& abscissae, const std::vector<double>& ordinates,
                    const std::string& model);

/// CSV with a "# model=... slope=... r2=..." comment header and columns
/// abscissa, ordinate, fit_residual.
void write_curve_csv(const ExperimentCurve& curve, const std::string& path);

enum class CounterexampleVariant { Trace, Sobolev };

/// The holomorphic family u_eps = psi_eps f_eps(z) v built from a boundary
/// ellipticity witness (eta, v), on a grid rotated so the halfspace face is
/// the first coordinate hyperplane. A u_eps and D^{k-1} u_eps are evaluated
/// in closed form through the Leibniz rule, the branch of f_eps lying along
/// (-inf, -2 eps].
class CounterexampleField {
public:
    /// enforce_witness demands |A(eta + i nu) v| within witness_tol of zero;
    /// the bounded-ratio family passes false and uses a generic amplitude.
    CounterexampleField(const Operator& op, const Direction& nu, std::vector<Cplx> eta,
                        std::vector<Cplx> v, double epsilon, CounterexampleVariant variant,
                        double witness_tol = 1e-9, bool enforce_witness = true);

    const Operator& rotated_operator() const { return op_rot_; }
    double epsilon() const { return eps_; }

    /// u_eps sampled on [-2,2]^n (boundary axis 0)
    GridField sample(double h) const;
    /// A u_eps in closed form on the same lattice
    GridField operator_field(double h) const;
    /// |D^{k-1} u_eps| (tensor Frobenius magnitude) on the same lattice
    GridField derivative_magnitude(double h) const;

    double face_l1(double h) const;       // |D^{k-1} u|_{L1(face)}
    double halfspace_l1_Au(double h) const;
    /// L^p quadrature over the halfspace with near-origin refinement at the
    /// eps scale; integrand is |A u| or the |D^{k-1} u| magnitude.
    double halfspace_lp(double h, double p, bool operator_image) const;

    /// analytic prefactor of the face integral's arsinh growth (n = 2)
    double face_prefactor() const;

    Cplx f_derivative(unsigned m, Cplx z) const;
    Cplx holomorphic_coordinate(const std::vector<double>& y) const; // z(y)
    double cutoff(const std::vector<double>& y, const MultiIndex& deriv) const;

private:
    Cplx value_at(const std::vector<double>& y, std::size_t comp) const;
    std::vector<Cplx> derivative_tensor_row(const std::vector<double>& y,
                                            const MultiIndex& beta) const;

    Operator op_rot_;
    std::size_t n_, k_;
    double eps_;
    CounterexampleVariant variant_;
    double alpha_ = 0;
    std::vector<Cplx> v_;
    std::vector<Cplx> w_; // d z / d y_j, constant
    std::vector<std::pair<int, bool>> f_terms_keys_;
    std::vector<Cplx> f_terms_coeffs_; // basis w^p (log w)^{0,1}
    unsigned cutoff_power_;
};

struct TraceBlowupResult {
    ExperimentCurve curve; // eps -> face/volume ratio
    bool blowup_variant = false;
    double normalized_slope = 0; // raw slope * mean denominator / face prefactor
    double denom_min = 0, denom_max = 0;
    std::vector<double> denominators;
};

/// Blow-up experiment when boundary ellipticity fails at nu (the witness
/// family), bounded-ratio variant otherwise (same construction with a
/// seeded non-kernel amplitude).
TraceBlowupResult trace_blowup_experiment(const Operator& op, const Direction& nu,
                                          const std::vector<double>& eps_list, double h,
                                          std::uint64_t seed = 1,
                                          const Budgets& budgets = {});

struct SobolevRatioResult {
    ExperimentCurve curve; // field index (or eps) -> ratio
    double max_ratio = 0;
    double dilation_spread = 0; // max relative deviation across the dilation family
};

/// ratio |D^{k-1} u|_{L^{n/(n-1)}(H+)} / |A u|_{L1(H+)} per field.
SobolevRatioResult sobolev_ratio_experiment(const Operator& op, const Direction& nu,
                                            const std::vector<GridField>& fields);

/// Same ratio for the Sobolev-variant counterexample family over eps.
SobolevRatioResult sobolev_counterexample_experiment(const Operator& op, const Direction& nu,
                                                     const std::vector<double>& eps_list,
                                                     double h,
                                                     const Budgets& budgets = {});

struct RepresentationResult {
    double max_rel_error = 0;
    std::vector<double> probe_errors;
};

/// Reconstruction of u from its gradient through the cone-supported kernel
/// (n = 2, k = 1): u(x) = int K_1(y) . Du(x+y) dy, the singular cell
/// integrated in polar form.
RepresentationResult verify_representation(
    const std::function<double(const std::vector<double>&)>& u,
    const std::function<std::vector<double>(const std::vector<double>&)>& grad_u,
    const KernelProfile& profile, double h, double support_radius = 2.0);

struct KernelDecayResult {
    double fitted_exponent = 0; // -inf when the kernel vanishes on the window
    bool below_floor = false;
    std::vector<double> shell_l1;   // L1 over |y'| in [R, 2R], R = 1,2,4,...
    std::vector<double> besov_tail; // seminorm increments under domain growth
};

/// Decay of y' -> K(y', 1): log-log fit over |y'| in [4, 64], shell L1
/// quadratures, and (s > 1) Besov stabilization under truncation growth.
KernelDecayResult kernel_decay_check(const std::function<double(double)>& kernel_line,
                                     std::size_t n, double s);

/// max |eps^D f| over the annulus grid (ball of radius 1/4 removed) for the
/// explicit null field f = (x1, -x2)/|x|^2.
double epsD_null_residual(double h);

/// Face L1 norms of the truncated null family u_R = eta_R f; the fitted
/// log-slope approaches 2.
ExperimentCurve epsD_truncation_face_growth(const std::vector<double>& radii, double face_h);

} // namespace ellip

#endif
