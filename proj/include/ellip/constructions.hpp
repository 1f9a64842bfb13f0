#ifndef ELLIP_CONSTRUCTIONS_HPP
#define ELLIP_CONSTRUCTIONS_HPP

#include <functional>
#include <memory>
#include <vector>

#include "ellip/grid.hpp"
#include "ellip/rational.hpp"

namespace ellip {

/// Exact inverse of the Vandermonde system: sum_i mu[i][j] lambda_i^l = delta_{j,l}
/// for 0 <= j, l <= k-1. Verified by exact back-substitution before returning.
std::vector<std::vector<Rational>> vandermonde_coefficients(const std::vector<Rational>& lambdas);

/// Data for the superposition extension: distinct positive dilation factors,
/// their exact Vandermonde weights, the cutoff scale, and the cutoff shape
/// (1 - t^flat)^power with flat even so k-1 derivatives vanish at zero.
struct ExtensionRecipe {
    std::size_t k = 1;
    std::vector<Rational> lambdas;
    std::vector<std::vector<Rational>> mu;
    double epsilon = 0.5;
    unsigned theta_flat = 2;
    unsigned theta_power = 3;

    static ExtensionRecipe make(std::size_t k, std::vector<Rational> lambdas = {},
                                double epsilon = 0.5);
};

/// Smooth cutoff with theta(0) = 1 and theta^(1..flat-1)(0) = 0, supported in
/// |t| <= 1.
double theta_cutoff(double t, unsigned flat, unsigned power);

/// Half-space extension evaluated pointwise above a sampled boundary field.
class BoundaryExtension {
public:
    virtual ~BoundaryExtension() = default;
    virtual std::size_t components() const = 0;
    virtual Cplx eval(const std::vector<double>& xt, double xn, std::size_t comp) const = 0;
};

/// theta(xn/eps) xn^{k-1} g(x') / (k-1)!; reproduces the (k-1)-th normal trace.
std::unique_ptr<BoundaryExtension> layer_extension_top(const GridField& g, std::size_t k,
                                                       double epsilon);

/// xn^j (rho_{xn} * g)(x') / j!, mollification at the height itself;
/// reproduces the j-th normal trace for 0 <= j <= k-2.
std::unique_ptr<BoundaryExtension> layer_extension_besov(const GridField& g, std::size_t j,
                                                         std::size_t k);

/// u(x', xn) = sum_j sum_i mu[i][j] u_j(x', lambda_i xn) with all k traces
/// reproduced simultaneously.
std::unique_ptr<BoundaryExtension> superpose_extension(const std::vector<GridField>& traces,
                                                       const ExtensionRecipe& recipe);

/// Sample an extension on the halfspace lattice box(g) x [0, height].
GridField render_extension(const BoundaryExtension& ext, const GridField& gref, double height);

/// Discrete j-th normal derivative at the face by forward differences.
GridField normal_trace_fd(const GridField& u, unsigned j);

/// Smooth profile on [-1,1] vanishing on [-1,1/2], normalized so that the
/// sphere average of phi(theta_n) is 1.
struct KernelProfile {
    std::size_t n = 2;
    unsigned power = 4;
    double normalization = 1;

    double phi(double t) const;
    static KernelProfile make(std::size_t n, unsigned power = 4, double tol = 1e-10);
};

/// Convolution kernel K_k(y) contracted against the slot (j_1..j_k):
/// c phi(y_n/|y|) |y|^{k-n} prod (y_{j_m}/|y|); zero whenever y_n <= |y|/2.
double sobolev_kernel(std::size_t n, std::size_t k, const KernelProfile& profile,
                      const std::vector<double>& y, const std::vector<std::size_t>& slots);

/// integral over S^{n-1} of f(theta_n)
double sphere_average(std::size_t n, const std::function<double(double)>& f, double tol = 1e-10);

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(std::size_t count, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace ellip

#endif
