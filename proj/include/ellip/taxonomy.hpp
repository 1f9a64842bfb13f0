#ifndef ELLIP_TAXONOMY_HPP
#define ELLIP_TAXONOMY_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ellip/operator.hpp"
#include "ellip/sigma.hpp"

namespace ellip {

struct Budgets {
    std::size_t boxes = 200000;        // branch-and-bound boxes per check
    double witness_tol = 1e-9;         // residual acceptance threshold
    int descent_steps = 50;            // local refinement steps before the exact solve
    std::size_t direction_samples = 64; // quasi-uniform directions for the sampled verdict
};

/// A concrete frequency/kernel-vector pair demonstrating a condition fails.
/// residual = |A(zeta)v| / (|coefficients| (1+|zeta|)^k); exact witnesses
/// carry rational data and residual exactly 0.
struct Witness {
    std::vector<Cplx> frequency;
    std::vector<Cplx> kernel_vector; // unit norm
    double residual = 0;
    bool exact = false;
    std::vector<GaussianRational> frequency_exact;
    std::vector<GaussianRational> kernel_exact;
};

struct Certificate {
    enum class Kind { SphereMin, BallMin, CancellationDirections, NoncancellationIdentity };
    Kind kind;
    double radius = 0;             // ball_min
    std::size_t boxes_explored = 0;
    double lower_bound = 0;        // > 0 for the min kinds
    std::vector<Direction> directions;       // cancellation
    std::vector<MultiPoly> identity_minors;  // all exactly the zero polynomial
    std::vector<Rational> noncancel_w;       // the persistent image vector
};

struct Verdict {
    enum class Status { Holds, HoldsSampled, Fails, Inconclusive };
    Status status = Status::Inconclusive;
    std::optional<Certificate> certificate;
    std::optional<Witness> witness;
    std::size_t boxes_used = 0;
    std::string note;

    bool holds() const { return status == Status::Holds || status == Status::HoldsSampled; }
    bool fails() const { return status == Status::Fails; }
    bool inconclusive() const { return status == Status::Inconclusive; }
};

struct TaxonomyReport {
    Verdict real_elliptic;
    std::vector<std::pair<Direction, Verdict>> boundary_elliptic;
    Verdict c_elliptic;
    Verdict canceling;
    bool chain_consistent = true;
    std::string diagnostic;
    std::string note;
};

/// Certified-minimum branch and bound over a union of boxes. Wave-synchronous
/// and sequential, so verdicts are deterministic; ties are resolved by the
/// lexicographic order of box centers (insertion order preserves it).
struct BnBOutcome {
    enum class Status { Certified, WitnessFound, BudgetExhausted } status;
    double lower_bound = 0;   // valid over the whole region when Certified
    double best_sigma = 0;    // smallest center evaluation seen
    std::vector<double> best_point;
    std::size_t boxes_explored = 0;
};

class SymbolProbe; // internal: evaluation + exact verification callbacks

/// R-ellipticity: ker_R A(xi) = {0} for xi != 0, decided on the norm shell
/// {1/2 <= |xi|_inf <= 1} (enough by k-homogeneity).
Verdict check_real_ellipticity(const Operator& op, const Budgets& budgets = {});

/// Explicit radius beyond which ellipticity alone forces injectivity of the
/// complexified symbol: solves m0 R^k = B (1+R)^{k-1} + m0.
double boundary_radius_bound(const Operator& op, const Direction& nu, double m0);

/// Boundary ellipticity in direction nu: ker_C A(xi + i nu) = {0} for all
/// real xi. Holds requires a prior R-ellipticity certificate.
Verdict check_boundary_ellipticity(const Operator& op, const Direction& nu,
                                   const Budgets& budgets = {});

/// lambda(xi1 + i xi2) = xi + i nu exactly, for independent rational xi1, xi2
/// and a target direction nu in their span (defaults to the first coordinate
/// vector contained in the span).
struct NormalizedComplexDirection {
    GaussianRational lambda;
    std::vector<Rational> xi;
    std::vector<Rational> nu;
};
NormalizedComplexDirection normalize_complex_direction(
    const std::vector<Rational>& xi1, const std::vector<Rational>& xi2,
    const std::vector<Rational>* nu_target = nullptr);

/// C-ellipticity, sampled: Holds is reported only as a sampled verdict over
/// quasi-uniform rational directions; Fails carries a concrete witness.
Verdict check_C_ellipticity(const Operator& op, const Budgets& budgets = {});

/// Cancellation, eq. of the intersection of images over the sphere; decided
/// exactly by iterated rational image intersections plus a polynomial
/// identity certificate on failure.
Verdict check_cancellation(const Operator& op, const Budgets& budgets = {});

/// All four checks plus the implication-chain consistency flag.
TaxonomyReport classify(const Operator& op, const std::vector<Direction>& directions,
                        const Budgets& budgets = {});

/// Independent re-verification of a witness by direct symbol evaluation.
double witness_residual(const Operator& op, const Witness& w);

/// Coordinate directions followed by stereographic rational sphere points.
std::vector<Direction> direction_schedule(std::size_t n, std::size_t count);

nlohmann::json report_to_json(const TaxonomyReport& report, const Operator& op,
                              const Budgets& budgets);

} // namespace ellip

#endif
