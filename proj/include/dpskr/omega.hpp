#pragma once

#include <utility>
#include <vector>

#include "dpskr/operators.hpp"

namespace dpskr {

enum class Branch { minus, plus };

struct OmegaOptions {
    // Photon numbers above 3 are outside the validated range and rejected
    // unless this is set.
    bool allow_unvalidated_nu = false;
    double eig_tol = 1e-12;
    // Candidates within tie_tol of the maximum count as tied; the first one
    // in enumeration order is reported, and the plus branch wins branch ties.
    double tie_tol = 1e-12;
    bool want_eigenvector = false;
};

struct OmegaResult {
    double value = 0.0;
    Branch branch = Branch::plus;
    Pattern pattern;
    int first_slot = 1;
    // Unit eigenvector of the winning candidate matrix (its length is the
    // candidate dimension, starting at first_slot). Filled on request.
    std::vector<double> eigenvector;
};

// Worst-case phase-error bound for an n-pulse block at photon number nu:
// the largest candidate eigenvalue over both families.
OmegaResult omega(int n, int nu, double lambda, const OmegaOptions& opts = {});

struct OmegaCurve {
    int n = 0;
    int nu = 0;
    std::vector<double> lambda;
    std::vector<double> value;
    std::vector<Branch> branch;
    std::vector<Pattern> pattern;
    // Branch crossover locations refined by bisection, ascending.
    std::vector<double> crossovers;
    // Secant-based subgradient bounds: at interior points e_plus uses the
    // right neighbor and e_minus the left one (e_plus <= e_minus up to
    // solver noise); the ends copy their one-sided value.
    std::vector<double> e_plus;
    std::vector<double> e_minus;

    std::size_t size() const { return lambda.size(); }
};

struct CurveOptions {
    OmegaOptions omega;
    bool refine_crossovers = true;
    double crossover_tol = 1e-8;
    // The curve must be convex and non-increasing up to this slack; a
    // violation beyond it throws solver_error.
    double shape_tol = 1e-9;
};

// Evaluates the bound on an ascending lambda grid, inserts refined branch
// crossover points, and caches secant slopes.
OmegaCurve omega_curve(int n, int nu, const std::vector<double>& lambda_grid,
                       const CurveOptions& opts = {});

struct RegionPoint {
    double lambda = 0.0;
    double e = 0.0;
    double e_ph = 0.0;
};

struct RegionBoundary {
    // Ascending in e (descending lambda); e_ph clamped to [0, 1].
    std::vector<RegionPoint> points;
    // Set when the bound sits at 1 across the whole grid, in which case the
    // boundary excludes nothing.
    bool all_achievable = false;
};

// Lower boundary of the achievable (e, e_ph) region: each grid point
// contributes (e, e_ph) = (-s, value - lambda s) with s the symmetric
// secant slope (one-sided at the ends).
RegionBoundary region_boundary(const OmegaCurve& curve);

// Support function of the entropy-domain region:
//   Omega_h(gamma) = sup_e [ H(e) - gamma e ],
// where H(e) = h(E(e)) if E(e) <= 1/2 else 1 and
// E(e) = min over the curve grid of (lambda e + Omega(lambda)).
// Internally H is sampled and replaced by its concave hull, which is exact
// for the envelope-of-lines E.
class SupportFunction {
  public:
    explicit SupportFunction(const OmegaCurve& curve, int e_samples = 2048);

    double operator()(double gamma) const;

    // Endpoints [e_low, e_high] of the maximizer set at this gamma; the
    // interval is the subgradient of -Omega_h.
    std::pair<double, double> argmax_e_range(double gamma) const;

    // min over gamma >= 0 of (gamma e + Omega_h(gamma)): the hull value at e
    // (clamped to the hull range).
    double min_line(double e) const;

    const std::vector<PointXY>& hull() const { return hull_; }

  private:
    std::vector<PointXY> hull_;
};

// Chain diagnostics: the bound must not decrease with nu and never exceeds 1.
struct ChainReport {
    bool ok = true;
    struct Violation {
        double lambda = 0.0;
        int nu = 0;
        double gap = 0.0;
    };
    std::vector<Violation> violations;
    double min_step_margin = 0.0;  // min over nu, lambda of next - current
    double min_cap_margin = 0.0;   // min over lambda of 1 - top value
};

ChainReport verify_chain(int n, int nu_max, const std::vector<double>& lambda_grid,
                         const OmegaOptions& opts = {});

}  // namespace dpskr
