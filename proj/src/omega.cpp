#include "dpskr/omega.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpskr/entropy.hpp"

namespace dpskr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_nu(int nu, const OmegaOptions& opts) {
    if (nu < 0) throw std::invalid_argument("photon number must be >= 0");
    if (nu > 3 && !opts.allow_unvalidated_nu) {
        throw std::invalid_argument(
            "photon number outside the validated range 0..3 "
            "(set allow_unvalidated_nu to evaluate anyway)");
    }
}

struct BranchBest {
    bool has = false;
    double value = -kInf;
    std::size_t index = 0;
};

// Largest eigenvalue over a candidate family; ties within tie_tol resolve
// to the first candidate in enumeration order.
BranchBest best_of(const std::vector<Candidate>& cands, double eig_tol, double tie_tol) {
    BranchBest b;
    if (cands.empty()) return b;
    std::vector<double> vals(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
        vals[i] = max_eigenvalue_tridiag(cands[i].matrix, eig_tol);
    }
    b.has = true;
    b.value = *std::max_element(vals.begin(), vals.end());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] >= b.value - tie_tol) {
            b.index = i;
            break;
        }
    }
    return b;
}

struct FullEval {
    OmegaResult res;
    double plus_value = -kInf;
    double minus_value = -kInf;
    bool has_minus = false;
};

FullEval evaluate(int n, int nu, double lambda, const OmegaOptions& opts) {
    validate_nu(nu, opts);
    const std::vector<Candidate> plus_c = candidates_plus(n, nu, lambda);
    const std::vector<Candidate> minus_c = candidates_minus(n, nu, lambda);
    const BranchBest p = best_of(plus_c, opts.eig_tol, opts.tie_tol);
    const BranchBest m = best_of(minus_c, opts.eig_tol, opts.tie_tol);

    FullEval ev;
    ev.plus_value = p.value;
    ev.minus_value = m.value;
    ev.has_minus = m.has;

    const bool plus_wins = !m.has || p.value >= m.value - opts.tie_tol;
    const Candidate& win = plus_wins ? plus_c[p.index] : minus_c[m.index];
    ev.res.value = m.has ? std::max(p.value, m.value) : p.value;
    ev.res.branch = plus_wins ? Branch::plus : Branch::minus;
    ev.res.pattern = win.pattern;
    ev.res.first_slot = win.first_slot;
    if (opts.want_eigenvector) {
        ev.res.eigenvector = max_eigenpair_tridiag(win.matrix, opts.eig_tol).vector;
    }
    return ev;
}

}  // namespace

OmegaResult omega(int n, int nu, double lambda, const OmegaOptions& opts) {
    return evaluate(n, nu, lambda, opts).res;
}

OmegaCurve omega_curve(int n, int nu, const std::vector<double>& lambda_grid,
                       const CurveOptions& opts) {
    if (lambda_grid.size() < 2) {
        throw std::invalid_argument("lambda grid needs at least two points");
    }
    for (std::size_t i = 0; i + 1 < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] < lambda_grid[i + 1])) {
            throw std::invalid_argument("lambda grid must be strictly ascending");
        }
    }

    std::vector<double> grid = lambda_grid;
    std::vector<FullEval> evals;
    evals.reserve(grid.size());
    for (double lam : grid) evals.push_back(evaluate(n, nu, lam, opts.omega));

    OmegaCurve c;
    c.n = n;
    c.nu = nu;

    if (opts.refine_crossovers) {
        // Locate branch crossovers between adjacent grid points and insert a
        // refined sample at each.
        std::vector<std::pair<double, FullEval>> inserts;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            if (!evals[i].has_minus) continue;
            const double g0 = evals[i].plus_value - evals[i].minus_value;
            const double g1 = evals[i + 1].plus_value - evals[i + 1].minus_value;
            const double tt = opts.omega.tie_tol;
            if (!((g0 > tt && g1 < -tt) || (g0 < -tt && g1 > tt))) continue;
            double lo = grid[i], hi = grid[i + 1];
            double glo = g0;
            for (int it = 0; it < 200 && hi - lo > opts.crossover_tol; ++it) {
                const double mid = 0.5 * (lo + hi);
                const FullEval em = evaluate(n, nu, mid, opts.omega);
                const double gm = em.plus_value - em.minus_value;
                if ((glo < 0.0) == (gm < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            c.crossovers.push_back(root);
            if (root - grid[i] > 1e-12 && grid[i + 1] - root > 1e-12) {
                inserts.emplace_back(root, evaluate(n, nu, root, opts.omega));
            }
        }
        for (const auto& [lam, ev] : inserts) {
            const auto pos = std::lower_bound(grid.begin(), grid.end(), lam);
            const std::size_t idx = static_cast<std::size_t>(pos - grid.begin());
            grid.insert(pos, lam);
            evals.insert(evals.begin() + idx, ev);
        }
    }

    const std::size_t m = grid.size();
    c.lambda = std::move(grid);
    c.value.resize(m);
    c.branch.resize(m);
    c.pattern.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        c.value[i] = evals[i].res.value;
        c.branch[i] = evals[i].res.branch;
        c.pattern[i] = evals[i].res.pattern;
    }

    // Shape checks: non-increasing and convex up to solver noise.
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (c.value[i + 1] > c.value[i] + opts.shape_tol) {
            throw solver_error("bound curve failed the monotonicity check");
        }
    }
    for (std::size_t i = 0; i + 2 < m; ++i) {
        const double s1 = (c.value[i + 1] - c.value[i]) / (c.lambda[i + 1] - c.lambda[i]);
        const double s2 = (c.value[i + 2] - c.value[i + 1]) / (c.lambda[i + 2] - c.lambda[i + 1]);
        // Refined crossover points sit 1e-8 apart, so scale the slack by the
        // local step instead of using a fixed slope tolerance.
        const double step = std::min(c.lambda[i + 1] - c.lambda[i],
                                     c.lambda[i + 2] - c.lambda[i + 1]);
        if (s1 > s2 + opts.shape_tol / step) {
            throw solver_error("bound curve failed the convexity check");
        }
    }

    c.e_plus.resize(m);
    c.e_minus.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const bool has_l = i > 0;
        const bool has_r = i + 1 < m;
        const double sl = has_l
            ? (c.value[i] - c.value[i - 1]) / (c.lambda[i] - c.lambda[i - 1]) : 0.0;
        const double sr = has_r
            ? (c.value[i + 1] - c.value[i]) / (c.lambda[i + 1] - c.lambda[i]) : 0.0;
        c.e_plus[i] = has_r ? -sr : -sl;
        c.e_minus[i] = has_l ? -sl : -sr;
    }
    return c;
}

RegionBoundary region_boundary(const OmegaCurve& curve) {
    const std::size_t m = curve.size();
    if (m < 2) throw std::invalid_argument("region boundary needs at least two curve points");

    RegionBoundary rb;
    rb.all_achievable =
        *std::min_element(curve.value.begin(), curve.value.end()) >= 1.0 - 1e-9;
    rb.points.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = m - 1 - k;  // descending lambda -> ascending e
        double s;
        if (i == 0) {
            s = (curve.value[1] - curve.value[0]) / (curve.lambda[1] - curve.lambda[0]);
        } else if (i + 1 == m) {
            s = (curve.value[m - 1] - curve.value[m - 2]) /
                (curve.lambda[m - 1] - curve.lambda[m - 2]);
        } else {
            s = (curve.value[i + 1] - curve.value[i - 1]) /
                (curve.lambda[i + 1] - curve.lambda[i - 1]);
        }
        double e = -s;
        if (std::abs(e) < 1e-9) e = 0.0;  // secant noise around flat stretches
        double eph = curve.value[i] - curve.lambda[i] * s;
        eph = std::clamp(eph, 0.0, 1.0);
        rb.points.push_back({curve.lambda[i], e, eph});
    }
    return rb;
}

SupportFunction::SupportFunction(const OmegaCurve& curve, int e_samples) {
    if (curve.size() < 2) {
        throw std::invalid_argument("support function needs at least two curve points");
    }
    if (e_samples < 2) throw std::invalid_argument("need at least two e samples");

    // Sample points: a uniform grid on [0, 1/2] plus every secant slope of
    // the curve, so each tangency shows up exactly.
    std::vector<double> es;
    es.reserve(static_cast<std::size_t>(e_samples) + 2 * curve.size());
    for (int j = 0; j < e_samples; ++j) {
        es.push_back(0.5 * j / (e_samples - 1));
    }
    for (std::size_t i = 0; i < curve.size(); ++i) {
        for (double e : {curve.e_plus[i], curve.e_minus[i]}) {
            if (e >= 0.0 && e <= 0.5) es.push_back(e);
        }
    }
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());

    // E(e) = min_i (lambda_i e + value_i); the minimizing index only moves
    // left as e grows, so one backward pointer covers the whole sweep.
    std::vector<PointXY> pts;
    pts.reserve(es.size());
    std::size_t j = curve.size() - 1;
    for (double e : es) {
        while (j > 0 && curve.lambda[j - 1] * e + curve.value[j - 1] <=
                            curve.lambda[j] * e + curve.value[j]) {
            --j;
        }
        double E = curve.lambda[j] * e + curve.value[j];
        if (E < 0.0) E = 0.0;  // solver noise below an exact zero
        const double H = E <= 0.5 ? binary_entropy(E) : 1.0;
        pts.push_back({e, H});
    }
    hull_ = upper_concave_envelope(pts);
}

double SupportFunction::operator()(double gamma) const {
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
    // Hull slopes decrease, so the maximizer of H - gamma e is the vertex
    // where the slope crosses gamma.
    std::size_t lo = 0, hi = hull_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const double slope =
            (hull_[mid + 1].y - hull_[mid].y) / (hull_[mid + 1].x - hull_[mid].x);
        if (slope > gamma) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return hull_[lo].y - gamma * hull_[lo].x;
}

std::pair<double, double> SupportFunction::argmax_e_range(double gamma) const {
    const double v = (*this)(gamma);
    const double slack = 1e-13 * (1.0 + std::abs(v));
    double elo = kInf, ehi = -kInf;
    for (const PointXY& p : hull_) {
        if (p.y - gamma * p.x >= v - slack) {
            elo = std::min(elo, p.x);
            ehi = std::max(ehi, p.x);
        }
    }
    return {elo, ehi};
}

double SupportFunction::min_line(double e) const {
    if (!(e >= 0.0)) throw std::invalid_argument("e must be >= 0");
    return eval_piecewise(hull_, e);
}

ChainReport verify_chain(int n, int nu_max, const std::vector<double>& lambda_grid,
                         const OmegaOptions& opts) {
    if (nu_max < 0) throw std::invalid_argument("nu_max must be >= 0");
    ChainReport rep;
    rep.min_step_margin = kInf;
    rep.min_cap_margin = kInf;
    const double slack = 1e-11;
    for (double lam : lambda_grid) {
        double prev = 0.0;
        for (int nu = 0; nu <= nu_max; ++nu) {
            const double v = omega(n, nu, lam, opts).value;
            if (nu > 0) {
                const double margin = v - prev;
                rep.min_step_margin = std::min(rep.min_step_margin, margin);
                if (margin < -slack) {
                    rep.ok = false;
                    rep.violations.push_back({lam, nu, margin});
                }
            }
            const double cap = 1.0 - v;
            rep.min_cap_margin = std::min(rep.min_cap_margin, cap);
            if (cap < -slack) {
                rep.ok = false;
                rep.violations.push_back({lam, nu, cap});
            }
            prev = v;
        }
    }
    if (!std::isfinite(rep.min_step_margin)) rep.min_step_margin = 0.0;
    if (!std::isfinite(rep.min_cap_margin)) rep.min_cap_margin = 0.0;
    return rep;
}

}  // namespace dpskr
