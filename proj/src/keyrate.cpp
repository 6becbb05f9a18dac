#include "dpskr/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "dpskr/entropy.hpp"
#include "dpskr/errors.hpp"

namespace dpskr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Golden-section minimization on [a, b]; returns (argmin, min) over every
// point it sampled, so the result never exceeds the endpoint values.
template <typename F>
std::pair<double, double> golden_argmin(F f, double a, double b) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double bx = a, bf = f(a);
    const double fb = f(b);
    if (fb < bf) {
        bx = b;
        bf = fb;
    }
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(b)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
        if (fc < bf) {
            bx = c;
            bf = fc;
        }
        if (fd < bf) {
            bx = d;
            bf = fd;
        }
    }
    return {bx, bf};
}

// Prob(photon number > m) for a Poisson law, summed directly term by term
// (no 1 - cdf cancellation for deep tails).
double poisson_tail(double mean, int m) {
    double term = std::exp(-mean);
    for (int k = 1; k <= m + 1; ++k) term *= mean / k;
    double total = 0.0;
    for (int k = m + 1; k <= m + 100000; ++k) {
        total += term;
        term *= mean / (k + 1);
        if (static_cast<double>(k + 1) > mean && term < total * 1e-18 + 1e-300) break;
    }
    return total;
}

// Single-photon sector of the entropy bound: q1 h(6 e / q1) while the
// argument stays in [0, 1/2], else the trivial cap q1.
double single_photon_term(double e, double q1) {
    if (q1 <= 0.0) return 0.0;
    if (12.0 * e <= q1) return q1 * binary_entropy(6.0 * e / q1);
    return q1;
}

const OmegaCurve& require_curve(const CurveSet& curves, int n, int nu) {
    const auto it = curves.find(nu);
    if (it == curves.end()) {
        throw std::invalid_argument("missing bound curve for photon number " +
                                    std::to_string(nu));
    }
    const OmegaCurve& c = it->second;
    if (c.n != n) throw std::invalid_argument("bound curve block size does not match");
    if (c.nu != nu) throw std::invalid_argument("bound curve photon number does not match its key");
    if (c.size() < 2) throw std::invalid_argument("bound curve needs at least two grid points");
    return c;
}

// Values of a curve re-sampled on another ascending grid. Linear pieces of a
// convex non-increasing curve sit above the curve, and the flat extension
// beyond the last point dominates the true decay, so the result is a valid
// (if slightly loose) bound wherever the grids differ.
std::vector<double> interp_values(const OmegaCurve& c, const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        if (x <= c.lambda.front()) {
            out[i] = c.value.front();
            continue;
        }
        if (x >= c.lambda.back()) {
            out[i] = c.value.back();
            continue;
        }
        const auto up = std::upper_bound(c.lambda.begin(), c.lambda.end(), x);
        const std::size_t hi = static_cast<std::size_t>(up - c.lambda.begin());
        const std::size_t lo = hi - 1;
        const double dx = c.lambda[hi] - c.lambda[lo];
        const double t = dx > 0.0 ? (x - c.lambda[lo]) / dx : 0.0;
        out[i] = (1.0 - t) * c.value[lo] + t * c.value[hi];
    }
    return out;
}

// A bound curve with one-sided secant slopes, the tangent-family search grid.
struct FamilyGrid {
    std::vector<double> lambda;
    std::vector<double> value;
    std::vector<double> e_plus;   // minus the right secant slope
    std::vector<double> e_minus;  // minus the left secant slope
};

FamilyGrid make_family(const std::vector<double>& lambda, const std::vector<double>& value) {
    FamilyGrid g;
    g.lambda = lambda;
    g.value = value;
    const std::size_t m = lambda.size();
    g.e_plus.assign(m, 0.0);
    g.e_minus.assign(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double dl = lambda[i + 1] - lambda[i];
        g.e_plus[i] = dl > 0.0 ? -(value[i + 1] - value[i]) / dl : (i > 0 ? g.e_plus[i - 1] : 0.0);
    }
    for (std::size_t i = 1; i < m; ++i) {
        const double dl = lambda[i] - lambda[i - 1];
        g.e_minus[i] = dl > 0.0 ? -(value[i] - value[i - 1]) / dl : g.e_minus[i - 1];
    }
    if (m >= 2) {
        g.e_minus[0] = g.e_plus[0];
        g.e_plus[m - 1] = g.e_minus[m - 1];
    }
    return g;
}

struct FamilyContext {
    double e = 0.0;   // observed error rate
    double q1 = 0.0;  // single-photon mass
    double qp = 0.0;  // pooled mass handled through the curve
};

// One member of the tangent-line family: the curve point (lambda, W) with
// tangency abscissa et bounds the pooled sector by h(E) - gamma et at slope
// gamma = lambda h'(E), E = W + lambda et, while the single-photon sector
// rides the same slope through its closed form.
double family_value(double lam, double W, double et, const FamilyContext& c) {
    const double E = W + lam * et;
    if (!(E > 0.0) || E > 0.5) return kInf;
    const double gamma = lam * binary_entropy_prime(E);
    return gamma * c.e + c.q1 * omega_h1(gamma) + c.qp * (binary_entropy(E) - gamma * et);
}

double family_min(const FamilyGrid& g, const FamilyContext& c) {
    constexpr int kSamples = 32;
    double best = kInf;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < g.lambda.size(); ++i) {
        if (g.value[i] > 0.5) continue;
        const double lo = std::max(0.0, g.e_plus[i]);
        const double hi = std::max(lo, g.e_minus[i]);
        if (hi - lo <= 1e-14) {
            const double v = family_value(g.lambda[i], g.value[i], 0.5 * (lo + hi), c);
            if (v < best) {
                best = v;
                best_i = i;
            }
            continue;
        }
        for (int s = 0; s < kSamples; ++s) {
            const double et = lo + (hi - lo) * s / (kSamples - 1);
            const double v = family_value(g.lambda[i], g.value[i], et, c);
            if (v < best) {
                best = v;
                best_i = i;
            }
        }
    }
    if (!std::isfinite(best)) return kInf;
    // Polish the tangency abscissa on the winning row and its neighbors.
    const std::size_t first = best_i > 0 ? best_i - 1 : 0;
    const std::size_t last = std::min(best_i + 1, g.lambda.size() - 1);
    for (std::size_t i = first; i <= last; ++i) {
        if (g.value[i] > 0.5) continue;
        const double lo = std::max(0.0, g.e_plus[i]);
        const double hi = std::max(lo, g.e_minus[i]);
        if (hi - lo <= 1e-14) continue;
        const auto r = golden_argmin(
            [&](double et) { return family_value(g.lambda[i], g.value[i], et, c); }, lo, hi);
        best = std::min(best, r.second);
    }
    return best;
}

}  // namespace

double detection_rate(int n, double eta, double alpha_sq) {
    if (n < 3) throw std::invalid_argument("block size must be >= 3");
    if (!(eta >= 0.0) || eta > 1.0) {
        throw std::invalid_argument("channel transmission must lie in [0, 1]");
    }
    if (!(alpha_sq >= 0.0)) throw std::invalid_argument("mean photon number must be >= 0");
    const double x = eta * alpha_sq;
    return (n - 1) * x * std::exp(-(n + 1) * x);
}

PhotonAllocation allocate(int n, double alpha_sq, double Q, int nu_bar) {
    if (n < 3) throw std::invalid_argument("block size must be >= 3");
    if (!(alpha_sq >= 0.0)) throw std::invalid_argument("mean photon number must be >= 0");
    if (nu_bar < 0) throw std::invalid_argument("truncation must be >= 0");
    if (!(Q > 0.0) || Q > 1.0) {
        throw std::invalid_argument("detection rate must lie in (0, 1]");
    }
    const double mean = n * alpha_sq;
    if (mean > 700.0) throw std::invalid_argument("block mean photon number too large");

    PhotonAllocation alloc;
    alloc.n = n;
    alloc.mean = mean;
    alloc.Q = Q;
    alloc.q.assign(nu_bar + 1, 0.0);

    std::vector<double> p(nu_bar + 1);
    p[0] = std::exp(-mean);
    for (int v = 1; v <= nu_bar; ++v) p[v] = p[v - 1] * mean / v;

    // Tail masses T(m) = Prob(nu > m); the recursion keeps them consistent
    // with the pmf values to the last bit.
    std::vector<double> tails(nu_bar + 1);
    tails[nu_bar] = poisson_tail(mean, nu_bar);
    for (int m = nu_bar - 1; m >= 0; --m) tails[m] = tails[m + 1] + p[m + 1];

    int nu_min = 0;
    double t_at_min = tails[0];
    while (nu_min <= nu_bar && !(tails[nu_min] < Q)) {
        ++nu_min;
        if (nu_min <= nu_bar) t_at_min = tails[nu_min];
    }
    if (nu_min > nu_bar) {
        // Everything assignable sits above the truncation; walk the tail up.
        double t = tails[nu_bar];
        double pm = p[nu_bar];
        int m = nu_bar;
        while (!(t < Q)) {
            ++m;
            pm *= mean / m;
            t -= pm;
            if (m > nu_bar + 100000) {
                throw solver_error("photon allocation failed to locate nu_min");
            }
        }
        nu_min = m;
        alloc.nu_min = nu_min;
        alloc.tail = 1.0;
        return alloc;
    }

    alloc.nu_min = nu_min;
    alloc.q[nu_min] = 1.0 - t_at_min / Q;
    for (int v = nu_min + 1; v <= nu_bar; ++v) alloc.q[v] = p[v] / Q;
    alloc.tail = tails[nu_bar] / Q;
    return alloc;
}

double omega_h1(double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("support slope must be >= 0");
    const double et = 1.0 / (6.0 * (1.0 + std::exp2(gamma / 6.0)));
    if (et <= 0.0) return 0.0;  // exp2 overflow: the support value has decayed to 0
    return binary_entropy(6.0 * et) - gamma * et;
}

double h_ph_bound(int n, double e, const PhotonAllocation& alloc, int nu_bar,
                  const CurveSet& curves) {
    if (nu_bar < 1 || nu_bar > 3) throw std::invalid_argument("truncation must be 1, 2, or 3");
    if (!(e >= 0.0) || e > 0.5) {
        throw std::invalid_argument("observed error rate must lie in [0, 1/2]");
    }
    if (alloc.n != n) throw std::invalid_argument("allocation block size does not match");
    if (alloc.q.size() != static_cast<std::size_t>(nu_bar) + 1) {
        throw std::invalid_argument("allocation truncation does not match nu_bar");
    }
    const double q0 = alloc.q[0];
    const double q1 = alloc.q[1];

    // Coarsest candidate: single-photon closed form, heavier sectors trivial.
    double above1 = alloc.tail;
    for (int v = 2; v <= nu_bar; ++v) above1 += alloc.q[v];
    double best = q0 + single_photon_term(e, q1) + above1;

    if (nu_bar >= 2) {
        const OmegaCurve& c2 = require_curve(curves, n, 2);
        const FamilyGrid g2 = make_family(c2.lambda, c2.value);
        const double q2 = alloc.q[2];
        const double above2 = alloc.tail + (nu_bar == 3 ? alloc.q[3] : 0.0);
        best = std::min(best, q0 + above2 + family_min(g2, {e, q1, q2}));
        if (nu_bar == 3) {
            const OmegaCurve& c3 = require_curve(curves, n, 3);
            const double q3 = alloc.q[3];
            const double qp = q2 + q3;
            if (qp > 0.0) {
                // Pool the two heavy sectors on the two-photon grid with the
                // mass-weighted mean curve.
                const std::vector<double> v3 = interp_values(c3, c2.lambda);
                std::vector<double> pooled(c2.size());
                for (std::size_t i = 0; i < pooled.size(); ++i) {
                    pooled[i] = (q2 * c2.value[i] + q3 * v3[i]) / qp;
                }
                const FamilyGrid g23 = make_family(c2.lambda, pooled);
                best = std::min(best, q0 + alloc.tail + family_min(g23, {e, q1, qp}));
            }
        }
    }
    return std::min(best, 1.0);
}

KeyRatePoint key_rate(int n, double e, double eta, double alpha_sq, int nu_bar,
                      const CurveSet& curves) {
    KeyRatePoint pt;
    pt.n = n;
    pt.e = e;
    pt.eta = eta;
    pt.alpha_sq = alpha_sq;
    pt.nu_bar = nu_bar;
    pt.Q = detection_rate(n, eta, alpha_sq);
    if (!(e >= 0.0) || e > 0.5) {
        throw std::invalid_argument("observed error rate must lie in [0, 1/2]");
    }
    if (nu_bar < 1 || nu_bar > 3) throw std::invalid_argument("truncation must be 1, 2, or 3");
    if (pt.Q <= 0.0) {
        pt.Q = 0.0;
        pt.h_ph = 1.0;
        pt.G = 0.0;
        return pt;
    }
    const PhotonAllocation alloc = allocate(n, alpha_sq, pt.Q, nu_bar);
    pt.h_ph = h_ph_bound(n, e, alloc, nu_bar, curves);
    pt.G = std::max(0.0, pt.Q * (1.0 - binary_entropy(e) - pt.h_ph));
    return pt;
}

MeanPhotonOptimum optimize_mean_photon(int n, double e, double eta, int nu_bar,
                                       const CurveSet& curves) {
    if (n < 3) throw std::invalid_argument("block size must be >= 3");
    const double cap = 1.0 / n;
    const double lo = cap * 1e-9;
    constexpr int kCoarse = 121;
    const double span = std::log(cap / lo);

    std::vector<double> xs(kCoarse);
    std::vector<KeyRatePoint> pts(kCoarse);
    std::size_t best_j = 0;
    for (int j = 0; j < kCoarse; ++j) {
        xs[j] = lo * std::exp(span * j / (kCoarse - 1));
        pts[j] = key_rate(n, e, eta, xs[j], nu_bar, curves);
        if (pts[j].G > pts[best_j].G) best_j = j;
    }

    MeanPhotonOptimum out;
    if (pts[best_j].G <= 0.0) {
        // Nothing positive anywhere: report the highest-throughput point.
        std::size_t qj = 0;
        for (int j = 1; j < kCoarse; ++j) {
            if (pts[j].Q > pts[qj].Q) qj = j;
        }
        out.alpha_sq = xs[qj];
        out.point = pts[qj];
        out.all_zero = true;
        return out;
    }

    const double a = std::log(xs[best_j > 0 ? best_j - 1 : 0]);
    const double b = std::log(xs[std::min<std::size_t>(best_j + 1, kCoarse - 1)]);
    const auto r = golden_argmin(
        [&](double u) { return -key_rate(n, e, eta, std::exp(u), nu_bar, curves).G; }, a, b);
    double alpha_star = std::exp(r.first);
    KeyRatePoint refined = key_rate(n, e, eta, alpha_star, nu_bar, curves);
    if (refined.G < pts[best_j].G) {
        alpha_star = xs[best_j];
        refined = pts[best_j];
    }
    out.alpha_sq = alpha_star;
    out.point = refined;
    out.all_zero = false;
    return out;
}

}  // namespace dpskr
