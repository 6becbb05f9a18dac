#include "dpskr/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dpskr/entropy.hpp"
#include "dpskr/keyrate.hpp"
#include "dpskr/linalg.hpp"

namespace dpskr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sampling density for the entropy-region hull. The downstream tolerances
// (1e-8 roots, percent-level coefficient checks) sit far above the resulting
// interpolation error.
constexpr int kSupportSamples = 8192;

double entropy_capped(double x) {
    return x < 0.5 ? binary_entropy(x) : 1.0;
}

void require_rate_point(int n, double e) {
    if (n < 3) throw std::invalid_argument("block length must be at least 3");
    if (!(e >= 0.0 && e < 0.5)) {
        throw std::invalid_argument("bit error rate must lie in [0, 1/2)");
    }
}

void require_two_photon_curve(int n, const OmegaCurve& curve) {
    if (n < 3) throw std::invalid_argument("block length must be at least 3");
    if (curve.size() < 2) {
        throw std::invalid_argument("two-photon curve needs at least two points");
    }
    if (curve.n != n || curve.nu != 2) {
        throw std::invalid_argument("curve does not belong to (n, nu = 2)");
    }
}

// Golden-section maximization on [a, b]; returns (argmax, max) over every
// point it sampled, so the result never falls below the endpoint values.
template <typename F>
std::pair<double, double> golden_argmax(F f, double a, double b) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double bx = a, bf = f(a);
    const double fb = f(b);
    if (fb > bf) {
        bx = b;
        bf = fb;
    }
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(b)); ++it) {
        if (fc > fd) {
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
        if (fc > bf) {
            bx = c;
            bf = fc;
        }
        if (fd > bf) {
            bx = d;
            bf = fd;
        }
    }
    return {bx, bf};
}

// Tangency slope of the entropy hull at e: the dual variable whose maximizer
// set contains e. Zero on the flat top and past the hull range.
double hull_slope_at(const std::vector<PointXY>& hull, double e) {
    if (hull.size() < 2 || e >= hull.back().x) return 0.0;
    std::size_t lo = 0, hi = hull.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (hull[mid].x <= e) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double dx = hull[hi].x - hull[lo].x;
    if (dx <= 0.0) return 0.0;
    return std::max(0.0, (hull[hi].y - hull[lo].y) / dx);
}

double max_hull_slope(const std::vector<PointXY>& hull) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        const double dx = hull[k + 1].x - hull[k].x;
        if (dx > 0.0) s = std::max(s, (hull[k + 1].y - hull[k].y) / dx);
    }
    return s;
}

// Dual-slope candidates up to cap: every hull slope (the kinks of the
// two-photon support value), a uniform grid over the working range, and a
// log-spaced tail when the cap sits far beyond it.
std::vector<double> gamma_candidates(const std::vector<PointXY>& hull, double cap) {
    std::vector<double> gs;
    gs.reserve(hull.size() + 4096 + 1024 + 2);
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        const double dx = hull[k + 1].x - hull[k].x;
        if (dx <= 0.0) continue;
        const double s = (hull[k + 1].y - hull[k].y) / dx;
        if (s > 0.0 && s <= cap) gs.push_back(s);
    }
    const double dense = std::min(cap, 600.0);
    const int grid = 4096;
    for (int k = 0; k <= grid; ++k) gs.push_back(dense * k / grid);
    if (cap > dense) {
        const int logs = 1024;
        const double span = std::log(cap / dense);
        for (int k = 1; k <= logs; ++k) {
            gs.push_back(dense * std::exp(span * k / logs));
        }
    }
    std::sort(gs.begin(), gs.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    return gs;
}

struct ScanResult {
    double gamma = 0.0;
    double value = -kInf;
};

// Grid scan plus golden polish. The objective returns -inf outside its
// feasible set; feasibility edges between adjacent samples are bisected so a
// maximum pinned to the boundary is still located.
template <typename F>
ScanResult scan_gammas(const std::vector<double>& gs, F objective) {
    ScanResult best;
    std::vector<double> vals(gs.size());
    for (std::size_t k = 0; k < gs.size(); ++k) {
        vals[k] = objective(gs[k]);
        if (vals[k] > best.value) {
            best.value = vals[k];
            best.gamma = gs[k];
        }
    }
    for (std::size_t k = 0; k + 1 < gs.size(); ++k) {
        const bool left_ok = std::isfinite(vals[k]);
        if (left_ok == std::isfinite(vals[k + 1])) continue;
        double a = gs[k], b = gs[k + 1];
        for (int it = 0; it < 60; ++it) {
            const double m = 0.5 * (a + b);
            const double vm = objective(m);
            if (std::isfinite(vm)) {
                if (vm > best.value) {
                    best.value = vm;
                    best.gamma = m;
                }
            }
            if (std::isfinite(vm) == left_ok) {
                a = m;
            } else {
                b = m;
            }
        }
    }
    if (std::isfinite(best.value) && gs.size() >= 2) {
        const std::size_t at = std::upper_bound(gs.begin(), gs.end(), best.gamma) -
                               gs.begin();
        const std::size_t hi = std::min(gs.size() - 1, at);
        const std::size_t lo = at >= 2 ? at - 2 : 0;
        const auto [gx, gv] = golden_argmax(objective, gs[lo], gs[hi]);
        if (gv > best.value) {
            best.value = gv;
            best.gamma = gx;
        }
    }
    return best;
}

}  // namespace

AsymptoticCoefficient d2_single(int n, double e) {
    require_rate_point(n, e);
    const double he = binary_entropy(e);
    auto objective = [&](double y) {
        if (y <= 0.0) return -he;
        return (1.0 - y) * (y - y * entropy_capped(6.0 * e / y) - he);
    };

    const int grid = 2048;
    double by = 1.0, bf = objective(1.0);
    for (int k = 0; k <= grid; ++k) {
        const double y = static_cast<double>(k) / grid;
        const double v = objective(y);
        if (v > bf) {
            bf = v;
            by = y;
        }
    }
    const auto [py, pf] = golden_argmax(objective, std::max(0.0, by - 1.0 / grid),
                                        std::min(1.0, by + 1.0 / grid));
    if (pf > bf) {
        bf = pf;
        by = py;
    }

    AsymptoticCoefficient c;
    c.kind = CoefficientKind::d2_single;
    c.n = n;
    c.e = e;
    const double nn = static_cast<double>(n) * n;
    c.value = std::max(0.0, 2.0 * (n - 1.0) * (n - 1.0) / nn * bf);
    c.fraction = by;
    c.amplitude = 2.0 * (n - 1.0) * (1.0 - by) / nn;
    return c;
}

AsymptoticCoefficient d2_two(int n, double e, const OmegaCurve& curve2) {
    require_rate_point(n, e);
    require_two_photon_curve(n, curve2);
    const SupportFunction sf(curve2, kSupportSamples);
    const double he = binary_entropy(e);

    // Objective (1 - y*) B = B^2 / (2 gap) with B the single-photon bracket
    // and gap the spread between the two support values; feasibility is the
    // split constraint 0 <= y* <= 1.
    auto objective = [&](double g) -> double {
        const double b = 1.0 - he - g * e - omega_h1(g);
        const double gap = sf(g) - omega_h1(g);
        if (gap < 1e-12 || b < 0.0 || b > 2.0 * gap) return -kInf;
        return b * b / (2.0 * gap);
    };

    const double cap = e > 0.0 ? (1.0 - he) / e
                               : std::max(2.0 * max_hull_slope(sf.hull()), 480.0);
    const ScanResult best = scan_gammas(gamma_candidates(sf.hull(), cap), objective);

    if (!std::isfinite(best.value)) {
        // No slope admits a split in [0, 1]: the two-photon route adds
        // nothing and the single-photon coefficient stands.
        AsymptoticCoefficient c = d2_single(n, e);
        c.kind = CoefficientKind::d2_two;
        return c;
    }

    AsymptoticCoefficient c;
    c.kind = CoefficientKind::d2_two;
    c.n = n;
    c.e = e;
    const double nn = static_cast<double>(n) * n;
    c.value = std::max(0.0, (n - 1.0) * (n - 1.0) / nn * best.value);
    c.gamma = best.gamma;
    const double b = 1.0 - he - best.gamma * e - omega_h1(best.gamma);
    const double gap = sf(best.gamma) - omega_h1(best.gamma);
    c.fraction = gap > 0.0 ? std::clamp(1.0 - b / (2.0 * gap), 0.0, 1.0) : 1.0;
    c.amplitude = 2.0 * (n - 1.0) * (1.0 - c.fraction) / nn;
    return c;
}

AsymptoticCoefficient d32_two(int n, double e, const OmegaCurve& curve2) {
    require_rate_point(n, e);
    require_two_photon_curve(n, curve2);
    const SupportFunction sf(curve2, kSupportSamples);
    const double he = binary_entropy(e);

    // Objective (1 - z*)^(1/2) B2 = B2^(3/2) / sqrt(3 (1 - W)); the split
    // constraint reduces to B2 >= 0 because B2 never exceeds 1 - W.
    auto objective = [&](double g) -> double {
        const double w = sf(g);
        const double b2 = 1.0 - he - g * e - w;
        const double denom = 3.0 * (1.0 - w);
        if (b2 < 0.0 || denom < 1e-12) return -kInf;
        return b2 * std::sqrt(b2 / denom);
    };

    const double cap = e > 0.0 ? (1.0 - he) / e
                               : std::max(1.05 * max_hull_slope(sf.hull()), 480.0);
    const ScanResult best = scan_gammas(gamma_candidates(sf.hull(), cap), objective);

    AsymptoticCoefficient c;
    c.kind = CoefficientKind::d32_two;
    c.n = n;
    c.e = e;
    if (!std::isfinite(best.value) || best.value <= 0.0) {
        // At or beyond the two-photon threshold error rate.
        c.fraction = 1.0;
        return c;
    }
    c.value = 2.0 * std::sqrt(6.0) / 3.0 * std::pow((n - 1.0) / n, 1.5) * best.value;
    c.gamma = best.gamma;
    const double w = sf(best.gamma);
    const double b2 = 1.0 - he - best.gamma * e - w;
    c.fraction = std::clamp(1.0 - b2 / (3.0 * (1.0 - w)), 0.0, 1.0);
    c.amplitude = std::sqrt(6.0 * (n - 1.0) * (1.0 - c.fraction) /
                            (static_cast<double>(n) * n * n));
    return c;
}

double e_max_single() {
    auto f = [](double e) {
        return 1.0 - binary_entropy(6.0 * e) - binary_entropy(e);
    };
    // f(0) = 1 and f(1/12) = -h(1/12); the function is strictly decreasing
    // in between, so plain bisection applies.
    double lo = 0.0, hi = 1.0 / 12.0;
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ThresholdResult e_max_two(int n, const OmegaCurve& curve2) {
    require_two_photon_curve(n, curve2);
    const SupportFunction sf(curve2, kSupportSamples);
    // Positive exactly while some support line keeps the two-photon bracket
    // 1 - h(e) - gamma e - Omega_h2(gamma) above zero.
    auto f = [&](double x) { return 1.0 - binary_entropy(x) - sf.min_line(x); };

    ThresholdResult r;
    double lo = 0.0;
    if (!(f(lo) > 0.0)) return r;
    const int scan = 4096;
    double hi = -1.0;
    for (int k = 1; k <= scan; ++k) {
        const double x = 0.5 * k / scan;
        if (f(x) <= 0.0) {
            hi = x;
            break;
        }
        lo = x;
    }
    if (hi < 0.0) return r;
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    r.e = 0.5 * (lo + hi);
    r.found = true;
    return r;
}

double e_min_two(int n, const OmegaCurve& curve2) {
    require_two_photon_curve(n, curve2);
    // Short blocks never pin the optimal split to the all-two-photon edge.
    if (n <= 10) return 0.0;
    const SupportFunction sf(curve2, kSupportSamples);
    // Residual of the split boundary y* = 0 along the tangency slope at e;
    // positive while the quadratic-coefficient optimum is stuck at the edge
    // of the amplitude range.
    auto resid = [&](double e) {
        const double g = hull_slope_at(sf.hull(), e);
        return 1.0 - binary_entropy(e) - g * e + omega_h1(g) - 2.0 * sf(g);
    };

    const double top = e_max_single();
    if (!(resid(0.0) > 0.0)) return 0.0;
    const int scan = 2048;
    double lo = 0.0, hi = -1.0;
    for (int k = 1; k <= scan; ++k) {
        const double x = top * k / scan;
        if (resid(x) <= 0.0) {
            hi = x;
            break;
        }
        lo = x;
    }
    // Pinned over the whole positive-rate window: report its upper end.
    if (hi < 0.0) return top;
    // The residual slope in e is a few hundred, so localize well below the
    // 1e-8 residual target.
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (resid(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace dpskr
