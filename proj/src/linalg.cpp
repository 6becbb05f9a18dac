#include "dpskr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace dpskr {

namespace {

void validate_tridiag(const Tridiag& t) {
    if (t.diag.empty()) {
        throw std::invalid_argument("tridiagonal matrix must have dimension >= 1");
    }
    if (t.off.size() + 1 != t.diag.size()) {
        throw std::invalid_argument("tridiagonal off-diagonal size must be dim-1");
    }
}

// Gershgorin bounds [lo, hi] containing the whole spectrum.
std::pair<double, double> gershgorin(const Tridiag& t) {
    const std::size_t m = t.dim();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < m; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.off[i - 1]);
        if (i + 1 < m) r += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    return {lo, hi};
}

double inf_norm(const Tridiag& t) {
    const std::size_t m = t.dim();
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double row = std::abs(t.diag[i]);
        if (i > 0) row += std::abs(t.off[i - 1]);
        if (i + 1 < m) row += std::abs(t.off[i]);
        norm = std::max(norm, row);
    }
    return norm;
}

// Solves (T - sigma I) x = b by tridiagonal LU with partial pivoting
// (the dgttrf/dgtts2 scheme). Near-singular pivots are nudged so inverse
// iteration can run right at an eigenvalue.
std::vector<double> solve_shifted(const Tridiag& t, double sigma, std::vector<double> b) {
    const std::size_t m = t.dim();
    std::vector<double> dl(m > 1 ? t.off : std::vector<double>{});
    std::vector<double> d(m), du(m > 1 ? t.off : std::vector<double>{});
    std::vector<double> du2(m > 2 ? m - 2 : 0, 0.0);
    std::vector<char> swapped(m > 1 ? m - 1 : 0, 0);
    for (std::size_t i = 0; i < m; ++i) d[i] = t.diag[i] - sigma;

    const double floor = 1e-300;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = floor;
            const double fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
            if (i + 2 < m) du2[i] = 0.0;
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            const double tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - fact * d[i + 1];
            if (i + 2 < m) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = 1;
        }
    }
    if (std::abs(d[m - 1]) < floor) d[m - 1] = std::copysign(floor, d[m - 1] == 0.0 ? 1.0 : d[m - 1]);

    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (!swapped[i]) {
            b[i + 1] -= dl[i] * b[i];
        } else {
            const double tmp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tmp - dl[i] * b[i];
        }
    }

    std::vector<double> x(m);
    x[m - 1] = b[m - 1] / d[m - 1];
    if (m > 1) x[m - 2] = (b[m - 2] - du[m - 2] * x[m - 1]) / d[m - 2];
    for (std::size_t k = m; k >= 3; --k) {
        const std::size_t i = k - 3;
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    return x;
}

void normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s == 0.0) throw solver_error("inverse iteration produced a zero vector");
    for (double& x : v) x /= s;
}

std::vector<double> apply_tridiag(const Tridiag& t, const std::vector<double>& v) {
    const std::size_t m = t.dim();
    std::vector<double> w(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = t.diag[i] * v[i];
        if (i > 0) s += t.off[i - 1] * v[i - 1];
        if (i + 1 < m) s += t.off[i] * v[i + 1];
        w[i] = s;
    }
    return w;
}

}  // namespace

int count_eigenvalues_below(const Tridiag& t, double x) {
    validate_tridiag(t);
    const std::size_t m = t.dim();
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        double v = 0.0;
        if (i > 0) {
            const double e = t.off[i - 1];
            if (q != 0.0) {
                v = e * e / q;
            } else {
                v = std::abs(e) / std::numeric_limits<double>::epsilon();
            }
        }
        q = t.diag[i] - x - v;
        if (q < 0.0) ++count;
    }
    return count;
}

namespace {

// Bisects until count_eigenvalues_below(x) == target flips; used with
// target = dim for the largest eigenvalue and target-style predicate for
// the smallest.
double bisect_spectrum(const Tridiag& t, double tol, bool want_max) {
    auto [lo, hi] = gershgorin(t);
    if (lo == hi) return lo;
    const int m = static_cast<int>(t.dim());
    for (int it = 0; it < 2048 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const int below = count_eigenvalues_below(t, mid);
        if (want_max ? (below == m) : (below >= 1)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double max_eigenvalue_tridiag(const Tridiag& t, double tol) {
    validate_tridiag(t);
    if (!(tol > 0.0)) throw std::invalid_argument("eigenvalue tolerance must be positive");
    return bisect_spectrum(t, tol, true);
}

double min_eigenvalue_tridiag(const Tridiag& t, double tol) {
    validate_tridiag(t);
    if (!(tol > 0.0)) throw std::invalid_argument("eigenvalue tolerance must be positive");
    return bisect_spectrum(t, tol, false);
}

Eigenpair max_eigenpair_tridiag(const Tridiag& t, double tol) {
    validate_tridiag(t);
    if (!(tol > 0.0)) throw std::invalid_argument("eigenvalue tolerance must be positive");
    const std::size_t m = t.dim();
    const double lam = max_eigenvalue_tridiag(t, tol);
    const double norm = std::max(1.0, inf_norm(t));
    const double accept = 10.0 * tol * norm;

    Eigenpair best;
    double best_res = std::numeric_limits<double>::infinity();
    // Retry schedule: widen the shift away from the eigenvalue estimate if
    // the first solve is too contaminated by the bisection error.
    const double shifts[] = {2.0 * tol, 16.0 * tol, 256.0 * tol};
    for (double dshift : shifts) {
        const double sigma = lam + dshift * norm;
        std::vector<double> v(m);
        // Deterministic start with a small tilt so mirror-symmetric ties
        // resolve the same way on every run.
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = 1.0 + 0.25 * static_cast<double>(i + 1) / static_cast<double>(m);
        }
        normalize(v);
        for (int it = 0; it < 10; ++it) {
            v = solve_shifted(t, sigma, std::move(v));
            normalize(v);
            const std::vector<double> tv = apply_tridiag(t, v);
            double rho = 0.0;
            for (std::size_t i = 0; i < m; ++i) rho += v[i] * tv[i];
            double res = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double r = tv[i] - rho * v[i];
                res += r * r;
            }
            res = std::sqrt(res);
            if (res < best_res) {
                best_res = res;
                best.value = rho;
                best.vector = v;
            }
            if (res <= accept) break;
        }
        if (best_res <= accept) break;
    }
    if (best_res > accept) {
        throw solver_error("inverse iteration residual " + std::to_string(best_res) +
                           " exceeds tolerance");
    }

    // Sign convention: largest-magnitude component positive, first on ties.
    std::size_t imax = 0;
    for (std::size_t i = 1; i < m; ++i) {
        if (std::abs(best.vector[i]) > std::abs(best.vector[imax])) imax = i;
    }
    if (best.vector[imax] < 0.0) {
        for (double& x : best.vector) x = -x;
    }
    return best;
}

void DenseSym::require_symmetric(double tol) const {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            if (std::abs(at(i, j) - at(j, i)) > tol) {
                throw std::invalid_argument("matrix is not symmetric");
            }
        }
    }
}

std::vector<double> jacobi_eigenvalues(DenseSym a, double tol, int max_sweeps) {
    if (!(tol > 0.0)) throw std::invalid_argument("eigenvalue tolerance must be positive");
    const std::size_t n = a.dim();
    if (n == 0) throw std::invalid_argument("matrix must have dimension >= 1");
    a.require_symmetric(1e-12);

    double* A = a.data();
    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double x = A[p * n + q];
                s += 2.0 * x * x;
            }
        }
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_norm() < tol) {
            std::vector<double> ev(n);
            for (std::size_t i = 0; i < n; ++i) ev[i] = A[i * n + i];
            std::sort(ev.begin(), ev.end());
            return ev;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (A[q * n + q] - A[p * n + p]) / (2.0 * apq);
                double tt;
                if (std::abs(theta) > 1e150) {
                    tt = 0.5 / theta;
                } else {
                    tt = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) tt = -tt;
                }
                const double c = 1.0 / std::sqrt(tt * tt + 1.0);
                const double s = tt * c;
                const double tau = s / (1.0 + c);

                const double app = A[p * n + p];
                const double aqq = A[q * n + q];
                A[p * n + p] = app - tt * apq;
                A[q * n + q] = aqq + tt * apq;
                A[p * n + q] = 0.0;
                A[q * n + p] = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = A[r * n + p];
                    const double arq = A[r * n + q];
                    const double nrp = arp - s * (arq + tau * arp);
                    const double nrq = arq + s * (arp - tau * arq);
                    A[r * n + p] = nrp;
                    A[p * n + r] = nrp;
                    A[r * n + q] = nrq;
                    A[q * n + r] = nrq;
                }
            }
        }
    }
    throw solver_error("Jacobi sweep limit exceeded");
}

double max_eigenvalue_dense(const DenseSym& a, double tol) {
    const std::vector<double> ev = jacobi_eigenvalues(a, tol);
    return ev.back();
}

std::vector<PointXY> upper_concave_envelope(std::vector<PointXY> pts, double slope_tol) {
    if (pts.empty()) throw std::invalid_argument("envelope of an empty point set");
    std::sort(pts.begin(), pts.end(), [](const PointXY& a, const PointXY& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    // Collapse duplicate x to the highest y (sorted ascending in y above).
    std::vector<PointXY> uniq;
    uniq.reserve(pts.size());
    for (const PointXY& p : pts) {
        if (!uniq.empty() && uniq.back().x == p.x) {
            uniq.back().y = p.y;
        } else {
            uniq.push_back(p);
        }
    }
    if (uniq.size() <= 1) return uniq;

    auto slope = [](const PointXY& a, const PointXY& b) { return (b.y - a.y) / (b.x - a.x); };
    std::vector<PointXY> hull;
    hull.reserve(uniq.size());
    for (const PointXY& p : uniq) {
        while (hull.size() >= 2 &&
               slope(hull[hull.size() - 2], hull.back()) <= slope(hull.back(), p) + slope_tol) {
            hull.pop_back();
        }
        hull.push_back(p);
    }
    return hull;
}

double eval_piecewise(const std::vector<PointXY>& pts, double x) {
    if (pts.empty()) throw std::invalid_argument("evaluation of an empty piecewise function");
    if (x <= pts.front().x) return pts.front().y;
    if (x >= pts.back().x) return pts.back().y;
    auto it = std::lower_bound(pts.begin(), pts.end(), x,
                               [](const PointXY& p, double v) { return p.x < v; });
    const PointXY& hi = *it;
    const PointXY& lo = *(it - 1);
    const double w = (x - lo.x) / (hi.x - lo.x);
    return lo.y + w * (hi.y - lo.y);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(hi >= lo)) throw std::invalid_argument("golden section bracket is inverted");
    if (!(tol > 0.0)) throw std::invalid_argument("golden section tolerance must be positive");
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double invphi2 = 1.0 - invphi;
    double a = lo, b = hi;
    double h = b - a;
    if (h <= tol) return 0.5 * (a + b);
    double c = a + invphi2 * h;
    double d = a + invphi * h;
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 512 && h > tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            h = b - a;
            c = a + invphi2 * h;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            h = b - a;
            d = a + invphi * h;
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

}  // namespace dpskr
