#include "dpskr/operators.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace dpskr {

namespace {

constexpr double kEdge = 1.0 / (2.0 * M_SQRT2);  // end-pair coupling magnitude

void validate_n(int n) {
    if (n < 3) throw std::invalid_argument("block too short: need n >= 3");
    if (n > 64) throw std::invalid_argument("block exceeds the 64-bit pattern word");
}

void validate_lambda(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
}

// Coupling magnitude of the full block operator between slots i and i+1.
double pi_coupling(int n, int i) {
    return (i == 1 || i == n - 1) ? kEdge : 0.25;
}

}  // namespace

int Pattern::weight() const {
    return std::popcount(bits);
}

std::string Pattern::to_string() const {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 1; i <= n; ++i) {
        if (get(i)) s[i - 1] = '1';
    }
    return s;
}

std::vector<Pattern> patterns_of_weight(int n, int w) {
    validate_n(n);
    if (w < 0 || w > n) throw std::invalid_argument("pattern weight outside [0, n]");
    std::vector<Pattern> out;
    if (w == 0) {
        out.push_back({n, 0});
        return out;
    }
    // Walk the combinations of set positions in ascending tuple order.
    std::vector<int> pos(w);
    for (int i = 0; i < w; ++i) pos[i] = i + 1;
    while (true) {
        std::uint64_t bits = 0;
        for (int p : pos) bits |= std::uint64_t{1} << (p - 1);
        out.push_back({n, bits});
        int j = w - 1;
        while (j >= 0 && pos[j] == n - (w - 1 - j)) --j;
        if (j < 0) break;
        ++pos[j];
        for (int i = j + 1; i < w; ++i) pos[i] = pos[i - 1] + 1;
    }
    return out;
}

Tridiag build_pi(int n) {
    validate_n(n);
    Tridiag t;
    t.diag.assign(n, 0.5);
    t.off.resize(n - 1);
    for (int i = 1; i <= n - 1; ++i) t.off[i - 1] = -pi_coupling(n, i);
    return t;
}

std::vector<double> pi_ph_diagonal(const Pattern& a) {
    validate_n(a.n);
    const int n = a.n;
    std::vector<double> d(n, 0.0);
    d[0] = 0.5 * a.get(1) + 0.5 * a.get(2);
    for (int i = 2; i <= n - 1; ++i) {
        d[i - 1] = 0.25 * a.get(i - 1) + 0.5 * a.get(i) + 0.25 * a.get(i + 1);
    }
    d[n - 1] = 0.5 * a.get(n - 1) + 0.5 * a.get(n);
    return d;
}

std::vector<Candidate> candidates_minus(int n, int nu, double lambda) {
    validate_n(n);
    validate_lambda(lambda);
    if (nu < 0) throw std::invalid_argument("photon number must be >= 0");
    std::vector<Candidate> out;
    if (nu == 0) return out;
    for (const Pattern& a : patterns_of_weight(n, nu - 1)) {
        Candidate c;
        c.pattern = a;
        c.first_slot = 1;
        c.matrix.diag = pi_ph_diagonal(a);
        for (double& x : c.matrix.diag) x -= 0.5 * lambda;
        c.matrix.off.resize(n - 1);
        for (int i = 1; i <= n - 1; ++i) c.matrix.off[i - 1] = lambda * pi_coupling(n, i);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Candidate> candidates_plus(int n, int nu, double lambda) {
    validate_n(n);
    validate_lambda(lambda);
    if (nu < 0) throw std::invalid_argument("photon number must be >= 0");
    std::vector<Candidate> out;
    for (int k = std::min(nu, n - 1); k >= 0; --k) {
        for (int l = 1; l <= n - k; ++l) {
            Candidate c;
            c.pattern.n = n;
            for (int i = l; i <= l + k; ++i) c.pattern.bits |= std::uint64_t{1} << (i - 1);
            c.first_slot = l;
            const std::vector<double> full = pi_ph_diagonal(c.pattern);
            c.matrix.diag.assign(full.begin() + (l - 1), full.begin() + (l + k));
            for (double& x : c.matrix.diag) x -= 0.5 * lambda;
            c.matrix.off.resize(k);
            for (int i = l; i <= l + k - 1; ++i) {
                c.matrix.off[i - l] = lambda * pi_coupling(n, i);
            }
            out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace dpskr
