#pragma once

#include <map>
#include <vector>

#include "dpskr/omega.hpp"

namespace dpskr {

// Probability that Bob registers exactly one detection for an n-pulse block
// sent through a channel of single-photon transmission eta with mean photon
// number alpha_sq per pulse:
//   Q = (n - 1) eta alpha_sq exp(-(n + 1) eta alpha_sq).
// Depends on eta and alpha_sq only through their product.
double detection_rate(int n, double eta, double alpha_sq);

// Worst-case split of the detected events by the photon number nu emitted in
// Alice's block, assuming the adversary postselects higher photon numbers
// first. p_nu is Poissonian with mean n alpha_sq.
struct PhotonAllocation {
    int n = 0;
    double mean = 0.0;  // n * alpha_sq, photons per block
    double Q = 0.0;
    // Smallest nu with Prob(photon number > nu) < Q; detected events are
    // assigned all emission mass above nu_min plus the boundary remainder.
    int nu_min = 0;
    // q[nu] = fraction of detected events attributed to nu photons, nu <= nu_bar.
    std::vector<double> q;
    // Combined fraction for nu > nu_bar (bounded trivially downstream).
    double tail = 0.0;
};

// Evaluates the allocation for truncation nu_bar >= 0. Requires 0 < Q <= 1;
// q and tail sum to 1 up to rounding.
PhotonAllocation allocate(int n, double alpha_sq, double Q, int nu_bar);

// Support value of the single-photon entropy region,
//   omega_h1(gamma) = max_e [ h(min(6e, 1/2-ish)) - gamma e ]
//                   = h(6 et) - gamma et  at  et = 1/(6 (1 + 2^(gamma/6))),
// valid for every gamma >= 0; tends to 0 as gamma grows and equals 1 at 0.
double omega_h1(double gamma);

// Bound curves keyed by photon number. h_ph_bound needs entries for
// nu in {2, .., nu_bar}; the single-photon part uses the closed form above.
using CurveSet = std::map<int, OmegaCurve>;

// Upper bound on the privacy-amplification entropy fraction h_ph for observed
// bit error rate e under the given allocation. Truncation nu_bar in {1,2,3}:
// photon numbers above nu_bar (and nu = 0) contribute their mass times 1.
// For nu_bar >= 2 the two-photon sector (pooled with the three-photon one
// when nu_bar = 3) is bounded through the tangent-line family built on the
// supplied curves; the returned value is the minimum over that family, the
// coarser truncations of the same allocation, and 1.
double h_ph_bound(int n, double e, const PhotonAllocation& alloc, int nu_bar,
                  const CurveSet& curves);

struct KeyRatePoint {
    int n = 0;
    double e = 0.0;
    double eta = 0.0;
    double alpha_sq = 0.0;
    int nu_bar = 1;
    double Q = 0.0;
    double h_ph = 1.0;
    double G = 0.0;  // secure key per block transmission
};

// G = max(0, Q [1 - h(e) - h_ph]). A zero detection rate (eta or alpha_sq
// zero) short-circuits to G = 0 with h_ph = 1 instead of erroring, so sweeps
// over channel grids stay total.
KeyRatePoint key_rate(int n, double e, double eta, double alpha_sq, int nu_bar,
                      const CurveSet& curves);

struct MeanPhotonOptimum {
    double alpha_sq = 0.0;
    KeyRatePoint point;
    // Set when G = 0 over the whole search range; alpha_sq then reports the
    // grid point of maximum detection rate rather than a rate optimum.
    bool all_zero = false;
};

// Deterministic maximization of G over alpha_sq in (0, 1/n] (at most one
// photon per block on average): coarse log-spaced grid scan followed by
// golden-section refinement around the best point.
MeanPhotonOptimum optimize_mean_photon(int n, double e, double eta, int nu_bar,
                                       const CurveSet& curves);

}  // namespace dpskr
