#pragma once

#include "dpskr/omega.hpp"

namespace dpskr {

enum class CoefficientKind { d2_single, d2_two, d32_two };

// Leading coefficient of the key rate in the low-transmission limit:
//   G ~ value * eta^p,  p = 2 for the d2_* kinds and 3/2 for d32_two,
// achieved with the per-pulse amplitude alpha_sq = amplitude * eta^(p-1).
struct AsymptoticCoefficient {
    CoefficientKind kind = CoefficientKind::d2_single;
    int n = 0;
    double e = 0.0;
    double value = 0.0;
    // Optimal fraction of detections credited to the key-carrying photon
    // number: y* for the eta^2 kinds, z* for the eta^(3/2) one.
    double fraction = 0.0;
    // Optimal dual slope of the entropy-region support value; the
    // single-photon coefficient fixes it in closed form and reports 0.
    double gamma = 0.0;
    double amplitude = 0.0;
};

// Quadratic-scaling coefficient when every multiphoton emission is written
// off: (2(n-1)^2/n^2) max over y in [0,1] of (1-y)[y - y h(6e/y) - h(e)],
// with the entropy clamped at 1 once its argument passes 1/2.
AsymptoticCoefficient d2_single(int n, double e);

// Quadratic-scaling coefficient keeping the two-photon contribution, built
// on the nu = 2 bound curve for this n. Maximizes over the dual slopes whose
// implied split lies in [0, 1]; when no slope qualifies (at and beyond the
// single-photon threshold error rate) the single-photon coefficient is
// returned with the kind relabeled.
AsymptoticCoefficient d2_two(int n, double e, const OmegaCurve& curve2);

// eta^(3/2)-scaling coefficient of the two-photon-only protocol, valid below
// the per-n threshold error rate; zero at and beyond it.
AsymptoticCoefficient d32_two(int n, double e, const OmegaCurve& curve2);

// Largest error rate with a positive single-photon quadratic coefficient:
// the root of 1 - h(6e) - h(e) on [0, 1/12].
double e_max_single();

struct ThresholdResult {
    double e = 0.0;
    bool found = false;
};

// Largest error rate with a positive two-photon-only coefficient: the root
// of 1 - h(e) = min over gamma of [gamma e + Omega_h2(gamma)], located on
// the support-function hull. found is false when no root exists in (0, 1/2).
ThresholdResult e_max_two(int n, const OmegaCurve& curve2);

// Smallest error rate where the joint single+two-photon quadratic coefficient
// has an interior optimum; below it the optimal amplitude sits at the edge of
// its range and the scaling beats eta^2. Identically 0 for n <= 10.
double e_min_two(int n, const OmegaCurve& curve2);

}  // namespace dpskr
