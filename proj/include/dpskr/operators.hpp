#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpskr/linalg.hpp"

namespace dpskr {

// Occupation pattern a_1..a_n over the n pulses of a block, stored with
// bit i-1 holding a_i. Blocks longer than the 64-bit word are rejected.
struct Pattern {
    int n = 0;
    std::uint64_t bits = 0;

    bool get(int i) const { return (bits >> (i - 1)) & 1u; }  // 1-based
    int weight() const;
    std::string to_string() const;  // "a1a2...an"

    bool operator==(const Pattern&) const = default;
};

// All weight-w patterns of length n in combination order: the tuples of set
// positions ascend lexicographically, so 1100.. comes before 1010.. before
// 0110.. and so on. w = 0 yields the single all-zero pattern.
std::vector<Pattern> patterns_of_weight(int n, int w);

// Bit-error block operator: diagonal 1/2 everywhere, couplings -1/(2 sqrt 2)
// between the first and last neighbor pairs and -1/4 inside. Positive
// semidefinite with a one-dimensional kernel. Requires n >= 3.
Tridiag build_pi(int n);

// Diagonal of the phase-error block operator for a given pattern:
//   entry 1: a_1/2 + a_2/2
//   entry i: a_{i-1}/4 + a_i/2 + a_{i+1}/4   (2 <= i <= n-1)
//   entry n: a_{n-1}/2 + a_n/2
std::vector<double> pi_ph_diagonal(const Pattern& a);

// One matrix whose largest eigenvalue competes for the bound: the full block
// for the minus family, or a consecutive-run restriction for the plus family.
// Diagonal entries are the pi_ph diagonal minus lambda/2; couplings are
// +lambda/(2 sqrt 2) at the block edges (slots 1 and n-1) and +lambda/4
// elsewhere.
struct Candidate {
    Pattern pattern;     // generating pattern, full block length
    int first_slot = 1;  // 1-based slot of the matrix's first row
    Tridiag matrix;
};

// Minus family: all patterns of weight nu-1 on the full n x n block, in
// combination order. nu = 0 has no minus candidates.
std::vector<Candidate> candidates_minus(int n, int nu, double lambda);

// Plus family: restrictions to runs of k+1 consecutive slots l..l+k with
// 0 <= k <= nu, generated by the pattern that is 1 exactly on the run.
// Longer runs enumerate first; within a length, the start slot ascends.
// nu = 0 reduces to 1x1 matrices with value (1 - lambda)/2.
std::vector<Candidate> candidates_plus(int n, int nu, double lambda);

}  // namespace dpskr
