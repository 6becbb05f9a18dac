#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dpskr/linalg.hpp"
#include "dpskr/omega.hpp"
#include "dpskr/operators.hpp"

// Reference implementations on the full joint register space (pattern
// register times slot register). The error observables are assembled
// directly from the measurement constituents: the pair circuit operators,
// the slot filter, and the interference projectors. Nothing in here uses
// the reduced tridiagonal machinery, so results can be compared against
// the optimized path in omega.hpp as two independent routes.
//
// Joint basis convention: index(a, i) = a * n + (i - 1) with the pattern
// word a ascending (bit i-1 of a holds pulse i, as in Pattern) and the
// slot i in 1..n. All matrices are real symmetric in this basis.

namespace dpskr::oracle {

std::size_t joint_dim(int n);  // n * 2^n
std::size_t joint_index(int n, std::uint64_t a, int slot);

// Dense bit- and phase-error observables on the joint basis.
struct JointOperators {
    int n = 0;
    DenseSym e;     // bit error
    DenseSym e_ph;  // phase error
};

// Assembles both observables by summing the defining measurement terms
// slot pair by slot pair. Dense feasibility cap: 3 <= n <= 8.
JointOperators build_error_operators(int n);

// Single matrix elements from the slot-local sums, usable for any block
// length up to the 62-bit pattern cap. The phase-error observable is
// diagonal in this basis (every factor in its defining sum is), so only
// its diagonal accessor exists; the dense build confirms the off-diagonal
// part vanishes.
double bit_error_entry(int n, std::uint64_t a_row, int slot_row,
                       std::uint64_t a_col, int slot_col);
double phase_error_entry(int n, std::uint64_t a, int slot);

// Basis-change unitary, materialized densely from its defining action on
// the Hadamard-basis product states: the state picks up a sign when the
// pattern bit at the detected slot is set. Conjugating the bit-error
// observable by it leaves identity-on-patterns times the slot tridiagonal;
// the phase-error observable becomes pattern-indexed diagonal blocks.
// Real, symmetric, orthogonal, an involution. 3 <= n <= 8.
DenseSym build_u(int n);

// Joint basis indices (ascending) whose pattern weight lies in
// {nu, nu-2, nu-4, ...}: the support admissible once the source reveals
// total photon number nu.
std::vector<std::size_t> admissible_indices(int n, int nu);

// Largest eigenvalue of (e_ph - lambda * e) compressed to the admissible
// support, by dense Jacobi on the compressed matrix with no structural
// shortcuts. Requires 3 <= n <= 8, 0 <= nu <= 3, lambda >= 0.
double brute_force_omega(int n, int nu, double lambda);

// Register state sum_i c_i |base xor b_i> |i> with b_i the single-bit
// pattern at pulse i; amps holds c_1..c_n (need not be normalized, must
// not be all zero).
struct AttackState {
    Pattern base;
    std::vector<double> amps;
};

// Embeds the winning eigenvector of an omega() evaluation into slot
// amplitudes: run restrictions place their components at first_slot
// onward, full-block candidates cover every slot. Requires the result to
// carry an eigenvector (OmegaOptions::want_eigenvector).
AttackState attack_state_from_omega(int n, const OmegaResult& best);

struct AttackErrors {
    double bit = 0.0;
    double phase = 0.0;
};

// Normalized expectation values of the two error observables in the given
// state. The first overload evaluates matrix elements on demand and works
// for any block length; the second contracts the dense operators and
// requires matching block size.
AttackErrors attack_state_errors(const AttackState& state);
AttackErrors attack_state_errors(const AttackState& state, const JointOperators& ops);

// Norm of the source-state component with pattern a and total photon
// number nu. The per-pulse Fock series carries only photon numbers of the
// same parity as the pattern bit, so the amplitude is exactly zero when
// the pattern weight exceeds nu or differs from it in parity; such zeros
// are produced without accumulating round-off.
struct PhiAmplitude {
    Pattern pattern;
    int nu = 0;
    double value = 0.0;
};

// Amplitudes for all 2^n patterns, pattern word ascending. fock_cutoff
// bounds the per-pulse photon number; negative selects the default nu + 8.
// Any cutoff >= nu yields identical values since a single pulse can never
// carry more than nu photons here. Requires 3 <= n <= 16 and alpha > 0.
std::vector<PhiAmplitude> phi_support(int n, double alpha, int nu, int fock_cutoff = -1);

}  // namespace dpskr::oracle
