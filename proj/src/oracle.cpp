#include "dpskr/oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace dpskr::oracle {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void validate_dense_n(int n) {
    if (n < 3 || n > 8) {
        throw std::invalid_argument("block size must be in 3..8 for the dense oracle");
    }
}

void validate_wide_n(int n) {
    if (n < 3 || n > 62) {
        throw std::invalid_argument("block size must be in 3..62");
    }
}

void validate_slot(int n, int slot) {
    if (slot < 1 || slot > n) {
        throw std::invalid_argument("slot index must be in 1..n");
    }
}

void validate_pattern_word(int n, std::uint64_t a) {
    if (n < 64 && (a >> n) != 0) {
        throw std::invalid_argument("pattern word has bits beyond the block");
    }
}

int bit_of(std::uint64_t a, int pulse) { return int((a >> (pulse - 1)) & 1u); }

double kappa(int n, int i) { return (i == 1 || i == n) ? 1.0 : 0.5; }

// 2x2 projector onto the Hadamard image of |s>, row-major over the
// standard basis.
std::array<double, 4> x_projector(int s) {
    const double c = s ? -0.5 : 0.5;
    return {0.5, c, c, 0.5};
}

// Measurement operators of the two-qubit extraction circuit, stored 2x4:
// rows over the output qubit's standard basis, columns over the pulse
// pair's standard basis indexed p = 2 a_j + a_{j+1}.
using PairOp = std::array<std::array<double, 4>, 2>;

std::array<PairOp, 3> pair_circuit_operators() {
    PairOp m1{}, m2{}, m3{};
    // antiparallel pair: output emitted in the Hadamard basis
    m1[0][1] = kInvSqrt2;
    m1[1][1] = kInvSqrt2;
    m1[0][2] = kInvSqrt2;
    m1[1][2] = -kInvSqrt2;
    // parallel pair: two outcomes with standard-basis output
    m2[0][0] = kInvSqrt2;
    m2[0][3] = kInvSqrt2;
    m3[1][0] = kInvSqrt2;
    m3[1][3] = -kInvSqrt2;
    return {m1, m2, m3};
}

// Slot filter restricted to the pair (j, j+1), stored 2x2: rows over the
// output qubit's standard basis, columns over the two slots. Column j is
// sqrt(kappa_j) H|1>, column j+1 is sqrt(kappa_{j+1}) H|0>.
std::array<double, 4> filter_block(int n, int j) {
    const double fj = std::sqrt(kappa(n, j)) * kInvSqrt2;
    const double fj1 = std::sqrt(kappa(n, j + 1)) * kInvSqrt2;
    return {fj, fj1, -fj, fj1};
}

// Adds (pair operator on pulses j, j+1) tensor (2x2 slot block on slots
// j, j+1) into the joint matrix. a4 is row-major over pair indices
// p' (row), p (column); b2 is row-major over slot offsets 0 -> j, 1 -> j+1.
void accumulate_window(DenseSym& target, int n, int j, const std::array<double, 16>& a4,
                       const std::array<double, 4>& b2) {
    const std::uint64_t lo = std::uint64_t{1} << (j - 1);
    const std::uint64_t hi = std::uint64_t{1} << j;
    const std::uint64_t mask = lo | hi;
    const std::uint64_t pat_count = std::uint64_t{1} << n;
    for (std::uint64_t a = 0; a < pat_count; ++a) {
        const int p = 2 * bit_of(a, j) + bit_of(a, j + 1);
        for (int pr = 0; pr < 4; ++pr) {
            const std::uint64_t ar =
                (a & ~mask) | ((pr & 2) ? lo : 0u) | ((pr & 1) ? hi : 0u);
            for (int cr = 0; cr < 2; ++cr) {
                for (int cc = 0; cc < 2; ++cc) {
                    const double v = a4[pr * 4 + p] * b2[cr * 2 + cc];
                    if (v != 0.0) {
                        target.at(joint_index(n, ar, j + cr), joint_index(n, a, j + cc)) += v;
                    }
                }
            }
        }
    }
}

}  // namespace

std::size_t joint_dim(int n) {
    validate_dense_n(n);
    return std::size_t(n) << n;
}

std::size_t joint_index(int n, std::uint64_t a, int slot) {
    return std::size_t(a) * std::size_t(n) + std::size_t(slot - 1);
}

JointOperators build_error_operators(int n) {
    validate_dense_n(n);
    JointOperators ops;
    ops.n = n;
    ops.e = DenseSym(joint_dim(n));
    ops.e_ph = DenseSym(joint_dim(n));
    const auto circuit = pair_circuit_operators();

    for (int j = 1; j <= n - 1; ++j) {
        const auto f = filter_block(n, j);

        // slot block for a standard-basis outcome t of the filtered qubit
        auto filter_select = [&f](int t) {
            std::array<double, 4> b2{};
            for (int cr = 0; cr < 2; ++cr) {
                for (int cc = 0; cc < 2; ++cc) {
                    b2[cr * 2 + cc] = f[t * 2 + cr] * f[t * 2 + cc];
                }
            }
            return b2;
        };
        // slot block for a Hadamard-basis outcome s of the filtered qubit
        auto filter_x = [&f](int s) {
            const auto px = x_projector(s);
            std::array<double, 4> b2{};
            for (int cr = 0; cr < 2; ++cr) {
                for (int cc = 0; cc < 2; ++cc) {
                    double v = 0.0;
                    for (int r1 = 0; r1 < 2; ++r1) {
                        for (int r2 = 0; r2 < 2; ++r2) {
                            v += f[r1 * 2 + cr] * px[r1 * 2 + r2] * f[r2 * 2 + cc];
                        }
                    }
                    b2[cr * 2 + cc] = v;
                }
            }
            return b2;
        };

        // Bit error from slot j: Hadamard outcomes s, s' on the pulse pair
        // and the opposite-parity standard outcome on the filtered qubit.
        for (int s = 0; s < 2; ++s) {
            for (int sp = 0; sp < 2; ++sp) {
                const auto pxs = x_projector(s);
                const auto pxsp = x_projector(sp);
                std::array<double, 16> a4{};
                for (int pr = 0; pr < 4; ++pr) {
                    for (int p = 0; p < 4; ++p) {
                        a4[pr * 4 + p] =
                            pxs[(pr >> 1) * 2 + (p >> 1)] * pxsp[(pr & 1) * 2 + (p & 1)];
                    }
                }
                accumulate_window(ops.e, n, j, a4, filter_select(s ^ sp ^ 1));
            }
        }

        // Phase error from slot j: circuit outcome k with Hadamard outcome
        // s on the extracted qubit and 1-s on the filtered qubit.
        for (int s = 0; s < 2; ++s) {
            const auto px = x_projector(s);
            for (const auto& m : circuit) {
                std::array<double, 16> a4{};
                for (int pr = 0; pr < 4; ++pr) {
                    for (int p = 0; p < 4; ++p) {
                        double v = 0.0;
                        for (int r1 = 0; r1 < 2; ++r1) {
                            for (int r2 = 0; r2 < 2; ++r2) {
                                v += m[r1][pr] * px[r1 * 2 + r2] * m[r2][p];
                            }
                        }
                        a4[pr * 4 + p] = v;
                    }
                }
                accumulate_window(ops.e_ph, n, j, a4, filter_x(1 - s));
            }
        }
    }
    return ops;
}

double bit_error_entry(int n, std::uint64_t a_row, int slot_row, std::uint64_t a_col,
                       int slot_col) {
    validate_wide_n(n);
    validate_slot(n, slot_row);
    validate_slot(n, slot_col);
    validate_pattern_word(n, a_row);
    validate_pattern_word(n, a_col);
    if (std::abs(slot_row - slot_col) > 1) return 0.0;

    const std::uint64_t da = a_row ^ a_col;
    const int jlo = std::max(1, std::max(slot_row, slot_col) - 1);
    const int jhi = std::min(n - 1, std::min(slot_row, slot_col));
    double total = 0.0;
    for (int j = jlo; j <= jhi; ++j) {
        const std::uint64_t mask = (std::uint64_t{1} << (j - 1)) | (std::uint64_t{1} << j);
        if ((da & ~mask) != 0) continue;
        const int dj = bit_of(da, j);
        const int dj1 = bit_of(da, j + 1);
        const double wr = std::sqrt(kappa(n, slot_row == j ? j : j + 1));
        const double wc = std::sqrt(kappa(n, slot_col == j ? j : j + 1));
        for (int s = 0; s < 2; ++s) {
            for (int sp = 0; sp < 2; ++sp) {
                const int t = s ^ sp ^ 1;
                double b = 0.5 * wr * wc;
                if (t == 1 && slot_row == j + 1) b = -b;
                if (t == 1 && slot_col == j + 1) b = -b;
                const double sign = ((s & dj) ^ (sp & dj1)) ? -1.0 : 1.0;
                total += 0.25 * sign * b;
            }
        }
    }
    return total;
}

double phase_error_entry(int n, std::uint64_t a, int slot) {
    validate_wide_n(n);
    validate_slot(n, slot);
    validate_pattern_word(n, a);
    double total = 0.0;
    for (int j = 1; j <= n - 1; ++j) {
        for (int s = 0; s < 2; ++s) {
            if (j + s != slot) continue;
            const int aj = bit_of(a, j);
            const int aj1 = bit_of(a, j + 1);
            double w = 0.0;
            if (aj == s && aj1 == 1 - s) {
                w = 1.0;
            } else if (aj == aj1) {
                w = 0.5;
            }
            total += w * kappa(n, slot);
        }
    }
    return total;
}

DenseSym build_u(int n) {
    validate_dense_n(n);
    const std::size_t pn = std::size_t{1} << n;
    const double scale = std::pow(0.5, 0.5 * n);

    // n-fold Hadamard, w[a][s] = 2^{-n/2} (-1)^{popcount(a & s)}
    std::vector<double> w(pn * pn);
    for (std::size_t a = 0; a < pn; ++a) {
        for (std::size_t s = 0; s < pn; ++s) {
            w[a * pn + s] = (std::popcount(a & s) & 1u) ? -scale : scale;
        }
    }

    DenseSym u(joint_dim(n));
    std::vector<double> t(pn * pn);
    for (int slot = 1; slot <= n; ++slot) {
        // sandwich the slot-controlled sign between two Hadamard layers
        for (std::size_t a = 0; a < pn; ++a) {
            for (std::size_t s = 0; s < pn; ++s) {
                const double v = w[a * pn + s];
                t[a * pn + s] = ((s >> (slot - 1)) & 1u) ? -v : v;
            }
        }
        for (std::size_t ar = 0; ar < pn; ++ar) {
            for (std::size_t ac = 0; ac < pn; ++ac) {
                double v = 0.0;
                for (std::size_t s = 0; s < pn; ++s) {
                    v += t[ar * pn + s] * w[ac * pn + s];
                }
                u.at(joint_index(n, ar, slot), joint_index(n, ac, slot)) = v;
            }
        }
    }
    return u;
}

std::vector<std::size_t> admissible_indices(int n, int nu) {
    validate_dense_n(n);
    if (nu < 0) {
        throw std::invalid_argument("photon number must be >= 0");
    }
    std::vector<std::size_t> idx;
    const std::uint64_t pat_count = std::uint64_t{1} << n;
    for (std::uint64_t a = 0; a < pat_count; ++a) {
        const int w = std::popcount(a);
        if (w <= nu && (nu - w) % 2 == 0) {
            for (int slot = 1; slot <= n; ++slot) {
                idx.push_back(joint_index(n, a, slot));
            }
        }
    }
    return idx;
}

double brute_force_omega(int n, int nu, double lambda) {
    validate_dense_n(n);
    if (nu < 0 || nu > 3) {
        throw std::invalid_argument("photon number must be in 0..3 for the brute-force oracle");
    }
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("lambda must be >= 0");
    }
    const auto idx = admissible_indices(n, nu);
    const std::size_t d = idx.size();
    DenseSym m(d);
    for (std::size_t r = 0; r < d; ++r) {
        const std::uint64_t ar = idx[r] / std::size_t(n);
        const int sr = int(idx[r] % std::size_t(n)) + 1;
        for (std::size_t c = r; c < d; ++c) {
            const std::uint64_t ac = idx[c] / std::size_t(n);
            const int sc = int(idx[c] % std::size_t(n)) + 1;
            double v = lambda == 0.0 ? 0.0 : -lambda * bit_error_entry(n, ar, sr, ac, sc);
            if (r == c) v += phase_error_entry(n, ar, sr);
            m.at(r, c) = v;
            m.at(c, r) = v;
        }
    }
    return max_eigenvalue_dense(m);
}

AttackState attack_state_from_omega(int n, const OmegaResult& best) {
    if (best.pattern.n != n) {
        throw std::invalid_argument("omega result and block size disagree");
    }
    if (best.eigenvector.empty()) {
        throw std::invalid_argument(
            "omega result carries no eigenvector (set OmegaOptions::want_eigenvector)");
    }
    if (best.first_slot < 1 || best.first_slot - 1 + int(best.eigenvector.size()) > n) {
        throw std::invalid_argument("eigenvector does not fit the block");
    }
    AttackState st;
    st.base = best.pattern;
    st.amps.assign(std::size_t(n), 0.0);
    for (std::size_t k = 0; k < best.eigenvector.size(); ++k) {
        st.amps[std::size_t(best.first_slot - 1) + k] = best.eigenvector[k];
    }
    return st;
}

AttackErrors attack_state_errors(const AttackState& state) {
    const int n = state.base.n;
    validate_wide_n(n);
    if (int(state.amps.size()) != n) {
        throw std::invalid_argument("amplitude count must equal the block size");
    }
    validate_pattern_word(n, state.base.bits);
    double norm2 = 0.0;
    for (double c : state.amps) norm2 += c * c;
    if (!(norm2 > 1e-24)) {
        throw std::invalid_argument("attack state has zero norm");
    }

    AttackErrors out;
    for (int i = 1; i <= n; ++i) {
        const double ci = state.amps[std::size_t(i - 1)];
        if (ci == 0.0) continue;
        const std::uint64_t ai = state.base.bits ^ (std::uint64_t{1} << (i - 1));
        out.phase += ci * ci * phase_error_entry(n, ai, i);
        for (int i2 = 1; i2 <= n; ++i2) {
            const double c2 = state.amps[std::size_t(i2 - 1)];
            if (c2 == 0.0) continue;
            const std::uint64_t a2 = state.base.bits ^ (std::uint64_t{1} << (i2 - 1));
            out.bit += ci * c2 * bit_error_entry(n, ai, i, a2, i2);
        }
    }
    out.bit /= norm2;
    out.phase /= norm2;
    return out;
}

AttackErrors attack_state_errors(const AttackState& state, const JointOperators& ops) {
    const int n = state.base.n;
    if (ops.n != n) {
        throw std::invalid_argument("attack state and operators disagree on block size");
    }
    if (int(state.amps.size()) != n) {
        throw std::invalid_argument("amplitude count must equal the block size");
    }
    validate_pattern_word(n, state.base.bits);

    const std::size_t dim = joint_dim(n);
    std::vector<double> psi(dim, 0.0);
    for (int i = 1; i <= n; ++i) {
        const std::uint64_t ai = state.base.bits ^ (std::uint64_t{1} << (i - 1));
        psi[joint_index(n, ai, i)] += state.amps[std::size_t(i - 1)];
    }
    double norm2 = 0.0;
    for (double v : psi) norm2 += v * v;
    if (!(norm2 > 1e-24)) {
        throw std::invalid_argument("attack state has zero norm");
    }

    auto expectation = [&](const DenseSym& m) {
        double acc = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
            if (psi[r] == 0.0) continue;
            double row = 0.0;
            for (std::size_t c = 0; c < dim; ++c) row += m.at(r, c) * psi[c];
            acc += psi[r] * row;
        }
        return acc / norm2;
    };
    return {expectation(ops.e), expectation(ops.e_ph)};
}

std::vector<PhiAmplitude> phi_support(int n, double alpha, int nu, int fock_cutoff) {
    if (n < 3 || n > 16) {
        throw std::invalid_argument("block size must be in 3..16 for the source amplitude scan");
    }
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be > 0");
    }
    if (nu < 0) {
        throw std::invalid_argument("photon number must be >= 0");
    }
    if (fock_cutoff < 0) fock_cutoff = nu + 8;
    if (fock_cutoff < nu) {
        throw std::invalid_argument("fock_cutoff must be >= nu");
    }

    std::vector<double> inv_fact(std::size_t(fock_cutoff) + 1, 1.0);
    for (int k = 1; k <= fock_cutoff; ++k) {
        inv_fact[std::size_t(k)] = inv_fact[std::size_t(k - 1)] / double(k);
    }

    const double prefactor = std::exp(-0.5 * n * alpha * alpha) * std::pow(alpha, nu);
    std::vector<PhiAmplitude> out;
    out.reserve(std::size_t{1} << n);
    std::vector<double> ways, next;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
        // ways[r]: sum over per-pulse photon numbers k_i (parity a_i,
        // k_i <= cutoff) with total r, of prod_i 1/k_i!
        ways.assign(std::size_t(nu) + 1, 0.0);
        ways[0] = 1.0;
        for (int pulse = 1; pulse <= n; ++pulse) {
            next.assign(std::size_t(nu) + 1, 0.0);
            for (int r = 0; r <= nu; ++r) {
                const double base = ways[std::size_t(r)];
                if (base == 0.0) continue;
                for (int k = bit_of(a, pulse); r + k <= nu && k <= fock_cutoff; k += 2) {
                    next[std::size_t(r + k)] += base * inv_fact[std::size_t(k)];
                }
            }
            ways.swap(next);
        }
        out.push_back({Pattern{n, a}, nu, prefactor * std::sqrt(ways[std::size_t(nu)])});
    }
    return out;
}

}  // namespace dpskr::oracle
