#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qswap/rng.hpp"

namespace qswap {

using cplx = std::complex<double>;

inline constexpr double kInputNormTol = 1e-10;
inline constexpr double kInternalTol = 1e-12;
// squared-norm cutoff below which a projected branch counts as empty
inline constexpr double kEmptyBranchTol = 1e-28;

/// Dense state vector over a register of two-level sites (atoms, or a
/// photon mode truncated to {0,1}).
///
/// Bit-order convention, fixed across the whole project: site 0 is the
/// MOST significant bit of the basis index. For two sites the amplitude
/// order is |gg>, |ge>, |eg>, |ee> (g -> 0, e -> 1).
struct QState {
    int num_sites = 0;
    std::vector<cplx> amps;
    std::vector<std::string> labels; // optional, protocol bookkeeping only

    std::size_t dim() const { return amps.size(); }
    double norm() const;

    /// Bit value (0 or 1) of `site` inside a basis index.
    static int bit_of(std::size_t index, int site, int num_sites) {
        return static_cast<int>((index >> (num_sites - 1 - site)) & 1u);
    }
};

struct MeasurementRecord {
    std::vector<int> sites;
    std::vector<int> outcome;  // one bit per measured site
    double probability = 0.0;  // exact Born probability of the outcome
    QState post_state;         // full register, measured sites collapsed
};

struct ProjectResult {
    double probability = 0.0;
    std::optional<QState> post_state; // empty branch when probability ~ 0
};

/// Tensor product of normalized single-site states, in the documented
/// site-0-most-significant order.
QState init_product(const std::vector<std::array<cplx, 2>>& local_states);

/// Apply a 2^k x 2^k unitary (row-major) to the listed sites, k in {1, 2}.
/// The first listed site is the more significant bit of the local index.
QState apply_unitary(const QState& state, std::span<const int> sites,
                     std::span<const cplx> u);

/// Projective measurement of the listed sites, sampled from the Born
/// distribution. Only outcomes with nonzero probability are drawn.
MeasurementRecord measure(const QState& state, std::span<const int> sites,
                          RngStream& rng);

/// Deterministic single-site projection onto a local outcome. Returns the
/// Born probability and the renormalized post state (empty when the branch
/// has zero weight).
ProjectResult project(const QState& state, int site, int local_outcome);

/// |<s1|s2>|^2 -- symmetric, 1 iff equal up to global phase.
double fidelity_up_to_phase(const QState& s1, const QState& s2);

/// Wootters concurrence of a 2-site pure state; 2|ab| for a|ee>+b|gg>.
double concurrence_2q(const QState& state);

/// Wootters concurrence from a 4x4 density matrix (row-major), via the
/// eigenvalues of rho * (sy x sy) rho^* (sy x sy).
double concurrence_2q(const std::vector<cplx>& rho);

/// Build a state from disjoint blocks covering all sites. Each block is a
/// (site list, local amplitude vector) pair; sites need not be adjacent.
QState build_from_blocks(
    int num_sites,
    const std::vector<std::pair<std::vector<int>, std::vector<cplx>>>& blocks);

/// Extract the reduced state on `keep_sites` from a register whose other
/// sites are collapsed to basis states (post-measurement product form).
QState extract_sites(const QState& state, std::span<const int> keep_sites);

} // namespace qswap
