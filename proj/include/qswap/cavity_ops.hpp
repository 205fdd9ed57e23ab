#pragma once

#include <array>
#include <vector>

#include "qswap/statevec.hpp"

namespace qswap {

/// Dimensionless parameters of the dispersive two-atom cavity interaction:
/// theta = lambda * t (lambda = eps^2 / 2 delta), phi = Omega * t (driving
/// pulse area). Canonical protocol values: theta = pi/4, phi = pi.
struct DispersiveParams {
    double theta = 0.0;
    double phi = 0.0;
};

/// Bell basis in the phase convention used throughout:
///   PhiPlus  = (|ee> + i|gg>)/sqrt2,  PhiMinus = (|ee> - i|gg>)/sqrt2,
///   PsiPlus  = (|ge> + i|eg>)/sqrt2,  PsiMinus = (|ge> - i|eg>)/sqrt2.
enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

const char* to_string(BellKind kind);

/// Resonant Jaynes-Cummings filter parameter: the product eps * t of the
/// atom-mode coupling and the interaction time. For filter use,
/// epsilon_t in [0, pi/2].
struct JCParams {
    double epsilon_t = 0.0;
};

/// The dispersive two-atom unitary, 4x4 row-major on the pair basis
/// |gg>, |ge>, |eg>, |ee>. At phi = pi the single-site driving rotations
/// exp(-i phi X) reduce to identity and the matrix is
/// cos(theta) I - i sin(theta) X(x)X, the uniform phase dropped.
std::vector<cplx> dispersive_two_atom_unitary(const DispersiveParams& p);

/// Amplitudes of the named Bell state in bit order gg, ge, eg, ee.
std::array<cplx, 4> bell_state(BellKind kind);

struct BellOutcome {
    BellKind kind;
    cplx phase;              // collapse phase relative to the Bell projection
    MeasurementRecord record;
};

/// Bell-state discrimination by separate measurements: applies the
/// dispersive unitary to (site_a, site_b), then measures both sites.
/// Outcome map: ee -> PhiPlus, gg -> PhiMinus (phase -i), ge -> PsiPlus,
/// eg -> PsiMinus (phase -i). `theta` is the interaction angle actually
/// applied (protocol value pi/4; exposed for timing-error sweeps).
BellOutcome bell_discriminate(const QState& state, int site_a, int site_b,
                              RngStream& rng, double theta = 0.78539816339744830962);

/// Resonant JC filter unitary, 4x4 row-major on the (atom, mode) pair in
/// basis g0, g1, e0, e1:
///   g0 -> g0
///   g1 -> cos(et) g1 - i sin(et) e0
///   e0 -> cos(et) e0 - i sin(et) g1
///   e1 -> e1 (outside the protocol's excitation sector; see
///         check_filter_input)
std::vector<cplx> jc_filter_unitary(const JCParams& p);

/// Strict validation: rejects states with weight above 1e-12 in the e1
/// sector of (atom_site, mode_site), where the {0,1} photon truncation
/// would be violated.
void check_filter_input(const QState& state, int atom_site, int mode_site);

} // namespace qswap
