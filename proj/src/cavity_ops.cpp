#include "qswap/cavity_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace qswap {

namespace {
constexpr cplx kI{0.0, 1.0};
const double kSqrtHalf = std::sqrt(0.5);

// C = A * B for 4x4 row-major
std::vector<cplx> mat4_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> c(16, cplx(0.0));
    for (int r = 0; r < 4; ++r)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) c[r * 4 + j] += a[r * 4 + k] * b[k * 4 + j];
    return c;
}
} // namespace

const char* to_string(BellKind kind) {
    switch (kind) {
        case BellKind::PhiPlus: return "phi+";
        case BellKind::PhiMinus: return "phi-";
        case BellKind::PsiPlus: return "psi+";
        case BellKind::PsiMinus: return "psi-";
    }
    return "?";
}

std::vector<cplx> dispersive_two_atom_unitary(const DispersiveParams& p) {
    const double c = std::cos(p.theta);
    const double s = std::sin(p.theta);
    // cos(theta) I - i sin(theta) X(x)X  (X(x)X is the anti-diagonal)
    std::vector<cplx> eff(16, cplx(0.0));
    for (int r = 0; r < 4; ++r) {
        eff[r * 4 + r] = c;
        eff[r * 4 + (3 - r)] = -kI * s;
    }
    // driving pulse exp(-i phi X) on each atom; identity at phi = pi
    const double cd = std::cos(p.phi);
    const double sd = std::sin(p.phi);
    if (std::abs(sd) < 1e-15 && std::abs(cd - (cd > 0 ? 1.0 : -1.0)) < 1e-15) {
        if (cd < 0) return eff; // (-I)(x)(-I) = I
        return eff;             // phi = 0 (mod 2pi): identity
    }
    const cplx d00 = cd, d01 = -kI * sd;
    std::vector<cplx> drive(16, cplx(0.0));
    // (D (x) D) with D = [[cd, -i sd], [-i sd, cd]]
    const cplx d[2][2] = {{d00, d01}, {d01, d00}};
    for (int r = 0; r < 4; ++r)
        for (int c2 = 0; c2 < 4; ++c2)
            drive[r * 4 + c2] = d[r >> 1][c2 >> 1] * d[r & 1][c2 & 1];
    return mat4_mul(drive, eff);
}

std::array<cplx, 4> bell_state(BellKind kind) {
    switch (kind) {
        case BellKind::PhiPlus:  return {kI * kSqrtHalf, 0.0, 0.0, kSqrtHalf};
        case BellKind::PhiMinus: return {-kI * kSqrtHalf, 0.0, 0.0, kSqrtHalf};
        case BellKind::PsiPlus:  return {0.0, kSqrtHalf, kI * kSqrtHalf, 0.0};
        case BellKind::PsiMinus: return {0.0, kSqrtHalf, -kI * kSqrtHalf, 0.0};
    }
    throw std::invalid_argument("bell_state: unknown kind");
}

BellOutcome bell_discriminate(const QState& state, int site_a, int site_b,
                              RngStream& rng, double theta) {
    const auto u = dispersive_two_atom_unitary({theta, M_PI});
    const std::array<int, 2> sites{site_a, site_b};
    const QState evolved = apply_unitary(state, sites, u);
    MeasurementRecord rec = measure(evolved, sites, rng);
    BellOutcome out{BellKind::PhiPlus, cplx(1.0), std::move(rec)};
    const int oa = out.record.outcome[0], ob = out.record.outcome[1];
    if (oa == 1 && ob == 1) {
        out.kind = BellKind::PhiPlus;  out.phase = 1.0;
    } else if (oa == 0 && ob == 0) {
        out.kind = BellKind::PhiMinus; out.phase = -kI;
    } else if (oa == 0 && ob == 1) {
        out.kind = BellKind::PsiPlus;  out.phase = 1.0;
    } else {
        out.kind = BellKind::PsiMinus; out.phase = -kI;
    }
    return out;
}

std::vector<cplx> jc_filter_unitary(const JCParams& p) {
    const double c = std::cos(p.epsilon_t);
    const double s = std::sin(p.epsilon_t);
    std::vector<cplx> u(16, cplx(0.0));
    // basis g0, g1, e0, e1
    u[0 * 4 + 0] = 1.0;
    u[1 * 4 + 1] = c;
    u[1 * 4 + 2] = -kI * s;
    u[2 * 4 + 1] = -kI * s;
    u[2 * 4 + 2] = c;
    u[3 * 4 + 3] = 1.0;
    return u;
}

void check_filter_input(const QState& state, int atom_site, int mode_site) {
    double w = 0.0;
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        if (QState::bit_of(idx, atom_site, state.num_sites) == 1 &&
            QState::bit_of(idx, mode_site, state.num_sites) == 1)
            w += std::norm(state.amps[idx]);
    }
    if (std::sqrt(w) > 1e-12)
        throw std::invalid_argument("jc filter: photon-number truncation violated (amplitude in e1 sector)");
}

} // namespace qswap
