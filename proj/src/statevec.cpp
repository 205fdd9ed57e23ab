#include "qswap/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace qswap {

namespace {

void check_site(const QState& state, int site) {
    if (site < 0 || site >= state.num_sites)
        throw std::invalid_argument("site index out of range");
}

double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return s;
}

void renormalize(QState& state) {
    const double n = std::sqrt(norm2(state.amps));
    if (n <= 0.0) throw std::logic_error("cannot renormalize zero state");
    for (auto& a : state.amps) a /= n;
}

void check_unitary(std::span<const cplx> u, std::size_t d, double tol) {
    if (u.size() != d * d) throw std::invalid_argument("matrix size does not match site count");
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += std::conj(u[k * d + i]) * u[k * d + j];
            const cplx expect = (i == j) ? cplx(1.0) : cplx(0.0);
            if (std::abs(s - expect) > tol)
                throw std::invalid_argument("matrix is not unitary");
        }
    }
}

} // namespace

double QState::norm() const { return std::sqrt(norm2(amps)); }

QState init_product(const std::vector<std::array<cplx, 2>>& local_states) {
    if (local_states.empty())
        throw std::invalid_argument("init_product: empty site list");
    for (const auto& v : local_states) {
        const double n2 = std::norm(v[0]) + std::norm(v[1]);
        if (std::abs(n2 - 1.0) > 2.0 * kInputNormTol)
            throw std::invalid_argument("init_product: local state not normalized");
    }
    QState out;
    out.num_sites = static_cast<int>(local_states.size());
    out.amps.assign(std::size_t(1) << out.num_sites, cplx(0.0));
    for (std::size_t idx = 0; idx < out.dim(); ++idx) {
        cplx a = 1.0;
        for (int s = 0; s < out.num_sites; ++s)
            a *= local_states[s][QState::bit_of(idx, s, out.num_sites)];
        out.amps[idx] = a;
    }
    renormalize(out);
    return out;
}

QState apply_unitary(const QState& state, std::span<const int> sites,
                     std::span<const cplx> u) {
    const std::size_t k = sites.size();
    if (k < 1 || k > 2)
        throw std::invalid_argument("apply_unitary: supports 1 or 2 sites");
    for (int s : sites) check_site(state, s);
    if (k == 2 && sites[0] == sites[1])
        throw std::invalid_argument("apply_unitary: duplicate site");
    const std::size_t d = std::size_t(1) << k;
    check_unitary(u, d, kInputNormTol);

    // bit position (shift) of each addressed site; sites[0] is the more
    // significant local bit
    std::vector<int> shift(k);
    std::size_t addressed_mask = 0;
    for (std::size_t j = 0; j < k; ++j) {
        shift[j] = state.num_sites - 1 - sites[j];
        addressed_mask |= std::size_t(1) << shift[j];
    }

    QState out = state;
    std::vector<std::size_t> idx(d);
    std::vector<cplx> old(d);
    for (std::size_t base = 0; base < state.dim(); ++base) {
        if (base & addressed_mask) continue;
        for (std::size_t l = 0; l < d; ++l) {
            std::size_t full = base;
            for (std::size_t j = 0; j < k; ++j)
                if ((l >> (k - 1 - j)) & 1u) full |= std::size_t(1) << shift[j];
            idx[l] = full;
            old[l] = state.amps[full];
        }
        for (std::size_t r = 0; r < d; ++r) {
            cplx s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += u[r * d + c] * old[c];
            out.amps[idx[r]] = s;
        }
    }
    return out;
}

MeasurementRecord measure(const QState& state, std::span<const int> sites,
                          RngStream& rng) {
    const std::size_t k = sites.size();
    if (k == 0) throw std::invalid_argument("measure: empty site list");
    for (int s : sites) check_site(state, s);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (sites[i] == sites[j]) throw std::invalid_argument("measure: duplicate site");

    const std::size_t nout = std::size_t(1) << k;
    std::vector<double> prob(nout, 0.0);
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        std::size_t o = 0;
        for (std::size_t j = 0; j < k; ++j)
            o = (o << 1) | std::size_t(QState::bit_of(idx, sites[j], state.num_sites));
        prob[o] += std::norm(state.amps[idx]);
    }
    double total = 0.0;
    for (std::size_t o = 0; o < nout; ++o) {
        if (prob[o] < kEmptyBranchTol) prob[o] = 0.0; // never draw empty branches
        total += prob[o];
    }
    const double u = rng.uniform() * total;
    std::size_t chosen = 0;
    double acc = 0.0;
    bool found = false;
    for (std::size_t o = 0; o < nout; ++o) {
        if (prob[o] == 0.0) continue;
        acc += prob[o];
        chosen = o;
        if (u < acc) { found = true; break; }
    }
    if (!found) {
        // u landed on the fp boundary; keep the last nonzero outcome
    }

    MeasurementRecord rec;
    rec.sites.assign(sites.begin(), sites.end());
    rec.outcome.resize(k);
    for (std::size_t j = 0; j < k; ++j)
        rec.outcome[j] = static_cast<int>((chosen >> (k - 1 - j)) & 1u);
    rec.probability = prob[chosen];
    rec.post_state = state;
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        std::size_t o = 0;
        for (std::size_t j = 0; j < k; ++j)
            o = (o << 1) | std::size_t(QState::bit_of(idx, sites[j], state.num_sites));
        if (o != chosen) rec.post_state.amps[idx] = 0.0;
    }
    renormalize(rec.post_state);
    return rec;
}

ProjectResult project(const QState& state, int site, int local_outcome) {
    check_site(state, site);
    if (local_outcome != 0 && local_outcome != 1)
        throw std::invalid_argument("project: outcome must be 0 or 1");
    ProjectResult res;
    QState post = state;
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        if (QState::bit_of(idx, site, state.num_sites) == local_outcome) {
            res.probability += std::norm(state.amps[idx]);
        } else {
            post.amps[idx] = 0.0;
        }
    }
    if (res.probability < kEmptyBranchTol) {
        res.probability = res.probability < 0.0 ? 0.0 : res.probability;
        return res; // empty branch
    }
    renormalize(post);
    res.post_state = std::move(post);
    return res;
}

double fidelity_up_to_phase(const QState& s1, const QState& s2) {
    if (s1.num_sites != s2.num_sites)
        throw std::invalid_argument("fidelity_up_to_phase: dimension mismatch");
    cplx ov = 0.0;
    for (std::size_t i = 0; i < s1.dim(); ++i) ov += std::conj(s1.amps[i]) * s2.amps[i];
    return std::norm(ov);
}

double concurrence_2q(const QState& state) {
    if (state.num_sites != 2)
        throw std::invalid_argument("concurrence_2q: expected exactly 2 sites");
    // C = |<psi| sy x sy |psi^*>| = 2 |a_gg a_ee - a_ge a_eg|
    const auto& a = state.amps;
    return 2.0 * std::abs(a[0] * a[3] - a[1] * a[2]);
}

double concurrence_2q(const std::vector<cplx>& rho_in) {
    if (rho_in.size() != 16)
        throw std::invalid_argument("concurrence_2q: expected a 4x4 density matrix");
    Eigen::Matrix4cd rho;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) rho(r, c) = rho_in[std::size_t(r) * 4 + c];

    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("concurrence_2q: density matrix not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0)) > 1e-10)
        throw std::invalid_argument("concurrence_2q: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> herm(rho);
    if (herm.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("concurrence_2q: density matrix not PSD");

    Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
    flip(0, 3) = -1; flip(1, 2) = 1; flip(2, 1) = 1; flip(3, 0) = -1;
    const Eigen::Matrix4cd r_mat = rho * flip * rho.conjugate() * flip;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(r_mat, false);
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i)
        lam[i] = std::sqrt(std::max(0.0, solver.eigenvalues()(i).real()));
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

QState build_from_blocks(
    int num_sites,
    const std::vector<std::pair<std::vector<int>, std::vector<cplx>>>& blocks) {
    std::vector<bool> covered(num_sites, false);
    for (const auto& [sites, amps] : blocks) {
        if (amps.size() != std::size_t(1) << sites.size())
            throw std::invalid_argument("build_from_blocks: block size mismatch");
        for (int s : sites) {
            if (s < 0 || s >= num_sites || covered[s])
                throw std::invalid_argument("build_from_blocks: sites must partition the register");
            covered[s] = true;
        }
    }
    for (bool c : covered)
        if (!c) throw std::invalid_argument("build_from_blocks: uncovered site");

    QState out;
    out.num_sites = num_sites;
    out.amps.assign(std::size_t(1) << num_sites, cplx(0.0));
    for (std::size_t idx = 0; idx < out.dim(); ++idx) {
        cplx a = 1.0;
        for (const auto& [sites, amps] : blocks) {
            std::size_t local = 0;
            for (int s : sites)
                local = (local << 1) | std::size_t(QState::bit_of(idx, s, num_sites));
            a *= amps[local];
            if (a == cplx(0.0)) break;
        }
        out.amps[idx] = a;
    }
    renormalize(out);
    return out;
}

QState extract_sites(const QState& state, std::span<const int> keep_sites) {
    for (int s : keep_sites) check_site(state, s);
    // locate the collapsed bits of the non-kept sites from the largest amplitude
    std::size_t ref = 0;
    double best = -1.0;
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        const double w = std::norm(state.amps[idx]);
        if (w > best) { best = w; ref = idx; }
    }
    QState out;
    out.num_sites = static_cast<int>(keep_sites.size());
    out.amps.assign(std::size_t(1) << out.num_sites, cplx(0.0));
    for (std::size_t local = 0; local < out.dim(); ++local) {
        std::size_t full = ref;
        for (std::size_t j = 0; j < keep_sites.size(); ++j) {
            const int shift = state.num_sites - 1 - keep_sites[j];
            full &= ~(std::size_t(1) << shift);
            if ((local >> (keep_sites.size() - 1 - j)) & 1u)
                full |= std::size_t(1) << shift;
        }
        out.amps[local] = state.amps[full];
    }
    renormalize(out);
    return out;
}

} // namespace qswap
