#include "qswap/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qswap {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kThetaCanonical = M_PI / 4.0;
const double kSqrtHalf = std::sqrt(0.5);

void kind_to_bits(BellKind kind, int& bit_a, int& bit_b) {
    switch (kind) {
        case BellKind::PhiPlus:  bit_a = 1; bit_b = 1; return;
        case BellKind::PhiMinus: bit_a = 0; bit_b = 0; return;
        case BellKind::PsiPlus:  bit_a = 0; bit_b = 1; return;
        case BellKind::PsiMinus: bit_a = 1; bit_b = 0; return;
    }
    throw std::invalid_argument("unknown BellKind");
}

BellKind bits_to_kind(int bit_a, int bit_b) {
    if (bit_a == 1 && bit_b == 1) return BellKind::PhiPlus;
    if (bit_a == 0 && bit_b == 0) return BellKind::PhiMinus;
    if (bit_a == 0 && bit_b == 1) return BellKind::PsiPlus;
    return BellKind::PsiMinus;
}

bool is_phi(BellKind kind) {
    return kind == BellKind::PhiPlus || kind == BellKind::PhiMinus;
}

std::array<cplx, 4> tag_matrix(PauliTag tag) {
    switch (tag) {
        case PauliTag::I:  return {1.0, 0.0, 0.0, 1.0};
        case PauliTag::X:  return {0.0, 1.0, 1.0, 0.0};
        case PauliTag::Z:  return {1.0, 0.0, 0.0, -1.0};
        case PauliTag::XZ: return {0.0, -1.0, 1.0, 0.0};
    }
    throw std::invalid_argument("unknown PauliTag");
}

// image bit and amplitude factor of a tag acting on a basis bit (g=0, e=1)
void tag_action(PauliTag tag, int bit, int& out_bit, double& factor) {
    switch (tag) {
        case PauliTag::I:  out_bit = bit;     factor = 1.0; return;
        case PauliTag::X:  out_bit = 1 - bit; factor = 1.0; return;
        case PauliTag::Z:  out_bit = bit;     factor = bit ? -1.0 : 1.0; return;
        case PauliTag::XZ: out_bit = 1 - bit; factor = bit ? -1.0 : 1.0; return;
    }
}

QState append_vacuum_mode(const QState& state) {
    QState out;
    out.num_sites = state.num_sites + 1;
    out.amps.assign(state.dim() * 2, cplx(0.0));
    for (std::size_t idx = 0; idx < state.dim(); ++idx)
        out.amps[idx << 1] = state.amps[idx];
    return out;
}

CorrectionOp identity_correction(int n) {
    CorrectionOp op;
    op.site_ops.assign(n, PauliTag::I);
    return op;
}

/// Brute-force search for the tensor of {I, X, Z, XZ} (plus a single-site
/// phase gate when channel phases require it) that maps `residual` to the
/// probe's ideal target.
CorrectionOp brute_force_correction(const QState& residual, const InputState& probe) {
    const int n = residual.num_sites;
    const double a0 = probe.a.real();
    const double b0 = probe.b.real();

    struct Term { std::size_t idx; cplx amp; };
    std::vector<Term> terms;
    for (std::size_t idx = 0; idx < residual.dim(); ++idx)
        if (std::abs(residual.amps[idx]) > 1e-8) terms.push_back({idx, residual.amps[idx]});

    const std::size_t all_ones = residual.dim() - 1;
    auto ideal_amp = [&](std::size_t idx) -> cplx {
        if (idx == all_ones) return a0;
        if (idx == 0) return b0;
        return 0.0;
    };

    CorrectionOp best = identity_correction(n);
    double best_f = -1.0;
    cplx best_ov = 1.0;

    std::vector<PauliTag> tags(n);
    const std::size_t ncand = std::size_t(1) << (2 * n);
    for (std::size_t code = 0; code < ncand; ++code) {
        std::size_t c = code;
        for (int i = 0; i < n; ++i) { tags[i] = static_cast<PauliTag>(c & 3u); c >>= 2; }
        cplx ov = 0.0;
        for (const Term& t : terms) {
            std::size_t image = 0;
            double factor = 1.0;
            for (int i = 0; i < n; ++i) {
                int ob; double f;
                tag_action(tags[i], QState::bit_of(t.idx, i, n), ob, f);
                image = (image << 1) | std::size_t(ob);
                factor *= f;
            }
            ov += std::conj(ideal_amp(image)) * factor * t.amp;
        }
        const double f = std::norm(ov);
        if (f > best_f) {
            best_f = f;
            best.site_ops = tags;
            best_ov = ov;
        }
    }
    if (best_f >= 1.0 - 1e-10 || terms.size() != 2) {
        if (std::abs(best_ov) > 0.0) best.global_phase = std::conj(best_ov) / std::abs(best_ov);
        return best;
    }

    // Channel phases left a residual relative phase no pure tag tensor can
    // absorb; fix it with a phase gate on site 0 after the X pattern that
    // sends one term to |g..g> and its complement to |e..e>.
    for (const Term& t : terms) {
        std::vector<PauliTag> xpat(n, PauliTag::I);
        for (int i = 0; i < n; ++i)
            if (QState::bit_of(t.idx, i, n) == 1) xpat[i] = PauliTag::X;
        const Term& other = (&t == &terms[0]) ? terms[1] : terms[0];
        if ((t.idx ^ other.idx) != all_ones) continue; // not complementary
        const cplx d_gg = t.amp;
        const cplx d_ee = other.amp;
        const double chi = std::arg(d_gg) - std::arg(d_ee);
        const cplx ov = a0 * d_ee * std::exp(kI * chi) + b0 * d_gg;
        if (std::norm(ov) > best_f) {
            best_f = std::norm(ov);
            best.site_ops = xpat;
            best.phase_angle = chi;
            best.phase_site = 0;
            best_ov = ov;
        }
    }
    if (std::abs(best_ov) > 0.0) best.global_phase = std::conj(best_ov) / std::abs(best_ov);
    return best;
}

} // namespace

const char* to_string(PauliTag tag) {
    switch (tag) {
        case PauliTag::I: return "I";
        case PauliTag::X: return "X";
        case PauliTag::Z: return "Z";
        case PauliTag::XZ: return "XZ";
    }
    return "?";
}

void InputState::validate() const {
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 2.0 * kInputNormTol)
        throw std::invalid_argument("input state (a, b) is not normalized");
}

void ChannelSpec::validate() const {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 2.0 * kInputNormTol)
        throw std::invalid_argument("channel (alpha, beta) is not normalized");
}

void SchemeParams::validate() const {
    if (scheme == Scheme::Ghz) {
        if (n < 2 || n > 8) throw std::invalid_argument("ghz scheme requires 2 <= n <= 8");
    } else if (n != 2) {
        throw std::invalid_argument("pair schemes have n = 2");
    }
    if (scheme == Scheme::Nonmaximal && (!channels || channels->size() != 2))
        throw std::invalid_argument("nonmaximal scheme requires exactly 2 channels");
    if (scheme == Scheme::Maximal && channels)
        throw std::invalid_argument("maximal scheme takes no channel list");
    if (channels) {
        if (scheme == Scheme::Ghz && channels->size() != std::size_t(n))
            throw std::invalid_argument("ghz scheme requires one channel per pair");
        for (const auto& ch : *channels) ch.validate();
    }
}

ProtocolEngine::ProtocolEngine(SchemeParams params) : params_(std::move(params)) {
    params_.validate();
    const int n = params_.n;
    if (params_.scheme == Scheme::Ghz) {
        total_sites_ = 3 * n;
        for (int j = 0; j < n; ++j) {
            disc_pairs_.emplace_back(j, n + j);
            receivers_.push_back(2 * n + j);
        }
    } else {
        // atoms 1..6 -> sites 0..5: input (0,1), channel pairs (2,3) and (4,5)
        total_sites_ = 6;
        disc_pairs_ = {{0, 2}, {1, 4}};
        receivers_ = {3, 5};
    }
}

bool ProtocolEngine::has_filter() const {
    return params_.scheme == Scheme::Nonmaximal ||
           (params_.scheme == Scheme::Ghz && params_.channels.has_value());
}

QState ProtocolEngine::build_initial_state(const InputState& input) const {
    input.validate();
    const int n = params_.n;
    std::vector<std::pair<std::vector<int>, std::vector<cplx>>> blocks;

    std::vector<int> input_sites(n);
    for (int i = 0; i < n; ++i) input_sites[i] = i;
    std::vector<cplx> input_amps(std::size_t(1) << n, cplx(0.0));
    input_amps[0] = input.b;
    input_amps[input_amps.size() - 1] = input.a;
    blocks.emplace_back(std::move(input_sites), std::move(input_amps));

    for (int j = 0; j < n; ++j) {
        std::vector<int> sites;
        if (params_.scheme == Scheme::Ghz)
            sites = {n + j, 2 * n + j};
        else
            sites = {2 + 2 * j, 3 + 2 * j};
        std::vector<cplx> amps(4, cplx(0.0));
        if (params_.channels) {
            const ChannelSpec& ch = (*params_.channels)[j];
            amps[1] = ch.alpha;        // |ge>
            amps[2] = -kI * ch.beta;   // -i beta |eg>
        } else if (params_.scheme == Scheme::Ghz) {
            amps[0] = kSqrtHalf;       // (|gg> + |ee>)/sqrt2
            amps[3] = kSqrtHalf;
        } else {
            amps[1] = kSqrtHalf;       // (|ge> - i|eg>)/sqrt2
            amps[2] = -kI * kSqrtHalf;
        }
        blocks.emplace_back(std::move(sites), std::move(amps));
    }
    return build_from_blocks(total_sites_, blocks);
}

QState ProtocolEngine::ideal_target(const InputState& input) const {
    QState out;
    out.num_sites = params_.n;
    out.amps.assign(std::size_t(1) << params_.n, cplx(0.0));
    out.amps[0] = input.b;
    out.amps[out.dim() - 1] = input.a;
    return out;
}

void ProtocolEngine::branch_strings(const std::vector<BellKind>& kinds,
                                    std::vector<int>& s_b, double& c_b,
                                    double& c_a) const {
    const int n = params_.n;
    s_b.assign(n, 0);
    c_b = 1.0;
    c_a = 1.0;
    const bool ghz_maximal = params_.scheme == Scheme::Ghz && !params_.channels;
    for (int j = 0; j < n; ++j) {
        const bool phi = is_phi(kinds[j]);
        if (ghz_maximal) {
            s_b[j] = phi ? 0 : 1;
            c_b *= kSqrtHalf;
            c_a *= kSqrtHalf;
        } else {
            double al = kSqrtHalf, be = kSqrtHalf;
            if (params_.channels) {
                al = std::abs((*params_.channels)[j].alpha);
                be = std::abs((*params_.channels)[j].beta);
            }
            s_b[j] = phi ? 1 : 0;
            c_b *= phi ? al : be;
            c_a *= phi ? be : al;
        }
    }
}

ProtocolRunRecord ProtocolEngine::finish_branch(
    const QState& post_disc, const std::vector<BellKind>& kinds, double p_disc,
    int forced_mode, RngStream* rng, const Perturbation& pert, bool deriving,
    const InputState& input) {
    ProtocolRunRecord rec;
    rec.bell_outcomes = kinds;
    const QState ideal = ideal_target(input);

    if (!has_filter()) {
        QState recv = extract_sites(post_disc, receivers_);
        if (!deriving) {
            rec.correction = correction_for(kinds);
            recv = apply_correction(recv, rec.correction);
        }
        rec.final_state = std::move(recv);
        rec.success = true;
        rec.fidelity = fidelity_up_to_phase(rec.final_state, ideal);
        rec.branch_probability = p_disc;
        return rec;
    }

    std::vector<int> s_b;
    double c_b = 0.0, c_a = 0.0;
    branch_strings(kinds, s_b, c_b, c_a);
    const double big = std::max(c_b, c_a);
    const double small = std::min(c_b, c_a);
    if (big < 1e-15) {
        // nothing to filter; the branch carries no usable amplitude
        rec.success = false;
        rec.final_state = extract_sites(post_disc, receivers_);
        rec.fidelity = fidelity_up_to_phase(rec.final_state, ideal);
        rec.branch_probability = p_disc;
        rec.photon_detected = false;
        rec.correction = identity_correction(params_.n);
        return rec;
    }

    std::vector<int> s_big = (c_b >= c_a) ? s_b : [&] {
        std::vector<int> v(s_b.size());
        for (std::size_t i = 0; i < s_b.size(); ++i) v[i] = 1 - s_b[i];
        return v;
    }();

    QState st = post_disc;
    const int last_recv = receivers_.back();
    bool pre_flip = std::none_of(s_big.begin(), s_big.end(), [](int b) { return b == 1; });
    if (pre_flip) {
        const auto x = tag_matrix(PauliTag::X);
        const std::array<int, 1> site{last_recv};
        st = apply_unitary(st, site, x);
        s_big.back() = 1;
    }
    int target = last_recv;
    for (int j = params_.n - 1; j >= 0; --j)
        if (s_big[j] == 1) { target = receivers_[j]; break; }

    const double ratio = std::clamp(small / big, 0.0, 1.0);
    const double epsilon_t = std::acos(ratio) + pert.epsilon_t_offset;

    QState with_mode = append_vacuum_mode(st);
    const int mode_site = total_sites_;
    check_filter_input(with_mode, target, mode_site);
    const std::array<int, 2> jc_sites{target, mode_site};
    with_mode = apply_unitary(with_mode, jc_sites, jc_filter_unitary({epsilon_t}));

    double p_mode = 0.0;
    int mode_outcome = 0;
    QState post_mode;
    if (forced_mode < 0) {
        const std::array<int, 1> msite{mode_site};
        MeasurementRecord mrec = measure(with_mode, msite, *rng);
        mode_outcome = mrec.outcome[0];
        p_mode = mrec.probability;
        post_mode = std::move(mrec.post_state);
    } else {
        ProjectResult pr = project(with_mode, mode_site, forced_mode);
        if (!pr.post_state) {
            rec.branch_probability = 0.0; // empty branch; callers skip it
            rec.success = false;
            return rec;
        }
        mode_outcome = forced_mode;
        p_mode = pr.probability;
        post_mode = std::move(*pr.post_state);
    }

    rec.filter_applied = JCParams{epsilon_t};
    rec.filter_target_site = target;
    rec.pre_flip = pre_flip;
    rec.photon_detected = (mode_outcome == 1);
    rec.branch_probability = p_disc * p_mode;

    QState recv = extract_sites(post_mode, receivers_);
    if (mode_outcome == 1) {
        rec.success = false;
        rec.correction = identity_correction(params_.n);
        rec.final_state = std::move(recv);
    } else {
        rec.success = true;
        if (!deriving) {
            rec.correction = correction_for(kinds);
            recv = apply_correction(recv, rec.correction);
        }
        rec.final_state = std::move(recv);
    }
    rec.fidelity = fidelity_up_to_phase(rec.final_state, ideal);
    return rec;
}

ProtocolRunRecord ProtocolEngine::run(const InputState& input, RngStream& rng,
                                      const Perturbation& pert) {
    QState st = build_initial_state(input);
    std::vector<BellKind> kinds;
    double p = 1.0;
    for (const auto& [sa, sb] : disc_pairs_) {
        BellOutcome out = bell_discriminate(st, sa, sb, rng,
                                            kThetaCanonical + pert.theta_offset);
        st = std::move(out.record.post_state);
        p *= out.record.probability;
        kinds.push_back(out.kind);
    }
    return finish_branch(st, kinds, p, -1, &rng, pert, false, input);
}

void ProtocolEngine::enumerate_rec(const QState& state, std::size_t pair_idx,
                                   double p, std::vector<BellKind>& kinds,
                                   const InputState& input,
                                   const Perturbation& pert,
                                   std::vector<BranchRecord>& out) {
    if (pair_idx == disc_pairs_.size()) {
        auto push = [&](ProtocolRunRecord&& rec) {
            if (rec.branch_probability <= 0.0) return;
            BranchRecord br;
            br.outcomes = rec.bell_outcomes;
            br.photon_detected = rec.photon_detected.value_or(false);
            br.probability = rec.branch_probability;
            br.success = rec.success;
            br.fidelity = rec.fidelity;
            br.final_state = std::move(rec.final_state);
            out.push_back(std::move(br));
        };
        if (has_filter()) {
            push(finish_branch(state, kinds, p, 0, nullptr, pert, false, input));
            push(finish_branch(state, kinds, p, 1, nullptr, pert, false, input));
        } else {
            push(finish_branch(state, kinds, p, -1, nullptr, pert, false, input));
        }
        return;
    }
    const auto [sa, sb] = disc_pairs_[pair_idx];
    const auto u = dispersive_two_atom_unitary(
        {kThetaCanonical + pert.theta_offset, M_PI});
    const std::array<int, 2> sites{sa, sb};
    const QState evolved = apply_unitary(state, sites, u);
    for (int oa = 0; oa < 2; ++oa) {
        ProjectResult pa = project(evolved, sa, oa);
        if (!pa.post_state) continue;
        for (int ob = 0; ob < 2; ++ob) {
            ProjectResult pb = project(*pa.post_state, sb, ob);
            if (!pb.post_state) continue;
            kinds.push_back(bits_to_kind(oa, ob));
            enumerate_rec(*pb.post_state, pair_idx + 1,
                          p * pa.probability * pb.probability, kinds, input,
                          pert, out);
            kinds.pop_back();
        }
    }
}

std::vector<BranchRecord> ProtocolEngine::enumerate_branches(
    const InputState& input, const Perturbation& pert) {
    std::vector<BranchRecord> out;
    std::vector<BellKind> kinds;
    enumerate_rec(build_initial_state(input), 0, 1.0, kinds, input, pert, out);
    return out;
}

CorrectionOp ProtocolEngine::derive_correction(const std::vector<BellKind>& outcomes) {
    const InputState probe{0.8, 0.6};
    QState st = build_initial_state(probe);
    double p = 1.0;
    for (std::size_t i = 0; i < disc_pairs_.size(); ++i) {
        const auto [sa, sb] = disc_pairs_[i];
        const auto u = dispersive_two_atom_unitary({kThetaCanonical, M_PI});
        const std::array<int, 2> sites{sa, sb};
        st = apply_unitary(st, sites, u);
        int bit_a = 0, bit_b = 0;
        kind_to_bits(outcomes[i], bit_a, bit_b);
        ProjectResult pa = project(st, sa, bit_a);
        if (!pa.post_state) return identity_correction(params_.n); // unreachable branch
        ProjectResult pb = project(*pa.post_state, sb, bit_b);
        if (!pb.post_state) return identity_correction(params_.n);
        st = std::move(*pb.post_state);
        p *= pa.probability * pb.probability;
    }
    QState residual;
    if (has_filter()) {
        ProtocolRunRecord rec =
            finish_branch(st, outcomes, p, 0, nullptr, {}, true, probe);
        if (rec.branch_probability <= 0.0) return identity_correction(params_.n);
        residual = std::move(rec.final_state);
    } else {
        residual = extract_sites(st, receivers_);
    }
    return brute_force_correction(residual, probe);
}

const CorrectionOp& ProtocolEngine::correction_for(
    const std::vector<BellKind>& outcomes) {
    if (outcomes.size() != disc_pairs_.size())
        throw std::invalid_argument("outcome count does not match scheme arity");
    auto it = corrections_.find(outcomes);
    if (it == corrections_.end())
        it = corrections_.emplace(outcomes, derive_correction(outcomes)).first;
    return it->second;
}

QState apply_correction(const QState& state, const CorrectionOp& op) {
    if (op.site_ops.size() != std::size_t(state.num_sites))
        throw std::invalid_argument("correction arity does not match state");
    QState out = state;
    for (int i = 0; i < state.num_sites; ++i) {
        if (op.site_ops[i] == PauliTag::I) continue;
        const auto m = tag_matrix(op.site_ops[i]);
        const std::array<int, 1> site{i};
        out = apply_unitary(out, site, m);
    }
    if (op.phase_angle != 0.0) {
        const std::array<cplx, 4> phase{1.0, 0.0, 0.0, std::exp(kI * op.phase_angle)};
        const std::array<int, 1> site{op.phase_site};
        out = apply_unitary(out, site, phase);
    }
    for (auto& a : out.amps) a *= op.global_phase;
    return out;
}

QState prepare_epr_via_cavity(const QState& two_atom_state) {
    if (two_atom_state.num_sites != 2)
        throw std::invalid_argument("prepare_epr_via_cavity: expected 2 atoms");
    const std::array<int, 2> sites{0, 1};
    return apply_unitary(two_atom_state, sites,
                         dispersive_two_atom_unitary({kThetaCanonical, M_PI}));
}

QState build_initial_state_maximal(const InputState& input) {
    return ProtocolEngine({Scheme::Maximal, 2, std::nullopt}).build_initial_state(input);
}

QState build_initial_state_nonmaximal(const InputState& input,
                                      const ChannelSpec& ch1,
                                      const ChannelSpec& ch2) {
    return ProtocolEngine({Scheme::Nonmaximal, 2, std::vector<ChannelSpec>{ch1, ch2}})
        .build_initial_state(input);
}

ProtocolRunRecord teleport_maximal(const InputState& input, RngStream& rng,
                                   const Perturbation& pert) {
    return ProtocolEngine({Scheme::Maximal, 2, std::nullopt}).run(input, rng, pert);
}

ProtocolRunRecord teleport_nonmaximal(const InputState& input,
                                      const ChannelSpec& ch1,
                                      const ChannelSpec& ch2, RngStream& rng,
                                      const Perturbation& pert) {
    return ProtocolEngine({Scheme::Nonmaximal, 2, std::vector<ChannelSpec>{ch1, ch2}})
        .run(input, rng, pert);
}

ProtocolRunRecord teleport_ghz_n(const InputState& input, int n,
                                 const std::optional<std::vector<ChannelSpec>>& channels,
                                 RngStream& rng, const Perturbation& pert) {
    return ProtocolEngine({Scheme::Ghz, n, channels}).run(input, rng, pert);
}

CorrectionOp correction_for(const SchemeParams& params,
                            const std::vector<BellKind>& outcomes) {
    ProtocolEngine engine(params);
    return engine.correction_for(outcomes);
}

} // namespace qswap
