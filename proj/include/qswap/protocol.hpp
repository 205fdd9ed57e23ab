#pragma once

#include <map>
#include <optional>
#include <vector>

#include "qswap/cavity_ops.hpp"
#include "qswap/statevec.hpp"

namespace qswap {

/// Unknown coefficients (a, b) of the entangled state to teleport,
/// a|e..e> + b|g..g>. |a|^2 + |b|^2 = 1.
struct InputState {
    cplx a;
    cplx b;
    void validate() const;
};

/// Nonmaximal channel coefficients (alpha, beta) with
/// |alpha|^2 + |beta|^2 = 1. The channel state is
/// alpha|ge> - i beta|eg>, the -i applied internally.
struct ChannelSpec {
    cplx alpha;
    cplx beta;
    void validate() const;
};

enum class Scheme { Maximal, Nonmaximal, Ghz };

/// Full parameterization of one protocol variant. `n` is the number of
/// teleported atoms (2 for the pair schemes). `channels` holds one
/// ChannelSpec per EPR pair; nullopt means maximal channels (for the GHZ
/// scheme these default to (|ee> + |gg>)/sqrt2 per pair).
struct SchemeParams {
    Scheme scheme = Scheme::Maximal;
    int n = 2;
    std::optional<std::vector<ChannelSpec>> channels;
    void validate() const;
};

enum class PauliTag { I, X, Z, XZ };

const char* to_string(PauliTag tag);

/// Receiver-side local correction: one tag per receiver site, an optional
/// extra phase gate diag(1, e^{i chi}) on `phase_site` (needed when
/// channel coefficients carry nontrivial phases), and an overall unit
/// phase for exact bookkeeping.
struct CorrectionOp {
    std::vector<PauliTag> site_ops;
    double phase_angle = 0.0;
    int phase_site = 0;
    cplx global_phase = 1.0;
};

/// Timing-error offsets: theta_offset shifts the dispersive interaction
/// angle away from pi/4; epsilon_t_offset shifts the JC filter angle.
/// Corrections are always the ones derived at the unperturbed values.
struct Perturbation {
    double theta_offset = 0.0;
    double epsilon_t_offset = 0.0;
};

struct ProtocolRunRecord {
    std::vector<BellKind> bell_outcomes;      // one per measured pair
    std::optional<JCParams> filter_applied;
    std::optional<int> filter_target_site;
    bool pre_flip = false;                    // X applied to the target before filtering
    std::optional<bool> photon_detected;
    CorrectionOp correction;
    bool success = false;
    QState final_state;                       // receiver sites only
    double fidelity = 0.0;
    double branch_probability = 0.0;
};

struct BranchRecord {
    std::vector<BellKind> outcomes;
    bool photon_detected = false;
    double probability = 0.0;
    bool success = false;
    double fidelity = 0.0;
    QState final_state;
};

/// Shared state machine behind the three teleportation variants. Holds
/// the lazily derived, memoized correction table for its parameter set.
class ProtocolEngine {
public:
    explicit ProtocolEngine(SchemeParams params);

    const SchemeParams& params() const { return params_; }
    int num_sites() const { return total_sites_; }
    const std::vector<int>& receiver_sites() const { return receivers_; }

    QState build_initial_state(const InputState& input) const;

    /// Ideal target on the receiver sites: a|e..e> + b|g..g>.
    QState ideal_target(const InputState& input) const;

    /// One sampled protocol execution.
    ProtocolRunRecord run(const InputState& input, RngStream& rng,
                          const Perturbation& pert = {});

    /// Every measurement branch, enumerated deterministically via
    /// projection; probabilities sum to 1.
    std::vector<BranchRecord> enumerate_branches(const InputState& input,
                                                 const Perturbation& pert = {});

    /// The correction for a given outcome tuple, derived by brute-force
    /// search against a deterministically replayed probe branch, then
    /// memoized.
    const CorrectionOp& correction_for(const std::vector<BellKind>& outcomes);

private:
    ProtocolRunRecord finish_branch(const QState& post_disc,
                                    const std::vector<BellKind>& kinds,
                                    double p_disc, int forced_mode,
                                    RngStream* rng, const Perturbation& pert,
                                    bool deriving, const InputState& input);
    void enumerate_rec(const QState& state, std::size_t pair_idx, double p,
                       std::vector<BellKind>& kinds, const InputState& input,
                       const Perturbation& pert, std::vector<BranchRecord>& out);
    CorrectionOp derive_correction(const std::vector<BellKind>& outcomes);
    bool has_filter() const;
    // (S_b bits over receivers, |c_b|, |c_a|) for a branch class; S_b is
    // the basis string whose coefficient multiplies the input's b.
    void branch_strings(const std::vector<BellKind>& kinds,
                        std::vector<int>& s_b, double& c_b, double& c_a) const;

    SchemeParams params_;
    int total_sites_ = 0;
    std::vector<std::pair<int, int>> disc_pairs_;
    std::vector<int> receivers_;
    std::map<std::vector<BellKind>, CorrectionOp> corrections_;
};

/// Applies the dispersive unitary at the canonical angles to a 2-atom
/// state; basis inputs come out as the four EPR states.
QState prepare_epr_via_cavity(const QState& two_atom_state);

QState build_initial_state_maximal(const InputState& input);
QState build_initial_state_nonmaximal(const InputState& input,
                                      const ChannelSpec& ch1,
                                      const ChannelSpec& ch2);

ProtocolRunRecord teleport_maximal(const InputState& input, RngStream& rng,
                                   const Perturbation& pert = {});
ProtocolRunRecord teleport_nonmaximal(const InputState& input,
                                      const ChannelSpec& ch1,
                                      const ChannelSpec& ch2, RngStream& rng,
                                      const Perturbation& pert = {});
ProtocolRunRecord teleport_ghz_n(const InputState& input, int n,
                                 const std::optional<std::vector<ChannelSpec>>& channels,
                                 RngStream& rng, const Perturbation& pert = {});

CorrectionOp correction_for(const SchemeParams& params,
                            const std::vector<BellKind>& outcomes);

/// Apply a correction to a receiver-sites state.
QState apply_correction(const QState& state, const CorrectionOp& op);

} // namespace qswap
