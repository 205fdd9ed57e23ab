#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qswap/protocol.hpp"

namespace qswap {

/// Per-residual-class success probabilities of the nonmaximal pair scheme
/// and their sum.
struct SuccessBreakdown {
    double p_a = 0.0;
    double p_b = 0.0;
    double p_c = 0.0;
    double p_d = 0.0;
    double total = 0.0;
};

/// Closed-form success probabilities. p_a = p_d = min(|a1 a2|, |b1 b2|)^2,
/// p_b = p_c = min(|a1 b2|, |b1 a2|)^2 -- the min-product form accepts any
/// normalized channel, not just |alpha| > |beta|.
SuccessBreakdown analytic_success_prob(const ChannelSpec& ch1,
                                       const ChannelSpec& ch2);

struct MonteCarloResult {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double success_rate = 0.0;
    double mean_conditional_fidelity = 0.0;
    double ci95_low = 0.0;   // normal-approximation 95% interval
    double ci95_high = 0.0;
};

/// Seeded independent protocol executions; per-trial streams derive from
/// the master seed by counter, so results are reproducible and independent
/// of scheduling.
MonteCarloResult monte_carlo(const SchemeParams& params, const InputState& input,
                             std::uint64_t trials, std::uint64_t seed);

/// Exact overall success probability by exhaustive branch enumeration
/// (sum of probability x success over every measurement branch).
double exhaustive_success_prob(const SchemeParams& params, const InputState& input);

struct SweepPoint {
    double offset = 0.0;
    double success_rate = 0.0;
    double mean_fidelity = 0.0; // post-correction, vs the ideal target
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    bool perturb_theta = true;
    bool perturb_epsilon_t = false;
};

/// Timing-error sensitivity: reruns the protocol with theta = pi/4 + d
/// (and/or the filter angle shifted by d) for each offset d, keeping the
/// corrections derived at the unperturbed values. The d = 0 point
/// reproduces the unperturbed statistics under the same seed.
SweepResult timing_sensitivity(const SchemeParams& params, const InputState& input,
                               std::span<const double> offsets,
                               std::uint64_t trials, std::uint64_t seed,
                               bool perturb_theta = true,
                               bool perturb_epsilon_t = false);

/// Concurrence of the receiver pair of a successful run.
double swapped_pair_concurrence(const ProtocolRunRecord& record);

} // namespace qswap
