#include "qswap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qswap {

SuccessBreakdown analytic_success_prob(const ChannelSpec& ch1,
                                       const ChannelSpec& ch2) {
    ch1.validate();
    ch2.validate();
    const double a1 = std::abs(ch1.alpha), b1 = std::abs(ch1.beta);
    const double a2 = std::abs(ch2.alpha), b2 = std::abs(ch2.beta);
    SuccessBreakdown out;
    const double same = std::min(a1 * a2, b1 * b2);
    const double cross = std::min(a1 * b2, b1 * a2);
    out.p_a = out.p_d = same * same;
    out.p_b = out.p_c = cross * cross;
    out.total = out.p_a + out.p_b + out.p_c + out.p_d;
    return out;
}

MonteCarloResult monte_carlo(const SchemeParams& params, const InputState& input,
                             std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
    ProtocolEngine engine(params);
    MonteCarloResult res;
    res.trials = trials;
    double fid_sum = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        RngStream rng = RngStream::for_trial(seed, t);
        const ProtocolRunRecord rec = engine.run(input, rng);
        if (rec.success) {
            ++res.successes;
            fid_sum += rec.fidelity;
        }
    }
    res.success_rate = static_cast<double>(res.successes) / static_cast<double>(trials);
    res.mean_conditional_fidelity =
        res.successes > 0 ? fid_sum / static_cast<double>(res.successes) : 0.0;
    const double p = res.success_rate;
    const double half = 1.959963984540054 *
                        std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    res.ci95_low = p - half;
    res.ci95_high = p + half;
    return res;
}

double exhaustive_success_prob(const SchemeParams& params, const InputState& input) {
    ProtocolEngine engine(params);
    if (engine.num_sites() + 1 > 25)
        throw std::invalid_argument("exhaustive_success_prob: register too large");
    double total = 0.0;
    for (const BranchRecord& br : engine.enumerate_branches(input))
        if (br.success) total += br.probability;
    return total;
}

SweepResult timing_sensitivity(const SchemeParams& params, const InputState& input,
                               std::span<const double> offsets,
                               std::uint64_t trials, std::uint64_t seed,
                               bool perturb_theta, bool perturb_epsilon_t) {
    if (trials < 1) throw std::invalid_argument("timing_sensitivity: trials must be >= 1");
    ProtocolEngine engine(params);
    SweepResult out;
    out.trials = trials;
    out.seed = seed;
    out.perturb_theta = perturb_theta;
    out.perturb_epsilon_t = perturb_epsilon_t;
    for (double offset : offsets) {
        Perturbation pert;
        if (perturb_theta) pert.theta_offset = offset;
        if (perturb_epsilon_t) pert.epsilon_t_offset = offset;
        SweepPoint point;
        point.offset = offset;
        std::uint64_t successes = 0;
        double fid_sum = 0.0;
        for (std::uint64_t t = 0; t < trials; ++t) {
            RngStream rng = RngStream::for_trial(seed, t);
            const ProtocolRunRecord rec = engine.run(input, rng, pert);
            if (rec.success) ++successes;
            fid_sum += rec.fidelity;
        }
        point.success_rate =
            static_cast<double>(successes) / static_cast<double>(trials);
        point.mean_fidelity = fid_sum / static_cast<double>(trials);
        out.points.push_back(point);
    }
    return out;
}

double swapped_pair_concurrence(const ProtocolRunRecord& record) {
    if (!record.success)
        throw std::invalid_argument("swapped_pair_concurrence: run did not succeed");
    return concurrence_2q(record.final_state);
}

} // namespace qswap
