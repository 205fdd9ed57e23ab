#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "qswap/analysis.hpp"

using namespace qswap;

namespace {

const double kS2 = std::sqrt(0.5);

ChannelSpec random_channel(RngStream& rng) {
    cplx alpha{rng.uniform() - 0.5, rng.uniform() - 0.5};
    cplx beta{rng.uniform() - 0.5, rng.uniform() - 0.5};
    const double n = std::sqrt(std::norm(alpha) + std::norm(beta));
    return {alpha / n, beta / n};
}

} // namespace

TEST_CASE("analytic_success_prob closed-form values") {
    SUBCASE("equal channels, beta^2 = 0.2") {
        const ChannelSpec ch{std::sqrt(0.8), std::sqrt(0.2)};
        const SuccessBreakdown bk = analytic_success_prob(ch, ch);
        CHECK(bk.p_a == doctest::Approx(0.04).epsilon(1e-12));
        CHECK(bk.p_b == doctest::Approx(0.16).epsilon(1e-12));
        CHECK(bk.p_c == doctest::Approx(0.16).epsilon(1e-12));
        CHECK(bk.p_d == doctest::Approx(0.04).epsilon(1e-12));
        CHECK(bk.total == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("asymmetric channels") {
        const SuccessBreakdown bk = analytic_success_prob(
            {std::sqrt(0.8), std::sqrt(0.2)}, {std::sqrt(0.7), std::sqrt(0.3)});
        CHECK(bk.p_a == doctest::Approx(0.06).epsilon(1e-12));
        CHECK(bk.p_b == doctest::Approx(0.14).epsilon(1e-12));
        CHECK(bk.p_c == doctest::Approx(0.14).epsilon(1e-12));
        CHECK(bk.p_d == doctest::Approx(0.06).epsilon(1e-12));
        CHECK(bk.total == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("maximal channels give unit total") {
        const ChannelSpec ch{kS2, kS2};
        CHECK(analytic_success_prob(ch, ch).total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("analytic_success_prob depends on magnitudes only") {
    RngStream rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const ChannelSpec ch1 = random_channel(rng);
        const ChannelSpec ch2 = random_channel(rng);
        const double phase = rng.uniform() * 2.0 * M_PI;
        const cplx u = std::polar(1.0, phase);
        const ChannelSpec rot1{ch1.alpha * u, ch1.beta};
        const ChannelSpec rot2{ch2.alpha, ch2.beta * u};
        const SuccessBreakdown a = analytic_success_prob(ch1, ch2);
        const SuccessBreakdown b = analytic_success_prob(rot1, rot2);
        CHECK(a.p_a == doctest::Approx(b.p_a).epsilon(1e-12));
        CHECK(a.p_b == doctest::Approx(b.p_b).epsilon(1e-12));
        CHECK(a.total == doctest::Approx(b.total).epsilon(1e-12));
    }
}

TEST_CASE("analytic and exhaustive success probabilities agree") {
    const InputState in{std::sqrt(0.8), std::sqrt(0.2)};
    RngStream rng(32);
    for (int rep = 0; rep < 100; ++rep) {
        const ChannelSpec ch1 = random_channel(rng);
        const ChannelSpec ch2 = random_channel(rng);
        const SchemeParams params{Scheme::Nonmaximal, 2,
                                  std::vector<ChannelSpec>{ch1, ch2}};
        CHECK(exhaustive_success_prob(params, in) ==
              doctest::Approx(analytic_success_prob(ch1, ch2).total).epsilon(1e-10));
    }
}

TEST_CASE("exhaustive_success_prob is 1 for the maximal scheme") {
    const SchemeParams params{Scheme::Maximal, 2, std::nullopt};
    CHECK(exhaustive_success_prob(params, {std::sqrt(0.6), std::sqrt(0.4)}) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("monte_carlo: maximal scheme succeeds on every trial") {
    const MonteCarloResult mc = monte_carlo({Scheme::Maximal, 2, std::nullopt},
                                            {std::sqrt(0.8), std::sqrt(0.2)}, 2000, 42);
    CHECK(mc.trials == 2000);
    CHECK(mc.successes == 2000);
    CHECK(mc.success_rate == doctest::Approx(1.0));
    CHECK(mc.mean_conditional_fidelity == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("monte_carlo: nonmaximal rate matches the analytic value") {
    const std::vector<ChannelSpec> chans(2, ChannelSpec{std::sqrt(0.8), std::sqrt(0.2)});
    const std::uint64_t trials = 100000;
    const MonteCarloResult mc =
        monte_carlo({Scheme::Nonmaximal, 2, chans}, {std::sqrt(0.8), std::sqrt(0.2)},
                    trials, 42);
    const double sigma = std::sqrt(0.4 * 0.6 / double(trials));
    CHECK(std::abs(mc.success_rate - 0.4) < 4.0 * sigma);
    CHECK(mc.mean_conditional_fidelity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mc.ci95_low < mc.success_rate);
    CHECK(mc.ci95_high > mc.success_rate);
    CHECK(mc.ci95_high - mc.ci95_low ==
          doctest::Approx(2.0 * 1.959963984540054 *
                          std::sqrt(mc.success_rate * (1.0 - mc.success_rate) / double(trials)))
              .epsilon(1e-9));
}

TEST_CASE("monte_carlo is deterministic in the seed") {
    const std::vector<ChannelSpec> chans(2, ChannelSpec{std::sqrt(0.8), std::sqrt(0.2)});
    const SchemeParams params{Scheme::Nonmaximal, 2, chans};
    const InputState in{std::sqrt(0.8), std::sqrt(0.2)};
    const MonteCarloResult a = monte_carlo(params, in, 5000, 99);
    const MonteCarloResult b = monte_carlo(params, in, 5000, 99);
    const MonteCarloResult c = monte_carlo(params, in, 5000, 100);
    CHECK(a.successes == b.successes);
    CHECK(a.mean_conditional_fidelity == b.mean_conditional_fidelity);
    CHECK(a.successes != c.successes);
}

TEST_CASE("timing_sensitivity: zero offset reproduces ideal statistics") {
    const std::vector<double> offsets{0.0, 0.01};
    const SweepResult sw = timing_sensitivity({Scheme::Maximal, 2, std::nullopt},
                                              {std::sqrt(0.8), std::sqrt(0.2)},
                                              offsets, 2000, 7, true, false);
    REQUIRE(sw.points.size() == 2);
    CHECK(sw.points[0].offset == doctest::Approx(0.0));
    CHECK(sw.points[0].success_rate == doctest::Approx(1.0));
    CHECK(sw.points[0].mean_fidelity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sw.points[1].mean_fidelity < 1.0);
}

TEST_CASE("timing_sensitivity: infidelity scales quadratically in the offset") {
    const std::vector<double> offsets{1e-3, 2e-3, 4e-3, 8e-3};
    const SweepResult sw = timing_sensitivity({Scheme::Maximal, 2, std::nullopt},
                                              {std::sqrt(0.8), std::sqrt(0.2)},
                                              offsets, 400, 11, true, false);
    // least-squares slope of log(1 - F) vs log(delta)
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const int n = int(sw.points.size());
    for (const SweepPoint& pt : sw.points) {
        const double x = std::log(pt.offset);
        const double y = std::log(1.0 - pt.mean_fidelity);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(slope - 2.0) < 0.3);
}

TEST_CASE("timing_sensitivity is symmetric under offset sign flip") {
    const std::vector<double> offsets{-0.05, 0.05};
    const SweepResult sw = timing_sensitivity({Scheme::Maximal, 2, std::nullopt},
                                              {std::sqrt(0.8), std::sqrt(0.2)},
                                              offsets, 2000, 5, true, false);
    const double inf_minus = 1.0 - sw.points[0].mean_fidelity;
    const double inf_plus = 1.0 - sw.points[1].mean_fidelity;
    CHECK(inf_minus == doctest::Approx(inf_plus).epsilon(0.15));
}

TEST_CASE("swapped_pair_concurrence of successful runs") {
    RngStream rng(55);
    const ProtocolRunRecord max_rec = teleport_maximal({kS2, kS2}, rng);
    CHECK(swapped_pair_concurrence(max_rec) == doctest::Approx(1.0).epsilon(1e-10));
    RngStream rng2(56);
    const ProtocolRunRecord rec = teleport_maximal({std::sqrt(0.8), std::sqrt(0.2)}, rng2);
    CHECK(swapped_pair_concurrence(rec) ==
          doctest::Approx(2.0 * std::sqrt(0.8) * std::sqrt(0.2)).epsilon(1e-10));
    RngStream rng3(57);
    const ProtocolRunRecord prod = teleport_maximal({1.0, 0.0}, rng3);
    CHECK(swapped_pair_concurrence(prod) == doctest::Approx(0.0).epsilon(1e-10));
}
