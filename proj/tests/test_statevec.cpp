#include <doctest.h>

#include <array>
#include <cmath>

#include "qswap/cavity_ops.hpp"
#include "qswap/statevec.hpp"

using namespace qswap;

namespace {

const std::array<cplx, 2> kG{1.0, 0.0};
const std::array<cplx, 2> kE{0.0, 1.0};
const double kS2 = std::sqrt(0.5);

QState random_state(int num_sites, RngStream& rng) {
    QState st;
    st.num_sites = num_sites;
    st.amps.resize(std::size_t(1) << num_sites);
    double n2 = 0.0;
    for (auto& a : st.amps) {
        a = {rng.uniform() - 0.5, rng.uniform() - 0.5};
        n2 += std::norm(a);
    }
    for (auto& a : st.amps) a /= std::sqrt(n2);
    return st;
}

} // namespace

TEST_CASE("init_product basis and superposition examples") {
    const QState gg = init_product({kG, kG});
    CHECK(gg.amps[0] == cplx(1.0));
    CHECK(gg.amps[1] == cplx(0.0));
    CHECK(gg.amps[2] == cplx(0.0));
    CHECK(gg.amps[3] == cplx(0.0));

    // site 0 is the most significant bit
    const QState eg = init_product({kE, kG});
    CHECK(eg.amps[2] == cplx(1.0));

    const QState plus_g = init_product({{kS2, kS2}, kG});
    CHECK(std::abs(plus_g.amps[0] - cplx(kS2)) < 1e-15);
    CHECK(plus_g.amps[1] == cplx(0.0));
    CHECK(std::abs(plus_g.amps[2] - cplx(kS2)) < 1e-15);
    CHECK(plus_g.amps[3] == cplx(0.0));
}

TEST_CASE("init_product rejects bad input") {
    CHECK_THROWS_AS(init_product({}), std::invalid_argument);
    CHECK_THROWS_AS(init_product({{cplx(0.9), cplx(0.0)}}), std::invalid_argument);
}

TEST_CASE("apply_unitary identity and bit flip") {
    RngStream rng(11);
    const QState st = random_state(3, rng);
    const std::array<cplx, 4> id{1.0, 0.0, 0.0, 1.0};
    const std::array<int, 1> s1{1};
    const QState same = apply_unitary(st, s1, id);
    for (std::size_t i = 0; i < st.dim(); ++i)
        CHECK(std::abs(same.amps[i] - st.amps[i]) < 1e-15);

    const std::array<cplx, 4> x{0.0, 1.0, 1.0, 0.0};
    const QState gg = init_product({kG, kG});
    const QState ge = apply_unitary(gg, s1, x);
    CHECK(std::abs(ge.amps[1] - cplx(1.0)) < 1e-15);
}

TEST_CASE("apply_unitary canonical dispersive map on |gg>") {
    const auto u = dispersive_two_atom_unitary({M_PI / 4.0, M_PI});
    const std::array<int, 2> sites{0, 1};
    const QState out = apply_unitary(init_product({kG, kG}), sites, u);
    CHECK(std::abs(out.amps[0] - cplx(kS2)) < 1e-12);
    CHECK(std::abs(out.amps[3] - cplx(0.0, -kS2)) < 1e-12);
}

TEST_CASE("apply_unitary error paths") {
    const QState st = init_product({kG, kG});
    const std::array<cplx, 4> bad{1.0, 0.0, 0.0, 0.5};
    const std::array<int, 1> s0{0};
    CHECK_THROWS_AS(apply_unitary(st, s0, bad), std::invalid_argument);
    const std::array<cplx, 4> id{1.0, 0.0, 0.0, 1.0};
    const std::array<int, 1> oob{7};
    CHECK_THROWS_AS(apply_unitary(st, oob, id), std::invalid_argument);
    const std::array<cplx, 16> id4{1.0, 0, 0, 0, 0, 1.0, 0, 0, 0, 0, 1.0, 0, 0, 0, 0, 1.0};
    const std::array<int, 2> dup{1, 1};
    CHECK_THROWS_AS(apply_unitary(st, dup, id4), std::invalid_argument);
}

TEST_CASE("norm preservation and U then U-dagger composition") {
    RngStream rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        const QState st = random_state(4, rng);
        const double theta = rng.uniform() * 2.0 * M_PI;
        const auto u = dispersive_two_atom_unitary({theta, M_PI});
        std::vector<cplx> udag(16);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) udag[r * 4 + c] = std::conj(u[c * 4 + r]);
        const std::array<int, 2> sites{1, 3};
        const QState fwd = apply_unitary(st, sites, u);
        CHECK(std::abs(fwd.norm() - 1.0) < 1e-12);
        const QState back = apply_unitary(fwd, sites, udag);
        for (std::size_t i = 0; i < st.dim(); ++i)
            CHECK(std::abs(back.amps[i] - st.amps[i]) < 1e-12);
    }
}

TEST_CASE("measure on a basis state is deterministic") {
    RngStream rng(1);
    const QState ge = init_product({kG, kE});
    const std::array<int, 2> sites{0, 1};
    const MeasurementRecord rec = measure(ge, sites, rng);
    CHECK(rec.outcome[0] == 0);
    CHECK(rec.outcome[1] == 1);
    CHECK(rec.probability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measure half-half split on an EPR state") {
    const auto u = dispersive_two_atom_unitary({M_PI / 4.0, M_PI});
    const std::array<int, 2> both{0, 1};
    const QState epr = apply_unitary(init_product({kG, kG}), both, u);
    RngStream rng(42);
    const std::array<int, 1> s0{0};
    int ones = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        RngStream r = RngStream::for_trial(42, t);
        const MeasurementRecord rec = measure(epr, s0, r);
        CHECK(rec.probability == doctest::Approx(0.5).epsilon(1e-12));
        ones += rec.outcome[0];
    }
    CHECK(std::abs(ones / double(trials) - 0.5) < 4.0 * std::sqrt(0.25 / trials));
}

TEST_CASE("Born-rule frequency over 1e5 seeded trials") {
    const QState st = init_product({{std::sqrt(0.8), std::sqrt(0.2)}});
    const std::array<int, 1> s0{0};
    const int trials = 100000;
    int ones = 0;
    for (int t = 0; t < trials; ++t) {
        RngStream rng = RngStream::for_trial(7, t);
        ones += measure(st, s0, rng).outcome[0];
    }
    const double sigma = std::sqrt(0.2 * 0.8 / trials);
    CHECK(std::abs(ones / double(trials) - 0.2) < 3.0 * sigma);
}

TEST_CASE("project basic branches") {
    const QState eg = init_product({kE, kG});
    const ProjectResult hit = project(eg, 0, 1);
    CHECK(hit.probability == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(hit.post_state.has_value());
    CHECK(std::abs(hit.post_state->amps[2] - cplx(1.0)) < 1e-12);

    const ProjectResult miss = project(eg, 0, 0);
    CHECK(miss.probability == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(!miss.post_state.has_value());

    const auto u = dispersive_two_atom_unitary({M_PI / 4.0, M_PI});
    const std::array<int, 2> both{0, 1};
    const QState epr = apply_unitary(init_product({kG, kG}), both, u);
    const ProjectResult half = project(epr, 0, 1);
    CHECK(half.probability == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(half.post_state.has_value());
    // renormalized branch is |ee> up to the -i phase
    CHECK(std::abs(std::abs(half.post_state->amps[3]) - 1.0) < 1e-12);
}

TEST_CASE("Born completeness: project probabilities sum to 1") {
    RngStream rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const QState st = random_state(4, rng);
        const int site = int(rng.next_u64() % 4);
        const double p0 = project(st, site, 0).probability;
        const double p1 = project(st, site, 1).probability;
        CHECK(std::abs(p0 + p1 - 1.0) < 1e-12);
    }
}

TEST_CASE("measurement frequencies match projection probabilities") {
    RngStream seed_rng(77);
    const QState st = random_state(2, seed_rng);
    const double p1 = project(st, 1, 1).probability;
    const std::array<int, 1> s1{1};
    const int trials = 100000;
    int ones = 0;
    for (int t = 0; t < trials; ++t) {
        RngStream rng = RngStream::for_trial(99, t);
        ones += measure(st, s1, rng).outcome[0];
    }
    const double sigma = std::sqrt(p1 * (1.0 - p1) / trials);
    CHECK(std::abs(ones / double(trials) - p1) < 4.0 * sigma);
}

TEST_CASE("fidelity_up_to_phase") {
    RngStream rng(3);
    const QState st = random_state(3, rng);
    CHECK(fidelity_up_to_phase(st, st) == doctest::Approx(1.0).epsilon(1e-12));

    QState phased = st;
    const cplx ph = std::exp(cplx(0.0, 1.234));
    for (auto& a : phased.amps) a *= ph;
    CHECK(fidelity_up_to_phase(st, phased) == doctest::Approx(1.0).epsilon(1e-12));

    const auto u = dispersive_two_atom_unitary({M_PI / 4.0, M_PI});
    const std::array<int, 2> both{0, 1};
    const QState gg = init_product({kG, kG});
    const QState epr = apply_unitary(gg, both, u);
    CHECK(fidelity_up_to_phase(gg, epr) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fidelity_up_to_phase(epr, gg) == fidelity_up_to_phase(gg, epr));

    QState bigger = random_state(4, rng);
    CHECK_THROWS_AS(fidelity_up_to_phase(st, bigger), std::invalid_argument);
}

TEST_CASE("concurrence of pure states") {
    CHECK(concurrence_2q(init_product({kG, kG})) == doctest::Approx(0.0).epsilon(1e-12));

    QState bell;
    bell.num_sites = 2;
    bell.amps = {kS2, 0.0, 0.0, kS2};
    CHECK(concurrence_2q(bell) == doctest::Approx(1.0).epsilon(1e-12));

    QState skew;
    skew.num_sites = 2;
    skew.amps = {std::sqrt(0.2), 0.0, 0.0, std::sqrt(0.8)};
    CHECK(concurrence_2q(skew) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("concurrence via density matrix matches the pure formula") {
    RngStream rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        const QState st = random_state(2, rng);
        std::vector<cplx> rho(16);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                rho[std::size_t(r) * 4 + c] = st.amps[r] * std::conj(st.amps[c]);
        CHECK(concurrence_2q(rho) == doctest::Approx(concurrence_2q(st)).epsilon(1e-8));
    }
    std::vector<cplx> bad(16, cplx(0.0));
    bad[0] = 2.0; // trace != 1
    CHECK_THROWS_AS(concurrence_2q(bad), std::invalid_argument);
}

TEST_CASE("build_from_blocks interleaved sites") {
    // block on (0, 2) in a 3-site register
    const std::vector<cplx> bell{kS2, 0.0, 0.0, kS2};
    const QState st = build_from_blocks(3, {{{0, 2}, bell}, {{1}, {1.0, 0.0}}});
    CHECK(std::abs(st.amps[0b000] - cplx(kS2)) < 1e-12);
    CHECK(std::abs(st.amps[0b101] - cplx(kS2)) < 1e-12);
    CHECK(std::abs(st.amps[0b010]) < 1e-15);
}

TEST_CASE("extract_sites from a post-measurement product register") {
    RngStream rng(9);
    const QState pair = random_state(2, rng);
    const QState full = build_from_blocks(
        4, {{{1, 3}, pair.amps}, {{0}, {0.0, 1.0}}, {{2}, {1.0, 0.0}}});
    const std::array<int, 2> keep{1, 3};
    const QState got = extract_sites(full, keep);
    CHECK(fidelity_up_to_phase(got, pair) == doctest::Approx(1.0).epsilon(1e-12));
}
