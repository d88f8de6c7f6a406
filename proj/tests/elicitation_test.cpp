#include "pulearn/elicitation.hpp"

#include "pulearn/common.hpp"

#include <doctest.h>

#include <cmath>

using namespace pu;

TEST_CASE("PU link function") {
    CHECK(link_pu(0.7, 1, 0.3) == 0.7);
    CHECK(link_pu(0.2, 0, 0.2) == 1.0);
    CHECK(link_pu(0.6, 0, 0.1) == doctest::Approx(0.5).epsilon(1e-12));
    // at mu_p = 0 the negative branch is the classical 1 - v link
    for (double v : {0.0, 0.25, 0.5, 0.9})
        CHECK(link_pu(v, 0, 0.0) == doctest::Approx(1.0 - v).epsilon(1e-12));
}

TEST_CASE("reward closed forms") {
    CHECK(reward_I(0.6, 0.5, 0.2) == doctest::Approx(std::log(0.6)).epsilon(1e-9));
    CHECK(reward_I(0.2, 0.0, 0.2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(reward_I(0.5, 1.0, 0.0) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("zero-reward calibration at both ends") {
    for (double mu : {0.05, 0.1, 0.2, 0.4}) {
        CHECK(reward_I(mu, 0.0, mu) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(reward_I(1.0 - kEpsClamp, 1.0, mu) == doctest::Approx(0.0).epsilon(1e-6));
    }
}

TEST_CASE("envelope closed forms") {
    SUBCASE("stationary branch") {
        CHECK(max_reward_J(0.5, 0.2) == doctest::Approx(std::log(0.6)).epsilon(1e-9));
        // the reward touches the envelope at the support point
        CHECK(reward_I(0.6, 0.5, 0.2) == doctest::Approx(max_reward_J(0.5, 0.2)).epsilon(1e-9));
    }
    SUBCASE("low-posterior branch") {
        CHECK(max_reward_J(0.1, 0.2) == doctest::Approx(0.1 * std::log(0.2)).epsilon(1e-9));
    }
    SUBCASE("eta = 1 endpoint uses 0*ln(0) = 0") {
        CHECK(max_reward_J(1.0, 0.2) == doctest::Approx(std::log(1.2)).epsilon(1e-9));
        // outside the certified region the grid oracle is authoritative: the
        // support point 1.2 is out of range and the attainable maximum stays
        // below the envelope
        const GridMax gm = grid_argmax_reward(1.0, 0.2);
        CHECK(gm.arg == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(gm.value == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(gm.value < max_reward_J(1.0, 0.2));
    }
    SUBCASE("mu_p = 0 keeps eta = 0 finite") {
        CHECK(max_reward_J(0.0, 0.0) == 0.0);
        CHECK(max_reward_J(0.0, 0.3) == 0.0);
    }
}

TEST_CASE("conditional rewards recovered from an envelope") {
    SUBCASE("symmetric point of the entropy envelope") {
        const auto [i1, i0] = savage_rewards(entropy_envelope, 0.5);
        CHECK(i1 == doctest::Approx(-std::log(2.0)).epsilon(1e-9));
        CHECK(i0 == doctest::Approx(-std::log(2.0)).epsilon(1e-9));
    }
    SUBCASE("eta = 0.75 reproduces ln(eta)") {
        const auto [i1, i0] = savage_rewards(entropy_envelope, 0.75);
        CHECK(i1 == doctest::Approx(std::log(0.75)).epsilon(1e-8));
        CHECK(i0 == doctest::Approx(std::log(0.25)).epsilon(1e-8));
    }
    SUBCASE("affine envelopes reproduce their endpoints exactly") {
        auto affine = [](double eta) { return 3.0 - 2.0 * eta; };
        for (double eta : {0.1, 0.5, 0.9}) {
            const auto [i1, i0] = savage_rewards(affine, eta);
            CHECK(i1 == doctest::Approx(affine(1.0)).epsilon(1e-8));
            CHECK(i0 == doctest::Approx(affine(0.0)).epsilon(1e-8));
        }
    }
    SUBCASE("boundary points fall back to one-sided differences") {
        auto quad = [](double eta) { return eta * eta; };
        CHECK_NOTHROW(savage_rewards(quad, 0.0));
        CHECK_NOTHROW(savage_rewards(quad, 1.0));
    }
}

TEST_CASE("elicited loss from the entropy envelope is the log loss") {
    for (double eta = 0.01; eta <= 0.99; eta += 0.01) {
        const auto [i1, i0] = savage_rewards(entropy_envelope, eta);
        CHECK(std::abs(i1 - std::log(eta)) < 1e-6);
    }
}

TEST_CASE("closed-form maximizer") {
    CHECK(argmax_reward(0.5, 0.2) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(argmax_reward(0.1, 0.2) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(argmax_reward(0.95, 0.2) == 1.0); // 1.14 clamped into range

    SUBCASE("agrees with the grid oracle at the worked points") {
        for (auto [eta, mu] : {std::pair{0.5, 0.2}, {0.1, 0.2}, {0.95, 0.2}}) {
            const GridMax gm = grid_argmax_reward(eta, mu);
            CHECK(std::abs(gm.arg - argmax_reward(eta, mu)) <= 1e-4 + 1e-12);
        }
    }
}

TEST_CASE("support inequality over the certified grid") {
    const SupportReport report = certify_support({0.05, 0.1, 0.2, 0.4});
    CHECK(report.all_certified_pass);
    long certified = 0;
    for (const auto& row : report.rows) {
        if (!row.certified) continue;
        ++certified;
        CHECK(row.gap <= 1e-9);
        CHECK(std::abs(row.grid_argmax - row.eta * (1.0 + row.mu_p)) <= 1e-4 + 1e-12);
    }
    CHECK(certified > 200); // the four regions cover most of the grid
}

TEST_CASE("corrupted envelope fails verification") {
    const SupportReport report = certify_support({0.1}, 0.01, 1e-4, 1e-9, true);
    CHECK_FALSE(report.all_certified_pass);
}

TEST_CASE("report rows carry the CSV columns") {
    const SupportReport report = certify_support({0.2}, 0.25);
    const auto lines = support_report_lines(report);
    REQUIRE(!lines.empty());
    CHECK(lines[0] == "mu_p,eta,closed_form_maximizer,grid_maximizer,J,grid_max_I,gap");
    CHECK(lines.size() == report.rows.size() + 1);
}
