#include "pulearn/losses.hpp"

#include "gradcheck.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pu;

namespace {

BatchView make_view(std::initializer_list<double> p, std::initializer_list<double> u) {
    BatchView v;
    v.eta_p.resize(static_cast<long>(p.size()));
    long i = 0;
    for (double x : p) v.eta_p[i++] = x;
    v.eta_u.resize(static_cast<long>(u.size()));
    i = 0;
    for (double x : u) v.eta_u[i++] = x;
    return v;
}

BatchView random_view(std::mt19937_64& rng, long np, long nu) {
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    BatchView v{Vector(np), Vector(nu)};
    for (long i = 0; i < np; ++i) v.eta_p[i] = unit(rng);
    for (long j = 0; j < nu; ++j) v.eta_u[j] = unit(rng);
    return v;
}

Vector concat(const BatchView& v) {
    Vector x(v.size());
    x << v.eta_p, v.eta_u;
    return x;
}

BatchView from_flat(const Vector& x, long np) {
    return {x.head(np), x.tail(x.size() - np)};
}

} // namespace

TEST_CASE("pn log loss closed forms") {
    const auto a = pn_log_loss(0.5, 1);
    CHECK(a.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(a.grad[0] == doctest::Approx(-2.0).epsilon(1e-12));

    CHECK(pn_log_loss(1.0 - kEpsClamp, 1).value == doctest::Approx(0.0).epsilon(1e-6));

    const auto c = pn_log_loss(0.9, 0);
    CHECK(c.value == doctest::Approx(2.302585).epsilon(1e-6));
    CHECK(c.grad[0] == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("zero-one loss with the half-up tie rule") {
    CHECK(zero_one_loss(0.6, 1) == 0);
    CHECK(zero_one_loss(0.6, 0) == 1);
    CHECK(zero_one_loss(0.5, 1) == 0); // tie classifies positive
    CHECK(zero_one_loss(0.5, 0) == 1);
    CHECK(zero_one_loss(0.4999, 0) == 0);
}

TEST_CASE("uPU worked examples") {
    SUBCASE("balanced point") {
        const auto r = upu_risk(make_view({0.5}, {0.5}), 0.5);
        CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("negative-risk pathology") {
        const auto r = upu_risk(make_view({0.9}, {0.1}), 1.0);
        CHECK(r.value == doctest::Approx(-2.091864).epsilon(1e-6));
        CHECK(r.value < 0.0);
    }
    SUBCASE("pi_u = 0 reduces to the all-negative loss on U") {
        const auto r = upu_risk(make_view({}, {0.3, 0.7}), 0.0);
        const auto n = naive_negative_loss(make_view({0.5}, {0.3, 0.7}));
        const double expect = 0.5 * (-std::log(0.7) - std::log(0.3));
        CHECK(r.value == doctest::Approx(expect).epsilon(1e-12));
        CHECK(n.value == doctest::Approx(std::log(2.0) + expect).epsilon(1e-12));
    }
    SUBCASE("empty unlabeled part throws") {
        CHECK_THROWS_WITH_AS(upu_risk(make_view({0.5}, {}), 0.5), "unlabeled part required",
                             std::invalid_argument);
    }
}

TEST_CASE("nnPU worked examples") {
    SUBCASE("agrees with uPU when the inner term is positive") {
        const auto r = nnpu_risk(make_view({0.5}, {0.5}), 0.5);
        CHECK(*r.aux == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
        CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        const auto u = upu_risk(make_view({0.5}, {0.5}), 0.5);
        CHECK(r.value == doctest::Approx(u.value).epsilon(1e-12));
        CHECK(testsupport::relative_error(r.grad, u.grad) < 1e-12);
    }
    SUBCASE("clamps the pathological case to the positive part") {
        const auto r = nnpu_risk(make_view({0.9}, {0.1}), 1.0);
        CHECK(*r.aux < 0.0);
        CHECK(r.value == doctest::Approx(0.105361).epsilon(1e-5));
    }
    SUBCASE("inner exactly zero keeps only the positive-part gradient") {
        // mean_U[-ln(1-u)] == pi * mean_P[-ln(1-p)] when u == p and pi == 1
        const auto r = nnpu_risk(make_view({0.4}, {0.4}), 1.0);
        CHECK(*r.aux == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(r.value == doctest::Approx(-std::log(0.4)).epsilon(1e-12));
        CHECK(r.grad[0] == doctest::Approx(-1.0 / 0.4).epsilon(1e-12));
        CHECK(r.grad[1] == 0.0);
    }
}

TEST_CASE("collective loss worked examples") {
    SUBCASE("zero-loss condition: saturated positives and mean on target") {
        const double top = 1.0 - kEpsClamp;
        const auto r = cpu_collective_loss(make_view({top, top}, {0.1, 0.3}), 0.2);
        CHECK(r.value == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(*r.aux == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("unlabeled-only batch") {
        const auto r = cpu_collective_loss(make_view({}, {0.6, 0.6}), 0.1);
        CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        CHECK(r.grad[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.grad[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("subgradient at the kink is zero") {
        const auto r = cpu_collective_loss(make_view({}, {0.2, 0.2}), 0.2);
        CHECK(r.value == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(r.grad[0] == 0.0);
    }
    SUBCASE("both parts empty throws") {
        CHECK_THROWS_AS(cpu_collective_loss(make_view({}, {}), 0.2), std::invalid_argument);
    }
}

TEST_CASE("naive loss worked examples") {
    const auto r = naive_negative_loss(make_view({0.5}, {0.5}));
    CHECK(r.value == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

    const auto sep = naive_negative_loss(
        make_view({1.0 - kEpsClamp}, {kEpsClamp}));
    CHECK(sep.value == doctest::Approx(0.0).epsilon(1e-6));

    const auto clamped = naive_negative_loss(make_view({0.5}, {1.0 - kEpsClamp}));
    CHECK(clamped.value ==
          doctest::Approx(std::log(2.0) - std::log(kEpsClamp)).epsilon(1e-9));
}

TEST_CASE("gradients match central differences away from kinks") {
    std::mt19937_64 rng(321);
    std::uniform_int_distribution<long> np_dist(1, 8), nu_dist(1, 16);
    std::uniform_real_distribution<double> prior(0.05, 0.6);

    auto check_loss = [&](auto&& loss_of_flat, const BatchView& view) {
        const Vector x = concat(view);
        const Vector analytic = loss_of_flat(x).grad;
        auto value = [&](const Vector& probe) { return loss_of_flat(probe).value; };
        const Vector numeric = testsupport::finite_difference(value, x);
        CHECK(testsupport::relative_error(analytic, numeric) < 1e-5);
    };

    for (int trial = 0; trial < 100; ++trial) {
        const long np = np_dist(rng), nu = nu_dist(rng);
        const double pi = prior(rng);
        const BatchView view = random_view(rng, np, nu);

        check_loss([&](const Vector& x) { return naive_negative_loss(from_flat(x, np)); }, view);
        check_loss([&](const Vector& x) { return upu_risk(from_flat(x, np), pi); }, view);

        // nnPU: the max() branch only agrees with value differences while the
        // inner term stays positive; stay clear of the sign boundary
        const auto nn = nnpu_risk(view, pi);
        if (*nn.aux > 1e-4)
            check_loss([&](const Vector& x) { return nnpu_risk(from_flat(x, np), pi); }, view);

        // cPU: keep the batch mean away from the absolute-value kink
        const double mu = prior(rng);
        if (std::abs(view.eta_u.mean() - mu) > 1e-4)
            check_loss([&](const Vector& x) { return cpu_collective_loss(from_flat(x, np), mu); },
                       view);

        const double eta = random_view(rng, 1, 1).eta_p[0];
        const int y = trial % 2;
        Vector single(1);
        single[0] = eta;
        const Vector numeric = testsupport::finite_difference(
            [&](const Vector& x) { return pn_log_loss(x[0], y).value; }, single);
        CHECK(testsupport::relative_error(pn_log_loss(eta, y).grad, numeric) < 1e-5);
    }
}

TEST_CASE("nnPU defense branch follows -gamma * inner") {
    std::mt19937_64 rng(99);
    int found = 0;
    for (int trial = 0; trial < 300 && found < 20; ++trial) {
        BatchView view = random_view(rng, 4, 4);
        view.eta_u.array() *= 0.3; // low unlabeled scores push the inner term negative
        const double pi = 0.9;
        const double gamma = 1.7;
        const auto r = nnpu_risk(view, pi, gamma);
        if (*r.aux >= -1e-4) continue;
        ++found;
        const Vector x = concat(view);
        auto surrogate = [&](const Vector& probe) {
            const BatchView b = from_flat(probe, 4);
            const double inner = (-(1.0 - b.eta_u.array()).log()).mean() -
                                 pi * (-(1.0 - b.eta_p.array()).log()).mean();
            return -gamma * inner;
        };
        const Vector numeric = testsupport::finite_difference(surrogate, x);
        CHECK(testsupport::relative_error(r.grad, numeric) < 1e-5);
    }
    CHECK(found >= 20);
}

TEST_CASE("risk estimator invariants") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> prior(0.0, 0.8);
    for (int trial = 0; trial < 200; ++trial) {
        const BatchView view = random_view(rng, 1 + trial % 7, 1 + trial % 13);
        const double pi = prior(rng);

        const auto nn = nnpu_risk(view, pi);
        CHECK(nn.value >= 0.0);
        const auto u = upu_risk(view, pi);
        if (*nn.aux >= 0.0) CHECK(nn.value == doctest::Approx(u.value).epsilon(1e-12));

        const double mu = prior(rng) * 0.9;
        const auto c = cpu_collective_loss(view, mu);
        CHECK(c.value >= 0.0);
    }
}

TEST_CASE("collective term depends on U only through its mean") {
    BatchView a = make_view({0.9}, {0.1, 0.3, 0.5});
    BatchView b = make_view({0.9}, {0.5, 0.3, 0.1});  // permutation
    BatchView c = make_view({0.9}, {0.3, 0.3, 0.3});  // mean-preserving redistribution
    const double mu = 0.25;
    const auto ra = cpu_collective_loss(a, mu);
    const auto rb = cpu_collective_loss(b, mu);
    const auto rc = cpu_collective_loss(c, mu);
    CHECK(ra.value == doctest::Approx(rb.value).epsilon(1e-15));
    CHECK(ra.value == doctest::Approx(rc.value).epsilon(1e-15));
}

TEST_CASE("scaling U at fixed mean preserves value and rescales gradients") {
    BatchView small = make_view({}, {0.2, 0.4});
    BatchView big = make_view({}, {0.2, 0.4, 0.2, 0.4, 0.2, 0.4});
    const double mu = 0.1;
    const auto rs = cpu_collective_loss(small, mu);
    const auto rb = cpu_collective_loss(big, mu);
    CHECK(rs.value == doctest::Approx(rb.value).epsilon(1e-15));
    // tripling |U_b| divides each per-element gradient by three
    CHECK(rs.grad[0] == doctest::Approx(3.0 * rb.grad[0]).epsilon(1e-12));
}

TEST_CASE("cpu loss is zero only at the saturated-positive on-target point") {
    const double top = 1.0 - kEpsClamp;
    CHECK(cpu_collective_loss(make_view({top}, {0.2}), 0.2).value ==
          doctest::Approx(0.0).epsilon(1e-6));
    CHECK(cpu_collective_loss(make_view({0.9}, {0.2}), 0.2).value > 1e-3);
    CHECK(cpu_collective_loss(make_view({top}, {0.25}), 0.2).value > 1e-3);
}
