#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "recsplit/errors.hpp"
#include "recsplit/mellin.hpp"
#include "recsplit/moments.hpp"
#include "recsplit/split_law.hpp"

using namespace recsplit;

TEST_CASE("integer partitions enumerate in reverse lexicographic order") {
    const auto p4 = enumerate_partitions(4);
    REQUIRE(p4.size() == 5);
    CHECK(p4[0].parts == std::vector<int>{4});
    CHECK(p4[1].parts == std::vector<int>{3, 1});
    CHECK(p4[2].parts == std::vector<int>{2, 2});
    CHECK(p4[3].parts == std::vector<int>{2, 1, 1});
    CHECK(p4[4].parts == std::vector<int>{1, 1, 1, 1});
    for (const auto& p : p4) CHECK(p.weight() == 4);

    CHECK(enumerate_partitions(10).size() == 42);
    CHECK(enumerate_partitions(1).size() == 1);
    CHECK_THROWS_AS(enumerate_partitions(0), DomainError);
    CHECK_THROWS_AS(enumerate_partitions(41), DomainError);
}

TEST_CASE("m_lambda on the deterministic law reduces to explicit power sums") {
    // Crumbs (1/4, 1/4), alpha* = 1/2: each crumb contributes 4^{-lambda_j/2}.
    const auto law = SplitLaw::deterministic({0.25, 0.25}, {0.5});
    const double a = 0.5;

    // lambda = (k): sum_i x_i^{k a} = 2 * 2^{-k}.
    for (int k = 1; k <= 4; ++k) {
        CHECK(m_lambda(law, IntegerPartition{{k}}, a) ==
              doctest::Approx(2.0 * std::pow(2.0, -k)).epsilon(1e-13));
    }
    // lambda = (1,1): sum over ordered pairs i < j of x_i^a x_j^a = 1/4.
    CHECK(m_lambda(law, IntegerPartition{{1, 1}}, a) == doctest::Approx(0.25).epsilon(1e-13));
    // lambda = (2,1): mu runs over (2,1) and (1,2); value 2 * (1/4)(1/2) = 1/4... each
    // unordered pair contributes both orders: 2 * 2^{-2} * 2^{-1} = 1/4.
    CHECK(m_lambda(law, IntegerPartition{{2, 1}}, a) == doctest::Approx(0.25).epsilon(1e-13));
    // More parts than crumbs: zero.
    CHECK(m_lambda(law, IntegerPartition{{1, 1, 1}}, a) == 0.0);

    CHECK_THROWS_AS(m_lambda(law, IntegerPartition{{}}, a), TooManyParts);
    CHECK_THROWS_AS(m_lambda(law, IntegerPartition{{1, 2}}, a), TooManyParts);
    CHECK_THROWS_AS(m_lambda(law, IntegerPartition{{2, 0}}, a), TooManyParts);
}

TEST_CASE("tripartite m_lambda matches the Dirichlet joint moment formula") {
    const auto law = SplitLaw::tripartite(1.0, 1.0);
    const double a = 0.3;
    // lambda = (1): 2 E[X^a] with X ~ beta(1, 2): E[X^a] = Gamma(3)Gamma(1+a)/Gamma(3+a).
    const double expect1 =
        2.0 * std::exp(std::lgamma(3.0) + std::lgamma(1.0 + a) - std::lgamma(3.0 + a));
    CHECK(m_lambda(law, IntegerPartition{{1}}, a) == doctest::Approx(expect1).epsilon(1e-12));
    // lambda = (1,1): E[(X1 X2)^a] with joint Dirichlet(1,1,1) moments.
    const double expect11 = std::exp(std::lgamma(3.0) + 2.0 * std::lgamma(1.0 + a) -
                                     std::lgamma(3.0 + 2.0 * a));
    CHECK(m_lambda(law, IntegerPartition{{1, 1}}, a) ==
          doctest::Approx(expect11).epsilon(1e-12));
}

TEST_CASE("bessel closed form reproduces 4/pi and the recursion follows it") {
    const auto law = SplitLaw::tripartite(0.5, 0.5);
    const auto sol = solve_malthusian(law);
    CHECK(sol.alpha_star == doctest::Approx(0.5).epsilon(1e-11));

    CHECK(closed_form_moments(BesselAlphaAlpha{0.5}, 2) ==
          doctest::Approx(4.0 / std::numbers::pi).epsilon(1e-14));

    const auto table = moments_M(law, sol.alpha_star, 8);
    REQUIRE(table.a.size() == 9);
    CHECK(table.a[0] == 1.0);
    CHECK(table.a[1] == 1.0);
    for (int q = 2; q <= 8; ++q) {
        const double closed = closed_form_moments(BesselAlphaAlpha{0.5}, q);
        CHECK(table.a[q] == doctest::Approx(closed).epsilon(1e-9));
    }
}

TEST_CASE("multi r=1 closed form matches the recursion for d = 1, 2, 3") {
    const std::pair<int, double> cases[] = {{1, 0.5}, {2, 0.3}, {3, 0.2}};
    for (auto [d, g] : cases) {
        const auto law = SplitLaw::multi(d, g, 1.0 - d * g);
        const auto sol = solve_malthusian(law);
        CHECK(sol.alpha_star == doctest::Approx(d * g).epsilon(1e-10));
        const auto table = moments_M(law, sol.alpha_star, 8);
        for (int q = 2; q <= 8; ++q) {
            CHECK(table.a[q] ==
                  doctest::Approx(closed_form_moments(MultiR1{d, d * g}, q)).epsilon(1e-8));
        }
    }
}

TEST_CASE("the two closed forms coincide at d = 1") {
    for (double a : {0.2, 0.4, 0.5, 0.6, 0.8}) {
        for (int q = 1; q <= 8; ++q) {
            CHECK(closed_form_moments(BesselAlphaAlpha{a}, q) ==
                  doctest::Approx(closed_form_moments(MultiR1{1, a}, q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("tripartite(1,1) moment table passes its internal b identities") {
    const auto law = SplitLaw::tripartite(1.0, 1.0);
    const auto sol = solve_malthusian(law);
    // moments_M itself asserts (14) and, for integer r, the convolution (16).
    const auto table = moments_M(law, sol.alpha_star, 12);
    CHECK(table.family == "tripartite");
    REQUIRE(table.b.size() == 13);
    CHECK(table.b[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k <= 12; ++k) {
        CHECK(table.a[k] > 0.0);
        CHECK(table.b[k] > 0.0);
        const double expected_b = std::exp(std::lgamma(k * sol.alpha_star + 1.0) -
                                           std::lgamma(1.0) - std::lgamma(k + 1.0)) *
                                  table.a[k];
        CHECK(table.b[k] == doctest::Approx(expected_b).epsilon(1e-10));
    }

    const auto again = b_transform(table, 1.0);
    for (int k = 0; k <= 12; ++k) CHECK(again.b[k] == doctest::Approx(table.b[k]).epsilon(1e-12));
}

TEST_CASE("moment sequences are Hankel positive as far as computed") {
    const auto law = SplitLaw::tripartite(0.5, 0.5);
    const auto table = moments_M(law, 0.5, 10);
    const auto dets = hankel_determinants(table.a);
    CHECK(dets.size() >= 5);
    for (double det : dets) CHECK(det > 0.0);
}

TEST_CASE("deterministic moments are exactly one") {
    const auto law = SplitLaw::deterministic({0.25, 0.25}, {0.5});
    const auto table = moments_M(law, 0.5, 6);
    for (int k = 0; k <= 6; ++k) CHECK(table.a[k] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("refined laws share the base law moments") {
    const auto base = SplitLaw::tripartite(1.0, 1.0);
    const auto ref = SplitLaw::refined(base, {0.5, 0.5});
    const auto sol = solve_malthusian(base);
    const auto tb = moments_M(base, sol.alpha_star, 8);
    const auto tr = moments_M(ref, sol.alpha_star, 8);
    for (int k = 0; k <= 8; ++k) CHECK(tr.a[k] == doctest::Approx(tb.a[k]).epsilon(1e-12));
}

TEST_CASE("moment requests outside the supported window are rejected") {
    const auto law = SplitLaw::tripartite(1.0, 1.0);
    const auto sol = solve_malthusian(law);
    CHECK_THROWS_AS(moments_M(law, sol.alpha_star, 0), DomainError);
    CHECK_THROWS_AS(moments_M(law, sol.alpha_star, 41), DomainError);
}
