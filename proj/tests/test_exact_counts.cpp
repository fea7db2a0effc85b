#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <gmpxx.h>

#include "recsplit/errors.hpp"
#include "recsplit/exact_counts.hpp"
#include "recsplit/mellin.hpp"
#include "recsplit/split_law.hpp"

using namespace recsplit;

namespace {

const SplitLaw kTri11 = SplitLaw::tripartite(1.0, 1.0);

// Independent rational oracle for tripartite(1,1): p(m) = 2/(m^2+3m-2), so
// E[K_n] = sum_m C(n,m)(-1)^{m+1} p(m) evaluates exactly in mpq arithmetic.
double oracle_blocks_tri11(int n) {
    mpq_class total(0);
    for (int m = 1; m <= n; ++m) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), n, m);
        mpq_class term(binom);
        term /= mpq_class(m * m + 3 * m - 2);
        term *= 2;
        if (m % 2 == 0) term = -term;
        total += term;
    }
    return total.get_d();
}

}  // namespace

TEST_CASE("small-n block counts match hand-computed rationals") {
    CHECK(expected_blocks(kTri11, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(expected_blocks(kTri11, 2) == doctest::Approx(7.0 / 4.0).epsilon(1e-13));
    CHECK(expected_blocks(kTri11, 3) == doctest::Approx(19.0 / 8.0).epsilon(1e-13));
    CHECK(expected_blocks(kTri11, 4) == doctest::Approx(38.0 / 13.0).epsilon(1e-13));
}

TEST_CASE("mpfr evaluation agrees with the exact rational oracle up to n = 60") {
    for (int n : {5, 12, 23, 40, 60}) {
        CHECK(expected_blocks(kTri11, n) ==
              doctest::Approx(oracle_blocks_tri11(n)).epsilon(1e-11));
    }
}

TEST_CASE("frozen oracle at n = 200") {
    CHECK(expected_blocks(kTri11, 200) == doctest::Approx(33.2190373418346).epsilon(1e-12));
}

TEST_CASE("count decomposition: sums over r recover K_n and n") {
    const SplitLaw laws[] = {kTri11, SplitLaw::multi(2, 0.25, 0.5)};
    const int n = 50;
    for (const auto& law : laws) {
        double sum_counts = 0.0, sum_r_counts = 0.0;
        for (int r = 1; r <= n; ++r) {
            const double e = expected_count_r(law, n, r);
            sum_counts += e;
            sum_r_counts += r * e;
        }
        CHECK(sum_counts == doctest::Approx(expected_blocks(law, n)).epsilon(1e-10));
        CHECK(sum_r_counts == doctest::Approx(double(n)).epsilon(1e-10));
    }
}

TEST_CASE("single-block boundary cases") {
    // K_{n,n} counts the all-in-one-block event, probability p(n).
    for (int n : {2, 3, 5, 9}) {
        CHECK(expected_count_r(kTri11, n, n) ==
              doctest::Approx(2.0 / (n * n + 3 * n - 2)).epsilon(1e-12));
    }
}

TEST_CASE("refined laws change K_n but keep the ball count identity") {
    const auto ref = SplitLaw::refined(kTri11, {0.5, 0.5});
    const int n = 30;
    CHECK(expected_blocks(ref, n) > expected_blocks(kTri11, n));
    double sum_r_counts = 0.0;
    for (int r = 1; r <= n; ++r) sum_r_counts += r * expected_count_r(ref, n, r);
    CHECK(sum_r_counts == doctest::Approx(double(n)).epsilon(1e-10));
}

TEST_CASE("deterministic law expectations satisfy the combinatorial identities") {
    const auto law = SplitLaw::deterministic({0.25, 0.25}, {0.5});
    CHECK(expected_blocks(law, 2) ==
          doctest::Approx(2.0 - p_of_alpha(law, 2.0)).epsilon(1e-12));
    double sum_r_counts = 0.0;
    for (int r = 1; r <= 20; ++r) sum_r_counts += r * expected_count_r(law, 20, r);
    CHECK(sum_r_counts == doctest::Approx(20.0).epsilon(1e-10));
}

TEST_CASE("same-color probability models") {
    // TripartiteR(r=2, gamma=1) is exactly tripartite(1,1).
    for (int m = 1; m <= 10; ++m) {
        CHECK(p_same_color(TripartiteR{2, 1.0}, m) ==
              doctest::Approx(p_of_alpha(kTri11, m)).epsilon(1e-12));
    }
    CHECK(p_same_color(TripartiteR{2, 1.0}, 2) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(p_same_color(TripartiteR{2, 1.0}, 3) == doctest::Approx(0.125).epsilon(1e-14));

    // Ewens-Pitman: p(n) = (1-a)_{n-1} / (1+t)_{n-1}.
    CHECK(p_same_color(EwensPitmanModel{0.5, 0.5}, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(p_same_color(EwensPitmanModel{0.5, 0.5}, 3) ==
          doctest::Approx((0.5 * 1.5) / (1.5 * 2.5)).epsilon(1e-14));
    CHECK(p_same_color(EwensPitmanModel{0.3, 0.0}, 1) == doctest::Approx(1.0));

    // The general route goes through phi/(1 - psi) and must agree too.
    for (int m = 2; m <= 8; ++m) {
        CHECK(p_same_color(GeneralModel{kTri11}, m) ==
              doctest::Approx(p_same_color(TripartiteR{2, 1.0}, m)).epsilon(1e-12));
    }
}

TEST_CASE("asymptotic ratio table approaches c_blocks monotonically") {
    const auto rows = asymptotic_ratio_table(kTri11, {64, 256, 1024});
    REQUIRE(rows.size() == 3);
    const auto sol = solve_malthusian(kTri11);
    double prev_gap = 1e9;
    for (const auto& row : rows) {
        CHECK(row.limit_constant == doctest::Approx(sol.c_blocks).epsilon(1e-12));
        const double gap = std::fabs(row.ratio / row.limit_constant - 1.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
        CHECK(row.expected_k ==
              doctest::Approx(row.ratio * std::pow(row.n, sol.alpha_star)).epsilon(1e-12));
    }
}

TEST_CASE("precision policy") {
    // Explicit precision wins; doubled precision reproduces the default.
    const double base = expected_blocks(kTri11, 120);
    const double wide = expected_blocks(kTri11, 120, 2 * (120 + 64));
    CHECK(base == doctest::Approx(wide).epsilon(1e-13));
    CHECK_THROWS_AS(expected_blocks(kTri11, 20000), DomainError);
    CHECK_THROWS_AS(expected_blocks(kTri11, 0), DomainError);
    CHECK_THROWS_AS(expected_count_r(kTri11, 10, 0), DomainError);
    CHECK_THROWS_AS(expected_count_r(kTri11, 10, 11), DomainError);
}

TEST_CASE("evaluation is deterministic") {
    CHECK(expected_blocks(kTri11, 150) == expected_blocks(kTri11, 150));
    CHECK(expected_count_r(kTri11, 150, 2) == expected_count_r(kTri11, 150, 2));
}
