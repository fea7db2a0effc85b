#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "recsplit/branching.hpp"
#include "recsplit/errors.hpp"
#include "recsplit/mellin.hpp"
#include "recsplit/special.hpp"
#include "recsplit/split_law.hpp"
#include "recsplit/stats.hpp"

using namespace recsplit;

TEST_CASE("moment z-scores vanish on matched constants and flag shifts") {
    std::vector<double> samples(200);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = (i % 2 == 0) ? 0.9 : 1.1;
    const auto z0 = moment_z_scores(samples, {1.0});
    CHECK(z0[0] == doctest::Approx(0.0).epsilon(1e-12));

    for (auto& x : samples) x += 1.0;
    const auto z1 = moment_z_scores(samples, {1.0});
    CHECK(std::fabs(z1[0]) > 10.0);

    CHECK_THROWS_AS(moment_z_scores({1.0, 2.0}, {1.0}), DomainError);
}

TEST_CASE("power-law slope recovers exact synthetic exponents") {
    std::vector<std::pair<double, double>> pts;
    for (int j = 0; j <= 20; ++j) {
        const double x = std::pow(10.0, -5.0 + 3.0 * j / 20.0);
        pts.emplace_back(x, std::pow(x, -0.5));
    }
    const auto fit = power_law_slope(pts);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.stderr_ == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("power-law slope preconditions") {
    std::vector<std::pair<double, double>> few = {{0.1, 10.0}, {0.01, 100.0}};
    CHECK_THROWS_AS(power_law_slope(few), InsufficientRange);

    std::vector<std::pair<double, double>> narrow;
    for (int j = 0; j < 12; ++j) narrow.emplace_back(0.1 + 0.01 * j, 10.0 + j);
    CHECK_THROWS_AS(power_law_slope(narrow), InsufficientRange);

    std::vector<std::pair<double, double>> zero;
    for (int j = 0; j <= 12; ++j) zero.emplace_back(std::pow(10.0, -4.0 + j * 0.25), j ? 5.0 : 0.0);
    CHECK_THROWS_AS(power_law_slope(zero), InsufficientRange);
}

TEST_CASE("tripartite(1,1) paintbox slope sits near alpha star") {
    const auto law = SplitLaw::tripartite(1.0, 1.0);
    const auto sol = solve_malthusian(law);
    const auto pb = generate_paintbox(law, 1e-6, 200, 0xACC9A00ull);
    std::vector<std::pair<double, double>> pts;
    for (int j = 0; j < 25; ++j) {
        const double x = 1e-6 * std::pow(10.0, 4.0 * j / 24.0);
        pts.emplace_back(x, double(count_nx(pb, x).count));
    }
    const auto fit = power_law_slope(pts);
    CHECK(std::fabs(fit.slope - sol.alpha_star) / sol.alpha_star < 0.05);
}

TEST_CASE("chi squared on exact proportions gives p = 1") {
    std::map<std::string, long> obs = {{"a", 600L}, {"b", 300L}, {"c", 100L}};
    std::map<std::string, double> probs = {{"a", 0.6}, {"b", 0.3}, {"c", 0.1}};
    const auto res = chi_squared(obs, probs, 1000);
    CHECK(res.chi2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(res.dof == 2);
    CHECK(res.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chi squared flags gross mismatch") {
    std::map<std::string, long> obs = {{"a", 2500L}, {"b", 2500L}, {"c", 2500L}, {"d", 2500L}};
    std::map<std::string, double> probs = {{"a", 0.7}, {"b", 0.1}, {"c", 0.1}, {"d", 0.1}};
    CHECK(chi_squared(obs, probs, 10000).p_value < 1e-6);
}

TEST_CASE("chi squared pools sparse cells") {
    // Three cells expect 2 each; they pool into one merged cell of 6 and the
    // dof drops to 1.
    std::map<std::string, long> obs = {{"a", 95L}, {"b", 2L}, {"c", 2L}, {"d", 1L}};
    std::map<std::string, double> probs = {{"a", 0.94}, {"b", 0.02}, {"c", 0.02}, {"d", 0.02}};
    const auto res = chi_squared(obs, probs, 100);
    CHECK(res.dof == 1);
    CHECK(res.p_value > 0.05);

    std::map<std::string, long> tiny = {{"a", 2L}, {"b", 1L}};
    std::map<std::string, double> tiny_probs = {{"a", 0.5}, {"b", 0.5}};
    CHECK_THROWS_AS(chi_squared(tiny, tiny_probs, 3), DegenerateCells);
}

TEST_CASE("chi squared input validation") {
    std::map<std::string, long> obs = {{"a", 5L}, {"zzz", 5L}};
    std::map<std::string, double> probs = {{"a", 1.0}};
    CHECK_THROWS_AS(chi_squared(obs, probs, 10), DomainError);

    std::map<std::string, long> obs2 = {{"a", 5L}};
    std::map<std::string, double> probs2 = {{"a", 0.7}};
    CHECK_THROWS_AS(chi_squared(obs2, probs2, 5), DomainError);
}

TEST_CASE("p-values match closed-form incomplete gamma identities") {
    // Chi-squared with 2 and 4 dof have elementary survival functions.
    for (double x : {0.5, 2.0, 7.3}) {
        CHECK(gamma_q(1.0, x / 2.0) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
        CHECK(gamma_q(2.0, x / 2.0) ==
              doctest::Approx(std::exp(-x / 2.0) * (1.0 + x / 2.0)).epsilon(1e-12));
        CHECK(gamma_q(0.5, x / 2.0) ==
              doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-10));
    }
}

TEST_CASE("theorem 5 scaling brings K_n moments to the M limit") {
    const auto law = SplitLaw::tripartite(0.5, 0.5);
    const auto sol = solve_malthusian(law);
    const auto rep = theorem5_check(law, 2000, 1500, 0x75EEDull);
    REQUIRE(rep.scaled_kn_moments.size() == 2);
    CHECK(rep.m_reference_moments[0] == doctest::Approx(1.0));
    CHECK(rep.m_reference_moments[1] ==
          doctest::Approx(4.0 / 3.14159265358979323846).epsilon(1e-6));
    CHECK(std::fabs(rep.scaled_kn_moments[0] - 1.0) < 0.15);
    CHECK(rep.ratio_limit ==
          doctest::Approx(sol.c_count_r(1) / sol.c_blocks).epsilon(1e-12));
    CHECK(std::fabs(rep.ratio_first - rep.ratio_limit) / rep.ratio_limit < 0.15);
    CHECK_THROWS_AS(theorem5_check(law, 100, 1500, 1), DomainError);
}
