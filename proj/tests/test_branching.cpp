#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "recsplit/branching.hpp"
#include "recsplit/errors.hpp"
#include "recsplit/mellin.hpp"
#include "recsplit/split_law.hpp"

using namespace recsplit;

namespace {
const SplitLaw kTri11 = SplitLaw::tripartite(1.0, 1.0);
const SplitLaw kLattice = SplitLaw::deterministic({0.25, 0.25}, {0.5});
}  // namespace

TEST_CASE("deterministic paintbox realizes the closed-form atom tally") {
    // Each split: one solid of half the mass, two crumbs of a quarter each.
    // At delta = 1e-3 expansion stops after generation 5 (4^-5 < 1e-3).
    const auto pb = generate_paintbox(kLattice, 1e-3, 100, 1);
    CHECK(pb.complete);
    CHECK(pb.generations_explored == 5);
    CHECK(pb.solids.size() == 31);
    CHECK(pb.residual_crumb_count == 32);
    CHECK(pb.residual_crumb_mass == doctest::Approx(std::pow(2.0, -5)).epsilon(1e-12));
    CHECK(std::is_sorted(pb.solids.rbegin(), pb.solids.rend()));

    // Generations g = 1..5 hold 2^{g-1} solids of size 2 * 4^{-g}.
    for (int g = 1; g <= 5; ++g) {
        const double size = 2.0 * std::pow(4.0, -g);
        const auto lo = std::count_if(pb.solids.begin(), pb.solids.end(),
                                      [&](double y) { return std::fabs(y - size) < 1e-15; });
        CHECK(lo == (1L << (g - 1)));
    }

    // N_x jumps along the lattice: above level g it counts 2^g - 1 atoms.
    for (int g = 1; g <= 5; ++g) {
        const auto nx = count_nx(pb, 2.0 * std::pow(4.0, -g));
        CHECK(nx.exact);
        CHECK(nx.count == (1L << g) - 1);
    }
    CHECK_FALSE(count_nx(pb, 1e-4).exact);
}

TEST_CASE("paintbox conserves mass for random laws") {
    const SplitLaw laws[] = {kTri11, SplitLaw::multi(2, 0.25, 0.5),
                             SplitLaw::refined(kTri11, {0.5, 0.5})};
    for (std::uint64_t s = 0; s < 10; ++s) {
        for (const auto& law : laws) {
            const auto pb = generate_paintbox(law, 1e-4, 200, 1000 + s);
            double total = pb.residual_crumb_mass;
            for (double y : pb.solids) total += y;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(pb.complete);
            for (double y : pb.solids) CHECK(y > 0.0);
        }
    }
}

TEST_CASE("generation cap marks the sample incomplete instead of throwing") {
    const auto pb = generate_paintbox(kTri11, 1e-8, 3, 7);
    CHECK_FALSE(pb.complete);
    CHECK(pb.generations_explored == 3);
    double total = pb.residual_crumb_mass;
    for (double y : pb.solids) total += y;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(generate_paintbox(kTri11, 1e-4, 0, 7), GenerationCap);
}

TEST_CASE("paintbox sampling is reproducible by seed") {
    const auto a = generate_paintbox(kTri11, 1e-5, 200, 42);
    const auto b = generate_paintbox(kTri11, 1e-5, 200, 42);
    REQUIRE(a.solids.size() == b.solids.size());
    for (std::size_t i = 0; i < a.solids.size(); ++i) CHECK(a.solids[i] == b.solids[i]);
    const auto c = generate_paintbox(kTri11, 1e-5, 200, 43);
    CHECK(a.solids != c.solids);
}

TEST_CASE("occupancy identities hold on every sampled partition") {
    const SplitLaw laws[] = {kTri11, SplitLaw::multi(2, 0.25, 0.5),
                             SplitLaw::refined(kTri11, {0.4, 0.6}), kLattice};
    RandomStream root(31337);
    for (const auto& law : laws) {
        for (int n : {1, 2, 3, 7, 40}) {
            for (int rep = 0; rep < 50; ++rep) {
                const auto occ =
                    sample_partition(law, n, root.child((std::uint64_t(n) << 16) + rep));
                REQUIRE(occ.n == n);
                REQUIRE(static_cast<int>(occ.counts.size()) == n);
                CHECK(occ.dot_r() == n);
                long kn = 0;
                for (long c : occ.counts) kn += c;
                CHECK(occ.k_n() == kn);
                CHECK(kn >= 1);
                CHECK(kn <= n);
            }
        }
    }
}

TEST_CASE("a single ball always forms a singleton block") {
    RandomStream root(5);
    for (int rep = 0; rep < 20; ++rep) {
        const auto occ = sample_partition(kTri11, 1, root.child(rep));
        CHECK(occ.k_n() == 1);
        CHECK(occ.counts[0] == 1);
    }
}

TEST_CASE("partition sampling is reproducible and stream-sensitive") {
    const auto a = sample_partition(kTri11, 100, std::uint64_t(99));
    const auto b = sample_partition(kTri11, 100, std::uint64_t(99));
    CHECK(a.counts == b.counts);
    const auto c = sample_partition(kTri11, 100, std::uint64_t(98));
    CHECK(a.counts != c.counts);
}

TEST_CASE("non-shrinking laws exhaust the depth cap") {
    // One crumb barely below full mass: two balls stay together for far more
    // than the depth cap with overwhelming probability.
    const double eps = 0x1p-30;
    const auto stuck = SplitLaw::deterministic({1.0 - eps}, {eps});
    CHECK_THROWS_AS(sample_partition(stuck, 2, std::uint64_t(1)), DepthExceeded);
}

TEST_CASE("martingale traces start at one and stay near one for tripartite(1,1)") {
    const auto sol = solve_malthusian(kTri11);
    const int kmax = 20;
    const long reps = 2000;
    RandomStream root(808);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < reps; ++i) {
        const auto tr = simulate_martingale(kTri11, sol.alpha_star, kmax, 1e-5, root.child(i));
        REQUIRE(static_cast<int>(tr.values.size()) == kmax + 1);
        CHECK(tr.values[0] == 1.0);
        CHECK(tr.alpha_star == sol.alpha_star);
        CHECK(tr.truncation_bound >= 0.0);
        for (double v : tr.values) CHECK(v > 0.0);
        sum += tr.values[kmax];
        sumsq += tr.values[kmax] * tr.values[kmax];
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
    CHECK(std::fabs(mean - 1.0) <= 4.0 * se);
}

TEST_CASE("deterministic lattice law has a constant martingale") {
    const auto tr = simulate_martingale(kLattice, 0.5, 25, 1e-5, std::uint64_t(3));
    for (double v : tr.values) CHECK(v == 1.0);
}

TEST_CASE("fixed point check accepts the true law and rejects a mismatched alpha") {
    const auto sol = solve_malthusian(kTri11);
    const auto ok = empirical_fixed_point_check(kTri11, sol.alpha_star, 4000, 11);
    REQUIRE(ok.moment_gaps.size() == 3);
    for (double z : ok.moment_gaps) CHECK(std::fabs(z) <= 4.0);

    // With the wrong exponent the first-moment fixed point breaks immediately.
    const auto bad = empirical_fixed_point_check(kTri11, 0.9, 4000, 12);
    CHECK(std::fabs(bad.moment_gaps[0]) > 6.0);

    CHECK_THROWS_AS(empirical_fixed_point_check(kTri11, sol.alpha_star, 10, 1), DomainError);
}
