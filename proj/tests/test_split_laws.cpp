#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "recsplit/errors.hpp"
#include "recsplit/rng.hpp"
#include "recsplit/split_law.hpp"

using namespace recsplit;

TEST_CASE("factories validate their parameters") {
    CHECK_NOTHROW(SplitLaw::tripartite(1.0, 1.0));
    CHECK_THROWS_AS(SplitLaw::tripartite(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(SplitLaw::tripartite(1.0, -0.5), DomainError);
    CHECK_THROWS_AS(SplitLaw::multi(0, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(SplitLaw::deterministic({0.25, 0.25}, {0.6}), MassLeak);
    CHECK_THROWS_AS(SplitLaw::deterministic({-0.25, 0.75}, {0.5}), DomainError);
    CHECK_THROWS_AS(SplitLaw::refined(SplitLaw::tripartite(1.0, 1.0), {0.7, 0.2}), MassLeak);
}

TEST_CASE("sampled splits conserve mass and label parts disjointly") {
    const SplitLaw laws[] = {
        SplitLaw::tripartite(1.0, 1.0),
        SplitLaw::multi(3, 0.2, 0.4),
        SplitLaw::refined(SplitLaw::tripartite(0.5, 0.5), {0.25, 0.25, 0.5}),
        SplitLaw::deterministic({0.25, 0.25}, {0.5}),
    };
    RandomStream rng(2024);
    for (const auto& law : laws) {
        for (int i = 0; i < 200; ++i) {
            const auto out = sample_split(law, rng);
            CHECK(out.crumb_mass() + out.solid_mass() == doctest::Approx(1.0).epsilon(1e-12));
            for (const auto& c : out.crumbs) {
                CHECK(c.size > 0.0);
                CHECK(c.label % 2 == 0);
            }
            for (const auto& s : out.solids) {
                CHECK(s.size > 0.0);
                CHECK(s.label % 2 == 1);
            }
        }
    }
}

TEST_CASE("tripartite(1,1) supercriticality report is exact") {
    const auto rep = validate_supercritical(SplitLaw::tripartite(1.0, 1.0));
    CHECK(rep.ok);
    CHECK(rep.mean_crumb_mass == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(rep.mean_crumb_count == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(rep.lattice);
}

TEST_CASE("monte carlo supercriticality agrees with the analytic report") {
    const auto law = SplitLaw::multi(2, 0.25, 0.5);
    const auto analytic = validate_supercritical(law);
    const auto mc = validate_supercritical(law, 20000, 77);
    CHECK(mc.mean_crumb_mass == doctest::Approx(analytic.mean_crumb_mass).epsilon(0.02));
    CHECK(mc.mean_crumb_count == doctest::Approx(analytic.mean_crumb_count).epsilon(0.02));
}

TEST_CASE("subcritical and leaking laws are rejected") {
    CHECK_THROWS_AS(validate_supercritical(SplitLaw::deterministic({0.3}, {0.7})),
                    SubcriticalLaw);
    CHECK_THROWS_AS(validate_supercritical(SplitLaw::deterministic({0.9}, {0.1})),
                    SubcriticalLaw);
}

TEST_CASE("deterministic lattice support is flagged") {
    CHECK(validate_supercritical(SplitLaw::deterministic({0.25, 0.25}, {0.5})).lattice);
}

TEST_CASE("json round trip preserves every variant") {
    const SplitLaw laws[] = {
        SplitLaw::tripartite(1.0, 1.0),
        SplitLaw::multi(2, 0.25, 0.5),
        SplitLaw::refined(SplitLaw::tripartite(1.0, 1.0), {0.5, 0.5}),
        SplitLaw::deterministic({0.25, 0.25}, {0.5}),
    };
    for (const auto& law : laws) {
        const auto back = SplitLaw::from_json(law.to_json());
        CHECK(back.to_json() == law.to_json());
        CHECK(back.crumb_count() == law.crumb_count());
    }
}

TEST_CASE("json parse errors surface as DomainError") {
    CHECK_THROWS_AS(SplitLaw::from_json("{\"type\":\"unknown\"}"), DomainError);
    CHECK_THROWS_AS(SplitLaw::from_json("not json at all"), DomainError);
    CHECK_THROWS_AS(SplitLaw::from_json("{\"type\":\"dirichlet_tripartite\",\"gamma\":1.0}"),
                    DomainError);
}

TEST_CASE("refined subdivider must be a probability vector") {
    CHECK_NOTHROW(SplitLaw::refined(SplitLaw::tripartite(1.0, 1.0), {0.2, 0.3, 0.5}));
    CHECK_THROWS_AS(SplitLaw::refined(SplitLaw::tripartite(1.0, 1.0), {}), DomainError);
    CHECK_THROWS_AS(SplitLaw::refined(SplitLaw::tripartite(1.0, 1.0), {1.2, -0.2}), DomainError);
}

TEST_CASE("random streams are reproducible and children are traversal independent") {
    RandomStream a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RandomStream parent(5);
    RandomStream c1 = parent.child(7);
    for (int i = 0; i < 50; ++i) parent.uniform();
    RandomStream c2 = parent.child(7);
    CHECK(c1.next_u64() == c2.next_u64());

    RandomStream g(99);
    double m = 0.0;
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) m += g.gamma(2.5);
    CHECK(m / reps == doctest::Approx(2.5).epsilon(0.01));
}
