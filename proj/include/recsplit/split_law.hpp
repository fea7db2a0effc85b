#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "recsplit/rng.hpp"

namespace recsplit {

class SplitLaw;

// Tripartite division: two crumbs X1, X3 and one solid Y2, jointly
// Dirichlet(gamma, beta, gamma).
struct DirichletTripartite {
    double gamma = 0.0;
    double beta = 0.0;
};

// d+1 crumbs and one solid, jointly Dirichlet(gamma, ..., gamma, beta).
struct DirichletMulti {
    int d = 1;
    double gamma = 0.0;
    double beta = 0.0;
};

// Every solid of the base law is subdivided by a fixed finite probability
// vector; crumbs are untouched.
struct Refined {
    std::shared_ptr<const SplitLaw> base;
    std::vector<double> subdivider;
};

// Fixed outcome every step. For engine unit tests; its finite fixed support
// is lattice-prone, which the validation report flags.
struct DeterministicTest {
    std::vector<double> crumb_sizes;
    std::vector<double> solid_sizes;
};

// One realized division. Labels within an outcome are disjoint between the
// two kinds: crumbs get even labels 0,2,4,... and solids odd labels 1,3,5,...
struct SplitPart {
    std::uint64_t label = 0;
    double size = 0.0;
};

struct SplitOutcome {
    std::vector<SplitPart> crumbs;
    std::vector<SplitPart> solids;

    double crumb_mass() const;
    double solid_mass() const;
};

// Specification of the joint distribution of crumb and solid sizes for one
// division step. Immutable once built; shareable across threads.
class SplitLaw {
public:
    using Variant = std::variant<DirichletTripartite, DirichletMulti, Refined, DeterministicTest>;

    static SplitLaw tripartite(double gamma, double beta);
    static SplitLaw multi(int d, double gamma, double beta);
    static SplitLaw refined(SplitLaw base, std::vector<double> subdivider);
    static SplitLaw deterministic(std::vector<double> crumbs, std::vector<double> solids);

    // Parse/serialize the JSON law schema, e.g.
    //   {"type":"dirichlet_tripartite","gamma":1.0,"beta":1.0}
    static SplitLaw from_json(const std::string& text);
    static SplitLaw from_json_file(const std::string& path);
    std::string to_json() const;

    const Variant& get() const { return *v_; }

    // Number of crumbs per division (all variants here are finite).
    int crumb_count() const;
    bool is_deterministic() const { return std::holds_alternative<DeterministicTest>(*v_); }

    std::string describe() const;

private:
    explicit SplitLaw(Variant v);
    std::shared_ptr<const Variant> v_;  // immutable, cheap to copy
};

struct SupercriticalReport {
    double mean_crumb_mass = 0.0;   // E[sum X_i]
    double mean_crumb_count = 0.0;  // E[#{i: X_i > 0}]
    bool ok = false;
    bool lattice = false;  // fixed support on a geometric progression
};

// One division drawn from the law. Dirichlet variants sample by Gamma
// normalization; Refined draws the base and then subdivides each solid.
SplitOutcome sample_split(const SplitLaw& law, RandomStream& rng);

// Checks both branching conditions: E[sum X_i] < 1 and E[#crumbs] > 1.
// Analytic for every built-in variant; mc_samples > 0 forces a Monte Carlo
// estimate instead (used for cross-checks). Throws SubcriticalLaw when the
// mean crumb count is <= 1, MassLeak when sizes break the unit-sum invariant.
SupercriticalReport validate_supercritical(const SplitLaw& law, long mc_samples = 0,
                                           std::uint64_t seed = 0);

}  // namespace recsplit
