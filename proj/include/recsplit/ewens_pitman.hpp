#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "recsplit/branching.hpp"
#include "recsplit/rng.hpp"

namespace recsplit {

// Ewens-Pitman probability of an occupancy vector, with the leading theta
// cancelled against (theta)_n so theta = 0 stays finite.
double eppf_probability(double alpha, double theta, const OccupancyVector& occ);

// Every occupancy vector of n, one per integer partition of n.
std::vector<OccupancyVector> enumerate_occupancies(int n);

// Exact partition sampling from the stick-breaking paintbox
// P_j = W_1...W_{j-1}(1-W_j), W_j ~ beta(theta + j alpha, 1 - alpha),
// extending sticks lazily as balls fall past the generated prefix.
OccupancyVector sample_pd_paintbox_partition(double alpha, double theta, int n,
                                             RandomStream stream);
OccupancyVector sample_pd_paintbox_partition(double alpha, double theta, int n,
                                             std::uint64_t seed);

struct QMapResult {
    std::vector<double> collection;  // (k+1)d + 1 elements, unit sum
    double discarded = 0.0;          // the removed YZ
};

// The q mapping: size-biased pick, Dirichlet(1-a, a/d...) replacement,
// discard of the first piece, rescale. |b| must be kd + 1.
QMapResult q_mapping(const std::vector<double>& b, double alpha, int d, RandomStream& stream);

// Arrangement construction: repeatedly size-bias a crumb and emit its solid
// child. Returned values are relative to the pre-step crumb mass, which is
// the stick-breaking normalization; eta[k-1] ~ beta(1-a, (k+1/d)a).
std::vector<double> arranged_solids(double alpha, int d, int count, RandomStream stream);

struct EquivalenceReport {
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 0.0;
    double theta_used = 0.0;
    std::vector<double> p_n_gaps;  // |p(m) - p_{a,theta}(m)|, m = 1..12
};

// Samples the multi(d, a/d, 1-a) partition of n and tests it against the
// exact EPPF. theta_override replaces a/d (negative-control runs).
EquivalenceReport equivalence_suite(double alpha, int d, int n, long reps, std::uint64_t seed,
                                    std::optional<double> theta_override = std::nullopt);

struct NoncoincidenceReport {
    double alpha_fit = 0.0;
    double theta_fit = 0.0;
    double residual_at_4 = 0.0;  // |p(4) - p_{fit}(4)|; > 0 refutes membership
};

// Fits (alpha, theta) to p(2), p(3) of the tripartite(gamma, r - gamma)
// model and reports the mismatch at n = 4.
NoncoincidenceReport noncoincidence_check(int r, double gamma);

}  // namespace recsplit
