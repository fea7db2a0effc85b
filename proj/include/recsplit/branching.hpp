#pragma once

#include <cstdint>
#include <vector>

#include "recsplit/rng.hpp"
#include "recsplit/split_law.hpp"

namespace recsplit {

// Paintbox realized down to a size threshold. Crumbs whose size drops to
// delta or below are frozen into the residual; every solid larger than delta
// is therefore present, so N_x is exact for x >= delta on a complete sample.
struct PaintboxSample {
    std::vector<double> solids;  // descending
    double residual_crumb_mass = 0.0;
    long residual_crumb_count = 0;
    double threshold_delta = 0.0;
    int generations_explored = 0;
    std::uint64_t seed = 0;
    bool complete = true;  // false when max_gen cut expansion short
};

PaintboxSample generate_paintbox(const SplitLaw& law, double delta, int max_gen,
                                 std::uint64_t seed);

struct NxCount {
    std::int64_t count = 0;
    bool exact = true;  // false below the sample threshold (lower bound only)
};

// N_x = #{j : P_j >= x}.
NxCount count_nx(const PaintboxSample& pb, double x);

// Block-size occupancy of a sampled n-ball partition: counts[r-1] = K_{nr}.
struct OccupancyVector {
    int n = 0;
    std::vector<long> counts;

    long k_n() const;
    long dot_r() const;  // sum_r r*K_{nr}, equals n
};

// Exact partition sampling by lazy refinement: one split is drawn, the balls
// are allocated across its parts, solids close blocks, and each crumb with
// balls recurses on an independent child stream. A crumb holding one ball
// yields a singleton block without further expansion.
OccupancyVector sample_partition(const SplitLaw& law, int n, RandomStream stream);
OccupancyVector sample_partition(const SplitLaw& law, int n, std::uint64_t seed);

struct MartingaleTrace {
    std::vector<double> values;  // M_0..M_kmax
    double truncation_bound = 0.0;
    double alpha_star = 0.0;
};

// M_k = sum over generation-k crumbs of size^alpha_star. Crumbs at or below
// delta freeze: their current power joins a carried component, so later M_k
// are exact up to the frozen descendants' fluctuation, bounded crudely by
// truncation_bound = (#pruned) * delta^alpha_star.
MartingaleTrace simulate_martingale(const SplitLaw& law, double alpha_star, int k_max,
                                    double delta, RandomStream stream);
MartingaleTrace simulate_martingale(const SplitLaw& law, double alpha_star, int k_max,
                                    double delta, std::uint64_t seed);

struct FixedPointReport {
    std::vector<double> lhs_moments;  // E[M^q], q = 1..3
    std::vector<double> rhs_moments;  // E[(sum_i X_i^{a*} M_i)^q]
    std::vector<double> moment_gaps;  // standardized differences
};

// Monte Carlo check of the fixed-point equation M =d sum_i X_i^{a*} M_i:
// draws M samples, then independent splits with resampled M's on the right.
FixedPointReport empirical_fixed_point_check(const SplitLaw& law, double alpha_star,
                                             long samples, std::uint64_t seed);

}  // namespace recsplit
