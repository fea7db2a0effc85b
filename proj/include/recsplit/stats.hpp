#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "recsplit/split_law.hpp"

namespace recsplit {

// z-score of the empirical q-th moment against reference_moments[q-1],
// standard error taken from the sample variance of x^q.
std::vector<double> moment_z_scores(const std::vector<double>& samples,
                                    const std::vector<double>& reference_moments);

struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
};

// Least-squares slope of log N_x against log(1/x). Requires >= 10 points
// spanning at least two decades of x with all N_x >= 1.
SlopeFit power_law_slope(const std::vector<std::pair<double, double>>& points);

struct Theorem5Report {
    std::vector<double> scaled_kn_moments;    // first two moments of K_n/(n^a* c)
    std::vector<double> m_reference_moments;  // (1, a_2)
    std::vector<double> z_scores;
    double ratio_first = 0.0;  // mean K_{n1} / mean K_n
    double ratio_limit = 0.0;  // c_count_r(1) / c_blocks
};

Theorem5Report theorem5_check(const SplitLaw& law, int n, long reps, std::uint64_t seed);

struct Chi2Result {
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 0.0;
};

// Pearson statistic over named cells. Cells whose expected count falls below
// 5 are pooled, smallest first, until every cell clears the floor.
Chi2Result chi_squared(const std::map<std::string, long>& observed_counts,
                       const std::map<std::string, double>& expected_probs, long total);

}  // namespace recsplit
