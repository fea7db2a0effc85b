#pragma once

#include <variant>
#include <vector>

#include "recsplit/split_law.hpp"

namespace recsplit {

// E[K_n] = sum_{m=1}^n C(n,m)(-1)^{m+1} p(m). The alternating sum cancels
// about 2^n of magnitude, so evaluation runs in arbitrary precision with at
// least n+64 working bits, and every result is re-evaluated at doubled
// precision; a relative gap above 1e-9 raises PrecisionInsufficient.
// precision_bits = 0 means the n+64 default. n beyond 16384 needs an
// explicit precision_bits >= n+64 as an override.
double expected_blocks(const SplitLaw& law, int n, int precision_bits = 0);

// E[K_{nr}] = C(n,r) sum_{m=0}^{n-r} C(n-r,m)(-1)^m p(m+r), same policy.
double expected_count_r(const SplitLaw& law, int n, int r, int precision_bits = 0);

// Tripartite division with gamma + beta = r, parametrized as in the
// noncoincidence analysis: p(n) = (r-g)_n / ((r+g)_n - 2(g)_n) (rising).
struct TripartiteR {
    int r = 2;
    double gamma = 1.0;
};

// p_{a,t}(n) = (1-a)_{n-1} / (1+t)_{n-1} (rising factorials).
struct EwensPitmanModel {
    double alpha = 0.0;
    double theta = 0.0;
};

struct GeneralModel {
    SplitLaw law;
};

using SameColorModel = std::variant<TripartiteR, EwensPitmanModel, GeneralModel>;

// Probability that n balls end up painted the same color.
double p_same_color(const SameColorModel& model, int n);

struct RatioRow {
    int n = 0;
    double expected_k = 0.0;      // E[K_n]
    double ratio = 0.0;           // E[K_n] / n^{alpha*}
    double limit_constant = 0.0;  // c_blocks
};

// E[K_n]/n^{alpha*} against the Theorem-1 constant, for ascending n.
std::vector<RatioRow> asymptotic_ratio_table(const SplitLaw& law,
                                             const std::vector<int>& n_values);

}  // namespace recsplit
