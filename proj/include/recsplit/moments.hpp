#pragma once

#include <string>
#include <variant>
#include <vector>

#include "recsplit/split_law.hpp"

namespace recsplit {

struct IntegerPartition {
    std::vector<int> parts;  // nonincreasing, positive

    int weight() const;
    int length() const { return static_cast<int>(parts.size()); }
};

// All partitions of k in reverse-lexicographic order, (k) first.
std::vector<IntegerPartition> enumerate_partitions(int k);

// m(lambda) = E[ sum over distinct permutations mu of lambda, sum over
// increasing label tuples, prod X_{i_j}^{mu_j alpha*} ]. Dirichlet variants
// use the joint-moment closed form collapsed by exchangeability; the
// deterministic law sums the terms outright. Returns 0 when the partition
// has more parts than the law has crumbs.
double m_lambda(const SplitLaw& law, const IntegerPartition& lambda, double alpha_star);

struct MomentTable {
    double alpha_star = 0.0;
    std::vector<double> a;  // a_0..a_K, moments of M
    std::vector<double> b;  // b_n = Gamma(n a* + gamma) a_n / (Gamma(gamma) n!)
    std::string family;     // "tripartite", "multi", "deterministic", "refined"
    int d = 1;
    double gamma = 0.0;
    double beta = 0.0;
};

// Fills a_2..a_K by the moment recursion; for Dirichlet families also fills
// b and asserts the applicable specialized identities.
MomentTable moments_M(const SplitLaw& law, double alpha_star, int K);

struct BesselAlphaAlpha {
    double alpha = 0.5;
};
struct MultiR1 {
    int d = 1;
    double alpha_star = 0.5;
};
using MomentFamily = std::variant<BesselAlphaAlpha, MultiR1>;

// E[M^q] closed forms for the two exactly solved families.
double closed_form_moments(const MomentFamily& family, double q);

// Recomputes b from a via (15) and asserts the convolution identity for the
// table's family: the integer-r self-convolution for tripartite, the
// (d+1)-fold convolution with factor nd+1 for multi with r = 1.
MomentTable b_transform(const MomentTable& table, double gamma);

// Determinants of the Hankel matrices [m_{i+j}], orders 1..floor(K/2)+1;
// all nonnegative iff the sequence is a valid moment sequence that far.
std::vector<double> hankel_determinants(const std::vector<double>& moments);

}  // namespace recsplit
