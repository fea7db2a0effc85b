#include "recsplit/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "recsplit/errors.hpp"
#include "recsplit/mellin.hpp"

namespace recsplit {

namespace {

void build_partitions(int remaining, int max_part, std::vector<int>& prefix,
                      std::vector<IntegerPartition>& out) {
    if (remaining == 0) {
        out.push_back({prefix});
        return;
    }
    for (int first = std::min(remaining, max_part); first >= 1; --first) {
        prefix.push_back(first);
        build_partitions(remaining - first, first, prefix, out);
        prefix.pop_back();
    }
}

void check_partition(const IntegerPartition& lambda) {
    if (lambda.parts.empty()) throw TooManyParts("empty partition");
    for (std::size_t i = 0; i < lambda.parts.size(); ++i) {
        if (lambda.parts[i] < 1) throw TooManyParts("partition parts must be positive");
        if (i > 0 && lambda.parts[i] > lambda.parts[i - 1])
            throw TooManyParts("partition parts must be nonincreasing");
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double distinct_permutation_count(const std::vector<int>& parts) {
    double count = factorial(static_cast<int>(parts.size()));
    int run = 1;
    for (std::size_t i = 1; i <= parts.size(); ++i) {
        if (i < parts.size() && parts[i] == parts[i - 1]) {
            ++run;
        } else {
            count /= factorial(run);
            run = 1;
        }
    }
    return count;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

// joint moment over one increasing tuple of exchangeable Dirichlet crumbs,
// exponents mu_j alpha*; S is the full parameter total beta + c*gamma
double dirichlet_tuple_moment(double gamma, double total, const std::vector<int>& parts,
                              double alpha_star) {
    int k = 0;
    double lg = 0.0;
    for (int p : parts) {
        k += p;
        lg += std::lgamma(gamma + p * alpha_star) - std::lgamma(gamma);
    }
    lg += std::lgamma(total) - std::lgamma(total + k * alpha_star);
    return std::exp(lg);
}

double m_lambda_deterministic(const std::vector<double>& xs, const IntegerPartition& lambda,
                              double alpha_star) {
    const int c = static_cast<int>(xs.size());
    const int l = lambda.length();
    if (l > c) return 0.0;
    // enumerate increasing index tuples, then distinct permutations of lambda
    std::vector<int> idx(static_cast<std::size_t>(l));
    std::iota(idx.begin(), idx.end(), 0);
    double total = 0.0;
    while (true) {
        std::vector<int> mu(lambda.parts.rbegin(), lambda.parts.rend());  // ascending
        do {
            double term = 1.0;
            for (int j = 0; j < l; ++j)
                term *= std::pow(xs[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])],
                                 mu[static_cast<std::size_t>(j)] * alpha_star);
            total += term;
        } while (std::next_permutation(mu.begin(), mu.end()));
        // advance the combination
        int j = l - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == c - l + j) --j;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
        for (int t = j + 1; t < l; ++t)
            idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
    }
    return total;
}

struct FamilyInfo {
    std::string family;
    int d = 1;
    double gamma = 0.0;
    double beta = 0.0;
};

FamilyInfo family_of(const SplitLaw& law) {
    const auto& v = law.get();
    if (const auto* t = std::get_if<DirichletTripartite>(&v))
        return {"tripartite", 1, t->gamma, t->beta};
    if (const auto* m = std::get_if<DirichletMulti>(&v)) return {"multi", m->d, m->gamma, m->beta};
    if (std::holds_alternative<Refined>(v)) return {"refined", 1, 0.0, 0.0};
    return {"deterministic", 1, 0.0, 0.0};
}

std::vector<double> convolve_truncated(const std::vector<double>& a,
                                       const std::vector<double>& b) {
    std::vector<double> c(std::min(a.size(), b.size()), 0.0);
    for (std::size_t n = 0; n < c.size(); ++n)
        for (std::size_t k = 0; k <= n; ++k) c[n] += a[k] * b[n - k];
    return c;
}

void check_relative(double lhs, double rhs, double tol, const std::string& what) {
    const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    if (std::fabs(lhs - rhs) / scale > tol)
        throw IdentityViolated(what + ": " + std::to_string(lhs) + " vs " +
                               std::to_string(rhs));
}

// Eq. (16) for tripartite with integer r, Eq. (18) for multi with r = 1
void check_b_identities(const MomentTable& t, double gamma) {
    const double astar = t.alpha_star;
    if (t.family == "tripartite") {
        const double r_real = t.beta + gamma;
        const int r = static_cast<int>(std::lround(r_real));
        if (std::fabs(r_real - r) > 1e-9 || r < 1)
            throw DomainError("self-convolution identity needs integer r = beta + gamma");
        const auto conv = convolve_truncated(t.b, t.b);
        for (std::size_t n = 0; n < t.b.size(); ++n) {
            double factor = 1.0;
            for (int j = 0; j < r; ++j)
                factor *= (n * astar + gamma + j) / (gamma + j);
            check_relative(conv[n], factor * t.b[n], 1e-9,
                           "b self-convolution at n = " + std::to_string(n));
        }
    } else if (t.family == "multi") {
        const double r_real = t.beta + t.d * gamma;
        if (std::fabs(r_real - 1.0) > 1e-9)
            throw DomainError("the (d+1)-fold convolution identity needs r = 1");
        std::vector<double> conv = t.b;
        for (int i = 0; i < t.d; ++i) conv = convolve_truncated(conv, t.b);
        for (std::size_t n = 0; n < t.b.size(); ++n)
            check_relative(conv[n], (static_cast<double>(n) * t.d + 1.0) * t.b[n], 1e-9,
                           "b convolution at n = " + std::to_string(n));
    } else {
        throw DomainError("b identities apply to Dirichlet families only");
    }
}

}  // namespace

int IntegerPartition::weight() const {
    return std::accumulate(parts.begin(), parts.end(), 0);
}

std::vector<IntegerPartition> enumerate_partitions(int k) {
    if (k < 1 || k > 40) throw DomainError("enumerate_partitions requires 1 <= k <= 40");
    std::vector<IntegerPartition> out;
    std::vector<int> prefix;
    build_partitions(k, k, prefix, out);
    return out;
}

double m_lambda(const SplitLaw& law, const IntegerPartition& lambda, double alpha_star) {
    check_partition(lambda);
    const SplitLaw* cur = &law;
    while (const auto* r = std::get_if<Refined>(&cur->get())) cur = r->base.get();

    const auto& v = cur->get();
    if (const auto* det = std::get_if<DeterministicTest>(&v))
        return m_lambda_deterministic(det->crumb_sizes, lambda, alpha_star);

    double gamma = 0.0;
    double total = 0.0;
    int c = 0;
    if (const auto* t = std::get_if<DirichletTripartite>(&v)) {
        gamma = t->gamma;
        total = t->beta + 2.0 * t->gamma;
        c = 2;
    } else {
        const auto& m = std::get<DirichletMulti>(v);
        gamma = m.gamma;
        total = m.beta + (m.d + 1) * m.gamma;
        c = m.d + 1;
    }
    const int l = lambda.length();
    if (l > c) return 0.0;
    return distinct_permutation_count(lambda.parts) * binom(c, l) *
           dirichlet_tuple_moment(gamma, total, lambda.parts, alpha_star);
}

MomentTable moments_M(const SplitLaw& law, double alpha_star, int K) {
    if (K < 1 || K > 40) throw DomainError("moments_M requires 1 <= K <= 40");
    const FamilyInfo fam = family_of(law);

    MomentTable t;
    t.alpha_star = alpha_star;
    t.family = fam.family;
    t.d = fam.d;
    t.gamma = fam.gamma;
    t.beta = fam.beta;
    t.a.assign(static_cast<std::size_t>(K) + 1, 1.0);

    for (int k = 2; k <= K; ++k) {
        double sum = 0.0;
        for (const auto& lambda : enumerate_partitions(k)) {
            if (lambda.length() < 2) continue;
            double prod = 1.0;
            for (int p : lambda.parts) prod *= t.a[static_cast<std::size_t>(p)] / factorial(p);
            sum += m_lambda(law, lambda, alpha_star) * prod;
        }
        const double denom = 1.0 - psi(law, alpha_star * k);
        const double ak = factorial(k) / denom * sum;
        if (!(ak > 0.0) || !std::isfinite(ak))
            throw NumericalBlowup("a_" + std::to_string(k) + " came out " + std::to_string(ak));
        t.a[static_cast<std::size_t>(k)] = ak;
    }

    if (t.family == "tripartite") {
        // the recursion must satisfy the binomial form of the same identity
        const double g = t.gamma;
        const double s = t.beta + 2.0 * g;
        for (int n = 2; n <= K; ++n) {
            double rhs = 0.0;
            for (int k = 0; k <= n; ++k) {
                const double lg = std::lgamma(s) + std::lgamma(k * alpha_star + g) +
                                  std::lgamma((n - k) * alpha_star + g) -
                                  std::lgamma(n * alpha_star + s) - 2.0 * std::lgamma(g);
                rhs += binom(n, k) * t.a[static_cast<std::size_t>(k)] *
                       t.a[static_cast<std::size_t>(n - k)] * std::exp(lg);
            }
            check_relative(t.a[static_cast<std::size_t>(n)], rhs, 1e-9,
                           "binomial moment identity at n = " + std::to_string(n));
        }
    }

    if (t.family == "tripartite" || t.family == "multi") {
        t.b.resize(t.a.size());
        for (std::size_t n = 0; n < t.a.size(); ++n) {
            const double lg = std::lgamma(static_cast<double>(n) * alpha_star + t.gamma) -
                              std::lgamma(t.gamma) - std::lgamma(static_cast<double>(n) + 1.0);
            t.b[n] = std::exp(lg) * t.a[n];
        }
        const double r_real =
            t.family == "multi" ? t.beta + t.d * t.gamma : t.beta + t.gamma;
        const bool integer_r = std::fabs(r_real - std::lround(r_real)) <= 1e-9;
        if ((t.family == "tripartite" && integer_r && std::lround(r_real) >= 1) ||
            (t.family == "multi" && std::fabs(r_real - 1.0) <= 1e-9))
            check_b_identities(t, t.gamma);
    }
    return t;
}

double closed_form_moments(const MomentFamily& family, double q) {
    if (const auto* bb = std::get_if<BesselAlphaAlpha>(&family)) {
        const double a = bb->alpha;
        if (!(a > 0.0 && a < 1.0)) throw DomainError("BesselAlphaAlpha requires alpha in (0,1)");
        if (!(q > -1.0)) throw DomainError("moment order must exceed -1");
        const double lg = std::lgamma(a) + std::lgamma(q + 1.0) -
                          q * (std::lgamma(a) - std::lgamma(2.0 * a)) -
                          std::lgamma((q + 1.0) * a);
        return std::exp(lg);
    }
    const auto& mr = std::get<MultiR1>(family);
    const double as = mr.alpha_star;
    const double d = static_cast<double>(mr.d);
    if (mr.d < 1 || !(as > 0.0 && as < 1.0))
        throw DomainError("MultiR1 requires d >= 1 and alpha_star in (0,1)");
    if (!(1.0 / d + q > 0.0 && q * as + as / d > 0.0))
        throw DomainError("moment order leaves a Gamma argument nonpositive");
    const double lg = q * std::log(d) + q * std::lgamma(as + as / d) +
                      std::lgamma(1.0 / d + q) - (q - 1.0) * std::lgamma(as / d) -
                      std::lgamma(q * as + as / d) - std::lgamma(1.0 / d);
    return std::exp(lg);
}

MomentTable b_transform(const MomentTable& table, double gamma) {
    if (table.a.empty()) throw DomainError("b_transform needs a filled moment table");
    MomentTable t = table;
    t.gamma = gamma;
    t.b.resize(t.a.size());
    for (std::size_t n = 0; n < t.a.size(); ++n) {
        const double lg = std::lgamma(static_cast<double>(n) * t.alpha_star + gamma) -
                          std::lgamma(gamma) - std::lgamma(static_cast<double>(n) + 1.0);
        t.b[n] = std::exp(lg) * t.a[n];
    }
    check_b_identities(t, gamma);
    return t;
}

std::vector<double> hankel_determinants(const std::vector<double>& moments) {
    if (moments.empty()) throw DomainError("empty moment sequence");
    const std::size_t kmax = (moments.size() - 1) / 2 + 1;
    std::vector<double> dets;
    for (std::size_t m = 1; m <= kmax; ++m) {
        if (2 * (m - 1) >= moments.size()) break;
        // Gaussian elimination on H[i][j] = moments[i+j], 0 <= i,j < m
        std::vector<std::vector<double>> h(m, std::vector<double>(m));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) h[i][j] = moments[i + j];
        double det = 1.0;
        for (std::size_t col = 0; col < m; ++col) {
            std::size_t piv = col;
            for (std::size_t rr = col + 1; rr < m; ++rr)
                if (std::fabs(h[rr][col]) > std::fabs(h[piv][col])) piv = rr;
            if (h[piv][col] == 0.0) {
                det = 0.0;
                break;
            }
            if (piv != col) {
                std::swap(h[piv], h[col]);
                det = -det;
            }
            det *= h[col][col];
            for (std::size_t rr = col + 1; rr < m; ++rr) {
                const double f = h[rr][col] / h[col][col];
                for (std::size_t cc = col; cc < m; ++cc) h[rr][cc] -= f * h[col][cc];
            }
        }
        dets.push_back(det);
    }
    return dets;
}

}  // namespace recsplit
