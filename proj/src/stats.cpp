#include "recsplit/stats.hpp"

#include <algorithm>
#include <cmath>

#include "recsplit/branching.hpp"
#include "recsplit/errors.hpp"
#include "recsplit/mellin.hpp"
#include "recsplit/moments.hpp"
#include "recsplit/special.hpp"

namespace recsplit {

std::vector<double> moment_z_scores(const std::vector<double>& samples,
                                    const std::vector<double>& reference_moments) {
    if (samples.size() < 100) throw DomainError("moment_z_scores needs >= 100 samples");
    const double n = static_cast<double>(samples.size());
    std::vector<double> z;
    for (std::size_t q = 1; q <= reference_moments.size(); ++q) {
        double mean = 0.0;
        for (double x : samples) mean += std::pow(x, static_cast<double>(q));
        mean /= n;
        double var = 0.0;
        for (double x : samples) {
            const double dd = std::pow(x, static_cast<double>(q)) - mean;
            var += dd * dd;
        }
        var /= n - 1.0;
        const double se = std::sqrt(var / n);
        const double gap = mean - reference_moments[q - 1];
        z.push_back(se > 0.0 ? gap / se : (gap == 0.0 ? 0.0 : INFINITY));
    }
    return z;
}

SlopeFit power_law_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 10) throw InsufficientRange("need >= 10 points for a slope fit");
    double xmin = points.front().first;
    double xmax = xmin;
    for (const auto& [x, nx] : points) {
        if (!(x > 0.0)) throw InsufficientRange("x values must be positive");
        if (nx < 1.0) throw InsufficientRange("N_x must be >= 1 across the fit range");
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    if (xmax / xmin < 100.0) throw InsufficientRange("x range must span two decades");

    const double n = static_cast<double>(points.size());
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (const auto& [x, nx] : points) {
        const double t = std::log(1.0 / x);
        const double y = std::log(nx);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double denom = stt - st * st / n;
    SlopeFit fit;
    fit.slope = (sty - st * sy / n) / denom;
    const double intercept = (sy - fit.slope * st) / n;
    double rss = 0.0;
    for (const auto& [x, nx] : points) {
        const double resid = std::log(nx) - intercept - fit.slope * std::log(1.0 / x);
        rss += resid * resid;
    }
    fit.stderr_ = std::sqrt(rss / (n - 2.0) / denom);
    return fit;
}

Theorem5Report theorem5_check(const SplitLaw& law, int n, long reps, std::uint64_t seed) {
    if (n < 1000) throw DomainError("theorem5_check expects n >= 1000");
    const MalthusianSolution sol = solve_malthusian(law);
    const double scale = std::pow(static_cast<double>(n), sol.alpha_star) * sol.c_blocks;

    RandomStream root(seed);
    std::vector<double> scaled(static_cast<std::size_t>(reps));
    double mean_k = 0.0;
    double mean_k1 = 0.0;
    for (long i = 0; i < reps; ++i) {
        const auto occ = sample_partition(law, n, root.child(static_cast<std::uint64_t>(i)));
        const double kn = static_cast<double>(occ.k_n());
        scaled[static_cast<std::size_t>(i)] = kn / scale;
        mean_k += kn;
        mean_k1 += static_cast<double>(occ.counts[0]);
    }
    mean_k /= static_cast<double>(reps);
    mean_k1 /= static_cast<double>(reps);

    const MomentTable mt = moments_M(law, sol.alpha_star, 2);
    Theorem5Report rep;
    rep.m_reference_moments = {1.0, mt.a[2]};
    for (int q = 1; q <= 2; ++q) {
        double m = 0.0;
        for (double x : scaled) m += std::pow(x, q);
        rep.scaled_kn_moments.push_back(m / static_cast<double>(reps));
    }
    rep.z_scores = moment_z_scores(scaled, rep.m_reference_moments);
    rep.ratio_first = mean_k1 / mean_k;
    rep.ratio_limit = sol.c_count_r(1) / sol.c_blocks;
    return rep;
}

Chi2Result chi_squared(const std::map<std::string, long>& observed_counts,
                       const std::map<std::string, double>& expected_probs, long total) {
    if (total < 1) throw DomainError("chi_squared needs a positive total");
    double psum = 0.0;
    for (const auto& [k, p] : expected_probs) {
        (void)k;
        if (p < 0.0) throw DomainError("negative expected probability");
        psum += p;
    }
    if (std::fabs(psum - 1.0) > 1e-6)
        throw DomainError("expected probabilities sum to " + std::to_string(psum));
    long osum = 0;
    for (const auto& [k, c] : observed_counts) {
        if (expected_probs.find(k) == expected_probs.end())
            throw DomainError("observed cell '" + k + "' has no expected probability");
        osum += c;
    }
    if (osum != total) throw DomainError("observed counts do not add up to total");

    struct Cell {
        double expected;
        double observed;
    };
    std::vector<Cell> cells;
    for (const auto& [k, p] : expected_probs) {
        const auto it = observed_counts.find(k);
        cells.push_back({p / psum * static_cast<double>(total),
                         it == observed_counts.end() ? 0.0 : static_cast<double>(it->second)});
    }
    std::sort(cells.begin(), cells.end(),
              [](const Cell& a, const Cell& b) { return a.expected < b.expected; });
    // pool the small-expectation tail into one cell: absorb every cell below
    // the floor, plus enough beyond to lift the pool itself over it
    std::vector<Cell> merged;
    Cell pool{0.0, 0.0};
    for (const auto& c : cells) {
        if (c.expected < 5.0 || pool.expected < 5.0) {
            pool.expected += c.expected;
            pool.observed += c.observed;
        } else {
            merged.push_back(c);
        }
    }
    if (pool.expected >= 5.0) {
        merged.push_back(pool);
    } else if (pool.expected > 0.0) {
        if (merged.empty()) throw DegenerateCells("all cells exhausted by merging");
        merged.front().expected += pool.expected;
        merged.front().observed += pool.observed;
    }
    if (merged.size() < 2) throw DegenerateCells("fewer than two usable cells after merging");

    Chi2Result r;
    for (const auto& c : merged) {
        const double d = c.observed - c.expected;
        r.chi2 += d * d / c.expected;
    }
    r.dof = static_cast<int>(merged.size()) - 1;
    r.p_value = gamma_q(static_cast<double>(r.dof) / 2.0, r.chi2 / 2.0);
    return r;
}

}  // namespace recsplit
