#include "recsplit/branching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "recsplit/errors.hpp"

namespace recsplit {

namespace {

constexpr long kDepthCap = 1000000;

struct Crumb {
    double size;
    RandomStream stream;
};

}  // namespace

PaintboxSample generate_paintbox(const SplitLaw& law, double delta, int max_gen,
                                 std::uint64_t seed) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
    if (max_gen < 1) throw GenerationCap("max_gen must be >= 1");

    PaintboxSample pb;
    pb.threshold_delta = delta;
    pb.seed = seed;

    std::vector<Crumb> live{{1.0, RandomStream(seed)}};
    std::vector<Crumb> next;
    int gen = 0;
    for (; gen < max_gen && !live.empty(); ++gen) {
        next.clear();
        for (auto& cr : live) {
            const SplitOutcome out = sample_split(law, cr.stream);
            for (const auto& s : out.solids) pb.solids.push_back(cr.size * s.size);
            for (const auto& c : out.crumbs) {
                const double sz = cr.size * c.size;
                if (sz > delta) {
                    next.push_back({sz, cr.stream.child(c.label)});
                } else {
                    pb.residual_crumb_mass += sz;
                    ++pb.residual_crumb_count;
                }
            }
        }
        live.swap(next);
    }
    pb.generations_explored = gen;
    if (!live.empty()) {
        pb.complete = false;
        for (const auto& cr : live) {
            pb.residual_crumb_mass += cr.size;
            ++pb.residual_crumb_count;
        }
    }
    std::sort(pb.solids.begin(), pb.solids.end(), std::greater<double>());
    return pb;
}

NxCount count_nx(const PaintboxSample& pb, double x) {
    NxCount r;
    // solids are descending: first index below x ends the count
    auto it = std::upper_bound(pb.solids.begin(), pb.solids.end(), x,
                               [](double v, double s) { return v > s; });
    r.count = static_cast<std::int64_t>(it - pb.solids.begin());
    r.exact = pb.complete && x >= pb.threshold_delta;
    return r;
}

long OccupancyVector::k_n() const {
    return std::accumulate(counts.begin(), counts.end(), 0L);
}

long OccupancyVector::dot_r() const {
    long t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        t += static_cast<long>(i + 1) * counts[i];
    return t;
}

OccupancyVector sample_partition(const SplitLaw& law, int n, RandomStream stream) {
    if (n < 1) throw DomainError("sample_partition requires n >= 1");
    OccupancyVector occ;
    occ.n = n;
    occ.counts.assign(static_cast<std::size_t>(n), 0L);

    struct Node {
        int balls;
        long depth;
        RandomStream stream;
    };
    std::vector<Node> stack{{n, 0, stream}};
    std::vector<int> in_part;

    while (!stack.empty()) {
        Node node = stack.back();
        stack.pop_back();
        if (node.balls == 1) {
            // the lone ball ends up in some solid of this subtree, alone
            ++occ.counts[0];
            continue;
        }
        if (node.depth >= kDepthCap)
            throw DepthExceeded("partition sampling exceeded the depth cap");

        const SplitOutcome out = sample_split(law, node.stream);
        const std::size_t parts = out.crumbs.size() + out.solids.size();
        in_part.assign(parts, 0);
        for (int b = 0; b < node.balls; ++b) {
            const double u = node.stream.uniform();
            double acc = 0.0;
            std::size_t idx = parts - 1;
            for (std::size_t i = 0; i < parts; ++i) {
                acc += i < out.crumbs.size() ? out.crumbs[i].size
                                             : out.solids[i - out.crumbs.size()].size;
                if (u < acc) {
                    idx = i;
                    break;
                }
            }
            ++in_part[idx];
        }
        for (std::size_t i = 0; i < out.crumbs.size(); ++i) {
            if (in_part[i] > 0)
                stack.push_back(
                    {in_part[i], node.depth + 1, node.stream.child(out.crumbs[i].label)});
        }
        for (std::size_t j = 0; j < out.solids.size(); ++j) {
            const int b = in_part[out.crumbs.size() + j];
            if (b > 0) ++occ.counts[static_cast<std::size_t>(b) - 1];
        }
    }
    return occ;
}

OccupancyVector sample_partition(const SplitLaw& law, int n, std::uint64_t seed) {
    return sample_partition(law, n, RandomStream(seed));
}

MartingaleTrace simulate_martingale(const SplitLaw& law, double alpha_star, int k_max,
                                    double delta, RandomStream stream) {
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    if (k_max < 0) throw GenerationCap("k_max must be >= 0");

    MartingaleTrace tr;
    tr.alpha_star = alpha_star;
    tr.values.reserve(static_cast<std::size_t>(k_max) + 1);
    tr.values.push_back(1.0);

    std::vector<Crumb> live{{1.0, stream}};
    std::vector<Crumb> next;
    double frozen = 0.0;
    long pruned = 0;
    for (int k = 0; k < k_max; ++k) {
        next.clear();
        for (auto& cr : live) {
            const SplitOutcome out = sample_split(law, cr.stream);
            for (const auto& c : out.crumbs) {
                const double sz = cr.size * c.size;
                if (sz > delta) {
                    next.push_back({sz, cr.stream.child(c.label)});
                } else {
                    frozen += std::pow(sz, alpha_star);
                    ++pruned;
                }
            }
        }
        live.swap(next);
        double m = frozen;
        for (const auto& cr : live) m += std::pow(cr.size, alpha_star);
        tr.values.push_back(m);
    }
    tr.truncation_bound = static_cast<double>(pruned) * std::pow(delta, alpha_star);
    return tr;
}

MartingaleTrace simulate_martingale(const SplitLaw& law, double alpha_star, int k_max,
                                    double delta, std::uint64_t seed) {
    return simulate_martingale(law, alpha_star, k_max, delta, RandomStream(seed));
}

FixedPointReport empirical_fixed_point_check(const SplitLaw& law, double alpha_star,
                                             long samples, std::uint64_t seed) {
    if (samples < 1000) throw DomainError("fixed-point check needs >= 1000 samples");

    constexpr int kGen = 25;
    constexpr double kDelta = 1e-5;

    RandomStream root(seed);
    std::vector<double> m(static_cast<std::size_t>(samples));
    for (long i = 0; i < samples; ++i) {
        const auto tr = simulate_martingale(law, alpha_star, kGen, kDelta,
                                            root.child(static_cast<std::uint64_t>(i)));
        m[static_cast<std::size_t>(i)] = tr.values.back();
    }

    // right side: fresh split, crumb weights X_i^{a*}, M's resampled from the pool
    RandomStream rs = root.child(0xF1DE0ull);
    std::vector<double> r(static_cast<std::size_t>(samples));
    for (long t = 0; t < samples; ++t) {
        const SplitOutcome out = sample_split(law, rs);
        double v = 0.0;
        for (const auto& c : out.crumbs) {
            const double pick = m[rs.uniform_index(static_cast<std::uint64_t>(samples))];
            v += std::pow(c.size, alpha_star) * pick;
        }
        r[static_cast<std::size_t>(t)] = v;
    }

    const auto power_mean = [](const std::vector<double>& xs, int q) {
        double s = 0.0;
        for (double x : xs) s += std::pow(x, q);
        return s / static_cast<double>(xs.size());
    };

    FixedPointReport rep;
    for (int q = 1; q <= 3; ++q) {
        const double lm = power_mean(m, q);
        const double rm = power_mean(r, q);
        double lv = 0.0;
        double rv = 0.0;
        for (double x : m) lv += std::pow(std::pow(x, q) - lm, 2);
        for (double x : r) rv += std::pow(std::pow(x, q) - rm, 2);
        const double n = static_cast<double>(samples);
        lv /= n - 1.0;
        rv /= n - 1.0;
        const double se = std::sqrt((lv + rv) / n);
        rep.lhs_moments.push_back(lm);
        rep.rhs_moments.push_back(rm);
        rep.moment_gaps.push_back(se > 0.0 ? (lm - rm) / se : 0.0);
    }
    return rep;
}

}  // namespace recsplit
