#include "recsplit/ewens_pitman.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "recsplit/errors.hpp"
#include "recsplit/exact_counts.hpp"
#include "recsplit/mellin.hpp"
#include "recsplit/moments.hpp"
#include "recsplit/stats.hpp"

namespace recsplit {

namespace {

constexpr long kStickCap = 1000000;

void check_pair(double alpha, double theta) {
    if (!(alpha > 0.0 && alpha < 1.0 && theta > -alpha))
        throw DomainError("need 0 < alpha < 1 and theta > -alpha");
}

std::string occupancy_key(const OccupancyVector& occ) {
    std::ostringstream os;
    for (std::size_t i = 0; i < occ.counts.size(); ++i) {
        if (i) os << ',';
        os << occ.counts[i];
    }
    return os.str();
}

}  // namespace

double eppf_probability(double alpha, double theta, const OccupancyVector& occ) {
    check_pair(alpha, theta);
    if (occ.n < 1 || static_cast<int>(occ.counts.size()) != occ.n || occ.dot_r() != occ.n)
        throw DomainError("invalid occupancy vector");
    const long l = occ.k_n();
    if (l < 1) throw DomainError("occupancy has no blocks");

    // n! * prod_{j=1}^{l-1}(theta+j alpha) / prod_{i=1}^{n-1}(theta+i), the
    // leading theta of both rising products already cancelled
    double p = 1.0;
    for (int i = 2; i <= occ.n; ++i) p *= i;
    for (long j = 1; j < l; ++j) p *= theta + static_cast<double>(j) * alpha;
    for (int i = 1; i < occ.n; ++i) p /= theta + static_cast<double>(i);

    for (int i = 1; i <= occ.n; ++i) {
        const long ki = occ.counts[static_cast<std::size_t>(i) - 1];
        if (ki == 0) continue;
        double rising = 1.0;  // (1-alpha)_{i-1}
        for (int j = 0; j < i - 1; ++j) rising *= 1.0 - alpha + j;
        double ifact = 1.0;
        for (int j = 2; j <= i; ++j) ifact *= j;
        for (long rep = 0; rep < ki; ++rep) p *= rising / ifact;
        for (long rep = 2; rep <= ki; ++rep) p /= static_cast<double>(rep);
    }
    return p;
}

std::vector<OccupancyVector> enumerate_occupancies(int n) {
    std::vector<OccupancyVector> out;
    for (const auto& part : enumerate_partitions(n)) {
        OccupancyVector occ;
        occ.n = n;
        occ.counts.assign(static_cast<std::size_t>(n), 0L);
        for (int p : part.parts) ++occ.counts[static_cast<std::size_t>(p) - 1];
        out.push_back(std::move(occ));
    }
    return out;
}

OccupancyVector sample_pd_paintbox_partition(double alpha, double theta, int n,
                                             RandomStream stream) {
    check_pair(alpha, theta);
    if (n < 1) throw DomainError("n must be >= 1");

    // A ball walks the sticks in order; given it passed sticks 1..j-1 it
    // lands on stick j with conditional probability
    // P_j / (W_1...W_{j-1}) = 1 - W_j, so each test is a fresh Bernoulli and
    // no near-1 cumulative comparison is ever needed.
    std::vector<double> w;  // stick-breaking factors W_1, W_2, ...
    std::vector<long> ball_count;
    for (int b = 0; b < n; ++b) {
        for (std::size_t j = 0;; ++j) {
            if (j == w.size()) {
                if (static_cast<long>(j) >= kStickCap)
                    throw DepthExceeded("stick-breaking exceeded the stick cap");
                w.push_back(
                    stream.beta(theta + static_cast<double>(j + 1) * alpha, 1.0 - alpha));
                ball_count.push_back(0);
            }
            if (stream.uniform() < 1.0 - w[j]) {
                ++ball_count[j];
                break;
            }
        }
    }

    OccupancyVector occ;
    occ.n = n;
    occ.counts.assign(static_cast<std::size_t>(n), 0L);
    for (long c : ball_count)
        if (c > 0) ++occ.counts[static_cast<std::size_t>(c) - 1];
    return occ;
}

OccupancyVector sample_pd_paintbox_partition(double alpha, double theta, int n,
                                             std::uint64_t seed) {
    return sample_pd_paintbox_partition(alpha, theta, n, RandomStream(seed));
}

QMapResult q_mapping(const std::vector<double>& b, double alpha, int d, RandomStream& stream) {
    if (d < 1) throw DomainError("d must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    const long sz = static_cast<long>(b.size());
    if (sz < d + 1 || (sz - 1) % d != 0)
        throw BadCardinality("collection size must be kd + 1 with k >= 1");
    double total = 0.0;
    for (double x : b) {
        if (!(x > 0.0)) throw DomainError("collection entries must be positive");
        total += x;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw MassLeak("collection must sum to 1");

    // size-biased pick
    const double u = stream.uniform() * total;
    std::size_t pick = b.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        acc += b[i];
        if (u < acc) {
            pick = i;
            break;
        }
    }
    const double z = b[pick];

    // replacement vector (Y, X_1..X_{d+1}) ~ Dirichlet(1-a, a/d, ..., a/d)
    std::vector<double> params(static_cast<std::size_t>(d) + 2, alpha / d);
    params[0] = 1.0 - alpha;
    std::vector<double> part;
    stream.dirichlet(params, part);

    QMapResult res;
    res.discarded = part[0] * z;
    const double keep = 1.0 - res.discarded;
    res.collection.reserve(b.size() + static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < b.size(); ++i)
        if (i != pick) res.collection.push_back(b[i] / keep);
    for (std::size_t j = 1; j < part.size(); ++j)
        res.collection.push_back(part[j] * z / keep);
    return res;
}

std::vector<double> arranged_solids(double alpha, int d, int count, RandomStream stream) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    if (d < 1 || count < 1) throw DomainError("d and count must be >= 1");
    const SplitLaw law = SplitLaw::multi(d, alpha / d, 1.0 - alpha);

    std::vector<double> eta;
    eta.reserve(static_cast<std::size_t>(count));
    std::vector<double> crumbs;
    double remaining = 1.0;

    SplitOutcome out = sample_split(law, stream);
    eta.push_back(out.solids[0].size);
    for (const auto& c : out.crumbs) crumbs.push_back(c.size);
    remaining -= out.solids[0].size;

    for (int k = 2; k <= count; ++k) {
        const double u = stream.uniform() * remaining;
        std::size_t pick = crumbs.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < crumbs.size(); ++i) {
            acc += crumbs[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        const double z = crumbs[pick];
        out = sample_split(law, stream);
        const double solid_abs = z * out.solids[0].size;
        eta.push_back(solid_abs / remaining);
        crumbs[pick] = z * out.crumbs[0].size;
        for (std::size_t i = 1; i < out.crumbs.size(); ++i)
            crumbs.push_back(z * out.crumbs[i].size);
        remaining -= solid_abs;
    }
    return eta;
}

EquivalenceReport equivalence_suite(double alpha, int d, int n, long reps, std::uint64_t seed,
                                    std::optional<double> theta_override) {
    if (!(alpha > 0.0 && alpha < 1.0) || d < 1) throw DomainError("invalid (alpha, d)");
    if (n < 2 || n > 8) throw DomainError("equivalence_suite enumerates n in [2, 8]");
    if (reps < 1) throw DomainError("reps must be positive");

    const double theta = theta_override.value_or(alpha / d);
    const SplitLaw law = SplitLaw::multi(d, alpha / d, 1.0 - alpha);

    std::map<std::string, double> expected;
    for (const auto& occ : enumerate_occupancies(n))
        expected[occupancy_key(occ)] = eppf_probability(alpha, theta, occ);

    std::map<std::string, long> observed;
    RandomStream root(seed);
    for (long i = 0; i < reps; ++i) {
        const auto occ = sample_partition(law, n, root.child(static_cast<std::uint64_t>(i)));
        ++observed[occupancy_key(occ)];
    }

    const Chi2Result c2 = chi_squared(observed, expected, reps);
    EquivalenceReport rep;
    rep.chi2 = c2.chi2;
    rep.dof = c2.dof;
    rep.p_value = c2.p_value;
    rep.theta_used = theta;
    for (int m = 1; m <= 12; ++m) {
        const double lhs = p_of_alpha(law, static_cast<double>(m));
        const double rhs = p_same_color(EwensPitmanModel{alpha, theta}, m);
        rep.p_n_gaps.push_back(std::fabs(lhs - rhs));
    }
    return rep;
}

NoncoincidenceReport noncoincidence_check(int r, double gamma) {
    if (r < 2) throw DomainError("noncoincidence_check requires r >= 2");
    if (!(gamma > 0.0 && gamma < static_cast<double>(r)))
        throw DomainError("gamma must lie in (0, r)");

    const TripartiteR model{r, gamma};
    const double p2 = p_same_color(model, 2);
    const double p3 = p_same_color(model, 3);

    // theta is pinned by p(2) for each alpha; scan for a sign change of the
    // p(3) defect, then bisect
    const auto theta_of = [&](double a) { return (1.0 - a) / p2 - 1.0; };
    const auto defect = [&](double a) {
        return p_same_color(EwensPitmanModel{a, theta_of(a)}, 3) - p3;
    };

    constexpr int kGrid = 1000;
    const double lo_a = 1e-9;
    const double hi_a = 1.0 - 1e-9;
    double lo = lo_a;
    double hi = 0.0;
    bool bracketed = false;
    double flo = defect(lo_a);
    for (int i = 1; i <= kGrid; ++i) {
        const double a = lo_a + (hi_a - lo_a) * i / kGrid;
        const double fa = defect(a);
        if ((flo <= 0.0 && fa >= 0.0) || (flo >= 0.0 && fa <= 0.0)) {
            lo = lo_a + (hi_a - lo_a) * (i - 1) / kGrid;
            hi = a;
            bracketed = true;
            break;
        }
        flo = fa;
    }
    if (!bracketed)
        throw FitFailed("no (alpha, theta) matches p(2), p(3): p2 = " + std::to_string(p2) +
                        ", p3 = " + std::to_string(p3));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = defect(mid);
        if ((fm <= 0.0) == (defect(lo) <= 0.0))
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }

    NoncoincidenceReport rep;
    rep.alpha_fit = 0.5 * (lo + hi);
    rep.theta_fit = theta_of(rep.alpha_fit);
    rep.residual_at_4 =
        std::fabs(p_same_color(model, 4) -
                  p_same_color(EwensPitmanModel{rep.alpha_fit, rep.theta_fit}, 4));
    return rep;
}

}  // namespace recsplit
