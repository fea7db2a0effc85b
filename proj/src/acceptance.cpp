#include "recsplit/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <sstream>

#include "recsplit/branching.hpp"
#include "recsplit/ewens_pitman.hpp"
#include "recsplit/exact_counts.hpp"
#include "recsplit/mellin.hpp"
#include "recsplit/moments.hpp"
#include "recsplit/parallel.hpp"
#include "recsplit/rng.hpp"
#include "recsplit/split_law.hpp"
#include "recsplit/stats.hpp"

namespace recsplit {
namespace {

struct Ctx {
    bool quick = false;
    unsigned threads = 0;

    long reps(long full) const { return quick ? std::max(full / 5, 500L) : full; }
};

CriterionResult make_result(int id, const char* name) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    return r;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double mc_z(const std::vector<double>& v, double target) {
    const double m = mean_of(v);
    const double se = sd_of(v, m) / std::sqrt(static_cast<double>(v.size()));
    return (m - target) / se;
}

// E[X^q] for X ~ beta(a, b).
double beta_moment(double a, double b, int q) {
    double m = 1.0;
    for (int j = 0; j < q; ++j) m *= (a + j) / (a + b + j);
    return m;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

void add_below(CriterionResult& r, const std::string& name, double stat, double thr) {
    r.checks.push_back({name, stat, thr, stat <= thr});
}

void add_above(CriterionResult& r, const std::string& name, double stat, double thr) {
    r.checks.push_back({name, stat, thr, stat > thr});
}

void finish(CriterionResult& r, std::chrono::steady_clock::time_point t0, double budget_s) {
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0.0) add_below(r, "runtime_seconds", r.seconds, budget_s);
    r.pass = std::all_of(r.checks.begin(), r.checks.end(),
                         [](const CheckRecord& c) { return c.pass; });
}

CriterionResult crit_malthusian_golden(const Ctx&) {
    CriterionResult r = make_result(1, "malthusian_golden");
    const auto t0 = std::chrono::steady_clock::now();

    const double root17 = (std::sqrt(17.0) - 3.0) / 2.0;
    add_below(r, "tripartite_1_1",
              std::fabs(solve_malthusian(SplitLaw::tripartite(1.0, 1.0)).alpha_star - root17),
              1e-10);

    double worst = 0.0;
    for (int i = 1; i <= 9; ++i) {
        const double a0 = 0.1 * i;
        const auto sol = solve_malthusian(SplitLaw::tripartite(a0, 1.0 - a0));
        worst = std::max(worst, std::fabs(sol.alpha_star - a0));
    }
    add_below(r, "tripartite_family", worst, 1e-10);

    worst = 0.0;
    const std::pair<int, double> cases[] = {{2, 0.3}, {3, 0.2}, {5, 0.1}};
    for (auto [d, g] : cases) {
        const auto sol = solve_malthusian(SplitLaw::multi(d, g, 1.0 - d * g));
        worst = std::max(worst, std::fabs(sol.alpha_star - d * g));
    }
    add_below(r, "multi_family", worst, 1e-10);

    finish(r, t0, 1.0);
    r.detail = "max |alpha* - target| = " +
               fmt(std::max({r.checks[0].statistic, r.checks[1].statistic, r.checks[2].statistic}));
    return r;
}

CriterionResult crit_moment_oracles(const Ctx&) {
    CriterionResult r = make_result(2, "moment_oracles");
    const auto t0 = std::chrono::steady_clock::now();

    const auto bessel_law = SplitLaw::tripartite(0.5, 0.5);
    const auto bsol = solve_malthusian(bessel_law);
    const auto btab = moments_M(bessel_law, bsol.alpha_star, 8);
    double worst_b = 0.0;
    for (int q = 2; q <= 8; ++q) {
        const double closed = closed_form_moments(BesselAlphaAlpha{0.5}, q);
        worst_b = std::max(worst_b, std::fabs(btab.a[q] - closed) / closed);
    }
    add_below(r, "tripartite_half_vs_closed", worst_b, 1e-8);

    double worst_m = 0.0;
    const std::pair<int, double> cases[] = {{1, 0.5}, {2, 0.3}, {3, 0.2}};
    for (auto [d, g] : cases) {
        const auto law = SplitLaw::multi(d, g, 1.0 - d * g);
        const auto sol = solve_malthusian(law);
        const auto tab = moments_M(law, sol.alpha_star, 8);
        for (int q = 2; q <= 8; ++q) {
            const double closed = closed_form_moments(MultiR1{d, d * g}, q);
            worst_m = std::max(worst_m, std::fabs(tab.a[q] - closed) / closed);
        }
    }
    add_below(r, "multi_r1_vs_closed", worst_m, 1e-8);

    double worst_id = 0.0;
    for (double a : {0.3, 0.5, 0.7}) {
        for (int q = 2; q <= 8; ++q) {
            const double lhs = closed_form_moments(BesselAlphaAlpha{a}, q);
            const double rhs = closed_form_moments(MultiR1{1, a}, q);
            worst_id = std::max(worst_id, std::fabs(lhs - rhs) / rhs);
        }
    }
    add_below(r, "d1_closed_form_identity", worst_id, 1e-12);

    finish(r, t0, 10.0);
    r.detail = "recursion vs closed: tripartite " + fmt(worst_b) + ", multi " + fmt(worst_m);
    return r;
}

CriterionResult crit_exact_vs_simulation(const Ctx& ctx) {
    CriterionResult r = make_result(3, "exact_vs_simulation");
    const auto t0 = std::chrono::steady_clock::now();

    const int n = 200;
    const long reps = ctx.reps(10000);
    const struct {
        const char* tag;
        SplitLaw law;
    } laws[] = {{"tri11", SplitLaw::tripartite(1.0, 1.0)},
                {"multi2", SplitLaw::multi(2, 0.25, 0.5)}};

    double worst_z = 0.0;
    for (std::uint64_t li = 0; li < 2; ++li) {
        const auto& entry = laws[li];
        std::vector<std::vector<double>> obs(4, std::vector<double>(reps));
        RandomStream root(0xACC3110ull + li);
        parallel_for(
            reps,
            [&](std::size_t i) {
                const auto occ = sample_partition(entry.law, n, root.child(i));
                obs[0][i] = static_cast<double>(occ.k_n());
                for (int rr = 1; rr <= 3; ++rr)
                    obs[rr][i] = static_cast<double>(occ.counts[rr - 1]);
            },
            ctx.threads);

        const double exact_kn = expected_blocks(entry.law, n);
        double z = std::fabs(mc_z(obs[0], exact_kn));
        worst_z = std::max(worst_z, z);
        add_below(r, std::string(entry.tag) + "_Kn_z", z, 4.0);
        for (int rr = 1; rr <= 3; ++rr) {
            const double exact_r = expected_count_r(entry.law, n, rr);
            z = std::fabs(mc_z(obs[rr], exact_r));
            worst_z = std::max(worst_z, z);
            add_below(r, std::string(entry.tag) + "_Kn" + std::to_string(rr) + "_z", z, 4.0);
        }
    }

    finish(r, t0, 180.0);
    r.detail = "n = 200, reps = " + std::to_string(reps) + ", worst |z| = " + fmt(worst_z);
    return r;
}

CriterionResult crit_theorem1_asymptote(const Ctx&) {
    CriterionResult r = make_result(4, "theorem1_asymptote");
    const auto t0 = std::chrono::steady_clock::now();

    const auto law = SplitLaw::tripartite(1.0, 1.0);
    const auto rows = asymptotic_ratio_table(law, {256, 1024, 4096});
    double dev[3];
    for (int i = 0; i < 3; ++i) dev[i] = std::fabs(rows[i].ratio / rows[i].limit_constant - 1.0);

    add_below(r, "deviation_monotone", std::max(dev[1] / dev[0], dev[2] / dev[1]), 1.0);
    add_below(r, "deviation_at_4096", dev[2], 0.10);

    const int n = 4096;
    const double base = rows[2].expected_k;
    const double doubled = expected_blocks(law, n, 2 * (n + 64));
    add_below(r, "precision_doubling", std::fabs(base - doubled) / std::fabs(doubled), 1e-12);

    finish(r, t0, 0.0);
    r.detail = "deviations " + fmt(dev[0]) + " > " + fmt(dev[1]) + " > " + fmt(dev[2]);
    return r;
}

CriterionResult crit_proposition8(const Ctx& ctx) {
    CriterionResult r = make_result(5, "proposition8_equivalence");
    const auto t0 = std::chrono::steady_clock::now();

    const long reps = ctx.reps(100000);
    const auto eq1 = equivalence_suite(0.5, 2, 6, reps, 0xACC5A01ull);
    const auto eq2 = equivalence_suite(0.6, 3, 6, reps, 0xACC5A02ull);
    double worst_gap = 0.0;
    for (double g : eq1.p_n_gaps) worst_gap = std::max(worst_gap, g);
    for (double g : eq2.p_n_gaps) worst_gap = std::max(worst_gap, g);
    add_below(r, "analytic_p_n_gaps", worst_gap, 1e-10);

    add_above(r, "chi2_alpha05_d2_p", eq1.p_value, 1e-3);
    add_above(r, "chi2_alpha06_d3_p", eq2.p_value, 1e-3);

    const auto neg = equivalence_suite(0.5, 2, 6, reps, 0xACC5A03ull, 0.5);
    add_below(r, "negative_control_p", neg.p_value, 1e-6);

    finish(r, t0, 180.0);
    r.detail = "p-values " + fmt(eq1.p_value) + ", " + fmt(eq2.p_value) +
               "; negative control " + fmt(neg.p_value);
    return r;
}

CriterionResult crit_lemma9_arrangement(const Ctx& ctx) {
    CriterionResult r = make_result(6, "lemma9_arrangement");
    const auto t0 = std::chrono::steady_clock::now();

    const double a = 0.5;
    const int d = 2;
    const long reps = ctx.reps(20000);

    std::vector<double> disc1(reps), disc2(reps), sum_err(reps);
    std::vector<char> card_ok(reps);
    const std::vector<double> dir_alpha(d + 1, a / d);
    RandomStream root(0xACC6A00ull);
    parallel_for(
        reps,
        [&](std::size_t i) {
            RandomStream s = root.child(i);
            std::vector<double> b;
            s.dirichlet(dir_alpha, b);
            auto r1 = q_mapping(b, a, d, s);
            auto r2 = q_mapping(r1.collection, a, d, s);
            disc1[i] = r1.discarded;
            disc2[i] = r2.discarded;
            card_ok[i] = r1.collection.size() == std::size_t(2 * d + 1) &&
                         r2.collection.size() == std::size_t(3 * d + 1);
            double e = 0.0;
            for (const auto& col : {r1.collection, r2.collection}) {
                double sum = 0.0;
                for (double x : col) sum += x;
                e = std::max(e, std::fabs(sum - 1.0));
            }
            sum_err[i] = e;
        },
        ctx.threads);

    const long bad = std::count(card_ok.begin(), card_ok.end(), char(0));
    r.checks.push_back({"q_map_cardinality_violations", double(bad), 0.0, bad == 0});
    add_below(r, "q_map_unit_sum", *std::max_element(sum_err.begin(), sum_err.end()), 1e-12);

    const double inv_d = 1.0 / d;
    for (int k = 1; k <= 2; ++k) {
        const auto& disc = (k == 1) ? disc1 : disc2;
        const std::vector<double> refs = {beta_moment(1.0 - a, (k + 1 + inv_d) * a, 1),
                                          beta_moment(1.0 - a, (k + 1 + inv_d) * a, 2)};
        const auto z = moment_z_scores(disc, refs);
        add_below(r, "discarded_beta_k" + std::to_string(k),
                  std::max(std::fabs(z[0]), std::fabs(z[1])), 4.0);
    }

    const int n_eta = 5;
    std::vector<std::vector<double>> eta(n_eta, std::vector<double>(reps));
    RandomStream eroot(0xACC6A01ull);
    parallel_for(
        reps,
        [&](std::size_t i) {
            const auto vals = arranged_solids(a, d, n_eta, eroot.child(i));
            for (int k = 0; k < n_eta; ++k) eta[k][i] = vals[k];
        },
        ctx.threads);
    double worst_eta = 0.0;
    for (int k = 1; k <= n_eta; ++k) {
        const std::vector<double> refs = {beta_moment(1.0 - a, (k + inv_d) * a, 1),
                                          beta_moment(1.0 - a, (k + inv_d) * a, 2)};
        const auto z = moment_z_scores(eta[k - 1], refs);
        worst_eta = std::max({worst_eta, std::fabs(z[0]), std::fabs(z[1])});
    }
    add_below(r, "eta_beta_moments", worst_eta, 4.0);

    finish(r, t0, 0.0);
    r.detail = "reps = " + std::to_string(reps) + ", worst eta |z| = " + fmt(worst_eta);
    return r;
}

CriterionResult crit_lemma7_noncoincidence(const Ctx&) {
    CriterionResult r = make_result(7, "lemma7_noncoincidence");
    const auto t0 = std::chrono::steady_clock::now();

    const auto rep = noncoincidence_check(2, 1.0);
    add_above(r, "residual_at_4", rep.residual_at_4, 1e-6);

    finish(r, t0, 0.0);
    r.detail = "fit (alpha, theta) = (" + fmt(rep.alpha_fit) + ", " + fmt(rep.theta_fit) +
               "), residual " + fmt(rep.residual_at_4);
    return r;
}

CriterionResult crit_martingale_suite(const Ctx& ctx) {
    CriterionResult r = make_result(8, "martingale_suite");
    const auto t0 = std::chrono::steady_clock::now();

    const auto law = SplitLaw::tripartite(1.0, 1.0);
    const auto sol = solve_malthusian(law);
    const long reps = ctx.reps(10000);

    std::vector<double> m25(reps);
    RandomStream root(0xACC8A00ull);
    parallel_for(
        reps,
        [&](std::size_t i) {
            m25[i] = simulate_martingale(law, sol.alpha_star, 25, 1e-5, root.child(i))
                         .values.back();
        },
        ctx.threads);
    add_below(r, "mean_M25_z", std::fabs(mc_z(m25, 1.0)), 4.0);

    const auto fp = empirical_fixed_point_check(law, sol.alpha_star, ctx.reps(10000),
                                                0xACC8A01ull);
    double worst_fp = 0.0;
    for (double g : fp.moment_gaps) worst_fp = std::max(worst_fp, std::fabs(g));
    add_below(r, "fixed_point_moment_z", worst_fp, 4.0);

    const auto det = SplitLaw::deterministic({0.25, 0.25}, {0.5});
    const auto trace = simulate_martingale(det, 0.5, 25, 1e-5, 0xACC8A02ull);
    double worst_det = 0.0;
    for (double v : trace.values) worst_det = std::max(worst_det, std::fabs(v - 1.0));
    r.checks.push_back({"deterministic_Mk_exact", worst_det, 0.0, worst_det == 0.0});

    finish(r, t0, 0.0);
    r.detail = "mean M_25 = " + fmt(mean_of(m25)) + ", fixed-point worst |z| = " + fmt(worst_fp);
    return r;
}

CriterionResult crit_corollary4_theorem5(const Ctx& ctx) {
    CriterionResult r = make_result(9, "corollary4_theorem5");
    const auto t0 = std::chrono::steady_clock::now();

    const auto law11 = SplitLaw::tripartite(1.0, 1.0);
    const auto sol = solve_malthusian(law11);
    const auto pb = generate_paintbox(law11, 1e-6, 200, 0xACC9A00ull);
    std::vector<std::pair<double, double>> points;
    for (int j = 0; j < 25; ++j) {
        const double x = 1e-6 * std::pow(10.0, 4.0 * j / 24.0);
        points.emplace_back(x, static_cast<double>(count_nx(pb, x).count));
    }
    const auto fit = power_law_slope(points);
    add_below(r, "nx_slope_rel_error", std::fabs(fit.slope - sol.alpha_star) / sol.alpha_star,
              0.05);

    const auto t5 = theorem5_check(SplitLaw::tripartite(0.5, 0.5), 10000, ctx.reps(4000),
                                   0xACC9A01ull);
    const double second_ref = 4.0 / std::numbers::pi;
    add_below(r, "scaled_Kn_first_moment", std::fabs(t5.scaled_kn_moments[0] - 1.0), 0.10);
    add_below(r, "scaled_Kn_second_moment",
              std::fabs(t5.scaled_kn_moments[1] - second_ref) / second_ref, 0.10);

    finish(r, t0, 300.0);
    r.detail = "slope " + fmt(fit.slope) + " vs alpha* " + fmt(sol.alpha_star) +
               "; scaled moments (" + fmt(t5.scaled_kn_moments[0]) + ", " +
               fmt(t5.scaled_kn_moments[1]) + ")";
    return r;
}

CriterionResult crit_structural(const Ctx& ctx) {
    CriterionResult r = make_result(10, "structural_properties");
    const auto t0 = std::chrono::steady_clock::now();

    const std::vector<SplitLaw> laws = {
        SplitLaw::tripartite(1.0, 1.0),
        SplitLaw::multi(2, 0.25, 0.5),
        SplitLaw::refined(SplitLaw::tripartite(1.0, 1.0), {0.5, 0.5}),
        SplitLaw::deterministic({0.25, 0.25}, {0.5}),
    };

    long occupancy_bad = 0;
    const int ns[] = {1, 2, 3, 5, 17, 50};
    for (std::uint64_t li = 0; li < laws.size(); ++li) {
        RandomStream root(0xACCAA00ull + li);
        for (int n : ns) {
            for (std::uint64_t rep = 0; rep < 25; ++rep) {
                const auto occ = sample_partition(laws[li], n, root.child((n << 8) + rep));
                long kn = 0;
                for (long c : occ.counts) kn += c;
                if (occ.dot_r() != n || occ.k_n() != kn || kn < 1) ++occupancy_bad;
            }
        }
    }
    r.checks.push_back(
        {"occupancy_identity_violations", double(occupancy_bad), 0.0, occupancy_bad == 0});

    double worst_mass = 0.0;
    for (std::uint64_t li = 0; li < laws.size(); ++li) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto pb = generate_paintbox(laws[li], 1e-4, 200, 0xACCAB00ull + 31 * li + s);
            double total = pb.residual_crumb_mass;
            for (double y : pb.solids) total += y;
            worst_mass = std::max(worst_mass, std::fabs(total - 1.0));
        }
    }
    add_below(r, "paintbox_mass_conservation", worst_mass, 1e-9);

    double worst_eppf = 0.0;
    const std::pair<double, double> eppf_params[] = {
        {0.5, 0.5}, {0.3, 1.0}, {0.7, 0.0}, {0.25, -0.1}};
    for (auto [al, th] : eppf_params) {
        for (int n = 2; n <= 7; ++n) {
            double total = 0.0;
            for (const auto& occ : enumerate_occupancies(n))
                total += eppf_probability(al, th, occ);
            worst_eppf = std::max(worst_eppf, std::fabs(total - 1.0));
        }
    }
    add_below(r, "eppf_normalization", worst_eppf, 1e-12);

    double worst_mellin = 0.0;
    for (const auto& law : laws)
        worst_mellin = std::max(worst_mellin, std::fabs(psi(law, 1.0) + phi(law, 1.0) - 1.0));
    add_below(r, "psi1_plus_phi1", worst_mellin, 1e-12);

    const double a_base = solve_malthusian(laws[0]).alpha_star;
    const double a_ref = solve_malthusian(laws[2]).alpha_star;
    r.checks.push_back(
        {"refined_preserves_alpha_star", std::fabs(a_ref - a_base), 0.0, a_ref == a_base});

    (void)ctx;
    finish(r, t0, 0.0);
    r.detail = "eppf gap " + fmt(worst_eppf) + ", mass gap " + fmt(worst_mass);
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(bool quick, unsigned threads) {
    const Ctx ctx{quick, threads};
    std::vector<CriterionResult (*)(const Ctx&)> runners = {
        crit_malthusian_golden, crit_moment_oracles,      crit_exact_vs_simulation,
        crit_theorem1_asymptote, crit_proposition8,       crit_lemma9_arrangement,
        crit_lemma7_noncoincidence, crit_martingale_suite, crit_corollary4_theorem5,
        crit_structural,
    };
    std::vector<CriterionResult> out;
    out.reserve(runners.size());
    for (auto fn : runners) {
        try {
            out.push_back(fn(ctx));
        } catch (const std::exception& e) {
            CriterionResult r;
            r.id = static_cast<int>(out.size()) + 1;
            r.name = "criterion_" + std::to_string(r.id);
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace recsplit
