#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "recsplit/acceptance.hpp"
#include "recsplit/branching.hpp"
#include "recsplit/errors.hpp"
#include "recsplit/ewens_pitman.hpp"
#include "recsplit/exact_counts.hpp"
#include "recsplit/mellin.hpp"
#include "recsplit/moments.hpp"
#include "recsplit/parallel.hpp"
#include "recsplit/rng.hpp"
#include "recsplit/split_law.hpp"

namespace {

using namespace recsplit;

// 15 significant digits for JSON, full round-trip for CSV.
std::string g15(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

RandomStream task_stream(std::uint64_t seed, const char* task) {
    return RandomStream(seed).child(hash_name(task));
}

std::uint64_t task_seed(std::uint64_t seed, const char* task) {
    return task_stream(seed, task).next_u64();
}

void cmd_solve(const std::string& law_path, bool as_json) {
    const auto law = SplitLaw::from_json_file(law_path);
    const auto sol = solve_malthusian(law);
    if (as_json) {
        std::cout << "{\"alpha_star\":" << g15(sol.alpha_star)
                  << ",\"psi_prime\":" << g15(sol.psi_prime)
                  << ",\"phi\":" << g15(sol.phi_at_star)
                  << ",\"c_blocks\":" << g15(sol.c_blocks)
                  << ",\"c_nx\":" << g15(sol.c_nx) << "}\n";
        return;
    }
    std::cout << "law        " << law.describe() << "\n"
              << "alpha_star " << g15(sol.alpha_star) << "\n"
              << "psi_prime  " << g15(sol.psi_prime) << "\n"
              << "phi        " << g15(sol.phi_at_star) << "\n"
              << "c_blocks   " << g15(sol.c_blocks) << "\n"
              << "c_nx       " << g15(sol.c_nx) << "\n";
    if (sol.lattice)
        std::cout << "note: geometric support detected; constants oscillate around these values\n";
}

void cmd_sample(const std::string& law_path, int n, long reps, const std::string& out_path,
                std::uint64_t seed, unsigned threads) {
    const auto law = SplitLaw::from_json_file(law_path);
    const auto task = task_stream(seed, "sample");
    std::vector<OccupancyVector> rows(reps);
    parallel_for(
        static_cast<std::size_t>(reps),
        [&](std::size_t i) { rows[i] = sample_partition(law, n, task.child(i)); }, threads);

    auto out = open_out(out_path);
    out << "rep,K_n";
    for (int r = 1; r <= n; ++r) out << ",K_n" << r;
    out << "\n";
    for (long i = 0; i < reps; ++i) {
        out << i << ',' << rows[i].k_n();
        for (int r = 1; r <= n; ++r) out << ',' << rows[i].counts[r - 1];
        out << "\n";
    }
    std::cout << "wrote " << reps << " partitions of n = " << n << " to " << out_path << "\n";
}

void cmd_paintbox(const std::string& law_path, double delta, int max_gen,
                  const std::string& out_path, std::uint64_t seed) {
    const auto law = SplitLaw::from_json_file(law_path);
    const auto pb = generate_paintbox(law, delta, max_gen, task_seed(seed, "paintbox"));
    auto out = open_out(out_path);
    out << "size\n";
    for (double y : pb.solids) out << g17(y) << "\n";
    std::cout << "solids " << pb.solids.size() << ", residual mass "
              << g15(pb.residual_crumb_mass) << " in " << pb.residual_crumb_count
              << " crumbs, generations " << pb.generations_explored
              << (pb.complete ? "" : " (generation cap hit)") << "\n";
}

void cmd_martingale(const std::string& law_path, int kmax, long reps, double delta,
                    const std::string& out_path, std::uint64_t seed, unsigned threads) {
    const auto law = SplitLaw::from_json_file(law_path);
    const double a_star = solve_malthusian(law).alpha_star;
    const auto task = task_stream(seed, "martingale");
    std::vector<MartingaleTrace> traces(reps);
    parallel_for(
        static_cast<std::size_t>(reps),
        [&](std::size_t i) {
            traces[i] = simulate_martingale(law, a_star, kmax, delta, task.child(i));
        },
        threads);

    auto out = open_out(out_path);
    out << "rep,k,M\n";
    for (long i = 0; i < reps; ++i)
        for (int k = 0; k <= kmax; ++k) out << i << ',' << k << ',' << g17(traces[i].values[k]) << "\n";
    double mean = 0.0;
    for (const auto& t : traces) mean += t.values[kmax];
    mean /= static_cast<double>(reps);
    std::cout << "mean M_" << kmax << " = " << g15(mean) << " over " << reps
              << " traces (alpha_star " << g15(a_star) << ")\n";
}

void cmd_expect(const std::string& law_path, std::vector<int> ns, std::vector<int> rs,
                const std::string& out_path, int precision_bits) {
    const auto law = SplitLaw::from_json_file(law_path);
    const auto sol = solve_malthusian(law);
    auto out = open_out(out_path);
    out << "n,r,value,ratio_to_asymptote\n";
    for (int n : ns) {
        const double kn = expected_blocks(law, n, precision_bits);
        out << n << ",," << g17(kn) << ','
            << g17(kn / (sol.c_blocks * std::pow(n, sol.alpha_star))) << "\n";
        for (int r : rs) {
            if (r > n) continue;
            const double knr = expected_count_r(law, n, r, precision_bits);
            out << n << ',' << r << ',' << g17(knr) << ','
                << g17(knr / (sol.c_count_r(r) * std::pow(n, sol.alpha_star))) << "\n";
        }
    }
    std::cout << "wrote expectations for " << ns.size() << " values of n to " << out_path << "\n";
}

void cmd_moments(const std::string& law_path, int K, const std::string& out_path) {
    const auto law = SplitLaw::from_json_file(law_path);
    const auto sol = solve_malthusian(law);
    const auto table = moments_M(law, sol.alpha_star, K);

    std::optional<MomentFamily> closed;
    if (table.family == "tripartite" && std::fabs(table.beta - (1.0 - table.gamma)) < 1e-12)
        closed = BesselAlphaAlpha{table.gamma};
    else if (table.family == "multi" && std::fabs(table.beta + table.d * table.gamma - 1.0) < 1e-12)
        closed = MultiR1{table.d, table.d * table.gamma};

    auto out = open_out(out_path);
    out << "k,a_k,b_k,closed_form_if_any,rel_gap\n";
    for (int k = 1; k <= K; ++k) {
        out << k << ',' << g17(table.a[k]) << ',';
        if (static_cast<int>(table.b.size()) > k) out << g17(table.b[k]);
        out << ',';
        if (closed) {
            const double cf = closed_form_moments(*closed, k);
            out << g17(cf) << ',' << g17(std::fabs(table.a[k] - cf) / cf);
        } else {
            out << ',';
        }
        out << "\n";
    }
    std::cout << "wrote moments a_1..a_" << K << " to " << out_path
              << (closed ? " (closed form available)" : "") << "\n";
}

void cmd_equivalence(double alpha, int d, int n, long reps, std::uint64_t seed,
                     std::optional<double> theta, bool as_json) {
    const auto rep =
        equivalence_suite(alpha, d, n, reps, task_seed(seed, "equivalence"), theta);
    double worst_gap = 0.0;
    for (double g : rep.p_n_gaps) worst_gap = std::max(worst_gap, g);
    if (as_json) {
        std::ostringstream os;
        os << "{\"chi2\":" << g15(rep.chi2) << ",\"dof\":" << rep.dof
           << ",\"p_value\":" << g15(rep.p_value) << ",\"theta_used\":" << g15(rep.theta_used)
           << ",\"p_n_gaps\":[";
        for (std::size_t i = 0; i < rep.p_n_gaps.size(); ++i)
            os << (i ? "," : "") << g15(rep.p_n_gaps[i]);
        os << "]}";
        std::cout << os.str() << "\n";
        return;
    }
    std::cout << "chi2      " << g15(rep.chi2) << " on " << rep.dof << " dof\n"
              << "p_value   " << g15(rep.p_value) << "\n"
              << "theta     " << g15(rep.theta_used) << "\n"
              << "max |p(m) - p_EP(m)|, m <= 12: " << g15(worst_gap) << "\n";
}

void cmd_noncoincidence(int r, double gamma, bool as_json) {
    const auto rep = noncoincidence_check(r, gamma);
    if (as_json) {
        std::cout << "{\"alpha_fit\":" << g15(rep.alpha_fit)
                  << ",\"theta_fit\":" << g15(rep.theta_fit)
                  << ",\"residual_at_4\":" << g15(rep.residual_at_4) << "}\n";
        return;
    }
    std::cout << "alpha_fit     " << g15(rep.alpha_fit) << "\n"
              << "theta_fit     " << g15(rep.theta_fit) << "\n"
              << "residual_at_4 " << g15(rep.residual_at_4)
              << (rep.residual_at_4 > 1e-6 ? "  (outside the Ewens-Pitman family)" : "") << "\n";
}

std::string report_json(const std::vector<CriterionResult>& results, bool quick) {
    bool all = true;
    for (const auto& r : results) all = all && r.pass;
    std::ostringstream os;
    os << "{\"quick\":" << (quick ? "true" : "false") << ",\"pass\":" << (all ? "true" : "false")
       << ",\"criteria\":[";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        os << (i ? "," : "") << "{\"id\":" << r.id << ",\"name\":\"" << r.name
           << "\",\"pass\":" << (r.pass ? "true" : "false")
           << ",\"seconds\":" << g15(r.seconds) << ",\"detail\":\"" << r.detail
           << "\",\"checks\":[";
        for (std::size_t j = 0; j < r.checks.size(); ++j) {
            const auto& c = r.checks[j];
            os << (j ? "," : "") << "{\"check_name\":\"" << c.check_name
               << "\",\"statistic\":" << g15(c.statistic)
               << ",\"threshold\":" << g15(c.threshold)
               << ",\"pass\":" << (c.pass ? "true" : "false") << "}";
        }
        os << "]}";
    }
    os << "]}";
    return os.str();
}

int cmd_verify(bool quick, bool as_json, const std::string& out_path, unsigned threads) {
    const auto results = run_acceptance(quick, threads);
    bool all = true;
    for (const auto& r : results) all = all && r.pass;

    if (as_json) {
        std::cout << report_json(results, quick) << "\n";
    } else {
        for (const auto& r : results) {
            char line[32];
            std::snprintf(line, sizeof line, "[%s] %02d ", r.pass ? "PASS" : "FAIL", r.id);
            std::cout << line << r.name << " (" << g15(r.seconds) << " s) " << r.detail << "\n";
        }
        std::cout << (all ? "all criteria passed" : "ACCEPTANCE FAILED") << "\n";
    }
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        out << report_json(results, quick) << "\n";
    }
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recsplit: recursive partition structures, block counts, and limit laws"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    unsigned threads = 0;
    app.add_option("--seed", seed, "global RNG seed (per-task streams derived from it)");
    app.add_option("--threads", threads, "worker threads, 0 = hardware concurrency");

    std::string law_path, out_path;
    bool as_json = false;

    auto* solve = app.add_subcommand("solve", "Malthusian exponent and asymptotic constants");
    solve->add_option("--law", law_path, "split-law JSON file")->required();
    solve->add_flag("--json", as_json, "emit a JSON object");

    int n = 100;
    long reps = 10000;
    auto* sample = app.add_subcommand("sample", "occupancy vectors of sampled partitions");
    sample->add_option("--law", law_path, "split-law JSON file")->required();
    sample->add_option("-n,--n", n, "number of balls")->required();
    sample->add_option("--reps", reps, "number of sampled partitions");
    sample->add_option("--out", out_path, "output CSV")->required();

    double delta = 1e-5;
    int max_gen = 200;
    auto* paintbox = app.add_subcommand("paintbox", "one paintbox realization down to delta");
    paintbox->add_option("--law", law_path, "split-law JSON file")->required();
    paintbox->add_option("--delta", delta, "crumb freezing threshold");
    paintbox->add_option("--max-gen", max_gen, "generation cap");
    paintbox->add_option("--out", out_path, "output CSV of solid sizes")->required();

    int kmax = 25;
    auto* martingale = app.add_subcommand("martingale", "intrinsic martingale traces");
    martingale->add_option("--law", law_path, "split-law JSON file")->required();
    martingale->add_option("--kmax", kmax, "last generation");
    martingale->add_option("--reps", reps, "number of traces");
    martingale->add_option("--delta", delta, "crumb freezing threshold");
    martingale->add_option("--out", out_path, "output CSV (rep,k,M)")->required();

    std::vector<int> ns, rs;
    int precision_bits = 0;
    auto* expect = app.add_subcommand("expect", "exact E[K_n] and E[K_nr]");
    expect->add_option("--law", law_path, "split-law JSON file")->required();
    expect->add_option("-n,--n", ns, "values of n (comma separated)")->required()->delimiter(',');
    expect->add_option("-r,--r", rs, "block sizes r (comma separated)")->delimiter(',');
    expect->add_option("--precision-bits", precision_bits, "working precision, 0 = n + 64");
    expect->add_option("--out", out_path, "output CSV")->required();

    int K = 12;
    auto* moments = app.add_subcommand("moments", "moments of the martingale limit M");
    moments->add_option("--law", law_path, "split-law JSON file")->required();
    moments->add_option("-K,--kmax", K, "highest moment order");
    moments->add_option("--out", out_path, "output CSV")->required();

    double alpha = 0.5, gamma = 1.0;
    int d = 2, eq_n = 6;
    long eq_reps = 10000;
    double theta_override = 0.0;
    auto* equivalence = app.add_subcommand(
        "equivalence", "multi-split law vs Ewens-Pitman (alpha, alpha/d), exact EPPF test");
    equivalence->add_option("--alpha", alpha, "Ewens-Pitman alpha")->required();
    equivalence->add_option("-d,--d", d, "number of subcrumbs per split");
    equivalence->add_option("-n,--n", eq_n, "partition size (2..8)");
    equivalence->add_option("--reps", eq_reps, "sampled partitions");
    auto* theta_opt =
        equivalence->add_option("--theta", theta_override, "override theta (negative control)");
    equivalence->add_flag("--json", as_json, "emit a JSON object");

    int r_param = 2;
    auto* noncoincidence =
        app.add_subcommand("noncoincidence", "tripartite(gamma, r-gamma) vs Ewens-Pitman fit");
    noncoincidence->add_option("-r,--r", r_param, "integer r >= 2");
    noncoincidence->add_option("--gamma", gamma, "crumb parameter, 0 < gamma < r");
    noncoincidence->add_flag("--json", as_json, "emit a JSON object");

    bool quick = false;
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_flag("--quick", quick, "reduced replicate counts");
    verify->add_flag("--json", as_json, "emit the JSON report to stdout");
    verify->add_option("--out", out_path, "also write the JSON report to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) {
            cmd_solve(law_path, as_json);
        } else if (sample->parsed()) {
            cmd_sample(law_path, n, reps, out_path, seed, threads);
        } else if (paintbox->parsed()) {
            cmd_paintbox(law_path, delta, max_gen, out_path, seed);
        } else if (martingale->parsed()) {
            cmd_martingale(law_path, kmax, reps, delta, out_path, seed, threads);
        } else if (expect->parsed()) {
            cmd_expect(law_path, ns, rs, out_path, precision_bits);
        } else if (moments->parsed()) {
            cmd_moments(law_path, K, out_path);
        } else if (equivalence->parsed()) {
            std::optional<double> theta;
            if (theta_opt->count() > 0) theta = theta_override;
            cmd_equivalence(alpha, d, eq_n, eq_reps, seed, theta, as_json);
        } else if (noncoincidence->parsed()) {
            cmd_noncoincidence(r_param, gamma, as_json);
        } else if (verify->parsed()) {
            return cmd_verify(quick, as_json, out_path, threads);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
