#include "recsplit/split_law.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "recsplit/errors.hpp"

namespace recsplit {

namespace {

constexpr double kUnitSumTol = 1e-12;

void check_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(name) + " must be strictly positive, got " + std::to_string(x));
    }
}

void check_sizes_unit_sum(const std::vector<double>& a, const std::vector<double>& b,
                          const char* what) {
    double sum = 0.0;
    for (double x : a) {
        if (!(x > 0.0 && x < 1.0)) throw DomainError(std::string(what) + ": sizes must lie in (0,1)");
        sum += x;
    }
    for (double x : b) {
        if (!(x > 0.0 && x < 1.0)) throw DomainError(std::string(what) + ": sizes must lie in (0,1)");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kUnitSumTol) {
        throw MassLeak(std::string(what) + ": sizes sum to " + std::to_string(sum) + ", expected 1");
    }
}

// Finite support {x_1..x_m} lies on a geometric progression iff all
// log-size ratios are rational. Probed with small-denominator continued
// fractions; good enough to flag the deterministic test laws.
bool geometric_support(const std::vector<double>& sizes) {
    if (sizes.empty()) return false;
    if (sizes.size() == 1) return true;
    const double base = std::log(sizes.front());
    for (double s : sizes) {
        double r = std::log(s) / base;
        // continued-fraction rational approximation with denominator <= 64
        double x = r;
        long p0 = 1, q0 = 0, p1 = static_cast<long>(std::floor(x)), q1 = 1;
        x -= std::floor(x);
        bool rational = std::abs(r - static_cast<double>(p1)) < 1e-9;
        for (int it = 0; it < 32 && !rational && x > 1e-12; ++it) {
            x = 1.0 / x;
            const long a = static_cast<long>(std::floor(x));
            x -= std::floor(x);
            const long p2 = a * p1 + p0;
            const long q2 = a * q1 + q0;
            p0 = p1; q0 = q1; p1 = p2; q1 = q2;
            if (q1 > 64) break;
            if (std::abs(r - static_cast<double>(p1) / static_cast<double>(q1)) < 1e-9) rational = true;
        }
        if (!rational) return false;
    }
    return true;
}

}  // namespace

double SplitOutcome::crumb_mass() const {
    double s = 0.0;
    for (const auto& p : crumbs) s += p.size;
    return s;
}

double SplitOutcome::solid_mass() const {
    double s = 0.0;
    for (const auto& p : solids) s += p.size;
    return s;
}

SplitLaw::SplitLaw(Variant v) : v_(std::make_shared<const Variant>(std::move(v))) {}

SplitLaw SplitLaw::tripartite(double gamma, double beta) {
    check_positive(gamma, "gamma");
    check_positive(beta, "beta");
    return SplitLaw(DirichletTripartite{gamma, beta});
}

SplitLaw SplitLaw::multi(int d, double gamma, double beta) {
    if (d < 1) throw DomainError("dirichlet_multi requires d >= 1");
    check_positive(gamma, "gamma");
    check_positive(beta, "beta");
    return SplitLaw(DirichletMulti{d, gamma, beta});
}

SplitLaw SplitLaw::refined(SplitLaw base, std::vector<double> subdivider) {
    if (subdivider.empty()) throw DomainError("refined: subdivider must be nonempty");
    double sum = 0.0;
    for (double p : subdivider) {
        if (!(p > 0.0 && p < 1.0) && p != 1.0)
            throw DomainError("refined: subdivider entries must lie in (0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kUnitSumTol)
        throw MassLeak("refined: subdivider sums to " + std::to_string(sum) + ", expected 1");
    Refined r;
    r.base = std::make_shared<const SplitLaw>(std::move(base));
    r.subdivider = std::move(subdivider);
    return SplitLaw(std::move(r));
}

SplitLaw SplitLaw::deterministic(std::vector<double> crumbs, std::vector<double> solids) {
    check_sizes_unit_sum(crumbs, solids, "deterministic");
    return SplitLaw(DeterministicTest{std::move(crumbs), std::move(solids)});
}

int SplitLaw::crumb_count() const {
    return std::visit(
        [](const auto& law) -> int {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, DirichletTripartite>) {
                return 2;
            } else if constexpr (std::is_same_v<T, DirichletMulti>) {
                return law.d + 1;
            } else if constexpr (std::is_same_v<T, Refined>) {
                return law.base->crumb_count();
            } else {
                return static_cast<int>(law.crumb_sizes.size());
            }
        },
        *v_);
}

std::string SplitLaw::describe() const {
    char buf[160];
    return std::visit(
        [&](const auto& law) -> std::string {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, DirichletTripartite>) {
                std::snprintf(buf, sizeof buf, "tripartite(gamma=%g, beta=%g)", law.gamma, law.beta);
                return buf;
            } else if constexpr (std::is_same_v<T, DirichletMulti>) {
                std::snprintf(buf, sizeof buf, "multi(d=%d, gamma=%g, beta=%g)", law.d, law.gamma,
                              law.beta);
                return buf;
            } else if constexpr (std::is_same_v<T, Refined>) {
                return "refined(" + law.base->describe() + ", " +
                       std::to_string(law.subdivider.size()) + " parts)";
            } else {
                std::snprintf(buf, sizeof buf, "deterministic(%zu crumbs, %zu solids)",
                              law.crumb_sizes.size(), law.solid_sizes.size());
                return buf;
            }
        },
        *v_);
}

namespace {

using nlohmann::json;

json law_to_json(const SplitLaw& law) {
    return std::visit(
        [](const auto& l) -> json {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DirichletTripartite>) {
                return json{{"type", "dirichlet_tripartite"}, {"gamma", l.gamma}, {"beta", l.beta}};
            } else if constexpr (std::is_same_v<T, DirichletMulti>) {
                return json{{"type", "dirichlet_multi"}, {"d", l.d}, {"gamma", l.gamma}, {"beta", l.beta}};
            } else if constexpr (std::is_same_v<T, Refined>) {
                return json{{"type", "refined"},
                            {"base", law_to_json(*l.base)},
                            {"subdivider", l.subdivider}};
            } else {
                return json{{"type", "deterministic"}, {"crumbs", l.crumb_sizes}, {"solids", l.solid_sizes}};
            }
        },
        law.get());
}

SplitLaw law_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw DomainError("law JSON must be an object with a \"type\" field");
    const std::string type = j.at("type").get<std::string>();
    if (type == "dirichlet_tripartite") {
        return SplitLaw::tripartite(j.at("gamma").get<double>(), j.at("beta").get<double>());
    }
    if (type == "dirichlet_multi") {
        return SplitLaw::multi(j.at("d").get<int>(), j.at("gamma").get<double>(),
                               j.at("beta").get<double>());
    }
    if (type == "refined") {
        return SplitLaw::refined(law_from_json(j.at("base")),
                                 j.at("subdivider").get<std::vector<double>>());
    }
    if (type == "deterministic") {
        return SplitLaw::deterministic(j.at("crumbs").get<std::vector<double>>(),
                                       j.at("solids").get<std::vector<double>>());
    }
    throw DomainError("unknown law type \"" + type + "\"");
}

}  // namespace

SplitLaw SplitLaw::from_json(const std::string& text) {
    try {
        return law_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw DomainError(std::string("law JSON parse error: ") + e.what());
    }
}

SplitLaw SplitLaw::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open law file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string SplitLaw::to_json() const { return law_to_json(*this).dump(); }

namespace {

SplitOutcome finish_outcome(std::vector<double> crumbs, std::vector<double> solids) {
    SplitOutcome out;
    out.crumbs.reserve(crumbs.size());
    out.solids.reserve(solids.size());
    for (std::size_t i = 0; i < crumbs.size(); ++i)
        out.crumbs.push_back({2 * static_cast<std::uint64_t>(i), crumbs[i]});
    for (std::size_t j = 0; j < solids.size(); ++j)
        out.solids.push_back({2 * static_cast<std::uint64_t>(j) + 1, solids[j]});
    return out;
}

}  // namespace

SplitOutcome sample_split(const SplitLaw& law, RandomStream& rng) {
    return std::visit(
        [&](const auto& l) -> SplitOutcome {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DirichletTripartite>) {
                std::vector<double> v;
                const double alpha[3] = {l.gamma, l.beta, l.gamma};
                rng.dirichlet(alpha, v);
                return finish_outcome({v[0], v[2]}, {v[1]});
            } else if constexpr (std::is_same_v<T, DirichletMulti>) {
                std::vector<double> alpha(static_cast<std::size_t>(l.d) + 2, l.gamma);
                alpha.back() = l.beta;
                std::vector<double> v;
                rng.dirichlet(alpha, v);
                std::vector<double> crumbs(v.begin(), v.end() - 1);
                return finish_outcome(std::move(crumbs), {v.back()});
            } else if constexpr (std::is_same_v<T, Refined>) {
                SplitOutcome base = sample_split(*l.base, rng);
                std::vector<double> crumbs, solids;
                crumbs.reserve(base.crumbs.size());
                for (const auto& c : base.crumbs) crumbs.push_back(c.size);
                solids.reserve(base.solids.size() * l.subdivider.size());
                for (const auto& s : base.solids)
                    for (double p : l.subdivider) solids.push_back(s.size * p);
                return finish_outcome(std::move(crumbs), std::move(solids));
            } else {
                return finish_outcome(l.crumb_sizes, l.solid_sizes);
            }
        },
        law.get());
}

SupercriticalReport validate_supercritical(const SplitLaw& law, long mc_samples,
                                           std::uint64_t seed) {
    SupercriticalReport rep;
    if (mc_samples > 0) {
        RandomStream rng(seed);
        double mass = 0.0, count = 0.0;
        for (long i = 0; i < mc_samples; ++i) {
            RandomStream child = rng.child(static_cast<std::uint64_t>(i));
            const SplitOutcome out = sample_split(law, child);
            const double total = out.crumb_mass() + out.solid_mass();
            if (std::abs(total - 1.0) > 1e-9)
                throw MassLeak("sampled split masses sum to " + std::to_string(total));
            mass += out.crumb_mass();
            for (const auto& c : out.crumbs) count += c.size > 0.0 ? 1.0 : 0.0;
        }
        rep.mean_crumb_mass = mass / static_cast<double>(mc_samples);
        rep.mean_crumb_count = count / static_cast<double>(mc_samples);
    } else {
        std::visit(
            [&](const auto& l) {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, DirichletTripartite>) {
                    rep.mean_crumb_mass = 2.0 * l.gamma / (l.beta + 2.0 * l.gamma);
                    rep.mean_crumb_count = 2.0;
                } else if constexpr (std::is_same_v<T, DirichletMulti>) {
                    const double c = static_cast<double>(l.d) + 1.0;
                    rep.mean_crumb_mass = c * l.gamma / (l.beta + c * l.gamma);
                    rep.mean_crumb_count = c;
                } else if constexpr (std::is_same_v<T, Refined>) {
                    const SupercriticalReport base = validate_supercritical(*l.base);
                    rep.mean_crumb_mass = base.mean_crumb_mass;
                    rep.mean_crumb_count = base.mean_crumb_count;
                    rep.lattice = base.lattice;
                } else {
                    check_sizes_unit_sum(l.crumb_sizes, l.solid_sizes, "deterministic");
                    rep.mean_crumb_mass = 0.0;
                    for (double x : l.crumb_sizes) rep.mean_crumb_mass += x;
                    rep.mean_crumb_count = static_cast<double>(l.crumb_sizes.size());
                    rep.lattice = geometric_support(l.crumb_sizes);
                }
            },
            law.get());
    }
    if (rep.mean_crumb_count <= 1.0) {
        throw SubcriticalLaw("mean crumb count " + std::to_string(rep.mean_crumb_count) +
                             " <= 1 for " + law.describe());
    }
    rep.ok = rep.mean_crumb_mass < 1.0 && rep.mean_crumb_count > 1.0;
    return rep;
}

}  // namespace recsplit
