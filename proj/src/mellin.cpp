#include "recsplit/mellin.hpp"

#include <cmath>
#include <sstream>

#include "recsplit/errors.hpp"
#include "recsplit/special.hpp"

namespace recsplit {

namespace {

// Both Dirichlet variants are Dirichlet(gamma,...,gamma,beta) with c crumb
// slots; the tripartite case is c = 2 (labels X1, Y2, X3 in the paper's
// order, but exchangeability makes the slot order irrelevant here).
struct GammaShape {
    int c;
    double gamma;
    double beta;
    double s() const { return beta + c * gamma; }
};

GammaShape shape_of(const DirichletTripartite& t) { return {2, t.gamma, t.beta}; }
GammaShape shape_of(const DirichletMulti& m) { return {m.d + 1, m.gamma, m.beta}; }

double psi_dirichlet(const GammaShape& g, double a) {
    if (a <= -g.gamma)
        throw DomainError("psi(alpha) diverges for alpha <= " + std::to_string(-g.gamma));
    return g.c * std::exp(std::lgamma(g.s()) + std::lgamma(a + g.gamma) -
                          std::lgamma(a + g.s()) - std::lgamma(g.gamma));
}

double phi_dirichlet(const GammaShape& g, double a) {
    if (a <= -g.beta)
        throw DomainError("phi(alpha) diverges for alpha <= " + std::to_string(-g.beta));
    return std::exp(std::lgamma(g.s()) + std::lgamma(a + g.beta) -
                    std::lgamma(g.beta) - std::lgamma(a + g.s()));
}

double psi_prime_dirichlet(const GammaShape& g, double a) {
    return psi_dirichlet(g, a) * (digamma(a + g.gamma) - digamma(a + g.s()));
}

double power_sum(const std::vector<double>& xs, double a) {
    double t = 0.0;
    for (double x : xs) t += std::pow(x, a);
    return t;
}

}  // namespace

double psi(const SplitLaw& law, double alpha) {
    const auto& v = law.get();
    if (const auto* t = std::get_if<DirichletTripartite>(&v))
        return psi_dirichlet(shape_of(*t), alpha);
    if (const auto* m = std::get_if<DirichletMulti>(&v))
        return psi_dirichlet(shape_of(*m), alpha);
    if (const auto* r = std::get_if<Refined>(&v)) return psi(*r->base, alpha);
    return power_sum(std::get<DeterministicTest>(v).crumb_sizes, alpha);
}

double phi(const SplitLaw& law, double alpha) {
    const auto& v = law.get();
    if (const auto* t = std::get_if<DirichletTripartite>(&v))
        return phi_dirichlet(shape_of(*t), alpha);
    if (const auto* m = std::get_if<DirichletMulti>(&v))
        return phi_dirichlet(shape_of(*m), alpha);
    if (const auto* r = std::get_if<Refined>(&v))
        return phi(*r->base, alpha) * power_sum(r->subdivider, alpha);
    return power_sum(std::get<DeterministicTest>(v).solid_sizes, alpha);
}

double psi_prime(const SplitLaw& law, double alpha) {
    const auto& v = law.get();
    if (const auto* t = std::get_if<DirichletTripartite>(&v))
        return psi_prime_dirichlet(shape_of(*t), alpha);
    if (const auto* m = std::get_if<DirichletMulti>(&v))
        return psi_prime_dirichlet(shape_of(*m), alpha);
    if (const auto* r = std::get_if<Refined>(&v)) return psi_prime(*r->base, alpha);
    double t = 0.0;
    for (double x : std::get<DeterministicTest>(v).crumb_sizes)
        t += std::pow(x, alpha) * std::log(x);
    return t;
}

double MalthusianSolution::c_count_r(int r) const {
    if (r < 1) throw DomainError("c_count_r requires r >= 1");
    // Gamma(r - a*)/r! via lgamma so large r stays finite
    const double lg =
        std::lgamma(static_cast<double>(r) - alpha_star) - std::lgamma(static_cast<double>(r) + 1.0);
    return phi_at_star / (-psi_prime) * std::exp(lg);
}

MalthusianSolution solve_malthusian(const SplitLaw& law) {
    const double at0 = psi(law, 0.0);
    const double at1 = psi(law, 1.0);
    if (at0 <= 1.0 || at1 >= 1.0) {
        std::ostringstream os;
        os << "no Malthusian root in (0,1): psi(0) = " << at0 << ", psi(1) = " << at1;
        throw NoRoot(os.str());
    }

    // psi is strictly decreasing, so bisect to a short bracket and let Newton
    // finish; every iterate is kept inside the current bracket.
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (psi(law, mid) > 1.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = psi(law, x) - 1.0;
        if (std::abs(f) <= 1e-12) break;
        (f > 0.0 ? lo : hi) = x;
        double next = x - f / psi_prime(law, x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) break;
        x = next;
    }
    if (std::abs(psi(law, x) - 1.0) > 1e-12)
        throw NumericalBlowup("Malthusian refinement stalled short of tolerance");

    MalthusianSolution sol;
    sol.alpha_star = x;
    sol.psi_prime = psi_prime(law, x);
    sol.phi_at_star = phi(law, x);
    sol.c_blocks = std::tgamma(-x) * sol.phi_at_star / sol.psi_prime;
    sol.c_nx = sol.phi_at_star / (-x * sol.psi_prime);
    sol.lattice = validate_supercritical(law).lattice;
    return sol;
}

double p_of_alpha(const SplitLaw& law, double alpha) {
    const double ps = psi(law, alpha);
    if (std::abs(ps - 1.0) < 1e-6) {
        // close enough to the pole to warrant the exact proximity test
        const double root = solve_malthusian(law).alpha_star;
        if (std::abs(alpha - root) < 1e-9)
            throw PoleAtAlphaStar("p(alpha) has a pole at alpha* = " + std::to_string(root));
    }
    return phi(law, alpha) / (1.0 - ps);
}

}  // namespace recsplit
