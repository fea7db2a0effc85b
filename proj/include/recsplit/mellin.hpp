#pragma once

#include "recsplit/split_law.hpp"

namespace recsplit {

// Mellin transforms of the crumb measure sigma and solid measure nu:
//   psi(a) = E[sum_i X_i^a],  phi(a) = E[sum_j Y_j^a].
// Dirichlet variants use the log-Gamma closed forms; DeterministicTest sums
// atoms directly; Refined keeps psi of the base and multiplies phi by the
// subdivider power sum.
double psi(const SplitLaw& law, double alpha);
double phi(const SplitLaw& law, double alpha);
double psi_prime(const SplitLaw& law, double alpha);

struct MellinPair {
    explicit MellinPair(SplitLaw law) : law_(std::move(law)) {}
    double psi(double alpha) const { return recsplit::psi(law_, alpha); }
    double phi(double alpha) const { return recsplit::phi(law_, alpha); }
    double psi_prime(double alpha) const { return recsplit::psi_prime(law_, alpha); }
    const SplitLaw& law() const { return law_; }

  private:
    SplitLaw law_;
};

struct MalthusianSolution {
    double alpha_star = 0.0;
    double psi_prime = 0.0;   // < 0
    double phi_at_star = 0.0;
    double c_blocks = 0.0;    // Gamma(-a*) phi(a*) / psi'(a*)
    double c_nx = 0.0;        // phi(a*) / (-a* psi'(a*))
    bool lattice = false;     // geometric support: constants oscillate

    // -Gamma(r - a*) phi(a*) / (r! psi'(a*)), the K_{nr}/n^{a*} limit
    double c_count_r(int r) const;
};

MalthusianSolution solve_malthusian(const SplitLaw& law);

// p(alpha) = phi(alpha) / (1 - psi(alpha)); at integer n this is the
// probability that n balls end up the same color.
double p_of_alpha(const SplitLaw& law, double alpha);

}  // namespace recsplit
