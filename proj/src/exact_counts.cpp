#include "recsplit/exact_counts.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "recsplit/errors.hpp"
#include "recsplit/mellin.hpp"

namespace recsplit {

namespace {

constexpr int kDefaultNCap = 16384;

class Mp {
  public:
    explicit Mp(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    Mp(Mp&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    Mp(const Mp&) = delete;
    Mp& operator=(const Mp&) = delete;
    Mp& operator=(Mp&&) = delete;
    ~Mp() { mpfr_clear(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

  private:
    mpfr_t v_;
};

// Emits p(1), p(2), ... incrementally: rising factorials and atom powers are
// carried as running products, so the whole m = 1..n sweep is O(n) updates.
class PSeq {
  public:
    PSeq(const SplitLaw& law, mpfr_prec_t prec)
        : prec_(prec), rb_(prec), rs_(prec), rg_(prec), t1_(prec), t2_(prec), acc_(prec) {
        mpfr_set_ui(rb_.get(), 1, MPFR_RNDN);
        mpfr_set_ui(rs_.get(), 1, MPFR_RNDN);
        mpfr_set_ui(rg_.get(), 1, MPFR_RNDN);

        const SplitLaw* cur = &law;
        while (const auto* r = std::get_if<Refined>(&cur->get())) {
            sub_groups_.push_back(r->subdivider);
            cur = r->base.get();
        }
        if (const auto* t = std::get_if<DirichletTripartite>(&cur->get())) {
            c_ = 2;
            gamma_ = t->gamma;
            beta_ = t->beta;
        } else if (const auto* m = std::get_if<DirichletMulti>(&cur->get())) {
            c_ = m->d + 1;
            gamma_ = m->gamma;
            beta_ = m->beta;
        } else {
            const auto& det = std::get<DeterministicTest>(cur->get());
            xs_ = det.crumb_sizes;
            ys_ = det.solid_sizes;
            for (std::size_t i = 0; i < xs_.size() + ys_.size(); ++i) {
                atom_pow_.emplace_back(prec_);
                mpfr_set_ui(atom_pow_.back().get(), 1, MPFR_RNDN);
            }
        }
        s_ = beta_ + c_ * gamma_;
        for (const auto& g : sub_groups_)
            for (std::size_t i = 0; i < g.size(); ++i) {
                sub_pow_.emplace_back(prec_);
                mpfr_set_ui(sub_pow_.back().get(), 1, MPFR_RNDN);
            }
    }

    void next(mpfr_ptr out) {
        const long k = m_++;  // multiply step from p(k) state to p(k+1)
        if (c_ > 0) {
            step(rb_, beta_, k);
            step(rs_, s_, k);
            step(rg_, gamma_, k);
            mpfr_mul_si(t1_.get(), rg_.get(), c_, MPFR_RNDN);
            mpfr_sub(t1_.get(), rs_.get(), t1_.get(), MPFR_RNDN);
            mpfr_div(out, rb_.get(), t1_.get(), MPFR_RNDN);
        } else {
            std::size_t idx = 0;
            mpfr_set_ui(t1_.get(), 0, MPFR_RNDN);  // psi(m)
            for (double x : xs_) {
                mpfr_mul_d(atom_pow_[idx].get(), atom_pow_[idx].get(), x, MPFR_RNDN);
                mpfr_add(t1_.get(), t1_.get(), atom_pow_[idx].get(), MPFR_RNDN);
                ++idx;
            }
            mpfr_set_ui(t2_.get(), 0, MPFR_RNDN);  // phi(m)
            for (double y : ys_) {
                mpfr_mul_d(atom_pow_[idx].get(), atom_pow_[idx].get(), y, MPFR_RNDN);
                mpfr_add(t2_.get(), t2_.get(), atom_pow_[idx].get(), MPFR_RNDN);
                ++idx;
            }
            mpfr_ui_sub(t1_.get(), 1, t1_.get(), MPFR_RNDN);
            mpfr_div(out, t2_.get(), t1_.get(), MPFR_RNDN);
        }
        std::size_t idx = 0;
        for (const auto& g : sub_groups_) {
            mpfr_set_ui(acc_.get(), 0, MPFR_RNDN);
            for (double y : g) {
                mpfr_mul_d(sub_pow_[idx].get(), sub_pow_[idx].get(), y, MPFR_RNDN);
                mpfr_add(acc_.get(), acc_.get(), sub_pow_[idx].get(), MPFR_RNDN);
                ++idx;
            }
            mpfr_mul(out, out, acc_.get(), MPFR_RNDN);
        }
    }

  private:
    void step(Mp& prod, double base, long k) {
        mpfr_set_d(t2_.get(), base, MPFR_RNDN);
        mpfr_add_si(t2_.get(), t2_.get(), k, MPFR_RNDN);
        mpfr_mul(prod.get(), prod.get(), t2_.get(), MPFR_RNDN);
    }

    mpfr_prec_t prec_;
    long m_ = 0;
    int c_ = 0;  // crumb slots for the Dirichlet core; 0 means deterministic
    double gamma_ = 0.0, beta_ = 0.0, s_ = 0.0;
    Mp rb_, rs_, rg_;
    std::vector<double> xs_, ys_;
    std::vector<Mp> atom_pow_;
    std::vector<std::vector<double>> sub_groups_;
    std::vector<Mp> sub_pow_;
    Mp t1_, t2_, acc_;
};

void eval_blocks(const SplitLaw& law, int n, mpfr_prec_t prec, mpfr_ptr out) {
    PSeq seq(law, prec);
    Mp sum(prec), term(prec), p(prec);
    mpfr_set_ui(sum.get(), 0, MPFR_RNDN);
    mpz_t bin;
    mpz_init(bin);
    for (int m = 1; m <= n; ++m) {
        seq.next(p.get());
        mpz_bin_uiui(bin, static_cast<unsigned long>(n), static_cast<unsigned long>(m));
        mpfr_mul_z(term.get(), p.get(), bin, MPFR_RNDN);
        if (m & 1)
            mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
        else
            mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
    mpz_clear(bin);
    mpfr_set(out, sum.get(), MPFR_RNDN);
}

void eval_count_r(const SplitLaw& law, int n, int r, mpfr_prec_t prec, mpfr_ptr out) {
    PSeq seq(law, prec);
    Mp sum(prec), term(prec), p(prec);
    mpfr_set_ui(sum.get(), 0, MPFR_RNDN);
    mpz_t bin;
    mpz_init(bin);
    for (int j = 1; j < r; ++j) seq.next(p.get());
    for (int j = r; j <= n; ++j) {
        seq.next(p.get());
        const int m = j - r;
        mpz_bin_uiui(bin, static_cast<unsigned long>(n - r), static_cast<unsigned long>(m));
        mpfr_mul_z(term.get(), p.get(), bin, MPFR_RNDN);
        if (m & 1)
            mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
        else
            mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
    mpz_bin_uiui(bin, static_cast<unsigned long>(n), static_cast<unsigned long>(r));
    mpfr_mul_z(sum.get(), sum.get(), bin, MPFR_RNDN);
    mpz_clear(bin);
    mpfr_set(out, sum.get(), MPFR_RNDN);
}

mpfr_prec_t working_precision(int n, int precision_bits) {
    if (n > kDefaultNCap && precision_bits < n + 64)
        throw DomainError("n exceeds the default cap of 16384; pass precision_bits >= n+64");
    return std::max({precision_bits, n + 64, 64});
}

// Evaluate at prec and 2*prec; the doubled run is authoritative, the gap is
// the error certificate.
double certified(const std::function<void(mpfr_prec_t, mpfr_ptr)>& eval, mpfr_prec_t prec) {
    Mp a(prec), b(2 * prec), d(2 * prec);
    eval(prec, a.get());
    eval(2 * prec, b.get());
    mpfr_sub(d.get(), a.get(), b.get(), MPFR_RNDN);
    const double diff = std::fabs(mpfr_get_d(d.get(), MPFR_RNDN));
    const double ref = std::fabs(mpfr_get_d(b.get(), MPFR_RNDN));
    const double rel = diff / std::max(ref, 1e-300);
    if (!(rel <= 1e-9))
        throw PrecisionInsufficient("precision doubling moved the result by rel " +
                                    std::to_string(rel));
    return mpfr_get_d(b.get(), MPFR_RNDN);
}

}  // namespace

double expected_blocks(const SplitLaw& law, int n, int precision_bits) {
    if (n < 1) throw DomainError("expected_blocks requires n >= 1");
    const mpfr_prec_t prec = working_precision(n, precision_bits);
    return certified(
        [&](mpfr_prec_t p, mpfr_ptr out) { eval_blocks(law, n, p, out); }, prec);
}

double expected_count_r(const SplitLaw& law, int n, int r, int precision_bits) {
    if (n < 1 || r < 1 || r > n) throw DomainError("expected_count_r requires 1 <= r <= n");
    const mpfr_prec_t prec = working_precision(n, precision_bits);
    return certified(
        [&](mpfr_prec_t p, mpfr_ptr out) { eval_count_r(law, n, r, p, out); }, prec);
}

double p_same_color(const SameColorModel& model, int n) {
    if (n < 1) throw DomainError("p_same_color requires n >= 1");
    if (const auto* t = std::get_if<TripartiteR>(&model)) {
        if (!(t->gamma > 0.0 && t->gamma < t->r))
            throw DomainError("TripartiteR requires 0 < gamma < r");
        // ratio form keeps every factor bounded, so no overflow at large n
        const double r = static_cast<double>(t->r);
        double num = 1.0;   // (r-g)_n / (r+g)_n
        double corr = 1.0;  // (g)_n / (r+g)_n
        for (int k = 0; k < n; ++k) {
            num *= (r - t->gamma + k) / (r + t->gamma + k);
            corr *= (t->gamma + k) / (r + t->gamma + k);
        }
        return num / (1.0 - 2.0 * corr);
    }
    if (const auto* e = std::get_if<EwensPitmanModel>(&model)) {
        if (!(e->alpha >= 0.0 && e->alpha < 1.0 && e->theta > -e->alpha))
            throw DomainError("EwensPitman requires 0 <= alpha < 1 and theta > -alpha");
        double p = 1.0;
        for (int k = 0; k < n - 1; ++k) p *= (1.0 - e->alpha + k) / (1.0 + e->theta + k);
        return p;
    }
    return p_of_alpha(std::get<GeneralModel>(model).law, static_cast<double>(n));
}

std::vector<RatioRow> asymptotic_ratio_table(const SplitLaw& law,
                                             const std::vector<int>& n_values) {
    if (!std::is_sorted(n_values.begin(), n_values.end()))
        throw DomainError("n_values must be ascending");
    const MalthusianSolution sol = solve_malthusian(law);
    std::vector<RatioRow> rows;
    rows.reserve(n_values.size());
    for (int n : n_values) {
        RatioRow row;
        row.n = n;
        row.expected_k = expected_blocks(law, n);
        row.ratio = row.expected_k / std::pow(static_cast<double>(n), sol.alpha_star);
        row.limit_constant = sol.c_blocks;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace recsplit
