#include "recsplit/special.hpp"

#include <cmath>
#include <limits>

#include "recsplit/errors.hpp"

namespace recsplit {

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma requires x > 0");
    double result = 0.0;
    while (x < 9.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // de Moivre expansion through B_12; next term < 4e-15 for x >= 9
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 -
                      inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 -
                      inv2 * (691.0 / 32760.0))))));
    return result;
}

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-16;

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    // Lentz continued fraction for Q(a,x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_p requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q requires a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double rising_factorial(double a, int n) {
    if (n < 0) throw DomainError("rising_factorial requires n >= 0");
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= a + static_cast<double>(i);
    return r;
}

}  // namespace recsplit
