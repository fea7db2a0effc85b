#pragma once

namespace recsplit {

// Digamma (logarithmic derivative of Gamma), x > 0.
// Recurrence below 6, then the asymptotic series; ~1e-14 absolute.
double digamma(double x);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
// a > 0, x >= 0. Series for x < a+1, continued fraction otherwise.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Rising factorial (a)_{n^} = a(a+1)...(a+n-1); (a)_0 = 1.
double rising_factorial(double a, int n);

}  // namespace recsplit
