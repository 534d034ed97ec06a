#pragma once

namespace causaforge::stats {

// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz),
// relative accuracy around 1e-14.
double incomplete_beta(double x, double a, double b);

// P(F > f) for F ~ F(d1, d2).
double f_upper_tail(double f, double d1, double d2);

// Two-sided P(|T| >= |t|) for Student t with `df` degrees of freedom.
double t_two_sided(double t, double df);

}  // namespace causaforge::stats
