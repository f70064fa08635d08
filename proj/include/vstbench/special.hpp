#pragma once

namespace vstbench::special {

// Regularized lower and upper incomplete gamma functions P(a, x), Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

double normal_cdf(double z);
double chi2_sf(double x, double dof);
// P(F > f) for an F(d1, d2) variable.
double f_sf(double f, double d1, double d2);
// P(|T| > |t|) for a Student t variable.
double t_two_sided(double t, double dof);

}  // namespace vstbench::special
