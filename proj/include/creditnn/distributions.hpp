#pragma once

namespace creditnn {

double log_gamma(double x);

// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

double normal_pdf(double z);
double normal_cdf(double z);

// Student t CDF for df > 0, via the incomplete beta function.
double student_t_cdf(double t, double df);

// F distribution, d1/d2 > 0.
double f_cdf(double x, double d1, double d2);
double f_sf(double x, double d1, double d2);

// Survival function of the studentized range of k groups with df error
// degrees of freedom, by two-level numerical quadrature. Absolute error is
// well under 5e-4 over the ranges used here.
double studentized_range_sf(double q, int k, double df);

// Smallest q with sf(q, k, df) <= alpha, by bisection.
double studentized_range_crit(double alpha, int k, double df);

}  // namespace creditnn
