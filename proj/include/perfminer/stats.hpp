#pragma once

namespace perfminer::stats {

// I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Two-tailed p-value of Student's t with df degrees of freedom.
double student_t_two_tailed_p(double t, double df);

// Inverse standard normal CDF.
double normal_quantile(double p);

} // namespace perfminer::stats
