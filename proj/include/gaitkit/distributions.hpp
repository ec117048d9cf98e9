#pragma once

namespace gaitkit::dist {

// Regularized incomplete beta function I_x(a, b), evaluated with the
// continued-fraction expansion (modified Lentz). Converges to ~1e-15 for
// the parameter ranges used by the t and F distributions; throws
// NonConvergence if the 200-iteration cap is hit.
double incomplete_beta_reg(double a, double b, double x);

// Two-sided Student-t CDF P(T <= t) with df >= 1.
double t_cdf(double t, double df);

// F distribution CDF P(F <= x) with d1, d2 >= 1.
double f_cdf(double x, double d1, double d2);

// Inverse F CDF for p in (0, 1), by bracketing + bisection on f_cdf.
double f_quantile(double p, double d1, double d2);

}  // namespace gaitkit::dist
