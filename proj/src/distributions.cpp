#include "gaitkit/distributions.hpp"

#include <cmath>

#include "gaitkit/error.hpp"

namespace gaitkit::dist {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kTolerance = 1e-12;
constexpr double kTiny = 1e-300;

// Continued fraction for the incomplete beta (modified Lentz iteration).
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kTolerance) return h;
  }
  raise(Errc::non_convergence, "incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta_reg(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) raise(Errc::invalid_params, "beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(log_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_cf(a, b, x) / a;
  }
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double t_cdf(double t, double df) {
  if (!(df >= 1.0)) raise(Errc::invalid_params, "t distribution needs df >= 1");
  if (t == 0.0) return 0.5;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta_reg(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

double f_cdf(double x, double d1, double d2) {
  if (!(d1 >= 1.0) || !(d2 >= 1.0)) raise(Errc::invalid_params, "F distribution needs d1, d2 >= 1");
  if (x <= 0.0) return 0.0;
  return incomplete_beta_reg(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double f_quantile(double p, double d1, double d2) {
  if (!(d1 >= 1.0) || !(d2 >= 1.0)) raise(Errc::invalid_params, "F distribution needs d1, d2 >= 1");
  if (!(p > 0.0 && p < 1.0)) raise(Errc::invalid_params, "quantile probability must be in (0,1)");

  double lo = 0.0;
  double hi = 1.0;
  int expand = 0;
  while (f_cdf(hi, d1, d2) < p) {
    lo = hi;
    hi *= 2.0;
    if (++expand > kMaxIterations) {
      raise(Errc::non_convergence, "f_quantile bracket expansion exceeded iteration cap");
    }
  }
  for (int i = 0; i < kMaxIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) return mid;  // interval collapsed to adjacent doubles
    if (f_cdf(mid, d1, d2) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= kTolerance * std::max(1.0, std::fabs(lo))) return 0.5 * (lo + hi);
  }
  raise(Errc::non_convergence, "f_quantile bisection exceeded iteration cap");
}

}  // namespace gaitkit::dist
