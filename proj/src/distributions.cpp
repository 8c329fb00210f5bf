#include "creditnn/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "creditnn/errors.hpp"

namespace creditnn {

double log_gamma(double x) {
  static const double cof[6] = {76.18009172947146,  -86.50532032941677, 24.01409824083091,
                                -1.231739572450155, 0.1208650973866179e-2, -0.5395239384953e-5};
  double y = x;
  double tmp = x + 5.5;
  tmp -= (x + 0.5) * std::log(tmp);
  double ser = 1.000000000190015;
  for (int j = 0; j <= 5; ++j) ser += cof[j] / ++y;
  return -tmp + std::log(2.5066282746310005 * ser / x);
}

namespace {

// Lentz continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
  const int kMaxIter = 300;
  const double kEps = 3.0e-14;
  const double kFpMin = 1.0e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  int m = 1;
  for (; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  if (m > kMaxIter) throw NumericError("incomplete beta continued fraction did not converge");
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw NumericError("incomplete beta argument outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double bt = std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                             a * std::log(x) + b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double student_t_cdf(double t, double df) {
  if (df <= 0.0) throw ConfigError("student_t_cdf requires df > 0");
  if (std::isnan(t)) return std::nan("");
  const double half = 0.5 * reg_inc_beta(0.5 * df, 0.5, df / (df + t * t));
  return t >= 0.0 ? 1.0 - half : half;
}

namespace {
void check_f_df(double d1, double d2) {
  if (d1 <= 0.0 || d2 <= 0.0) throw ConfigError("F distribution requires positive df");
}
}  // namespace

double f_cdf(double x, double d1, double d2) {
  check_f_df(d1, d2);
  if (x <= 0.0) return 0.0;
  return reg_inc_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double f_sf(double x, double d1, double d2) {
  check_f_df(d1, d2);
  if (x <= 0.0) return 1.0;
  return reg_inc_beta(0.5 * d2, 0.5 * d1, d2 / (d1 * x + d2));
}

namespace {

// P(range of k iid standard normals <= w).
double range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  const double lo = -9.0;
  const double hi = 9.0;
  const int n = 480;  // Simpson panels (even)
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double z = lo + h * i;
    const double diff = normal_cdf(z) - normal_cdf(z - w);
    double f = 0.0;
    if (diff > 0.0) f = normal_pdf(z) * std::pow(diff, k - 1);
    const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += weight * f;
  }
  return k * sum * h / 3.0;
}

// Density of s = sqrt(chi2_df / df).
double scaled_chi_log_pdf(double s, double df) {
  return std::log(2.0) + 0.5 * df * std::log(df) - 0.5 * df * std::log(2.0) -
         log_gamma(0.5 * df) + (df - 1.0) * std::log(s) - 0.5 * df * s * s;
}

}  // namespace

double studentized_range_sf(double q, int k, double df) {
  if (k < 2) throw ConfigError("studentized range requires k >= 2");
  if (df <= 0.0) throw ConfigError("studentized range requires df > 0");
  if (q <= 0.0) return 1.0;
  if (df > 1e5) return 1.0 - range_cdf(q, k);

  const double s_hi = std::max(2.0, 1.0 + 14.0 / std::sqrt(2.0 * df));
  const double s_lo = 1e-8;
  const int n = 320;  // Simpson panels (even)
  const double h = (s_hi - s_lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = s_lo + h * i;
    const double f = std::exp(scaled_chi_log_pdf(s, df)) * range_cdf(q * s, k);
    const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += weight * f;
  }
  const double cdf = sum * h / 3.0;
  return std::min(1.0, std::max(0.0, 1.0 - cdf));
}

double studentized_range_crit(double alpha, int k, double df) {
  if (alpha <= 0.0 || alpha >= 1.0) throw ConfigError("alpha must lie in (0,1)");
  double lo = 0.0;
  double hi = 2.0;
  while (studentized_range_sf(hi, k, df) > alpha) {
    hi *= 2.0;
    if (hi > 1e4) throw NumericError("studentized range critical value out of range");
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (studentized_range_sf(mid, k, df) > alpha)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-8) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace creditnn
