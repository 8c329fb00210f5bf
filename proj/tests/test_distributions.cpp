#include <doctest.h>

#include <cmath>
#include <creditnn/distributions.hpp>

using namespace creditnn;
using doctest::Approx;

TEST_CASE("log gamma matches factorials and half-integers") {
  CHECK(log_gamma(1.0) == Approx(0.0).epsilon(1e-12));
  CHECK(log_gamma(5.0) == Approx(std::log(24.0)).epsilon(1e-12));
  CHECK(log_gamma(0.5) == Approx(0.5 * std::log(M_PI)).epsilon(1e-12));
  CHECK(log_gamma(10.5) == Approx(std::lgamma(10.5)).epsilon(1e-12));
}

TEST_CASE("regularized incomplete beta basics") {
  CHECK(reg_inc_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(reg_inc_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(1,1) = x
  CHECK(reg_inc_beta(1.0, 1.0, 0.37) == Approx(0.37).epsilon(1e-12));
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
  CHECK(reg_inc_beta(2.5, 4.0, 0.3) ==
        Approx(1.0 - reg_inc_beta(4.0, 2.5, 0.7)).epsilon(1e-12));
}

TEST_CASE("normal cdf reference point") {
  CHECK(normal_cdf(0.0) == Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(1.96) == Approx(0.97500210485178).epsilon(1e-12));
  CHECK(normal_cdf(-1.96) == Approx(1.0 - 0.97500210485178).epsilon(1e-9));
}

TEST_CASE("student t cdf against frozen references") {
  CHECK(student_t_cdf(0.0, 5.0) == Approx(0.5).epsilon(1e-12));
  // Cauchy closed form: df=1, t=1 -> 3/4
  CHECK(student_t_cdf(1.0, 1.0) == Approx(0.75).epsilon(1e-10));
  CHECK(student_t_cdf(2.5, 3.7) == Approx(0.964088988544087).epsilon(1e-10));
  CHECK(student_t_cdf(-1.3, 12.0) == Approx(0.109008585541757).epsilon(1e-10));
  CHECK(student_t_cdf(0.7, 2.0) == Approx(0.721803487683567).epsilon(1e-10));
  CHECK(student_t_cdf(3.2, 29.4) == Approx(0.998357134973123).epsilon(1e-10));
  // normal limit
  CHECK(student_t_cdf(1.96, 1e8) == Approx(0.975002103465336).epsilon(1e-8));
}

TEST_CASE("student t cdf agrees with density integration") {
  // Brute-force Simpson integration of the t density over a grid of points.
  const double df = 7.3;
  auto pdf = [df](double x) {
    return std::exp(log_gamma((df + 1) / 2) - log_gamma(df / 2) -
                    0.5 * std::log(df * M_PI) -
                    (df + 1) / 2 * std::log1p(x * x / df));
  };
  for (int i = 0; i <= 50; ++i) {
    const double t = -5.0 + 10.0 * i / 50.0;
    // integrate from -60 to t
    const int n = 4000;
    const double a = -60.0;
    const double h = (t - a) / n;
    double s = pdf(a) + pdf(t);
    for (int j = 1; j < n; ++j) s += (j % 2 ? 4.0 : 2.0) * pdf(a + j * h);
    const double integral = s * h / 3.0;
    CHECK(student_t_cdf(t, df) == Approx(integral).epsilon(1e-8));
  }
}

TEST_CASE("f cdf against frozen references") {
  CHECK(f_cdf(1.0, 3, 10) == Approx(0.567662796978303).epsilon(1e-10));
  CHECK(f_cdf(2.5, 4, 20) == Approx(0.924853370364725).epsilon(1e-10));
  CHECK(f_cdf(0.3, 1, 1) == Approx(0.319005720039977).epsilon(1e-10));
  CHECK(f_cdf(5.0, 2, 8) == Approx(0.960981557689377).epsilon(1e-10));
  CHECK(f_cdf(3.49, 3, 12) == Approx(0.949989033528223).epsilon(1e-10));
  CHECK(f_sf(5.0, 2, 8) == Approx(1.0 - 0.960981557689377).epsilon(1e-8));
  CHECK(f_cdf(0.0, 3, 9) == 0.0);
}

TEST_CASE("f cdf agrees with density integration") {
  const double d1 = 4.0, d2 = 11.0;
  auto pdf = [&](double x) {
    const double lb = log_gamma((d1 + d2) / 2) - log_gamma(d1 / 2) - log_gamma(d2 / 2);
    return std::exp(lb + (d1 / 2) * std::log(d1 / d2) + (d1 / 2 - 1) * std::log(x) -
                    ((d1 + d2) / 2) * std::log1p(d1 * x / d2));
  };
  for (int i = 1; i <= 50; ++i) {
    const double x = 0.1 * i;
    const int n = 4000;
    const double a = 1e-12;
    const double h = (x - a) / n;
    double s = pdf(a) + pdf(x);
    for (int j = 1; j < n; ++j) s += (j % 2 ? 4.0 : 2.0) * pdf(a + j * h);
    const double integral = s * h / 3.0;
    CHECK(f_cdf(x, d1, d2) == Approx(integral).epsilon(1e-8));
  }
}

TEST_CASE("studentized range survival function") {
  CHECK(studentized_range_sf(0.0, 3, 12) == Approx(1.0));
  // frozen external references
  CHECK(studentized_range_sf(3.77, 3, 12) == Approx(0.0501823617605536).epsilon(5e-3));
  CHECK(studentized_range_sf(2.0, 4, 30) == Approx(0.500606682853145).epsilon(5e-3));
  CHECK(studentized_range_sf(4.5, 5, 60) == Approx(0.0189337403919319).epsilon(5e-3));
  // monotone decreasing in q
  double prev = 1.0;
  for (double q = 0.5; q < 8.0; q += 0.5) {
    const double v = studentized_range_sf(q, 4, 20);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("studentized range critical values") {
  // classic table anchor: alpha 0.05, k=3, df=12 -> 3.77
  const double crit = studentized_range_crit(0.05, 3, 12);
  CHECK(crit > 3.75);
  CHECK(crit < 3.79);
  CHECK(studentized_range_crit(0.05, 4, 56) == Approx(3.74467818681741).epsilon(2e-3));
  // round trip
  CHECK(studentized_range_sf(crit, 3, 12) == Approx(0.05).epsilon(1e-6));
}
