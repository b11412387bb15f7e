#include "ssvep/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssvep {

namespace {

// Lentz continued fraction for the incomplete beta (the betacf scheme).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_two_tailed_p(double t, int df) {
  if (df < 1) throw std::invalid_argument("t_two_tailed_p: df < 1");
  const double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

TTestResult paired_ttest(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("paired_ttest: length mismatch");
  const int n = static_cast<int>(a.size());
  if (n < 2) throw std::invalid_argument("paired_ttest: need n >= 2");

  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= n;
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    var += d * d;
  }
  var /= (n - 1);

  TTestResult res;
  res.df = n - 1;
  res.mean_diff = mean;
  if (var == 0.0) {
    if (mean == 0.0) {
      res.t = 0.0;
      res.p = 1.0;
    } else {
      res.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
      res.p = 0.0;
      res.degenerate = true;
    }
    return res;
  }
  res.t = mean / std::sqrt(var / n);
  res.p = t_two_tailed_p(res.t, res.df);
  return res;
}

double chi2_upper_p(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi2_upper_p: df < 1");
  if (x <= 0.0) return 1.0;
  // Q(df/2, x/2) via the relation to the incomplete beta is awkward; use the
  // series / continued fraction of the incomplete gamma directly.
  const double a = df / 2.0;
  const double xx = x / 2.0;
  if (xx < a + 1.0) {
    // Lower series, then complement.
    double sum = 1.0 / a;
    double term = sum;
    for (int k = 1; k < 500; ++k) {
      term *= xx / (a + k);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    const double lower =
        sum * std::exp(-xx + a * std::log(xx) - std::lgamma(a));
    return 1.0 - lower;
  }
  // Upper continued fraction (Lentz).
  constexpr double kFpMin = 1e-300;
  double bb = xx + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / bb;
  double h = d;
  for (int k = 1; k < 500; ++k) {
    const double an = -k * (k - a);
    bb += 2.0;
    d = an * d + bb;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = bb + an / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-xx + a * std::log(xx) - std::lgamma(a));
}

}  // namespace ssvep
