#ifndef SSVEP_STATS_HPP
#define SSVEP_STATS_HPP

#include <vector>

namespace ssvep {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation.
double incomplete_beta(double a, double b, double x);

// Two-tailed p-value of Student's t with df degrees of freedom.
double t_two_tailed_p(double t, int df);

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p = 1.0;
  double mean_diff = 0.0;
  bool degenerate = false;  // zero-variance nonzero-mean differences
};

// Paired two-tailed t-test of a against b (d = a - b, sample sd with n-1).
TTestResult paired_ttest(const std::vector<double>& a,
                         const std::vector<double>& b);

// Upper-tail p of a chi-squared statistic (integer df >= 1).
double chi2_upper_p(double x, int df);

}  // namespace ssvep

#endif  // SSVEP_STATS_HPP
