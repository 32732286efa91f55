#pragma once

#include <vector>

namespace lamarck {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int n1 = 0;
  int n2 = 0;
  double df = 0.0;  // Welch–Satterthwaite df; 0 for rank tests / degenerate cases
};

// Two-sided Welch's t-test (unequal variances).  Degenerate convention when
// both samples have zero variance: p = 1 if the means agree, else p = 0.
TestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Two-sided Mann-Whitney U with midranks, tie correction, and continuity
// correction under the normal approximation.  statistic is U of the first
// sample.  All values identical across both samples -> p = 1.
TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

// Regularized incomplete beta I_x(a, b), absolute error <= 1e-10 on the unit
// interval (continued-fraction evaluation).  Exposed for oracle tests.
double regularized_incomplete_beta(double a, double b, double x);

// One-sided exact sign test: P(X >= successes) for X ~ Binomial(trials, 1/2).
double sign_test_one_sided(int successes, int trials);

// Sorted-copy median; even length averages the middle pair.
double median(std::vector<double> values);

}  // namespace lamarck
