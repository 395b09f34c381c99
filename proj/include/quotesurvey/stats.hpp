#pragma once

#include <cstddef>
#include <span>

namespace quotesurvey::stats {

double mean(std::span<const double> xs);
/// Unbiased (n - 1) variance; 0 for a single value.
double sample_variance(std::span<const double> xs);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);
/// P(|T| >= |t|) for T ~ Student t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

struct TTest {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
  bool degenerate = false;  // both samples have zero variance
};

/// Welch's unequal-variance two-sample t-test, two-sided, with
/// Welch-Satterthwaite degrees of freedom. Both samples need >= 2 values.
/// With both variances zero the result is degenerate: t = 0, p = 1 when
/// the means agree; t = +-inf, p = 0 otherwise.
TTest welch_t_test(std::span<const double> a, std::span<const double> b);

struct Correlation {
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

/// Pearson correlation with a two-sided p-value from the t distribution
/// with n - 2 degrees of freedom. Needs n >= 3; throws DataError when
/// either variable has zero variance.
Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Linear-interpolation quantile (the "type 7" definition) of unsorted data.
double quantile(std::span<const double> xs, double q);

struct Summary {
  std::size_t n = 0;
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> xs);

}  // namespace quotesurvey::stats
