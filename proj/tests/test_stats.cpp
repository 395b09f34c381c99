#include <gtest/gtest.h>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>

#include "quotesurvey/error.hpp"
#include "quotesurvey/stats.hpp"

using namespace quotesurvey;

namespace {

// Independent route: textbook formulas in long double plus Boost.Math for
// the t distribution.
struct Reference {
  double stat;  // t for Welch, r for Pearson
  double df;
  double p;
};

double boost_two_sided(double t, double df) {
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

Reference welch_reference(const std::vector<double>& a, const std::vector<double>& b) {
  const auto moments = [](const std::vector<double>& x) {
    long double m = 0;
    for (double v : x) m += v;
    m /= x.size();
    long double ss = 0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::pair<long double, long double>{m, ss / (x.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const long double sa = va / a.size();
  const long double sb = vb / b.size();
  const double t = static_cast<double>((ma - mb) / std::sqrt(sa + sb));
  const double df = static_cast<double>((sa + sb) * (sa + sb) /
                                        (sa * sa / (a.size() - 1) + sb * sb / (b.size() - 1)));
  return {t, df, boost_two_sided(t, df)};
}

Reference pearson_reference(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double r = static_cast<double>(sxy / std::sqrt(sxx * syy));
  const double df = static_cast<double>(n - 2);
  const double t = r * std::sqrt(df / (1.0 - r * r));
  return {r, df, boost_two_sided(t, df)};
}

}  // namespace

TEST(Basics, MeanVarianceQuantiles) {
  const std::vector<double> xs{0.2, 0.4};
  EXPECT_NEAR(stats::mean(xs), 0.3, 1e-15);
  EXPECT_NEAR(stats::sample_variance(xs), 0.02, 1e-15);
  const std::vector<double> data{7, 1, 3, 5};
  EXPECT_DOUBLE_EQ(stats::quantile(data, 0.5), 4.0);
  EXPECT_DOUBLE_EQ(stats::quantile(data, 0.25), 2.5);
  EXPECT_DOUBLE_EQ(stats::quantile(data, 0.75), 5.5);
  EXPECT_DOUBLE_EQ(stats::quantile(data, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(stats::quantile(data, 1.0), 7.0);
  const auto s = stats::summarize(data);
  EXPECT_EQ(s.n, 4u);
  EXPECT_DOUBLE_EQ(s.min, 1.0);
  EXPECT_DOUBLE_EQ(s.median, 4.0);
  EXPECT_DOUBLE_EQ(s.max, 7.0);
}

TEST(IncompleteBeta, MatchesBoost) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ab(0.05, 60.0), x(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double a = ab(rng), b = ab(rng), xv = x(rng);
    EXPECT_NEAR(stats::incomplete_beta(a, b, xv), boost::math::ibeta(a, b, xv), 1e-10)
        << a << " " << b << " " << xv;
  }
  EXPECT_EQ(stats::incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(stats::incomplete_beta(2, 3, 1.0), 1.0);
}

TEST(StudentT, FrozenValues) {
  // Frozen from an independent statistics package.
  EXPECT_NEAR(stats::student_t_cdf(1.3, 3.7), 0.8656666379136864, 1e-12);
  EXPECT_NEAR(stats::student_t_two_sided(2.5, 10), 0.031446844236608776, 1e-12);
  EXPECT_EQ(stats::student_t_two_sided(0.0, 5), 1.0);
}

TEST(Welch, IdenticalSamples) {
  const std::vector<double> a{0.1, 0.2, 0.3};
  const auto r = stats::welch_t_test(a, a);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_EQ(r.p, 1.0);
  EXPECT_FALSE(r.degenerate);
}

TEST(Welch, ZeroVarianceSeparation) {
  const std::vector<double> a{1, 1, 1, 1}, b{-1, -1, -1, -1};
  const auto r = stats::welch_t_test(a, b);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.p, 0.0);
  EXPECT_TRUE(std::isinf(r.t) && r.t > 0);
  const auto same = stats::welch_t_test(a, a);
  EXPECT_TRUE(same.degenerate);
  EXPECT_EQ(same.t, 0.0);
  EXPECT_EQ(same.p, 1.0);
}

TEST(Welch, HandFixtures) {
  // Frozen from an independent statistics package.
  const std::vector<double> a{0.5, 0.6, 0.7, 0.4}, b{0.0, -0.1, 0.1, 0.0};
  const auto r = stats::welch_t_test(a, b);
  EXPECT_LT(r.p, 0.05);
  EXPECT_NEAR(r.t, 7.201190377787751, 1e-9);
  EXPECT_NEAR(r.p, 0.0007592523856116078, 1e-9);

  const std::vector<double> c{0.2, 0.4, 0.9, -0.3, 0.5}, d{0.1, 0.0, 0.3};
  const auto s = stats::welch_t_test(c, d);
  EXPECT_NEAR(s.t, 0.9596557440567434, 1e-9);
  EXPECT_NEAR(s.p, 0.3786329647940121, 1e-9);
}

TEST(Welch, PreconditionsEnforced) {
  const std::vector<double> one{0.1}, two{0.1, 0.2};
  EXPECT_THROW(stats::welch_t_test(one, two), std::invalid_argument);
}

TEST(Welch, MatchesReferenceOnRandomFixtures) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> size(2, 200);
  std::uniform_real_distribution<double> loc(-0.5, 0.5), scale(0.01, 0.6);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a(size(rng)), b(size(rng));
    std::normal_distribution<double> da(loc(rng), scale(rng)), db(loc(rng), scale(rng));
    for (auto& v : a) v = da(rng);
    for (auto& v : b) v = db(rng);
    const auto got = stats::welch_t_test(a, b);
    const auto ref = welch_reference(a, b);
    EXPECT_NEAR(got.t, ref.stat, 1e-9 * std::max(1.0, std::fabs(ref.stat)));
    EXPECT_NEAR(got.df, ref.df, 1e-9 * ref.df);
    EXPECT_NEAR(got.p, ref.p, 1e-6);
    EXPECT_GE(got.p, 0.0);
    EXPECT_LE(got.p, 1.0);
  }
}

TEST(Pearson, FrozenFixture) {
  const std::vector<double> x{1, 2, 3, 4, 5.5}, y{2.1, 3.9, 6.2, 8.1, 9.0};
  const auto c = stats::pearson(x, y);
  EXPECT_NEAR(c.r, 0.975749336718845, 1e-12);
  EXPECT_NEAR(c.p, 0.0045168240223944075, 1e-9);
  EXPECT_EQ(c.n, 5u);
}

TEST(Pearson, PerfectNegativeLine) {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{5, 4, 3, 2, 1};
  const auto c = stats::pearson(x, y);
  EXPECT_NEAR(c.r, -1.0, 1e-15);
  EXPECT_NEAR(c.p, 0.0, 1e-12);
}

TEST(Pearson, ZeroVarianceIsError) {
  const std::vector<double> x{1, 2, 3}, y{4, 4, 4};
  EXPECT_THROW(stats::pearson(x, y), DataError);
  EXPECT_THROW(stats::pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), DataError);
}

TEST(Pearson, MatchesReferenceOnRandomFixtures) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> size(3, 150);
  std::uniform_real_distribution<double> slope(-2.0, 2.0), noise(0.05, 3.0);
  for (int i = 0; i < 100; ++i) {
    const int n = size(rng);
    std::normal_distribution<double> nx(0, 1), ne(0, noise(rng));
    const double b = slope(rng);
    std::vector<double> x(n), y(n);
    for (int j = 0; j < n; ++j) {
      x[j] = nx(rng);
      y[j] = b * x[j] + ne(rng);
    }
    const auto got = stats::pearson(x, y);
    const auto ref = pearson_reference(x, y);
    EXPECT_NEAR(got.r, ref.stat, 1e-12);
    EXPECT_NEAR(got.p, ref.p, 1e-6);
  }
}
