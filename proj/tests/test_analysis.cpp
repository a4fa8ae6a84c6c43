#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "cadkit/analysis.hpp"

using namespace cadkit;

namespace {

// Kolmogorov-Smirnov distance of a sample from U[0,1].
double ks_uniform(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max({d, (static_cast<double>(i) + 1) / n - p[i], p[i] - static_cast<double>(i) / n});
  }
  return d;
}

FeatureMatrix gaussian_matrix(std::size_t n, std::size_t d, std::uint64_t seed,
                              const std::vector<int>& groups = {}, double shift = 0.0) {
  Rng rng(seed);
  FeatureMatrix m;
  for (std::size_t j = 0; j < d; ++j) m.columns.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(d);
    for (double& v : r) v = rng.normal() + (groups.empty() ? 0.0 : shift * groups[i]);
    m.rows.push_back(r);
  }
  return m;
}

std::vector<int> alternating(std::size_t n) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 ? 1 : -1;
  return y;
}

}  // namespace

TEST(Rank, ConstantFeatureHasUnitP) {
  FeatureMatrix m;
  m.columns = {"c"};
  for (int i = 0; i < 10; ++i) m.rows.push_back({3.0});
  const auto r = rank_features_ttest(m, alternating(10));
  EXPECT_EQ(r.entries[0].p_value, 1.0);
}

TEST(Rank, ZeroVarianceUnequalMeans) {
  FeatureMatrix m;
  m.columns = {"c"};
  const auto y = alternating(10);
  for (int v : y) m.rows.push_back({v == 1 ? 2.0 : 1.0});
  const auto r = rank_features_ttest(m, y);
  EXPECT_EQ(r.entries[0].p_value, 0.0);
  EXPECT_EQ(std::abs(r.entries[0].statistic), kInfiniteStatistic);
}

TEST(Rank, SeparatedMeansMatchClosedForm) {
  Rng rng(4);
  std::vector<double> a(100), b(100);
  for (double& v : a) v = rng.normal();
  for (double& v : b) v = 5.0 + rng.normal();
  const auto w = welch_t_test(a, b);
  EXPECT_LT(w.p, 1e-10);

  // Oracle: two-sided p from the regularized incomplete beta.
  std::vector<double> c(100), d(100);
  for (double& v : c) v = rng.normal();
  for (double& v : d) v = 0.3 + rng.normal();
  const auto w2 = welch_t_test(c, d);
  const double ref = boost::math::ibeta(w2.df / 2, 0.5, w2.df / (w2.df + w2.t * w2.t));
  EXPECT_NEAR(w2.p, ref, 1e-12);
}

TEST(Rank, PermutedLabelsGiveUniformP) {
  const auto m = gaussian_matrix(60, 1, 8);
  auto y = alternating(60);
  Rng rng(17);
  std::vector<double> ps;
  for (int k = 0; k < 1000; ++k) {
    rng.shuffle(y);
    ps.push_back(rank_features_ttest(m, y).entries[0].p_value);
  }
  EXPECT_LT(ks_uniform(ps), 1.63 / std::sqrt(1000.0));
}

TEST(Rank, AffineInvarianceAndOrdering) {
  const auto y = alternating(80);
  auto m = gaussian_matrix(80, 4, 5, y, 0.0);
  for (std::size_t i = 0; i < 80; ++i) m.rows[i][2] += 2.0 * y[i];  // planted discriminator
  const auto r0 = rank_features_ttest(m, y);
  EXPECT_EQ(r0.entries[0].feature, "x2");
  auto t = m;
  for (auto& r : t.rows) r[1] = -3.0 * r[1] + 7.0;
  const auto r1 = rank_features_ttest(t, y);
  for (const auto& e : r0.entries) {
    const auto it = std::find_if(r1.entries.begin(), r1.entries.end(), [&](const auto& q) { return q.feature == e.feature; });
    const double sign = e.feature == "x1" ? -1.0 : 1.0;
    EXPECT_NEAR(it->statistic, sign * e.statistic, 1e-9 * std::abs(e.statistic) + 1e-12);
    EXPECT_NEAR(it->p_value, e.p_value, 1e-12);
  }
  for (std::size_t i = 1; i < r0.entries.size(); ++i) EXPECT_LE(r0.entries[i - 1].p_value, r0.entries[i].p_value);
}

TEST(Rank, DegenerateClass) {
  FeatureMatrix m = gaussian_matrix(5, 1, 1);
  std::vector<int> y{1, -1, -1, -1, -1};
  try {
    rank_features_ttest(m, y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateClass);
  }
}

TEST(Manova, SingleFeatureEqualsPooledTSquared) {
  const auto y = alternating(50);
  const auto m = gaussian_matrix(50, 1, 21, y, 0.4);
  const auto r = manova_wilks(m, y);
  double mu[2] = {0, 0}, ss[2] = {0, 0}, n[2] = {0, 0};
  for (std::size_t i = 0; i < 50; ++i) {
    const int g = y[i] == 1;
    mu[g] += m.rows[i][0];
    n[g] += 1;
  }
  mu[0] /= n[0];
  mu[1] /= n[1];
  for (std::size_t i = 0; i < 50; ++i) {
    const int g = y[i] == 1;
    ss[g] += (m.rows[i][0] - mu[g]) * (m.rows[i][0] - mu[g]);
  }
  const double sp = (ss[0] + ss[1]) / (n[0] + n[1] - 2);
  const double t = (mu[0] - mu[1]) / std::sqrt(sp * (1 / n[0] + 1 / n[1]));
  EXPECT_NEAR(r.f, t * t, 1e-9);
  EXPECT_EQ(r.df1, 1.0);
  EXPECT_EQ(r.df2, 48.0);
}

TEST(Manova, NullCalibration) {
  const auto y = alternating(200);
  std::vector<double> ps;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = manova_wilks(gaussian_matrix(200, 5, 1000 + seed), y);
    EXPECT_GT(r.lambda, 0.85);
    ps.push_back(r.p);
  }
  EXPECT_LT(ks_uniform(ps), 1.63 / std::sqrt(200.0));
}

TEST(Manova, SeparatedCloudsAndLinearInvariance) {
  const auto y = alternating(100);
  const auto m = gaussian_matrix(100, 3, 2, y, 10.0);
  const auto r = manova_wilks(m, y);
  EXPECT_LT(r.lambda, 0.01);

  const auto weak = gaussian_matrix(100, 3, 3, y, 0.3);
  const double l0 = manova_wilks(weak, y).lambda;
  Rng rng(77);
  double a[3][3];
  for (auto& row : a)
    for (double& v : row) v = rng.normal();
  auto mapped = weak;
  for (auto& row : mapped.rows) {
    const auto x = row;
    for (int i = 0; i < 3; ++i) row[i] = a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2];
  }
  EXPECT_NEAR(manova_wilks(mapped, y).lambda, l0, 1e-6);
}

TEST(Manova, Errors) {
  const auto y = alternating(40);
  auto m = gaussian_matrix(40, 2, 4);
  for (auto& r : m.rows) r[1] = 2.0 * r[0];
  try {
    manova_wilks(m, y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularScatter);
  }
  const auto small = gaussian_matrix(4, 3, 5);
  try {
    manova_wilks(small, alternating(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
  }
}

TEST(Fractal, DegenerateAndErrors) {
  FeatureMatrix same;
  same.columns = {"a", "b"};
  for (int i = 0; i < 150; ++i) same.rows.push_back({1.0, 2.0});
  const auto e = correlation_dimension(same);
  EXPECT_EQ(e.dimension, 0.0);
  EXPECT_EQ(e.fit_r2, 1.0);
  try {
    correlation_dimension(gaussian_matrix(99, 2, 1));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::TooFewSamples);
  }
}

TEST(Fractal, LineAndSaturationBound) {
  Rng rng(3);
  FeatureMatrix line;
  line.columns = {"a", "b", "c"};
  for (int i = 0; i < 1000; ++i) {
    const double t = rng.uniform();
    line.rows.push_back({t, 2 * t, -t});
  }
  EXPECT_NEAR(correlation_dimension(line).dimension, 1.0, 0.15);

  const auto cloud = gaussian_matrix(300, 3, 8);
  const double bound = std::min(3.0, std::log2(300.0)) + 0.3;
  EXPECT_LE(correlation_dimension(cloud).dimension, bound);
}

TEST(Selection, ExhaustionAndPlantedFeature) {
  const auto y = alternating(120);
  auto m = gaussian_matrix(120, 5, 6);
  for (std::size_t i = 0; i < 120; ++i) m.rows[i][3] += 4.0 * y[i];
  const auto steps = select_features_forward(m, y, 5);
  ASSERT_EQ(steps.size(), 5u);
  EXPECT_EQ(steps[0].feature, "x3");
  std::vector<std::string> names;
  for (const auto& s : steps) names.push_back(s.feature);
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, m.columns);
  for (std::size_t i = 1; i < steps.size(); ++i) EXPECT_LE(steps[i].criterion, steps[i - 1].criterion);
}

TEST(Selection, DuplicateColumnAddsNothing) {
  const auto y = alternating(120);
  auto m = gaussian_matrix(120, 4, 12);
  m.columns = {"a", "a_copy", "noise1", "noise2"};
  for (std::size_t i = 0; i < 120; ++i) {
    m.rows[i][0] += 1.5 * y[i];
    m.rows[i][1] = m.rows[i][0];
  }
  const auto steps = select_features_forward(m, y, 3);
  ASSERT_EQ(steps.size(), 3u);
  EXPECT_TRUE(steps[0].feature == "a" || steps[0].feature == "a_copy");
  EXPECT_NE(steps[1].feature, "a");
  EXPECT_NE(steps[1].feature, "a_copy");
  EXPECT_NE(steps[2].feature, "a");
  EXPECT_NE(steps[2].feature, "a_copy");
}

TEST(Selection, ValidationAccuracyCriterion) {
  const auto y = alternating(80);
  auto m = gaussian_matrix(80, 3, 14);
  for (std::size_t i = 0; i < 80; ++i) m.rows[i][1] += 3.0 * y[i];
  SelectionOptions opt;
  opt.criterion = SelectionCriterion::validation_accuracy;
  opt.plan.seed = 5;
  const auto steps = select_features_forward(m, y, 2, opt);
  ASSERT_EQ(steps.size(), 2u);
  EXPECT_EQ(steps[0].feature, "x1");
  EXPECT_GE(steps[1].criterion, steps[0].criterion);
}
