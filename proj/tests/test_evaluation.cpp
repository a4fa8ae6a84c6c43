#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "cadkit/evaluation.hpp"

using namespace cadkit;

namespace {

std::vector<int> balanced(std::size_t n) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 ? 1 : -1;
  return y;
}

FeatureMatrix blobs(const std::vector<int>& y, double offset, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix m;
  m.columns = {"u", "v"};
  for (int label : y) m.rows.push_back({offset * label + rng.normal(), offset * label + rng.normal()});
  return m;
}

}  // namespace

TEST(Confusion, Examples) {
  const std::vector<int> truth{1, -1, 1, 1, -1, -1, 1, -1, 1, -1};
  const auto same = confusion(truth, truth);
  EXPECT_EQ(same.fp, 0u);
  EXPECT_EQ(same.fn, 0u);
  EXPECT_EQ(same.accuracy(), 1.0);
  std::vector<int> inv;
  for (int t : truth) inv.push_back(-t);
  const auto c = confusion(inv, truth);
  EXPECT_EQ(c.tp, 0u);
  EXPECT_EQ(c.tn, 0u);
  const auto all = confusion(std::vector<int>(10, 1), truth);
  EXPECT_EQ(all.tp, 5u);
  EXPECT_EQ(all.fp, 5u);
  EXPECT_EQ(all.tn, 0u);
  EXPECT_EQ(all.fn, 0u);
  EXPECT_EQ(all.sensitivity(), 1.0);
  EXPECT_EQ(all.specificity(), 0.0);
}

TEST(Roc, PerfectInvertedRandom) {
  const auto y = balanced(100);
  std::vector<double> good, bad;
  for (std::size_t i = 0; i < y.size(); ++i) {
    good.push_back(y[i] == 1 ? 0.6 + 0.001 * static_cast<double>(i) : 0.001 * static_cast<double>(i) / 2);
    bad.push_back(-good.back());
  }
  EXPECT_EQ(roc(good, y).auc, 1.0);
  EXPECT_EQ(roc(bad, y).auc, 0.0);

  Rng rng(1);
  const auto yr = balanced(10000);
  std::vector<double> s(10000);
  for (double& v : s) v = rng.uniform();
  EXPECT_NEAR(roc(s, yr).auc, 0.5, 0.03);
}

TEST(Roc, TiesAreGrouped) {
  const auto y = balanced(20);
  const auto r = roc(std::vector<double>(20, 0.3), y);
  EXPECT_EQ(r.auc, 0.5);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points.front().fpr, 0.0);
  EXPECT_EQ(r.points.back().tpr, 1.0);
}

TEST(Roc, MannWhitneyAndMonotoneInvariance) {
  Rng rng(2);
  std::vector<int> y;
  std::vector<double> s;
  for (int i = 0; i < 300; ++i) {
    y.push_back(rng.bernoulli(0.4) ? 1 : -1);
    s.push_back(std::round((rng.normal() + 0.7 * (y.back() == 1)) * 4) / 4);
  }
  double u = 0, np = 0, nn = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1) continue;
    ++np;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] == 1) continue;
      u += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  nn = static_cast<double>(y.size()) - np;
  const auto r = roc(s, y);
  EXPECT_NEAR(r.auc, u / (np * nn), 1e-9);
  std::vector<double> t;
  for (double v : s) t.push_back(std::atan(3 * v) + v * v * v);
  EXPECT_EQ(roc(t, y).auc, r.auc);
}

TEST(Roc, SingleClass) {
  try {
    roc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClass);
  }
}

TEST(Split, Stratified) {
  std::vector<int> y;
  for (int i = 0; i < 37; ++i) y.push_back(1);
  for (int i = 0; i < 91; ++i) y.push_back(-1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = stratified_split(y, 0.7, seed);
    EXPECT_EQ(s.train.size() + s.validation.size(), y.size());
    std::map<int, double> train_count;
    for (auto i : s.train) train_count[y[i]]++;
    EXPECT_LE(std::abs(train_count[1] - 0.7 * 37), 1.0);
    EXPECT_LE(std::abs(train_count[-1] - 0.7 * 91), 1.0);
  }
  EXPECT_NE(repetition_seed(5, 0), repetition_seed(5, 1));
}

TEST(Crossval, DeterministicAndAccurate) {
  const auto y = balanced(200);
  const auto m = blobs(y, 3.0, 3);
  const CrossValPlan plan{3, 0.7, 42};
  const auto a = crossval(plan, {ClassifierKind::lda}, m, y);
  const auto b = crossval(plan, {ClassifierKind::lda}, m, y);
  EXPECT_EQ(a.repetitions.size(), 3u);
  EXPECT_EQ(to_json(a, true).dump(), to_json(b, true).dump());
  EXPECT_GE(a.accuracy.mean, 0.97);
  const auto c = crossval({3, 0.7, 43}, {ClassifierKind::lda}, m, y);
  EXPECT_NE(to_json(a, true).dump(), to_json(c, true).dump());
}

TEST(OneVsRest, FourClusters) {
  Rng rng(4);
  FeatureMatrix m;
  m.columns = {"u", "v"};
  std::vector<int> cls;
  const double cx[4] = {0, 8, 0, 8}, cy[4] = {0, 0, 8, 8};
  for (int i = 0; i < 200; ++i) {
    const int c = i % 4;
    m.rows.push_back({cx[c] + rng.normal(), cy[c] + rng.normal()});
    cls.push_back(c);
  }
  const auto r = one_vs_rest({3, 0.7, 9}, {ClassifierKind::lda}, m, cls);
  EXPECT_EQ(r.classes, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_GE(r.overall.mean, 0.95);
}

TEST(OneVsRest, TieGoesToEarliestClass) {
  EXPECT_EQ(argmax_class(std::vector<double>{0.5, 0.5, 0.5, 0.5}), 0u);
  EXPECT_EQ(argmax_class(std::vector<double>{0.2, 0.7, 0.7, 0.1}), 1u);
}

TEST(OneVsRest, BinaryDegenerateMatchesDirectPath) {
  Rng rng(5);
  FeatureMatrix m;
  m.columns = {"u"};
  std::vector<int> cls, y;
  for (int i = 0; i < 80; ++i) {
    const int c = i % 2 ? 3 : 1;
    m.rows.push_back({(c == 3 ? 1.0 : -1.0) + rng.normal()});
    cls.push_back(c);
    y.push_back(c == 3 ? 1 : -1);
  }
  const ClassifierSpec spec{ClassifierKind::knn, 3};
  const auto ovr = fit_one_vs_rest(spec, m, cls);
  const auto direct = fit(spec, m, y);
  Rng probe(6);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x{2.0 * probe.normal()};
    EXPECT_EQ(predict_class(ovr, x) == 3, predict_values(direct, x).hard == 1);
  }
}

TEST(Report, JsonShape) {
  const auto y = balanced(60);
  const auto rep = crossval({2, 0.7, 1}, {ClassifierKind::knn, 3}, blobs(y, 2.0, 7), y);
  const auto j = to_json(rep, true);
  EXPECT_EQ(j.at("repetitions").size(), 2u);
  EXPECT_TRUE(j.at("aggregate").contains("accuracy"));
  EXPECT_TRUE(j.at("repetitions")[0].contains("roc"));
}
