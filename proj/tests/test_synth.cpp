#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "cadkit/evaluation.hpp"
#include "cadkit/features.hpp"
#include "cadkit/synth.hpp"

using namespace cadkit;

namespace {

double raw_feature(const Contour& c, const char* name) {
  return curve_features(normalize_signal(radial_distance_signal(c)).samples).at(name);
}

std::vector<std::pair<double, double>> coords(const Contour& c) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : c.points()) out.emplace_back(p.x, p.y);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
}

double mean_abs_gradient(const GrayImage& img) {
  return texture_features(img, {0, 0, img.width(), img.height()}).at("rough_mean_abs_gradient");
}

}  // namespace

TEST(Contours, RoundWithoutLobesIsNearCircular) {
  ShapeGenConfig cfg;
  cfg.params(ShapeType::round).amplitude_min = 0.0;
  cfg.params(ShapeType::round).amplitude_max = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_LT(raw_feature(gen_contour(ShapeType::round, cfg, seed), "circularity"), 0.02);
  }
}

TEST(Contours, StellateIsRougherThanRound) {
  const ShapeGenConfig cfg;
  std::vector<double> round, stellate;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    round.push_back(raw_feature(gen_contour(ShapeType::round, cfg, seed), "roughness_index"));
    stellate.push_back(raw_feature(gen_contour(ShapeType::stellate, cfg, seed), "roughness_index"));
  }
  EXPECT_GE(median(stellate), 5.0 * median(round));
}

TEST(Contours, Deterministic) {
  const ShapeGenConfig cfg;
  for (ShapeType t : kShapeTypes) {
    EXPECT_EQ(coords(gen_contour(t, cfg, 99)), coords(gen_contour(t, cfg, 99)));
  }
}

TEST(Contours, AlwaysValidAcrossRandomConfigs) {
  Rng rng(2024);
  for (int trial = 0; trial < 10000; ++trial) {
    ShapeGenConfig cfg;
    cfg.vertices = 64 + 64 * rng.below(4);
    cfg.noise_sigma = rng.uniform(0.0, 0.02);
    cfg.base_radius = rng.uniform(5.0, 200.0);
    const auto t = kShapeTypes[rng.below(4)];
    auto& p = cfg.params(t);
    const ShapeGenConfig defaults;
    p.amplitude_min = p.amplitude_max = rng.uniform(defaults.params(t).amplitude_min, defaults.params(t).amplitude_max);
    p.lobes_min = p.lobes_max = rng.between(defaults.params(t).lobes_min, defaults.params(t).lobes_max);
    const Contour c = gen_contour(t, cfg, rng.below(1u << 30));  // validates simplicity
    const Point2 g = centroid(c);
    EXPECT_TRUE(strictly_inside(c, g));
    for (const auto& q : c.points()) EXPECT_GT(std::hypot(q.x - g.x, q.y - g.y), 0.0);
  }
}

TEST(Dataset, CalibratedRates) {
  const ShapeGenConfig cfg;
  std::array<double, 4> n{}, mal{};
  double correct = 0;
  const std::size_t total = 10000;
  for (std::size_t i = 0; i < total; ++i) {
    const auto d = draw_shape_labels(cfg, kUniformTypePriors, 123, i);
    const auto k = static_cast<std::size_t>(d.type);
    n[k] += 1;
    mal[k] += d.malignant;
    correct += shape_predicts_malignant(d.type) == d.malignant;
  }
  const double rates[4] = {0.17, 0.05, 0.95, 0.97};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(mal[k] / n[k], rates[k], 0.02);
  EXPECT_NEAR(correct / total, 0.925, 0.01);
  EXPECT_NEAR((mal[0] + mal[1]) / (n[0] + n[1]), 0.11, 0.01);
}

TEST(Dataset, ReproducibleAndLabelsMatchDraws) {
  const ShapeGenConfig cfg;
  const auto a = gen_shape_dataset(12, cfg, kUniformTypePriors, 5);
  const auto b = gen_shape_dataset(12, cfg, kUniformTypePriors, 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto d = draw_shape_labels(cfg, kUniformTypePriors, 5, i);
    EXPECT_EQ(a[i].type, d.type);
    EXPECT_EQ(a[i].malignant, d.malignant);
    EXPECT_EQ(coords(a[i].contour), coords(b[i].contour));
  }
}

TEST(Dataset, DescriptorsSeparateBenignAndMalignantShapes) {
  const auto samples = gen_shape_dataset(400, ShapeGenConfig{}, kUniformTypePriors, 77);
  FeatureMatrix m;
  std::vector<int> y;
  for (const auto& s : samples) {
    m.add_row(shape_descriptor(s.contour));
    y.push_back(shape_predicts_malignant(s.type) ? 1 : -1);
  }
  const auto rep = crossval({3, 0.7, 1}, {ClassifierKind::knn, 3}, m, y);
  EXPECT_GE(rep.accuracy.mean, 0.95);
}

TEST(Experts, Concentration) {
  ExpertGenConfig cfg;
  cfg.competencies = {1.0 - 1e-6, 0.75, 0.7};
  cfg.trials = 10000;
  const auto data = gen_expert_votes(cfg, 8);
  ASSERT_EQ(data.votes.size(), 10000u);
  double agree[3] = {0, 0, 0};
  std::vector<double> e1, e2;
  for (std::size_t t = 0; t < data.truth.size(); ++t) {
    for (int i = 0; i < 3; ++i) agree[i] += data.votes[t][i] == data.truth[t];
    e1.push_back(data.votes[t][1] != data.truth[t]);
    e2.push_back(data.votes[t][2] != data.truth[t]);
  }
  EXPECT_GE(agree[0] / 10000, 0.9999);
  EXPECT_NEAR(agree[1] / 10000, 0.75, 0.02);
  double m1 = 0, m2 = 0;
  for (std::size_t t = 0; t < e1.size(); ++t) m1 += e1[t], m2 += e2[t];
  m1 /= e1.size();
  m2 /= e2.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t t = 0; t < e1.size(); ++t) {
    sxy += (e1[t] - m1) * (e2[t] - m2);
    sxx += (e1[t] - m1) * (e1[t] - m1);
    syy += (e2[t] - m2) * (e2[t] - m2);
  }
  EXPECT_NEAR(sxy / std::sqrt(sxx * syy), 0.0, 0.03);
}

TEST(Textures, ClassesDifferInRoughness) {
  std::vector<double> benign, malignant;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    benign.push_back(mean_abs_gradient(gen_texture_image(TextureClass::benign_like, 64, seed)));
    malignant.push_back(mean_abs_gradient(gen_texture_image(TextureClass::malignant_like, 64, seed)));
  }
  EXPECT_LT(median(benign), median(malignant));
}

TEST(Textures, DeterministicAndInRange) {
  const auto a = gen_texture_image(TextureClass::malignant_like, 64, 3);
  const auto b = gen_texture_image(TextureClass::malignant_like, 64, 3);
  EXPECT_EQ(a.pixels(), b.pixels());
  const auto [lo, hi] = std::minmax_element(a.pixels().begin(), a.pixels().end());
  EXPECT_GE(*lo, 0.0);
  EXPECT_LE(*hi, 1.0);
  EXPECT_THROW(gen_texture_image(TextureClass::benign_like, 32, 1), Error);
}
