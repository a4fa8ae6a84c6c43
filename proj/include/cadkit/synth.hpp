#pragma once

// Seeded synthetic data: four-type mass contours with per-type malignancy
// rates, conditionally independent expert votes, and class-conditioned
// texture fields. Every generator is a pure function of (config, seed).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cadkit/core.hpp"
#include "cadkit/features.hpp"
#include "cadkit/geometry.hpp"

namespace cadkit {

/// Polar outline model r(theta) = R0 * (1 + a * lobes(theta) + noise(theta)).
struct ShapeTypeParams {
  double amplitude_min = 0.0;
  double amplitude_max = 0.0;
  int lobes_min = 0;
  int lobes_max = 0;
  bool spiky = false;           // exponentiated-cosine spikes instead of sinusoids
  double spike_sharpness = 8.0;
  double malignancy_rate = 0.0;
};

struct ShapeGenConfig {
  double base_radius = 50.0;  // pixels
  double noise_sigma = 0.005;  // relative amplitude of the smooth radial noise
  std::size_t vertices = 256;
  std::array<ShapeTypeParams, 4> types{{
      {0.0, 0.02, 2, 3, false, 8.0, 0.17},    // round
      {0.10, 0.25, 3, 5, false, 8.0, 0.05},   // lobulated
      {0.03, 0.08, 15, 30, false, 8.0, 0.95}, // microlobulated
      {0.30, 0.60, 5, 12, true, 8.0, 0.97},   // stellate
  }};

  const ShapeTypeParams& params(ShapeType t) const { return types[static_cast<std::size_t>(t)]; }
  ShapeTypeParams& params(ShapeType t) { return types[static_cast<std::size_t>(t)]; }

  void validate() const {
    require(base_radius > 0.0 && noise_sigma >= 0.0 && vertices >= 8, ErrorCode::InvalidArgument,
            "invalid shape generator configuration");
    for (const auto& p : types) {
      require(p.amplitude_min >= 0.0 && p.amplitude_max >= p.amplitude_min && p.lobes_min >= 0 &&
                  p.lobes_max >= p.lobes_min && p.malignancy_rate >= 0.0 && p.malignancy_rate <= 1.0,
              ErrorCode::InvalidArgument, "invalid shape type parameters");
    }
  }
};

inline constexpr int kNoiseHarmonicMin = 2;
inline constexpr int kNoiseHarmonicMax = 8;

inline Contour gen_contour(ShapeType type, const ShapeGenConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto& tp = cfg.params(type);
  Rng rng(seed);
  const double a = rng.uniform(tp.amplitude_min, tp.amplitude_max);
  const int lobes = rng.between(tp.lobes_min, tp.lobes_max);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  // Smooth noise: random low harmonics with total standard deviation sigma.
  constexpr int harmonics = kNoiseHarmonicMax - kNoiseHarmonicMin + 1;
  std::array<double, harmonics> amp{}, ph{};
  for (int h = 0; h < harmonics; ++h) {
    amp[h] = rng.normal() * cfg.noise_sigma * std::sqrt(2.0 / harmonics);
    ph[h] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  std::vector<Point2> pts(cfg.vertices);
  for (std::size_t k = 0; k < cfg.vertices; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(cfg.vertices);
    double shape = 0.0;
    if (lobes > 0) {
      const double c = std::cos(lobes * theta + phase);
      shape = tp.spiky ? std::exp(tp.spike_sharpness * (c - 1.0)) : c;
    }
    double noise = 0.0;
    for (int h = 0; h < harmonics; ++h) noise += amp[h] * std::cos((h + kNoiseHarmonicMin) * theta + ph[h]);
    const double r = std::max(0.1, 1.0 + a * shape + noise) * cfg.base_radius;
    pts[k] = {r * std::cos(theta), r * std::sin(theta)};
  }
  return Contour(std::move(pts));
}

struct ShapeSample {
  Contour contour;
  ShapeType type;
  bool malignant;
  std::uint64_t seed;
};

/// Draws a type from the priors and a diagnosis from that type's
/// malignancy rate; the contour itself is generated from the sample seed.
struct ShapeLabelDraw {
  ShapeType type;
  bool malignant;
  std::uint64_t seed;
};

inline ShapeLabelDraw draw_shape_labels(const ShapeGenConfig& cfg, std::span<const double> priors,
                                        std::uint64_t seed, std::size_t index) {
  const std::uint64_t sample_seed = derive_seed(seed, index);
  Rng rng(sample_seed);
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t t = priors.size() - 1;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    acc += priors[i];
    if (u < acc) {
      t = i;
      break;
    }
  }
  const auto type = static_cast<ShapeType>(t);
  const bool malignant = rng.bernoulli(cfg.params(type).malignancy_rate);
  return {type, malignant, derive_seed(sample_seed, 1)};
}

inline constexpr std::array<double, 4> kUniformTypePriors{0.25, 0.25, 0.25, 0.25};

inline std::vector<ShapeSample> gen_shape_dataset(std::size_t n, const ShapeGenConfig& cfg,
                                                  std::span<const double> type_priors,
                                                  std::uint64_t seed) {
  cfg.validate();
  require(type_priors.size() == 4, ErrorCode::InvalidArgument, "need one prior per shape type");
  double total = 0.0;
  for (double p : type_priors) {
    require(p >= 0.0, ErrorCode::InvalidArgument, "negative type prior");
    total += p;
  }
  require(std::abs(total - 1.0) < 1e-9, ErrorCode::InvalidArgument, "type priors must sum to 1");
  std::vector<ShapeSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = draw_shape_labels(cfg, type_priors, seed, i);
    out.push_back({gen_contour(d.type, cfg, d.seed), d.type, d.malignant, d.seed});
  }
  return out;
}

/// Shape-only diagnosis rule: malignant iff microlobulated or stellate.
inline bool shape_predicts_malignant(ShapeType t) {
  return t == ShapeType::microlobulated || t == ShapeType::stellate;
}

struct ExpertGenConfig {
  std::vector<double> competencies;
  double prior_pos = 0.5;
  std::size_t trials = 1000;

  void validate() const {
    require(!competencies.empty(), ErrorCode::InvalidArgument, "need at least one expert");
    for (double p : competencies) {
      require(p > 0.0 && p < 1.0, ErrorCode::InvalidArgument, "competencies must lie in (0,1)");
    }
    require(prior_pos > 0.0 && prior_pos < 1.0, ErrorCode::InvalidArgument, "prior must lie in (0,1)");
  }
};

struct ExpertVotes {
  std::vector<int> truth;               // per trial, +1 / -1
  std::vector<std::vector<int>> votes;  // [trial][expert]
};

/// Each expert independently reports the truth with probability p_i.
inline ExpertVotes gen_expert_votes(const ExpertGenConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  ExpertVotes out;
  out.truth.reserve(cfg.trials);
  out.votes.reserve(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const int y = rng.bernoulli(cfg.prior_pos) ? 1 : -1;
    std::vector<int> v(cfg.competencies.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.bernoulli(cfg.competencies[i]) ? y : -y;
    out.truth.push_back(y);
    out.votes.push_back(std::move(v));
  }
  return out;
}

enum class TextureClass { benign_like, malignant_like };

inline double smoothing_radius(TextureClass c) { return c == TextureClass::benign_like ? 4.0 : 1.0; }

/// White Gaussian noise blurred by a Gaussian of sigma = class radius
/// (reflecting borders), then min-max rescaled to [0, 1].
inline GrayImage gen_texture_image(TextureClass cls, int size, std::uint64_t seed) {
  require(size >= 64, ErrorCode::InvalidArgument, "texture image size must be >= 64");
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(size);
  std::vector<double> field(n * n);
  for (double& v : field) v = rng.normal();

  const double sigma = smoothing_radius(cls);
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  double ksum = 0.0;
  for (int i = -half; i <= half; ++i) {
    kernel[static_cast<std::size_t>(i + half)] = std::exp(-0.5 * i * i / (sigma * sigma));
    ksum += kernel[static_cast<std::size_t>(i + half)];
  }
  for (double& k : kernel) k /= ksum;
  auto reflect = [size](int i) {
    while (i < 0 || i >= size) i = i < 0 ? -i - 1 : 2 * size - i - 1;
    return i;
  };
  std::vector<double> tmp(field.size());
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i)
        acc += kernel[static_cast<std::size_t>(i + half)] * field[static_cast<std::size_t>(y) * n + static_cast<std::size_t>(reflect(x + i))];
      tmp[static_cast<std::size_t>(y) * n + static_cast<std::size_t>(x)] = acc;
    }
  }
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      for (int i = -half; i <= half; ++i)
        acc += kernel[static_cast<std::size_t>(i + half)] * tmp[static_cast<std::size_t>(reflect(y + i)) * n + static_cast<std::size_t>(x)];
      field[static_cast<std::size_t>(y) * n + static_cast<std::size_t>(x)] = acc;
    }
  }
  const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
  const double mn = *lo, range = *hi - *lo;
  for (double& v : field) v = range > 0.0 ? std::clamp((v - mn) / range, 0.0, 1.0) : 0.0;
  return GrayImage(size, size, std::move(field));
}

}  // namespace cadkit
