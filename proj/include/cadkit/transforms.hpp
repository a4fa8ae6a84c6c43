#pragma once

// Spectral and multi-scale carrier signals derived from a 1-D signal.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cadkit/core.hpp"

namespace cadkit {

/// Half-spectrum magnitudes |X_k| / n for k = 0..n/2. The DC bin equals the
/// signal mean; Parseval reads sum(s^2)/n == envelope_energy(env).
struct SpectrumEnvelope {
  std::vector<double> magnitudes;
};

/// Complex DFT with 1/n analysis scaling, computed straight from the
/// definition with an exact twiddle table (index k*m mod n).
inline std::vector<std::complex<double>> dft(std::span<const double> s) {
  const std::size_t n = s.size();
  std::vector<std::complex<double>> twiddle(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    twiddle[j] = {std::cos(a), std::sin(a)};
  }
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) acc += s[m] * twiddle[(k * m) % n];
    out[k] = acc / static_cast<double>(n);
  }
  return out;
}

inline SpectrumEnvelope dft_envelope(std::span<const double> s) {
  require(s.size() >= 8 && is_power_of_two(s.size()), ErrorCode::LengthNotPowerOfTwo,
          "DFT input length must be a power of two >= 8, got " + std::to_string(s.size()));
  const auto spectrum = dft(s);
  SpectrumEnvelope env;
  env.magnitudes.resize(s.size() / 2 + 1);
  for (std::size_t k = 0; k < env.magnitudes.size(); ++k) env.magnitudes[k] = std::abs(spectrum[k]);
  return env;
}

/// Two-sided spectral energy reconstructed from the half spectrum.
inline double envelope_energy(const SpectrumEnvelope& env) {
  const std::size_t half = env.magnitudes.size() - 1;
  double e = env.magnitudes.front() * env.magnitudes.front() +
             env.magnitudes.back() * env.magnitudes.back();
  for (std::size_t k = 1; k < half; ++k) e += 2.0 * env.magnitudes[k] * env.magnitudes[k];
  return e;
}

enum class Wavelet { haar, db4 };

inline std::string_view to_string(Wavelet w) { return w == Wavelet::haar ? "haar" : "db4"; }

inline Wavelet parse_wavelet(std::string_view name) {
  if (name == "haar") return Wavelet::haar;
  if (name == "db4") return Wavelet::db4;
  throw Error(ErrorCode::UnknownWavelet, "unknown wavelet '" + std::string(name) + "'");
}

/// Orthonormal scaling filter. db4 is the 8-tap Daubechies filter with four
/// vanishing moments.
inline std::span<const double> scaling_filter(Wavelet w) {
  static constexpr std::array<double, 2> haar{0.70710678118654752440, 0.70710678118654752440};
  static constexpr std::array<double, 8> db4{
      0.2303778133088965,  0.7148465705529157,  0.6308807679298589,  -0.0279837694168599,
      -0.1870348117190931, 0.0308413818355607, 0.0328830116668852, -0.0105974017850690};
  if (w == Wavelet::haar) return haar;
  return db4;
}

/// Pyramidal decomposition. details[0] is the finest band (length n/2),
/// details.back() the coarsest; approx has the coarsest length.
struct WaveletDecomposition {
  std::size_t levels = 0;
  std::vector<std::vector<double>> details;
  std::vector<double> approx;
  Wavelet wavelet = Wavelet::db4;
};

inline constexpr std::size_t kDefaultWaveletLevels = 4;

namespace detail {

inline double wavelet_filter_tap(std::span<const double> h, std::size_t k) {
  // g[k] = (-1)^k h[L-1-k]
  const double v = h[h.size() - 1 - k];
  return (k % 2 == 0) ? v : -v;
}

inline void analysis_step(std::span<const double> x, std::span<const double> h,
                          std::vector<double>& approx, std::vector<double>& detail) {
  const std::size_t n = x.size();
  approx.assign(n / 2, 0.0);
  detail.assign(n / 2, 0.0);
  for (std::size_t i = 0; i < n / 2; ++i) {
    double a = 0.0, d = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double v = x[(2 * i + k) % n];
      a += h[k] * v;
      d += wavelet_filter_tap(h, k) * v;
    }
    approx[i] = a;
    detail[i] = d;
  }
}

inline std::vector<double> synthesis_step(std::span<const double> approx,
                                          std::span<const double> detail,
                                          std::span<const double> h) {
  const std::size_t n = 2 * approx.size();
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < approx.size(); ++i) {
    for (std::size_t k = 0; k < h.size(); ++k) {
      x[(2 * i + k) % n] += h[k] * approx[i] + wavelet_filter_tap(h, k) * detail[i];
    }
  }
  return x;
}

}  // namespace detail

/// Periodic-extension DWT. Requires a power-of-two length and
/// levels <= log2(n) - 1.
inline WaveletDecomposition dwt_decompose(std::span<const double> s,
                                          std::size_t levels = kDefaultWaveletLevels,
                                          Wavelet wavelet = Wavelet::db4) {
  require(is_power_of_two(s.size()) && s.size() >= 2, ErrorCode::LengthNotPowerOfTwo,
          "DWT input length must be a power of two, got " + std::to_string(s.size()));
  const std::size_t max_levels = log2_exact(s.size()) - 1;
  require(levels >= 1 && levels <= max_levels, ErrorCode::TooManyLevels,
          "requested " + std::to_string(levels) + " levels, at most " +
              std::to_string(max_levels) + " allowed for n=" + std::to_string(s.size()));
  const auto h = scaling_filter(wavelet);
  WaveletDecomposition out;
  out.levels = levels;
  out.wavelet = wavelet;
  std::vector<double> current(s.begin(), s.end());
  for (std::size_t j = 0; j < levels; ++j) {
    std::vector<double> a, d;
    detail::analysis_step(current, h, a, d);
    out.details.push_back(std::move(d));
    current = std::move(a);
  }
  out.approx = std::move(current);
  return out;
}

inline std::vector<double> dwt_reconstruct(const WaveletDecomposition& d) {
  require(d.details.size() == d.levels && d.levels >= 1, ErrorCode::InvalidArgument,
          "decomposition level count does not match its detail bands");
  const auto h = scaling_filter(d.wavelet);
  std::vector<double> current = d.approx;
  for (std::size_t j = d.levels; j-- > 0;) {
    require(d.details[j].size() == current.size(), ErrorCode::InvalidArgument,
            "band length mismatch at level " + std::to_string(j + 1));
    current = detail::synthesis_step(current, d.details[j], h);
  }
  return current;
}

}  // namespace cadkit
