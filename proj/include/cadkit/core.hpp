#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cadkit {

enum class ErrorCode {
  InvalidArgument,
  InvalidContour,
  DegeneratePolygon,
  CentroidOutside,
  NoIntersection,
  LengthNotPowerOfTwo,
  TooManyLevels,
  UnknownWavelet,
  SignalTooShort,
  BoxOutOfBounds,
  BoxTooSmall,
  EmptyTiling,
  NonRectangularGrid,
  DegenerateClass,
  SingularScatter,
  InsufficientSamples,
  TooFewSamples,
  SingularWithinScatter,
  ColumnMismatch,
  LengthMismatch,
  SingleClass,
  ParseError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidContour: return "InvalidContour";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::CentroidOutside: return "CentroidOutside";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::LengthNotPowerOfTwo: return "LengthNotPowerOfTwo";
    case ErrorCode::TooManyLevels: return "TooManyLevels";
    case ErrorCode::UnknownWavelet: return "UnknownWavelet";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::BoxOutOfBounds: return "BoxOutOfBounds";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::EmptyTiling: return "EmptyTiling";
    case ErrorCode::NonRectangularGrid: return "NonRectangularGrid";
    case ErrorCode::DegenerateClass: return "DegenerateClass";
    case ErrorCode::SingularScatter: return "SingularScatter";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SingularWithinScatter: return "SingularWithinScatter";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t log2_exact(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

/// SplitMix64 finalizer. Used to derive independent stream seeds from
/// (seed, index) pairs.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Portable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. The standard <random> distributions are not (their
/// algorithms are implementation-defined), so every derived variate is
/// produced here from raw 64-bit draws:
///   uniform()  = (u >> 11) * 2^-53                      in [0, 1)
///   below(n)   = Lemire multiply-shift with rejection   in [0, n)
///   normal()   = Box-Muller, cosine branch only (one normal per two draws)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "Rng::below(0)");
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Integer uniform on the closed range [lo, hi].
  int between(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cadkit
