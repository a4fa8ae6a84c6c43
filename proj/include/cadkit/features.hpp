#pragma once

// Curve feature functions over 1-D carrier signals, the contour shape
// descriptor built from them, and the box-wise texture feature bank.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cadkit/core.hpp"
#include "cadkit/geometry.hpp"
#include "cadkit/transforms.hpp"

namespace cadkit {

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }

  void push(std::string name, double value) {
    names.push_back(std::move(name));
    values.push_back(value);
  }

  void append(const FeatureVector& other, std::string_view prefix = {}) {
    for (std::size_t i = 0; i < other.size(); ++i) {
      push(std::string(prefix) + other.names[i], other.values[i]);
    }
  }

  double at(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return values[i];
    }
    throw Error(ErrorCode::ColumnMismatch, "no feature named '" + std::string(name) + "'");
  }
};

enum class LabelKind { diagnosis, shape_type };

enum class ShapeType { round = 0, lobulated = 1, microlobulated = 2, stellate = 3 };

inline constexpr std::array<ShapeType, 4> kShapeTypes{ShapeType::round, ShapeType::lobulated,
                                                      ShapeType::microlobulated,
                                                      ShapeType::stellate};

inline std::string_view to_string(ShapeType t) {
  switch (t) {
    case ShapeType::round: return "round";
    case ShapeType::lobulated: return "lobulated";
    case ShapeType::microlobulated: return "microlobulated";
    case ShapeType::stellate: return "stellate";
  }
  return "round";
}

inline std::optional<ShapeType> parse_shape_type(std::string_view s) {
  for (ShapeType t : kShapeTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

/// Diagnosis values: 0 = benign, 1 = malignant. Shape-type values follow
/// the ShapeType enumeration.
struct LabelColumn {
  LabelKind kind = LabelKind::diagnosis;
  std::vector<int> values;
};

inline std::string label_name(LabelKind kind, int value) {
  if (kind == LabelKind::diagnosis) return value == 1 ? "malignant" : "benign";
  return std::string(to_string(static_cast<ShapeType>(value)));
}

/// Binary +1/-1 targets: rows whose label equals `positive` map to +1.
inline std::vector<int> to_votes(const LabelColumn& labels, int positive = 1) {
  std::vector<int> y(labels.values.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = labels.values[i] == positive ? 1 : -1;
  return y;
}

struct BoxOrigin {
  int x = 0;
  int y = 0;
  friend bool operator==(const BoxOrigin&, const BoxOrigin&) = default;
};

/// Rectangular sample table: rows x named feature columns, with optional
/// labels and optional box-origin metadata per row.
struct FeatureMatrix {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::optional<LabelColumn> labels;
  std::vector<BoxOrigin> boxes;  // empty unless rows come from a box tiling

  std::size_t row_count() const noexcept { return rows.size(); }
  std::size_t column_count() const noexcept { return columns.size(); }

  void add_row(const FeatureVector& v) {
    if (columns.empty() && rows.empty()) columns = v.names;
    require(v.names == columns, ErrorCode::ColumnMismatch, "row columns differ from matrix columns");
    rows.push_back(v.values);
  }

  FeatureVector row(std::size_t i) const { return {columns, rows.at(i)}; }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> c(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) c[i] = rows[i][j];
    return c;
  }

  std::size_t column_index(std::string_view name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] == name) return j;
    }
    throw Error(ErrorCode::ColumnMismatch, "no column named '" + std::string(name) + "'");
  }

  /// Copy restricted to the given row indices (labels and boxes follow).
  FeatureMatrix select_rows(std::span<const std::size_t> idx) const {
    FeatureMatrix out;
    out.columns = columns;
    if (labels) out.labels = LabelColumn{labels->kind, {}};
    for (std::size_t i : idx) {
      out.rows.push_back(rows.at(i));
      if (labels) out.labels->values.push_back(labels->values.at(i));
      if (!boxes.empty()) out.boxes.push_back(boxes.at(i));
    }
    return out;
  }

  FeatureMatrix select_columns(std::span<const std::string> names) const {
    std::vector<std::size_t> idx;
    for (const auto& n : names) idx.push_back(column_index(n));
    FeatureMatrix out;
    out.columns.assign(names.begin(), names.end());
    out.labels = labels;
    out.boxes = boxes;
    for (const auto& r : rows) {
      std::vector<double> v;
      for (std::size_t j : idx) v.push_back(r[j]);
      out.rows.push_back(std::move(v));
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Curve features

inline constexpr std::array<std::string_view, 7> kCurveFeatureNames{
    "mean_value", "std_dev", "zero_cross_count", "roughness_index",
    "area_ratio", "circularity", "histogram_entropy"};

namespace detail {

/// Sum accumulated in ascending order, so any permutation of the input
/// (in particular a circular shift) gives a bit-identical result.
inline double ordered_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

inline double entropy_bits(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

}  // namespace detail

inline constexpr std::size_t kCurveHistogramBins = 16;

/// The seven uniresolution curve features. All definitions treat the signal
/// as circular.
inline FeatureVector curve_features(std::span<const double> s) {
  require(s.size() >= 4, ErrorCode::SignalTooShort,
          "curve features need at least 4 samples, got " + std::to_string(s.size()));
  for (double v : s) require(std::isfinite(v), ErrorCode::InvalidArgument, "non-finite sample");
  const std::size_t n = s.size();
  const double dn = static_cast<double>(n);
  const auto [lo_it, hi_it] = std::minmax_element(s.begin(), s.end());
  const double lo = *lo_it, hi = *hi_it;
  const bool constant = lo == hi;

  const double mu = constant ? s[0] : detail::ordered_sum({s.begin(), s.end()}) / dn;

  std::vector<double> sq(n), abs_diff(n), excess;
  for (std::size_t k = 0; k < n; ++k) {
    sq[k] = (s[k] - mu) * (s[k] - mu);
    abs_diff[k] = std::abs(s[(k + 1) % n] - s[k]);
    if (s[k] > mu) excess.push_back(s[k] - mu);
  }
  const double sigma = constant ? 0.0 : std::sqrt(detail::ordered_sum(sq) / dn);

  // Sign of (s - mu); a zero sample inherits its predecessor's sign.
  std::size_t crossings = 0;
  std::size_t start = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (s[k] != mu) {
      start = k;
      break;
    }
  }
  if (start < n) {
    std::vector<int> sign(n);
    int prev = s[start] > mu ? 1 : -1;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = (start + j) % n;
      if (s[k] > mu) prev = 1;
      else if (s[k] < mu) prev = -1;
      sign[k] = prev;
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (sign[k] != sign[(k + 1) % n]) ++crossings;
    }
  }

  const double roughness = detail::ordered_sum(abs_diff) / dn;
  const double area_ratio = mu > 0.0 ? detail::ordered_sum(excess) / (mu * dn) : 0.0;
  const double circularity = mu > 0.0 ? sigma / mu : 0.0;

  std::array<double, kCurveHistogramBins> hist{};
  for (double v : s) {
    std::size_t b = 0;
    if (!constant) {
      const double t = (v - lo) / (hi - lo) * static_cast<double>(kCurveHistogramBins);
      b = std::min(kCurveHistogramBins - 1, static_cast<std::size_t>(t));
    }
    hist[b] += 1.0;
  }
  for (double& h : hist) h /= dn;

  FeatureVector out;
  out.push("mean_value", mu);
  out.push("std_dev", sigma);
  out.push("zero_cross_count", static_cast<double>(crossings));
  out.push("roughness_index", roughness);
  out.push("area_ratio", area_ratio);
  out.push("circularity", circularity);
  out.push("histogram_entropy", detail::entropy_bits(hist));
  return out;
}

/// Which carriers feed the shape descriptor, plus their transform settings.
struct ShapeDescriptorConfig {
  std::size_t radial_samples = kDefaultRadialSamples;
  bool use_raw = true;
  bool use_envelope = true;
  bool use_wavelet = true;
  Wavelet wavelet = Wavelet::db4;
  std::size_t wavelet_levels = kDefaultWaveletLevels;
};

/// Curve features of the normalized radial signal ("raw."), its spectrum
/// envelope without the DC bin ("env."), and every DWT band ("dwt_d1." ..
/// "dwt_dL.", then "dwt_aL.").
inline FeatureVector shape_descriptor(const Contour& c, const ShapeDescriptorConfig& cfg = {}) {
  const RadialSignal signal = normalize_signal(radial_distance_signal(c, cfg.radial_samples));
  FeatureVector out;
  if (cfg.use_raw) out.append(curve_features(signal.samples), "raw.");
  if (cfg.use_envelope) {
    const auto env = dft_envelope(signal.samples);
    out.append(curve_features(std::span(env.magnitudes).subspan(1)), "env.");
  }
  if (cfg.use_wavelet) {
    const auto dec = dwt_decompose(signal.samples, cfg.wavelet_levels, cfg.wavelet);
    for (std::size_t j = 0; j < dec.levels; ++j) {
      out.append(curve_features(dec.details[j]), "dwt_d" + std::to_string(j + 1) + ".");
    }
    out.append(curve_features(dec.approx), "dwt_a" + std::to_string(dec.levels) + ".");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Texture

/// Row-major grayscale image with intensities in [0, 1].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::vector<double> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    require(width > 0 && height > 0, ErrorCode::InvalidArgument, "image dimensions must be positive");
    require(pixels_.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
            ErrorCode::InvalidArgument, "pixel count does not match image dimensions");
    for (double v : pixels_) {
      require(v >= 0.0 && v <= 1.0, ErrorCode::InvalidArgument, "pixel outside [0,1]");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double at(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)];
  }
  const std::vector<double>& pixels() const noexcept { return pixels_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

struct Box {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

inline constexpr std::array<std::string_view, 20> kTextureFeatureNames{
    // first-order
    "fo_mean", "fo_variance", "fo_skewness", "fo_kurtosis", "fo_energy", "fo_entropy",
    "fo_smoothness", "fo_coeff_variation",
    // co-occurrence
    "glcm_contrast", "glcm_correlation", "glcm_asm", "glcm_idm", "glcm_entropy",
    "glcm_dissimilarity", "glcm_max_probability", "glcm_cluster_shade",
    // roughness
    "rough_mean_abs_gradient", "rough_gradient_variance", "rough_mean_abs_laplacian",
    "rough_edge_density"};

inline constexpr int kTextureGrayLevels = 16;
inline constexpr double kEdgeGradientThreshold = 0.1;

namespace detail {

inline int quantize(double v) {
  return std::min(kTextureGrayLevels - 1, static_cast<int>(v * kTextureGrayLevels));
}

using Glcm = std::array<std::array<double, kTextureGrayLevels>, kTextureGrayLevels>;

/// Symmetric normalized co-occurrence matrix for one offset.
inline Glcm cooccurrence(const GrayImage& img, const Box& b, int dx, int dy) {
  Glcm m{};
  double total = 0.0;
  for (int y = b.y; y + dy < b.y + b.height; ++y) {
    for (int x = b.x; x + dx < b.x + b.width; ++x) {
      const int i = quantize(img.at(x, y));
      const int j = quantize(img.at(x + dx, y + dy));
      m[i][j] += 1.0;
      m[j][i] += 1.0;
      total += 2.0;
    }
  }
  if (total > 0.0) {
    for (auto& r : m)
      for (double& v : r) v /= total;
  }
  return m;
}

}  // namespace detail

/// The fixed 20-function texture bank over one box: 8 first-order
/// statistics, 8 co-occurrence statistics (16 gray levels, offsets (1,0)
/// and (0,1) averaged), and 4 gradient roughness metrics.
inline FeatureVector texture_features(const GrayImage& img, const Box& box) {
  require(box.x >= 0 && box.y >= 0 && box.width > 0 && box.height > 0 &&
              box.x + box.width <= img.width() && box.y + box.height <= img.height(),
          ErrorCode::BoxOutOfBounds, "box lies outside the image");
  const std::size_t count = static_cast<std::size_t>(box.width) * static_cast<std::size_t>(box.height);
  require(count >= 16, ErrorCode::BoxTooSmall, "box area must be at least 16 pixels");
  const double dn = static_cast<double>(count);

  std::vector<double> px;
  px.reserve(count);
  for (int y = box.y; y < box.y + box.height; ++y)
    for (int x = box.x; x < box.x + box.width; ++x) px.push_back(img.at(x, y));

  const auto [px_lo, px_hi] = std::minmax_element(px.begin(), px.end());
  double mean = px.front();
  if (*px_lo != *px_hi) {
    mean = 0.0;
    for (double v : px) mean += v;
    mean /= dn;
  }
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : px) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= dn;
  m3 /= dn;
  m4 /= dn;
  const double sd = std::sqrt(m2);
  const bool flat = m2 <= 1e-24;
  const double skewness = flat ? 0.0 : m3 / (m2 * sd);
  const double kurtosis = flat ? 0.0 : m4 / (m2 * m2) - 3.0;  // excess

  std::array<double, kTextureGrayLevels> hist{};
  for (double v : px) hist[static_cast<std::size_t>(detail::quantize(v))] += 1.0 / dn;
  double energy = 0.0;
  for (double p : hist) energy += p * p;

  FeatureVector out;
  out.push("fo_mean", mean);
  out.push("fo_variance", m2);
  out.push("fo_skewness", skewness);
  out.push("fo_kurtosis", kurtosis);
  out.push("fo_energy", energy);
  out.push("fo_entropy", detail::entropy_bits(hist));
  out.push("fo_smoothness", 1.0 - 1.0 / (1.0 + m2));
  out.push("fo_coeff_variation", mean > 0.0 ? sd / mean : 0.0);

  const auto gh = detail::cooccurrence(img, box, 1, 0);
  const auto gv = detail::cooccurrence(img, box, 0, 1);
  detail::Glcm g{};
  for (int i = 0; i < kTextureGrayLevels; ++i)
    for (int j = 0; j < kTextureGrayLevels; ++j) g[i][j] = 0.5 * (gh[i][j] + gv[i][j]);

  double mu_i = 0.0;
  for (int i = 0; i < kTextureGrayLevels; ++i)
    for (int j = 0; j < kTextureGrayLevels; ++j) mu_i += i * g[i][j];
  const double mu_j = mu_i;  // symmetric matrix
  double var_i = 0.0, contrast = 0.0, asm_ = 0.0, idm = 0.0, gent = 0.0, dis = 0.0, pmax = 0.0,
         shade = 0.0, cov = 0.0;
  for (int i = 0; i < kTextureGrayLevels; ++i) {
    for (int j = 0; j < kTextureGrayLevels; ++j) {
      const double p = g[i][j];
      const double d = static_cast<double>(i - j);
      var_i += (i - mu_i) * (i - mu_i) * p;
      cov += (i - mu_i) * (j - mu_j) * p;
      contrast += d * d * p;
      asm_ += p * p;
      idm += p / (1.0 + d * d);
      if (p > 0.0) gent -= p * std::log2(p);
      dis += std::abs(d) * p;
      pmax = std::max(pmax, p);
      const double c = i + j - mu_i - mu_j;
      shade += c * c * c * p;
    }
  }
  out.push("glcm_contrast", contrast);
  // Zero when the quantized box is flat (correlation undefined).
  out.push("glcm_correlation", var_i > 1e-24 ? cov / var_i : 0.0);
  out.push("glcm_asm", asm_);
  out.push("glcm_idm", idm);
  out.push("glcm_entropy", gent);
  out.push("glcm_dissimilarity", dis);
  out.push("glcm_max_probability", pmax);
  out.push("glcm_cluster_shade", shade);

  // Forward-difference gradient magnitude and 4-neighbour Laplacian, each
  // restricted to pixels whose stencil stays inside the box.
  std::vector<double> grad;
  for (int y = box.y; y + 1 < box.y + box.height; ++y) {
    for (int x = box.x; x + 1 < box.x + box.width; ++x) {
      const double gx = img.at(x + 1, y) - img.at(x, y);
      const double gy = img.at(x, y + 1) - img.at(x, y);
      grad.push_back(std::hypot(gx, gy));
    }
  }
  double gmean = 0.0, gvar = 0.0, edges = 0.0;
  if (!grad.empty()) {
    for (double v : grad) gmean += v;
    gmean /= static_cast<double>(grad.size());
    for (double v : grad) {
      gvar += (v - gmean) * (v - gmean);
      if (v > kEdgeGradientThreshold) edges += 1.0;
    }
    gvar /= static_cast<double>(grad.size());
    edges /= static_cast<double>(grad.size());
  }
  double lap = 0.0;
  std::size_t lap_count = 0;
  for (int y = box.y + 1; y + 1 < box.y + box.height; ++y) {
    for (int x = box.x + 1; x + 1 < box.x + box.width; ++x) {
      lap += std::abs(img.at(x - 1, y) + img.at(x + 1, y) + img.at(x, y - 1) + img.at(x, y + 1) -
                      4.0 * img.at(x, y));
      ++lap_count;
    }
  }
  if (lap_count > 0) lap /= static_cast<double>(lap_count);
  out.push("rough_mean_abs_gradient", gmean);
  out.push("rough_gradient_variance", gvar);
  out.push("rough_mean_abs_laplacian", lap);
  out.push("rough_edge_density", edges);
  return out;
}

/// Non-overlapping tiling of the ROI with square boxes; partial boxes at the
/// right and bottom edges are dropped. Rows are in scan-line order.
inline FeatureMatrix box_feature_map(const GrayImage& img, const Box& roi, int box_size) {
  require(box_size >= 4, ErrorCode::InvalidArgument, "box size must be at least 4");
  require(roi.x >= 0 && roi.y >= 0 && roi.width > 0 && roi.height > 0 &&
              roi.x + roi.width <= img.width() && roi.y + roi.height <= img.height(),
          ErrorCode::BoxOutOfBounds, "ROI lies outside the image");
  const int nx = roi.width / box_size;
  const int ny = roi.height / box_size;
  require(nx > 0 && ny > 0, ErrorCode::EmptyTiling,
          "ROI " + std::to_string(roi.width) + "x" + std::to_string(roi.height) +
              " is smaller than one " + std::to_string(box_size) + "-pixel box");
  FeatureMatrix m;
  for (std::string_view n : kTextureFeatureNames) m.columns.emplace_back(n);
  for (int by = 0; by < ny; ++by) {
    for (int bx = 0; bx < nx; ++bx) {
      const Box b{roi.x + bx * box_size, roi.y + by * box_size, box_size, box_size};
      m.add_row(texture_features(img, b));
      m.boxes.push_back({b.x, b.y});
    }
  }
  return m;
}

/// Collapses a box grid to one curve per feature: the mean over each grid
/// row, top to bottom.
inline std::map<std::string, std::vector<double>> reduce_map_to_curves(const FeatureMatrix& m) {
  require(!m.rows.empty() && m.boxes.size() == m.rows.size(), ErrorCode::NonRectangularGrid,
          "matrix carries no box metadata");
  std::map<int, std::vector<std::size_t>> by_row;
  for (std::size_t i = 0; i < m.boxes.size(); ++i) by_row[m.boxes[i].y].push_back(i);
  std::set<int> xs0;
  for (std::size_t i : by_row.begin()->second) xs0.insert(m.boxes[i].x);
  for (const auto& [y, idx] : by_row) {
    std::set<int> xs;
    for (std::size_t i : idx) xs.insert(m.boxes[i].x);
    require(xs == xs0 && idx.size() == xs0.size(), ErrorCode::NonRectangularGrid,
            "grid row at y=" + std::to_string(y) + " does not match the first row");
  }
  std::map<std::string, std::vector<double>> curves;
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    auto& curve = curves[m.columns[j]];
    for (const auto& [y, idx] : by_row) {
      double acc = 0.0;
      for (std::size_t i : idx) acc += m.rows[i][j];
      curve.push_back(acc / static_cast<double>(idx.size()));
    }
  }
  return curves;
}

/// Pools box rows into one per-mass row: "<feature>.mean", ".std"
/// (population), ".min", ".max" for every column.
inline FeatureVector aggregate_mass_texture(const FeatureMatrix& m) {
  require(!m.rows.empty(), ErrorCode::InvalidArgument, "aggregate needs at least one row");
  FeatureVector out;
  const double dn = static_cast<double>(m.rows.size());
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    const auto col = m.column(j);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= dn;
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    out.push(m.columns[j] + ".mean", mean);
    out.push(m.columns[j] + ".std", std::sqrt(var / dn));
    out.push(m.columns[j] + ".min", *lo);
    out.push(m.columns[j] + ".max", *hi);
  }
  return out;
}

}  // namespace cadkit
