#pragma once

// Fisher LDA, least-squares minimum distance (LSMD) and k-NN binary
// classifiers behind one fit/predict surface. Targets are +1 / -1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cadkit/core.hpp"
#include "cadkit/features.hpp"

namespace cadkit {

enum class ClassifierKind { lda, lsmd, knn };

inline std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::lda: return "lda";
    case ClassifierKind::lsmd: return "lsmd";
    case ClassifierKind::knn: return "knn";
  }
  return "lda";
}

inline ClassifierKind parse_classifier_kind(std::string_view s) {
  if (s == "lda") return ClassifierKind::lda;
  if (s == "lsmd") return ClassifierKind::lsmd;
  if (s == "knn") return ClassifierKind::knn;
  throw Error(ErrorCode::InvalidArgument, "unknown classifier '" + std::string(s) + "'");
}

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::lda;
  int k = 1;  // knn only; odd and >= 1

  void validate() const {
    if (kind == ClassifierKind::knn) {
      require(k >= 1 && k % 2 == 1, ErrorCode::InvalidArgument,
              "knn k must be odd and >= 1, got " + std::to_string(k));
    }
  }
};

inline constexpr double kRidge = 1e-8;

/// Per-feature z-score learned on training rows. Constant features
/// (std == 0) are flagged and always map to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // population std; 0 marks a constant feature

  static Standardizer fit(const std::vector<std::vector<double>>& rows) {
    require(!rows.empty(), ErrorCode::InvalidArgument, "cannot standardize an empty matrix");
    const std::size_t d = rows.front().size();
    const double n = static_cast<double>(rows.size());
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 0.0);
    for (const auto& r : rows)
      for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
    for (double& m : s.mean) m /= n;
    for (const auto& r : rows)
      for (std::size_t j = 0; j < d; ++j) s.scale[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
    for (std::size_t j = 0; j < d; ++j) {
      const double sd = std::sqrt(s.scale[j] / n);
      s.scale[j] = sd > 1e-12 * std::max(1.0, std::abs(s.mean[j])) ? sd : 0.0;
    }
    return s;
  }

  std::vector<double> apply(std::span<const double> x) const {
    require(x.size() == mean.size(), ErrorCode::ColumnMismatch, "feature count mismatch");
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      z[j] = scale[j] > 0.0 ? (x[j] - mean[j]) / scale[j] : 0.0;
    }
    return z;
  }

  FeatureMatrix apply(const FeatureMatrix& m) const {
    FeatureMatrix out = m;
    for (auto& r : out.rows) r = apply(r);
    return out;
  }
};

/// Fits z-score parameters on `train` and applies them to `train` and every
/// matrix in `others`. Returns the transformed matrices in the same order.
inline std::vector<FeatureMatrix> standardize_fit_apply(const FeatureMatrix& train,
                                                        std::span<const FeatureMatrix> others = {}) {
  const auto s = Standardizer::fit(train.rows);
  std::vector<FeatureMatrix> out{s.apply(train)};
  for (const auto& m : others) {
    require(m.columns == train.columns, ErrorCode::ColumnMismatch, "column sets differ");
    out.push_back(s.apply(m));
  }
  return out;
}

struct Prediction {
  int hard = 1;  // +1 iff soft >= 0.5
  double soft = 0.5;
};

inline Prediction prediction_from_soft(double soft) { return {soft >= 0.5 ? 1 : -1, soft}; }

inline double logistic(double d) { return 1.0 / (1.0 + std::exp(-d)); }

struct ClassifierModel {
  ClassifierSpec spec;
  std::vector<std::string> columns;
  Standardizer standardizer;
  // lda: discriminant w.z - offset; lsmd: w.z + offset (offset is the bias)
  std::vector<double> weights;
  double offset = 0.0;
  // knn: standardized training rows and their +1/-1 targets
  std::vector<std::vector<double>> train_rows;
  std::vector<int> train_targets;
};

namespace detail {

inline void check_binary_targets(std::span<const int> y, std::size_t rows) {
  require(y.size() == rows, ErrorCode::LengthMismatch, "label count differs from row count");
  std::size_t pos = 0, neg = 0;
  for (int v : y) {
    require(v == 1 || v == -1, ErrorCode::InvalidArgument, "targets must be +1 or -1");
    (v == 1 ? pos : neg)++;
  }
  require(pos > 0 && neg > 0, ErrorCode::DegenerateClass, "both classes must be present");
}

inline Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return x;
}

inline void fit_lda(ClassifierModel& m, const Eigen::MatrixXd& z, std::span<const int> y) {
  const Eigen::Index d = z.cols();
  Eigen::VectorXd mu_pos = Eigen::VectorXd::Zero(d), mu_neg = Eigen::VectorXd::Zero(d);
  double n_pos = 0, n_neg = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    if (y[static_cast<std::size_t>(i)] == 1) {
      mu_pos += z.row(i).transpose();
      n_pos += 1;
    } else {
      mu_neg += z.row(i).transpose();
      n_neg += 1;
    }
  }
  mu_pos /= n_pos;
  mu_neg /= n_neg;
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Eigen::VectorXd c =
        z.row(i).transpose() - (y[static_cast<std::size_t>(i)] == 1 ? mu_pos : mu_neg);
    sw.noalias() += c * c.transpose();
  }
  // Pooled covariance, so w.z - offset is the Gaussian log-likelihood ratio.
  sw /= std::max(1.0, n_pos + n_neg - 2.0);
  sw.diagonal().array() += kRidge;
  const Eigen::LLT<Eigen::MatrixXd> llt(sw);
  require(llt.info() == Eigen::Success, ErrorCode::SingularWithinScatter,
          "within-class scatter is singular even after ridge");
  const Eigen::VectorXd w = llt.solve(mu_pos - mu_neg);
  m.weights.assign(w.data(), w.data() + w.size());
  m.offset = 0.5 * w.dot(mu_pos + mu_neg);
}

inline void fit_lsmd(ClassifierModel& m, const Eigen::MatrixXd& z, std::span<const int> y) {
  const Eigen::Index n = z.rows(), d = z.cols();
  Eigen::MatrixXd x(n, d + 1);
  x.leftCols(d) = z;
  x.col(d).setOnes();
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) t(i) = y[static_cast<std::size_t>(i)];
  Eigen::MatrixXd normal = x.transpose() * x;
  normal.diagonal().array() += kRidge;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  require(ldlt.info() == Eigen::Success, ErrorCode::SingularWithinScatter,
          "normal equations are singular");
  const Eigen::VectorXd beta = ldlt.solve(x.transpose() * t);
  m.weights.assign(beta.data(), beta.data() + d);
  m.offset = beta(d);
}

}  // namespace detail

/// Trains a model on raw (unstandardized) rows; standardization is learned
/// here and stored in the model.
inline ClassifierModel fit(const ClassifierSpec& spec, const FeatureMatrix& m, std::span<const int> y) {
  spec.validate();
  detail::check_binary_targets(y, m.row_count());
  if (spec.kind != ClassifierKind::knn) {
    require(m.row_count() >= m.column_count() + 2, ErrorCode::InsufficientSamples,
            "linear classifiers need at least feature count + 2 samples");
  } else {
    require(static_cast<std::size_t>(spec.k) <= m.row_count(), ErrorCode::InvalidArgument,
            "knn k exceeds the training set size");
  }
  ClassifierModel model;
  model.spec = spec;
  model.columns = m.columns;
  model.standardizer = Standardizer::fit(m.rows);
  std::vector<std::vector<double>> z;
  z.reserve(m.rows.size());
  for (const auto& r : m.rows) z.push_back(model.standardizer.apply(r));
  switch (spec.kind) {
    case ClassifierKind::lda: detail::fit_lda(model, detail::to_eigen(z), y); break;
    case ClassifierKind::lsmd: detail::fit_lsmd(model, detail::to_eigen(z), y); break;
    case ClassifierKind::knn:
      model.train_rows = std::move(z);
      model.train_targets.assign(y.begin(), y.end());
      break;
  }
  return model;
}

/// Signed linear discriminant for lda/lsmd models; positive favours +1.
inline double discriminant(const ClassifierModel& model, std::span<const double> x) {
  const auto z = model.standardizer.apply(x);
  double d = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) d += model.weights[j] * z[j];
  return model.spec.kind == ClassifierKind::lda ? d - model.offset : d + model.offset;
}

/// Prediction from a raw value row in model column order. `exclude_row`
/// drops one knn training row (leave-one-out evaluation).
inline Prediction predict_values(const ClassifierModel& model, std::span<const double> x,
                                 std::optional<std::size_t> exclude_row = std::nullopt) {
  require(x.size() == model.columns.size(), ErrorCode::ColumnMismatch,
          "expected " + std::to_string(model.columns.size()) + " features, got " +
              std::to_string(x.size()));
  if (model.spec.kind != ClassifierKind::knn) return prediction_from_soft(logistic(discriminant(model, x)));

  const auto z = model.standardizer.apply(x);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(model.train_rows.size());
  for (std::size_t i = 0; i < model.train_rows.size(); ++i) {
    if (exclude_row && *exclude_row == i) continue;
    double acc = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double diff = z[j] - model.train_rows[i][j];
      acc += diff * diff;
    }
    dist.emplace_back(acc, i);
  }
  const auto k = static_cast<std::size_t>(model.spec.k);
  require(dist.size() >= k, ErrorCode::InvalidArgument, "not enough training rows for k");
  // (distance, index) ordering breaks distance ties by lower row index.
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) pos += model.train_targets[dist[i].second] == 1;
  return prediction_from_soft(static_cast<double>(pos) / static_cast<double>(k));
}

inline Prediction predict(const ClassifierModel& model, const FeatureVector& x) {
  require(x.names == model.columns, ErrorCode::ColumnMismatch,
          "feature columns do not match the model");
  return predict_values(model, x.values);
}

inline std::vector<Prediction> predict_all(const ClassifierModel& model, const FeatureMatrix& m) {
  require(m.columns == model.columns, ErrorCode::ColumnMismatch,
          "feature columns do not match the model");
  std::vector<Prediction> out;
  out.reserve(m.row_count());
  for (const auto& r : m.rows) out.push_back(predict_values(model, r));
  return out;
}

// --- JSON persistence ------------------------------------------------------

inline nlohmann::json to_json(const ClassifierModel& m) {
  nlohmann::json j;
  j["spec"] = {{"kind", std::string(to_string(m.spec.kind))}, {"k", m.spec.k}};
  j["columns"] = m.columns;
  j["standardization"] = {{"mean", m.standardizer.mean}, {"std", m.standardizer.scale}};
  if (m.spec.kind == ClassifierKind::knn) {
    j["parameters"] = {{"train_rows", m.train_rows}, {"train_targets", m.train_targets}};
  } else {
    j["parameters"] = {{"weights", m.weights},
                       {m.spec.kind == ClassifierKind::lda ? "threshold" : "bias", m.offset}};
  }
  return j;
}

inline ClassifierModel model_from_json(const nlohmann::json& j) {
  try {
    ClassifierModel m;
    m.spec.kind = parse_classifier_kind(j.at("spec").at("kind").get<std::string>());
    m.spec.k = j.at("spec").at("k").get<int>();
    m.columns = j.at("columns").get<std::vector<std::string>>();
    m.standardizer.mean = j.at("standardization").at("mean").get<std::vector<double>>();
    m.standardizer.scale = j.at("standardization").at("std").get<std::vector<double>>();
    const auto& p = j.at("parameters");
    if (m.spec.kind == ClassifierKind::knn) {
      m.train_rows = p.at("train_rows").get<std::vector<std::vector<double>>>();
      m.train_targets = p.at("train_targets").get<std::vector<int>>();
    } else {
      m.weights = p.at("weights").get<std::vector<double>>();
      m.offset = p.at(m.spec.kind == ClassifierKind::lda ? "threshold" : "bias").get<double>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace cadkit
