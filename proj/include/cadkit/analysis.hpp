#pragma once

// Feature significance ranking, MANOVA (Wilks' lambda), dataset correlation
// dimension, and greedy forward feature selection.

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cadkit/classify.hpp"
#include "cadkit/core.hpp"
#include "cadkit/evaluation.hpp"
#include "cadkit/features.hpp"

namespace cadkit {

struct RankEntry {
  std::string feature;
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Entries sorted by ascending p-value.
struct FeatureRanking {
  std::vector<RankEntry> entries;
};

/// Stand-in magnitude for an infinite t statistic (zero variance, unequal
/// class means).
inline constexpr double kInfiniteStatistic = 1e308;

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Two-sided Welch test of mean(a) - mean(b).
inline WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  require(a.size() >= 2 && b.size() >= 2, ErrorCode::DegenerateClass,
          "each class needs at least 2 samples");
  auto moments = [](std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::pair{m, s / static_cast<double>(x.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double se2 = va / na + vb / nb;
  WelchResult r;
  if (se2 <= 0.0) {
    if (ma == mb) return r;
    r.t = ma > mb ? kInfiniteStatistic : -kInfiniteStatistic;
    r.df = na + nb - 2.0;
    r.p = 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
  const boost::math::students_t dist(r.df);
  r.p = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))), 0.0, 1.0);
  return r;
}

/// Per-feature Welch t (positive class minus negative class), ranked by
/// ascending p; ties go to the larger |t|, then to column order.
inline FeatureRanking rank_features_ttest(const FeatureMatrix& m, std::span<const int> y) {
  require(y.size() == m.row_count(), ErrorCode::LengthMismatch, "label count differs from row count");
  FeatureRanking ranking;
  std::vector<std::size_t> column_of;
  for (std::size_t j = 0; j < m.column_count(); ++j) {
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < m.row_count(); ++i) (y[i] == 1 ? pos : neg).push_back(m.rows[i][j]);
    const auto w = welch_t_test(pos, neg);
    ranking.entries.push_back({m.columns[j], w.t, w.p});
    column_of.push_back(j);
  }
  std::vector<std::size_t> order(ranking.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = ranking.entries[a];
    const auto& eb = ranking.entries[b];
    if (ea.p_value != eb.p_value) return ea.p_value < eb.p_value;
    return std::abs(ea.statistic) > std::abs(eb.statistic);
  });
  FeatureRanking sorted;
  for (auto i : order) sorted.entries.push_back(ranking.entries[i]);
  return sorted;
}

struct ManovaResult {
  double lambda = 1.0;
  double f = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;
  double p = 1.0;
};

/// Wilks' lambda det(W)/det(W+B) with Rao's F approximation. `groups`
/// holds arbitrary integer group ids, one per row.
inline ManovaResult manova_wilks(const FeatureMatrix& m, std::span<const int> groups) {
  require(groups.size() == m.row_count(), ErrorCode::LengthMismatch, "group count differs from row count");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) members[groups[i]].push_back(i);
  const auto n = static_cast<double>(m.row_count());
  const auto p = static_cast<double>(m.column_count());
  const auto g = static_cast<double>(members.size());
  require(g >= 2, ErrorCode::DegenerateClass, "MANOVA needs at least two groups");
  require(p >= 1 && n > p + g, ErrorCode::InsufficientSamples,
          "MANOVA needs more samples than features + groups");

  const Eigen::MatrixXd x = detail::to_eigen(m.rows);
  const Eigen::RowVectorXd grand = x.colwise().mean();
  const auto d = x.cols();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d), b = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [id, idx] : members) {
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(d);
    for (auto i : idx) mu += x.row(static_cast<Eigen::Index>(i));
    mu /= static_cast<double>(idx.size());
    for (auto i : idx) {
      const Eigen::RowVectorXd c = x.row(static_cast<Eigen::Index>(i)) - mu;
      w.noalias() += c.transpose() * c;
    }
    const Eigen::RowVectorXd c = mu - grand;
    b.noalias() += static_cast<double>(idx.size()) * (c.transpose() * c);
  }
  // Relative conditioning check on W; a rank-deficient W makes lambda 0/0.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w, Eigen::EigenvaluesOnly);
  const double emax = eig.eigenvalues().maxCoeff();
  const double emin = eig.eigenvalues().minCoeff();
  require(emax > 0.0 && emin > 1e-10 * emax, ErrorCode::SingularScatter,
          "within-group scatter matrix is singular");
  const Eigen::LLT<Eigen::MatrixXd> lw(w), lt(w + b);
  require(lw.info() == Eigen::Success && lt.info() == Eigen::Success, ErrorCode::SingularScatter,
          "scatter matrix is not positive definite");
  auto logdet = [](const Eigen::LLT<Eigen::MatrixXd>& l) {
    return 2.0 * l.matrixLLT().diagonal().array().log().sum();
  };
  ManovaResult r;
  r.lambda = std::exp(logdet(lw) - logdet(lt));

  const double q = g - 1.0;
  const double denom = p * p + q * q - 5.0;
  const double t = denom > 0.0 ? std::sqrt((p * p * q * q - 4.0) / denom) : 1.0;
  const double ws = n - 1.0 - (p + g) / 2.0;
  r.df1 = p * q;
  r.df2 = ws * t - r.df1 / 2.0 + 1.0;
  const double root = std::pow(r.lambda, 1.0 / t);
  r.f = (1.0 - root) / root * (r.df2 / r.df1);
  if (r.df2 > 0.0 && std::isfinite(r.f)) {
    const boost::math::fisher_f dist(r.df1, r.df2);
    r.p = std::clamp(boost::math::cdf(boost::math::complement(dist, std::max(0.0, r.f))), 0.0, 1.0);
  } else {
    r.p = r.f > 0.0 ? 0.0 : 1.0;
  }
  return r;
}

struct FractalEstimate {
  double dimension = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double fit_r2 = 1.0;
};

/// Pairwise-distance quantiles bounding the log-log fit region.
inline constexpr double kFractalLowQuantile = 0.005;
inline constexpr double kFractalHighQuantile = 0.05;

/// Grassberger-Procaccia correlation dimension: least-squares slope of
/// log C(r) against log r over `r_count` log-spaced radii between the
/// 0.5th and 5th percentiles of the pairwise distances.
inline FractalEstimate correlation_dimension(const FeatureMatrix& m, std::size_t r_count = 20) {
  require(m.row_count() >= 100, ErrorCode::TooFewSamples,
          "correlation dimension needs at least 100 samples");
  require(r_count >= 3, ErrorCode::InvalidArgument, "need at least 3 radii");
  const std::size_t n = m.row_count();
  std::vector<double> dist;
  dist.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m.column_count(); ++k) {
        const double diff = m.rows[i][k] - m.rows[j][k];
        acc += diff * diff;
      }
      dist.push_back(std::sqrt(acc));
    }
  }
  std::sort(dist.begin(), dist.end());
  FractalEstimate est;
  if (dist.back() == 0.0) return est;  // all points identical

  auto quantile = [&](double q) {
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(dist.size() - 1));
    return dist[idx];
  };
  const auto first_positive = std::upper_bound(dist.begin(), dist.end(), 0.0);
  est.r_min = std::max(quantile(kFractalLowQuantile), *first_positive);
  est.r_max = quantile(kFractalHighQuantile);
  if (!(est.r_max > est.r_min)) est.r_max = quantile(0.5);
  if (!(est.r_max > est.r_min)) return est;

  std::vector<double> lx, ly;
  const double total = static_cast<double>(dist.size());
  for (std::size_t k = 0; k < r_count; ++k) {
    const double frac = static_cast<double>(k) / static_cast<double>(r_count - 1);
    const double r = std::exp(std::log(est.r_min) + frac * (std::log(est.r_max) - std::log(est.r_min)));
    const auto count = static_cast<double>(std::upper_bound(dist.begin(), dist.end(), r) - dist.begin());
    if (count <= 0.0) continue;
    lx.push_back(std::log(r));
    ly.push_back(std::log(count / total));
  }
  if (lx.size() < 2) return est;
  const double k = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  est.dimension = std::max(0.0, sxy / sxx);
  est.fit_r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return est;
}

enum class SelectionCriterion { wilks, validation_accuracy };

struct SelectionOptions {
  SelectionCriterion criterion = SelectionCriterion::wilks;
  // validation_accuracy only
  ClassifierSpec classifier{};
  CrossValPlan plan{};
};

struct SelectionStep {
  std::string feature;
  double criterion = 0.0;  // lambda (lower is better) or mean accuracy (higher is better)
};

/// Greedy forward selection. Each step adds the candidate that most improves
/// the criterion; candidates are visited in feature-name order and only a
/// strict improvement displaces the current best. A candidate whose subset
/// is singular is scored as no improvement.
inline std::vector<SelectionStep> select_features_forward(const FeatureMatrix& m, std::span<const int> labels,
                                                          std::size_t k, const SelectionOptions& opt = {}) {
  require(k <= m.column_count(), ErrorCode::InvalidArgument, "k exceeds the feature count");
  std::vector<std::string> remaining = m.columns;
  std::sort(remaining.begin(), remaining.end());
  std::vector<std::string> chosen;
  std::vector<SelectionStep> steps;
  const bool minimize = opt.criterion == SelectionCriterion::wilks;
  double current = minimize ? 1.0 : 0.0;

  auto evaluate = [&](const std::vector<std::string>& subset) {
    const auto sub = m.select_columns(subset);
    if (opt.criterion == SelectionCriterion::wilks) {
      try {
        return manova_wilks(sub, labels).lambda;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::SingularScatter) return current;
        throw;
      }
    }
    std::vector<int> y(labels.begin(), labels.end());
    return crossval(opt.plan, opt.classifier, sub, y).accuracy.mean;
  };

  while (chosen.size() < k) {
    std::size_t best = remaining.size();
    double best_value = 0.0;
    for (std::size_t c = 0; c < remaining.size(); ++c) {
      auto subset = chosen;
      subset.push_back(remaining[c]);
      const double v = evaluate(subset);
      if (best == remaining.size() || (minimize ? v < best_value : v > best_value)) {
        best = c;
        best_value = v;
      }
    }
    // Report the running best so the sequence never worsens.
    current = minimize ? std::min(current, best_value) : std::max(current, best_value);
    chosen.push_back(remaining[best]);
    steps.push_back({remaining[best], current});
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return steps;
}

}  // namespace cadkit
