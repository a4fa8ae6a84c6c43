#pragma once

// Weighted majority rule (WMR) fusion of binary experts, the baseline
// combiners it is compared against, and a brute-force Bayes-optimal oracle.
//
// Votes are +1 / -1. Every rule resolves an exact tie to +1.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cadkit/classify.hpp"
#include "cadkit/core.hpp"
#include "cadkit/features.hpp"

namespace cadkit {

inline constexpr double kCompetencyEpsilon = 1e-6;

/// Per-expert probability of a correct vote, clamped to [eps, 1 - eps].
class CompetencyProfile {
 public:
  CompetencyProfile() = default;
  explicit CompetencyProfile(std::vector<double> p) : p_(std::move(p)) {
    require(!p_.empty(), ErrorCode::InvalidArgument, "competency profile needs at least one expert");
    for (double& v : p_) {
      require(std::isfinite(v), ErrorCode::InvalidArgument, "non-finite competency");
      v = std::clamp(v, kCompetencyEpsilon, 1.0 - kCompetencyEpsilon);
    }
  }

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

enum class WeightProfile { direct, odds, logodds };

inline std::string_view to_string(WeightProfile w) {
  switch (w) {
    case WeightProfile::direct: return "direct";
    case WeightProfile::odds: return "odds";
    case WeightProfile::logodds: return "logodds";
  }
  return "logodds";
}

/// direct: p, odds: p/(1-p), logodds: ln(p/(1-p)). Not normalized.
inline std::vector<double> wmr_weights(const CompetencyProfile& c, WeightProfile profile) {
  std::vector<double> w(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double p = c[i];
    switch (profile) {
      case WeightProfile::direct: w[i] = p; break;
      case WeightProfile::odds: w[i] = p / (1.0 - p); break;
      case WeightProfile::logodds: w[i] = std::log(p / (1.0 - p)); break;
    }
  }
  return w;
}

inline double logodds(double p) { return std::log(p / (1.0 - p)); }

inline double wmr_score(std::span<const int> votes, std::span<const double> weights,
                        double prior_logodds = 0.0) {
  require(votes.size() == weights.size(), ErrorCode::LengthMismatch,
          "vote count " + std::to_string(votes.size()) + " != weight count " +
              std::to_string(weights.size()));
  double s = prior_logodds;
  for (std::size_t i = 0; i < votes.size(); ++i) s += weights[i] * votes[i];
  return s;
}

inline int wmr_decide(std::span<const int> votes, std::span<const double> weights,
                      double prior_logodds = 0.0) {
  return wmr_score(votes, weights, prior_logodds) >= 0.0 ? 1 : -1;
}

/// argmax_y P(y) * prod_i (p_i if v_i == y else 1 - p_i), by direct products.
inline int bayes_optimal_decide(std::span<const int> votes, const CompetencyProfile& c,
                                double prior_pos = 0.5) {
  require(votes.size() == c.size(), ErrorCode::LengthMismatch, "vote count differs from profile");
  require(prior_pos > 0.0 && prior_pos < 1.0, ErrorCode::InvalidArgument, "prior must be in (0,1)");
  double post_pos = prior_pos, post_neg = 1.0 - prior_pos;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    post_pos *= votes[i] == 1 ? c[i] : 1.0 - c[i];
    post_neg *= votes[i] == -1 ? c[i] : 1.0 - c[i];
  }
  return post_pos >= post_neg ? 1 : -1;
}

inline int majority_decide(std::span<const int> votes) {
  long sum = 0;
  for (int v : votes) sum += v;
  return sum >= 0 ? 1 : -1;
}

enum class RankRule { max, min, median };

inline std::string_view to_string(RankRule r) {
  switch (r) {
    case RankRule::max: return "max";
    case RankRule::min: return "min";
    case RankRule::median: return "median";
  }
  return "median";
}

inline double rank_fuse(std::span<const double> scores, RankRule rule) {
  require(!scores.empty(), ErrorCode::InvalidArgument, "no scores to fuse");
  std::vector<double> s(scores.begin(), scores.end());
  std::sort(s.begin(), s.end());
  switch (rule) {
    case RankRule::max: return s.back();
    case RankRule::min: return s.front();
    case RankRule::median: {
      const std::size_t n = s.size();
      return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    }
  }
  return s.front();
}

inline int rank_decide(std::span<const double> scores, RankRule rule) {
  return rank_fuse(scores, rule) >= 0.5 ? 1 : -1;
}

/// Unweighted mean of soft scores, or the competency-weighted mean with
/// weights p_i / sum(p).
inline std::pair<int, double> average_decide(std::span<const double> scores,
                                             const CompetencyProfile* competencies = nullptr) {
  require(!scores.empty(), ErrorCode::InvalidArgument, "no scores to fuse");
  double fused = 0.0;
  if (competencies == nullptr) {
    for (double s : scores) fused += s;
    fused /= static_cast<double>(scores.size());
  } else {
    require(competencies->size() == scores.size(), ErrorCode::LengthMismatch,
            "score count differs from profile");
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      fused += (*competencies)[i] * scores[i];
      total += (*competencies)[i];
    }
    fused /= total;
  }
  return {fused >= 0.5 ? 1 : -1, fused};
}

inline double vote_to_score(int vote) { return vote == 1 ? 1.0 : 0.0; }

/// Accuracy of expert votes against truth, clamped into a competency.
inline CompetencyProfile competencies_from_votes(const std::vector<std::vector<int>>& votes,
                                                 std::span<const int> truth) {
  require(!votes.empty() && votes.size() == truth.size(), ErrorCode::LengthMismatch,
          "vote rows and truth labels differ in count");
  const std::size_t k = votes.front().size();
  std::vector<double> p(k, 0.0);
  for (std::size_t t = 0; t < votes.size(); ++t) {
    require(votes[t].size() == k, ErrorCode::LengthMismatch, "ragged vote matrix");
    for (std::size_t i = 0; i < k; ++i) p[i] += votes[t][i] == truth[t] ? 1.0 : 0.0;
  }
  for (double& v : p) v /= static_cast<double>(votes.size());
  return CompetencyProfile(std::move(p));
}

/// Validation accuracy of each trained model.
inline CompetencyProfile estimate_competencies(std::span<const ClassifierModel> models,
                                               const FeatureMatrix& validation,
                                               std::span<const int> truth) {
  require(validation.row_count() > 0 && validation.row_count() == truth.size(),
          ErrorCode::InvalidArgument, "validation set must be non-empty and labeled");
  std::vector<std::vector<int>> votes(validation.row_count());
  for (const auto& m : models) {
    const auto preds = predict_all(m, validation);
    for (std::size_t t = 0; t < preds.size(); ++t) votes[t].push_back(preds[t].hard);
  }
  return competencies_from_votes(votes, truth);
}

// --- Full combiner bank ----------------------------------------------------

inline constexpr std::array<std::string_view, 9> kCombinerNames{
    "wmr_direct", "wmr_odds", "wmr_logodds", "majority", "max",
    "min",        "median",   "average",     "weighted_average"};

/// Per-instance decisions of every combiner, in kCombinerNames order.
/// `scores` may be empty, in which case the hard votes mapped to {0, 1}
/// feed the rank and averaging rules.
inline std::vector<std::vector<int>> combine_all(const std::vector<std::vector<int>>& votes,
                                                 const std::vector<std::vector<double>>& scores,
                                                 const CompetencyProfile& c,
                                                 double prior_logodds = 0.0) {
  require(scores.empty() || scores.size() == votes.size(), ErrorCode::LengthMismatch,
          "score rows differ from vote rows");
  const auto w_direct = wmr_weights(c, WeightProfile::direct);
  const auto w_odds = wmr_weights(c, WeightProfile::odds);
  const auto w_log = wmr_weights(c, WeightProfile::logodds);
  std::vector<std::vector<int>> out(kCombinerNames.size(), std::vector<int>(votes.size()));
  std::vector<double> s;
  for (std::size_t t = 0; t < votes.size(); ++t) {
    const auto& v = votes[t];
    if (scores.empty()) {
      s.resize(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) s[i] = vote_to_score(v[i]);
    } else {
      s = scores[t];
    }
    // The direct and odds profiles have no natural prior term.
    out[0][t] = wmr_decide(v, w_direct);
    out[1][t] = wmr_decide(v, w_odds);
    out[2][t] = wmr_decide(v, w_log, prior_logodds);
    out[3][t] = majority_decide(v);
    out[4][t] = rank_decide(s, RankRule::max);
    out[5][t] = rank_decide(s, RankRule::min);
    out[6][t] = rank_decide(s, RankRule::median);
    out[7][t] = average_decide(s).first;
    out[8][t] = average_decide(s, &c).first;
  }
  return out;
}

/// Fraction of the 2^K vote patterns on which logodds WMR (with the matching
/// prior) and the Bayes oracle agree. Only defined for K <= 20.
inline double wmr_bayes_agreement(const CompetencyProfile& c, double prior_pos = 0.5) {
  const std::size_t k = c.size();
  require(k <= 20, ErrorCode::InvalidArgument, "exhaustive check limited to 20 experts");
  const auto w = wmr_weights(c, WeightProfile::logodds);
  const double prior = logodds(prior_pos);
  std::vector<int> v(k);
  std::size_t agree = 0;
  const std::size_t patterns = std::size_t{1} << k;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    for (std::size_t i = 0; i < k; ++i) v[i] = (mask >> i) & 1 ? 1 : -1;
    agree += wmr_decide(v, w, prior) == bayes_optimal_decide(v, c, prior_pos);
  }
  return static_cast<double>(agree) / static_cast<double>(patterns);
}

}  // namespace cadkit
