#pragma once

// Confusion counts, ROC analysis, the repeated stratified random-split
// protocol, and one-vs-rest composition for four-class shape labels.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "json.hpp"

#include "cadkit/classify.hpp"
#include "cadkit/core.hpp"
#include "cadkit/features.hpp"

namespace cadkit {

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  double accuracy() const { return total() ? static_cast<double>(tp + tn) / static_cast<double>(total()) : 0.0; }
  double sensitivity() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
  double specificity() const { return tn + fp ? static_cast<double>(tn) / static_cast<double>(tn + fp) : 0.0; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

inline Confusion confusion(std::span<const int> preds, std::span<const int> truth) {
  require(preds.size() == truth.size(), ErrorCode::LengthMismatch, "prediction/truth length mismatch");
  Confusion c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (truth[i] == 1) (preds[i] == 1 ? c.tp : c.fn)++;
    else (preds[i] == 1 ? c.fp : c.tn)++;
  }
  return c;
}

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Step ROC over distinct score thresholds (descending, ties grouped) with
/// trapezoidal AUC. The area is accumulated in integer counts, so equal
/// rankings give bit-identical AUC.
inline RocCurve roc(std::span<const double> scores, std::span<const int> truth) {
  require(scores.size() == truth.size(), ErrorCode::LengthMismatch, "score/truth length mismatch");
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  });
  std::uint64_t pos = 0, neg = 0;
  for (int t : truth) (t == 1 ? pos : neg)++;
  require(pos > 0 && neg > 0, ErrorCode::SingleClass, "ROC needs both classes");

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::uint64_t tp = 0, fp = 0;
  unsigned __int128 twice_area = 0;  // sum dFP * (TP_prev + TP_next)
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    std::uint64_t dtp = 0, dfp = 0;
    for (; i < order.size() && scores[order[i]] == s; ++i) (truth[order[i]] == 1 ? dtp : dfp)++;
    twice_area += static_cast<unsigned __int128>(dfp) * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos)});
  }
  curve.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return curve;
}

struct CrossValPlan {
  std::size_t repetitions = 3;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;

  void validate() const {
    require(repetitions >= 1, ErrorCode::InvalidArgument, "repetitions must be >= 1");
    require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::InvalidArgument,
            "train fraction must be in (0,1)");
  }
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Per-class shuffle, then the first round(f * n_c) indices of each class go
/// to training (at least one per side). Index lists come back sorted.
inline Split stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  Split s;
  for (auto& [cls, idx] : by_class) {
    rng.shuffle(idx);
    const auto n = idx.size();
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.validation.insert(s.validation.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

inline std::uint64_t repetition_seed(std::uint64_t plan_seed, std::size_t rep) {
  return derive_seed(plan_seed, rep);
}

struct RepetitionResult {
  Confusion counts;
  double accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  RocCurve roc;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

inline MeanStd mean_std(std::span<const double> v) {
  MeanStd r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  for (double x : v) r.std += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(r.std / static_cast<double>(v.size()));
  return r;
}

struct EvalReport {
  ClassifierSpec spec;
  CrossValPlan plan;
  std::vector<RepetitionResult> repetitions;
  MeanStd accuracy, sensitivity, specificity, auc;
};

inline void summarize(EvalReport& r) {
  std::vector<double> acc, sen, spe, auc;
  for (const auto& rep : r.repetitions) {
    acc.push_back(rep.accuracy);
    sen.push_back(rep.sensitivity);
    spe.push_back(rep.specificity);
    auc.push_back(rep.roc.auc);
  }
  r.accuracy = mean_std(acc);
  r.sensitivity = mean_std(sen);
  r.specificity = mean_std(spe);
  r.auc = mean_std(auc);
}

/// Repeated stratified random splits: fit on train (standardization learned
/// there), evaluate hard votes and soft-score ROC on validation.
inline EvalReport crossval(const CrossValPlan& plan, const ClassifierSpec& spec,
                           const FeatureMatrix& m, std::span<const int> y) {
  plan.validate();
  require(y.size() == m.row_count(), ErrorCode::LengthMismatch, "label count differs from row count");
  std::size_t pos = 0, neg = 0;
  for (int v : y) (v == 1 ? pos : neg)++;
  require(pos >= 4 && neg >= 4, ErrorCode::DegenerateClass, "each class needs at least 4 samples");

  EvalReport report{spec, plan, {}, {}, {}, {}, {}};
  for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
    const auto split = stratified_split(y, plan.train_fraction, repetition_seed(plan.seed, rep));
    const auto train = m.select_rows(split.train);
    const auto valid = m.select_rows(split.validation);
    std::vector<int> y_train, y_valid;
    for (auto i : split.train) y_train.push_back(y[i]);
    for (auto i : split.validation) y_valid.push_back(y[i]);

    const auto model = fit(spec, train, y_train);
    const auto preds = predict_all(model, valid);
    std::vector<int> hard;
    std::vector<double> soft;
    for (const auto& p : preds) {
      hard.push_back(p.hard);
      soft.push_back(p.soft);
    }
    RepetitionResult r;
    r.counts = confusion(hard, y_valid);
    r.accuracy = r.counts.accuracy();
    r.sensitivity = r.counts.sensitivity();
    r.specificity = r.counts.specificity();
    r.roc = roc(soft, y_valid);
    report.repetitions.push_back(std::move(r));
  }
  summarize(report);
  return report;
}

inline nlohmann::json to_json(const EvalReport& r, bool include_roc = false) {
  nlohmann::json j;
  j["classifier"] = {{"kind", std::string(to_string(r.spec.kind))}, {"k", r.spec.k}};
  j["plan"] = {{"repetitions", r.plan.repetitions},
               {"train_fraction", r.plan.train_fraction},
               {"seed", r.plan.seed}};
  auto& reps = j["repetitions"] = nlohmann::json::array();
  for (const auto& rep : r.repetitions) {
    nlohmann::json e{{"accuracy", rep.accuracy},
                     {"sensitivity", rep.sensitivity},
                     {"specificity", rep.specificity},
                     {"auc", rep.roc.auc},
                     {"tp", rep.counts.tp},
                     {"fp", rep.counts.fp},
                     {"tn", rep.counts.tn},
                     {"fn", rep.counts.fn}};
    if (include_roc) {
      auto& pts = e["roc"] = nlohmann::json::array();
      for (const auto& p : rep.roc.points) pts.push_back({p.fpr, p.tpr});
    }
    reps.push_back(std::move(e));
  }
  auto ms = [](const MeanStd& m) { return nlohmann::json{{"mean", m.mean}, {"std", m.std}}; };
  j["aggregate"] = {{"accuracy", ms(r.accuracy)},
                    {"sensitivity", ms(r.sensitivity)},
                    {"specificity", ms(r.specificity)},
                    {"auc", ms(r.auc)}};
  return j;
}

// --- One-vs-rest -----------------------------------------------------------

/// One binary model per class present (that class vs the rest). Classes are
/// kept in ascending label order, which is also the argmax tie order.
struct OneVsRestModel {
  std::vector<int> classes;
  std::vector<ClassifierModel> models;
};

inline OneVsRestModel fit_one_vs_rest(const ClassifierSpec& spec, const FeatureMatrix& m,
                                      std::span<const int> classes) {
  require(classes.size() == m.row_count(), ErrorCode::LengthMismatch, "label count differs from row count");
  std::vector<int> present(classes.begin(), classes.end());
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  require(present.size() >= 2, ErrorCode::DegenerateClass, "one-vs-rest needs two classes");
  OneVsRestModel ovr;
  ovr.classes = present;
  for (int c : present) {
    std::vector<int> y(classes.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = classes[i] == c ? 1 : -1;
    ovr.models.push_back(fit(spec, m, y));
  }
  return ovr;
}

/// Index into ovr.classes of the highest-scoring class; the earliest class
/// wins ties.
inline std::size_t argmax_class(std::span<const double> soft_scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < soft_scores.size(); ++i) {
    if (soft_scores[i] > soft_scores[best]) best = i;
  }
  return best;
}

inline int predict_class(const OneVsRestModel& ovr, std::span<const double> x) {
  std::vector<double> soft;
  for (const auto& model : ovr.models) soft.push_back(predict_values(model, x).soft);
  return ovr.classes[argmax_class(soft)];
}

struct MulticlassReport {
  std::vector<int> classes;
  std::vector<double> overall_accuracy;                // per repetition
  std::vector<std::vector<double>> per_class_accuracy;  // [rep][class]: recall
  MeanStd overall;
};

/// Repeated stratified splits over the class labels; each repetition trains
/// a one-vs-rest ensemble and scores argmax predictions on validation.
inline MulticlassReport one_vs_rest(const CrossValPlan& plan, const ClassifierSpec& spec,
                                    const FeatureMatrix& m, std::span<const int> classes) {
  plan.validate();
  require(classes.size() == m.row_count(), ErrorCode::LengthMismatch, "label count differs from row count");
  std::map<int, std::size_t> counts;
  for (int c : classes) counts[c]++;
  for (const auto& [c, n] : counts) {
    require(n >= 4, ErrorCode::DegenerateClass,
            "class " + std::to_string(c) + " has fewer than 4 samples");
  }
  MulticlassReport report;
  for (const auto& [c, n] : counts) report.classes.push_back(c);
  for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
    const auto split = stratified_split(classes, plan.train_fraction, repetition_seed(plan.seed, rep));
    const auto train = m.select_rows(split.train);
    std::vector<int> y_train;
    for (auto i : split.train) y_train.push_back(classes[i]);
    const auto ovr = fit_one_vs_rest(spec, train, y_train);

    std::map<int, std::size_t> seen, hit;
    std::size_t correct = 0;
    for (auto i : split.validation) {
      const int pred = predict_class(ovr, m.rows[i]);
      seen[classes[i]]++;
      if (pred == classes[i]) {
        ++correct;
        hit[classes[i]]++;
      }
    }
    report.overall_accuracy.push_back(static_cast<double>(correct) /
                                      static_cast<double>(split.validation.size()));
    std::vector<double> per;
    for (int c : report.classes) {
      per.push_back(seen[c] ? static_cast<double>(hit[c]) / static_cast<double>(seen[c]) : 0.0);
    }
    report.per_class_accuracy.push_back(std::move(per));
  }
  report.overall = mean_std(report.overall_accuracy);
  return report;
}

}  // namespace cadkit
