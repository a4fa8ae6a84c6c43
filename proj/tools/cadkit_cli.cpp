// cadkit: command-line driver for synthesis, feature extraction, analysis,
// classifier evaluation and ensemble fusion.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cadkit/cadkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cadkit;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Library validation failures caused directly by a flag value are usage errors.
template <class F>
auto flag_value(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto& f : io::split(s)) {
    double v = 0;
    if (!io::parse_double(f, v)) throw UsageError(std::string("bad number in ") + what + ": '" + f + "'");
    out.push_back(v);
  }
  return out;
}

json read_json(const fs::path& p) {
  try {
    return json::parse(io::read_text(p));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, p.string() + ": " + e.what());
  }
}

std::vector<int> binary_targets(const FeatureMatrix& m, const std::string& positive, const fs::path& path) {
  if (!m.labels) throw Error(ErrorCode::InvalidArgument, path.string() + ": matrix has no label column");
  if (!positive.empty()) {
    for (int v = 0; v < 4; ++v) {
      if (label_name(m.labels->kind, v) == positive) return to_votes(*m.labels, v);
    }
    throw UsageError("--positive '" + positive + "' is not a label of this matrix");
  }
  if (m.labels->kind != LabelKind::diagnosis) {
    throw UsageError("shape-type labels need --positive <type> for a binary analysis");
  }
  return to_votes(*m.labels, 1);
}

// --- synth -------------------------------------------------------------------

struct SynthShapesArgs {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out, priors;
};

void cmd_synth_shapes(const SynthShapesArgs& a) {
  std::vector<double> priors(kUniformTypePriors.begin(), kUniformTypePriors.end());
  if (!a.priors.empty()) priors = parse_list(a.priors, "--priors");
  if (priors.size() != 4) throw UsageError("--priors needs four values");
  const ShapeGenConfig cfg;
  const auto samples = gen_shape_dataset(a.n, cfg, priors, a.seed);
  const fs::path dir = a.out;
  json manifest;
  manifest["seed"] = a.seed;
  manifest["type_priors"] = priors;
  json rates = json::object();
  for (ShapeType t : kShapeTypes) rates[std::string(to_string(t))] = cfg.params(t).malignancy_rate;
  manifest["malignancy_rates"] = rates;
  auto& list = manifest["samples"] = json::array();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "contour_%05zu.csv", i);
    io::write_atomic(dir / name, io::contour_to_csv(samples[i].contour));
    list.push_back({{"file", name},
                    {"shape_type", std::string(to_string(samples[i].type))},
                    {"diagnosis", samples[i].malignant ? "malignant" : "benign"},
                    {"seed", samples[i].seed}});
  }
  io::write_atomic(dir / "manifest.json", dump(manifest));
}

struct SynthExpertsArgs {
  std::size_t k = 0, trials = 0;
  std::uint64_t seed = 0;
  double prior = 0.5;
  std::string out, p, competencies_out;
};

void cmd_synth_experts(const SynthExpertsArgs& a) {
  ExpertGenConfig cfg;
  cfg.trials = a.trials;
  cfg.prior_pos = a.prior;
  if (!a.p.empty()) {
    cfg.competencies = parse_list(a.p, "--p");
    if (cfg.competencies.size() != a.k) throw UsageError("--p must list exactly --k competencies");
  } else {
    Rng rng(derive_seed(a.seed, 0xC0FFEE));
    for (std::size_t i = 0; i < a.k; ++i) cfg.competencies.push_back(rng.uniform(0.6, 0.9));
  }
  const auto data = gen_expert_votes(cfg, a.seed);
  io::write_atomic(a.out, io::vote_matrix_to_csv(data.votes, data.truth));
  if (!a.competencies_out.empty()) {
    io::write_atomic(a.competencies_out, dump({{"competencies", cfg.competencies}, {"prior_pos", cfg.prior_pos}}));
  }
}

struct SynthTexturesArgs {
  std::size_t n = 0;
  int size = 128;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_synth_textures(const SynthTexturesArgs& a) {
  const fs::path dir = a.out;
  json manifest;
  manifest["seed"] = a.seed;
  manifest["size"] = a.size;
  auto& list = manifest["samples"] = json::array();
  for (std::size_t i = 0; i < a.n; ++i) {
    // Alternating classes keep every dataset balanced.
    const auto s = derive_seed(a.seed, i);
    const auto cls = i % 2 == 1 ? TextureClass::malignant_like : TextureClass::benign_like;
    const auto img = gen_texture_image(cls, a.size, s);
    char name[32];
    std::snprintf(name, sizeof name, "texture_%05zu.pgm", i);
    io::write_atomic(dir / name, io::pgm_bytes(img));
    const bool mal = cls == TextureClass::malignant_like;
    list.push_back({{"file", name},
                    {"class", mal ? "malignant_like" : "benign_like"},
                    {"diagnosis", mal ? "malignant" : "benign"},
                    {"seed", s}});
  }
  io::write_atomic(dir / "manifest.json", dump(manifest));
}

// --- extract -----------------------------------------------------------------

struct ExtractShapeArgs {
  std::string manifest, out, label = "diagnosis", wavelet = "db4", carriers = "raw,env,dwt";
  std::vector<std::string> contours;
  std::size_t samples = kDefaultRadialSamples, levels = kDefaultWaveletLevels;
};

void cmd_extract_shape(const ExtractShapeArgs& a) {
  ShapeDescriptorConfig cfg;
  cfg.radial_samples = a.samples;
  cfg.wavelet_levels = a.levels;
  cfg.wavelet = flag_value([&] { return parse_wavelet(a.wavelet); });
  cfg.use_raw = cfg.use_envelope = cfg.use_wavelet = false;
  for (const auto& c : io::split(a.carriers)) {
    if (c == "raw") cfg.use_raw = true;
    else if (c == "env") cfg.use_envelope = true;
    else if (c == "dwt") cfg.use_wavelet = true;
    else throw UsageError("unknown carrier '" + c + "' (expected raw, env, dwt)");
  }
  if (a.label != "diagnosis" && a.label != "shape_type" && a.label != "none") {
    throw UsageError("--label must be diagnosis, shape_type or none");
  }
  FeatureMatrix m;
  auto add = [&](const fs::path& p) {
    const auto contour = io::read_contour(p);
    try {
      m.add_row(shape_descriptor(contour, cfg));
    } catch (const Error& e) {
      throw Error(e.code(), p.string() + ": " + e.what());
    }
  };
  if (!a.manifest.empty()) {
    const fs::path mpath = a.manifest;
    const auto manifest = read_json(mpath);
    std::optional<LabelColumn> labels;
    if (a.label != "none") labels = LabelColumn{a.label == "diagnosis" ? LabelKind::diagnosis : LabelKind::shape_type, {}};
    try {
      for (const auto& s : manifest.at("samples")) {
        add(mpath.parent_path() / s.at("file").get<std::string>());
        if (!labels) continue;
        if (labels->kind == LabelKind::diagnosis) {
          labels->values.push_back(s.at("diagnosis").get<std::string>() == "malignant" ? 1 : 0);
        } else {
          const auto t = parse_shape_type(s.at("shape_type").get<std::string>());
          if (!t) throw Error(ErrorCode::ParseError, mpath.string() + ": unknown shape type");
          labels->values.push_back(static_cast<int>(*t));
        }
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, mpath.string() + ": " + e.what());
    }
    m.labels = labels;
  } else {
    if (a.contours.empty()) throw UsageError("give --manifest or at least one --contour");
    for (const auto& c : a.contours) add(c);
  }
  io::write_atomic(a.out, io::feature_matrix_to_csv(m));
}

struct ExtractTextureArgs {
  std::string manifest, image, roi, out, curves;
  int box = 20;
  bool aggregate = false;
};

Box parse_roi(const std::string& s, const GrayImage& img) {
  if (s.empty()) return {0, 0, img.width(), img.height()};
  const auto v = parse_list(s, "--roi");
  if (v.size() != 4) throw UsageError("--roi needs x,y,width,height");
  return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]), static_cast<int>(v[3])};
}

void cmd_extract_texture(const ExtractTextureArgs& a) {
  if (!a.manifest.empty()) {
    const fs::path mpath = a.manifest;
    const auto manifest = read_json(mpath);
    FeatureMatrix m;
    m.labels = LabelColumn{LabelKind::diagnosis, {}};
    try {
      for (const auto& s : manifest.at("samples")) {
        const fs::path p = mpath.parent_path() / s.at("file").get<std::string>();
        const auto img = io::read_pgm(p);
        m.add_row(aggregate_mass_texture(box_feature_map(img, parse_roi(a.roi, img), a.box)));
        m.labels->values.push_back(s.at("diagnosis").get<std::string>() == "malignant" ? 1 : 0);
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, mpath.string() + ": " + e.what());
    }
    io::write_atomic(a.out, io::feature_matrix_to_csv(m));
    return;
  }
  if (a.image.empty()) throw UsageError("give --manifest or --image");
  const auto img = io::read_pgm(a.image);
  const auto map = box_feature_map(img, parse_roi(a.roi, img), a.box);
  if (!a.curves.empty()) {
    const auto curves = reduce_map_to_curves(map);
    std::string s = "feature,row,value\n";
    for (std::string_view name : kTextureFeatureNames) {
      const auto& c = curves.at(std::string(name));
      for (std::size_t i = 0; i < c.size(); ++i) {
        s += std::string(name) + "," + std::to_string(i) + "," + io::format_number(c[i]) + "\n";
      }
    }
    io::write_atomic(a.curves, s);
  }
  if (a.aggregate) {
    FeatureMatrix m;
    m.add_row(aggregate_mass_texture(map));
    io::write_atomic(a.out, io::feature_matrix_to_csv(m));
  } else {
    io::write_atomic(a.out, io::feature_matrix_to_csv(map));
  }
}

// --- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
  std::string in, out_prefix, positive, features, criterion = "wilks";
  std::size_t radii = 20, k = 5;
};

void cmd_analyze_rank(const AnalyzeArgs& a) {
  const auto m = io::read_feature_matrix(a.in);
  const auto y = binary_targets(m, a.positive, a.in);
  const auto ranking = rank_features_ttest(m, y);
  json j = json::array();
  std::string csv = "feature,statistic,p,rank\n";
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const auto& e = ranking.entries[i];
    j.push_back({{"feature", e.feature}, {"statistic", e.statistic}, {"p", e.p_value}, {"rank", i + 1}});
    csv += e.feature + "," + io::format_number(e.statistic) + "," + io::format_number(e.p_value) + "," +
           std::to_string(i + 1) + "\n";
  }
  io::write_atomic(a.out_prefix + ".rank.json", dump({{"test", "welch_t"}, {"ranking", j}}));
  io::write_atomic(a.out_prefix + ".rank.csv", csv);
}

FeatureMatrix feature_subset(const FeatureMatrix& m, const std::string& features) {
  if (features.empty()) return m;
  return m.select_columns(io::split(features));
}

void cmd_analyze_manova(const AnalyzeArgs& a) {
  const auto full = io::read_feature_matrix(a.in);
  if (!full.labels) throw Error(ErrorCode::InvalidArgument, a.in + ": matrix has no label column");
  const auto m = feature_subset(full, a.features);
  const auto r = manova_wilks(m, m.labels->values);
  json j{{"features", m.columns}, {"lambda", r.lambda}, {"F", r.f}, {"df1", r.df1}, {"df2", r.df2}, {"p", r.p}};
  // Univariate two-group case: Rao's F is the squared pooled-variance t.
  if (m.column_count() == 1) {
    std::map<int, std::vector<double>> groups;
    for (std::size_t i = 0; i < m.row_count(); ++i) groups[m.labels->values[i]].push_back(m.rows[i][0]);
    if (groups.size() == 2) {
      const auto& g1 = groups.begin()->second;
      const auto& g2 = groups.rbegin()->second;
      auto mv = [](const std::vector<double>& g) {
        double mu = 0, ss = 0;
        for (double v : g) mu += v;
        mu /= static_cast<double>(g.size());
        for (double v : g) ss += (v - mu) * (v - mu);
        return std::pair{mu, ss};
      };
      const auto [m1, s1] = mv(g1);
      const auto [m2, s2] = mv(g2);
      const double n1 = static_cast<double>(g1.size()), n2 = static_cast<double>(g2.size());
      const double sp = (s1 + s2) / (n1 + n2 - 2);
      const double t = (m1 - m2) / std::sqrt(sp * (1 / n1 + 1 / n2));
      j["pooled_t_squared"] = t * t;
      std::printf("manova: F = %.12g, pooled t^2 = %.12g\n", r.f, t * t);
    }
  }
  io::write_atomic(a.out_prefix + ".manova.json", dump(j));
}

void cmd_analyze_fractal(const AnalyzeArgs& a) {
  const auto m = feature_subset(io::read_feature_matrix(a.in), a.features);
  const auto z = standardize_fit_apply(m).front();
  const auto est = correlation_dimension(z, a.radii);
  io::write_atomic(a.out_prefix + ".fractal.json",
                   dump({{"dimension", est.dimension},
                         {"r_min", est.r_min},
                         {"r_max", est.r_max},
                         {"fit_r2", est.fit_r2},
                         {"samples", m.row_count()},
                         {"features", m.column_count()}}));
  io::write_atomic(a.out_prefix + ".fractal.csv",
                   "dimension,r_min,r_max,fit_r2\n" + io::format_number(est.dimension) + "," +
                       io::format_number(est.r_min) + "," + io::format_number(est.r_max) + "," +
                       io::format_number(est.fit_r2) + "\n");
}

void cmd_analyze_select(const AnalyzeArgs& a) {
  const auto m = io::read_feature_matrix(a.in);
  if (!m.labels) throw Error(ErrorCode::InvalidArgument, a.in + ": matrix has no label column");
  SelectionOptions opt;
  std::vector<int> labels = m.labels->values;
  if (a.criterion == "validation_accuracy") {
    opt.criterion = SelectionCriterion::validation_accuracy;
    labels = binary_targets(m, a.positive, a.in);
  } else if (a.criterion != "wilks") {
    throw UsageError("--criterion must be wilks or validation_accuracy");
  }
  const auto steps = select_features_forward(m, labels, std::min(a.k, m.column_count()), opt);
  json j = json::array();
  std::string csv = "step,feature,criterion\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    j.push_back({{"step", i + 1}, {"feature", steps[i].feature}, {"criterion", steps[i].criterion}});
    csv += std::to_string(i + 1) + "," + steps[i].feature + "," + io::format_number(steps[i].criterion) + "\n";
  }
  io::write_atomic(a.out_prefix + ".select.json", dump({{"criterion", a.criterion}, {"steps", j}}));
  io::write_atomic(a.out_prefix + ".select.csv", csv);
}

// --- train-eval ----------------------------------------------------------------

struct TrainEvalArgs {
  std::string in, out_prefix, classifier = "lda", positive;
  int k = 1;
  std::size_t reps = 3;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
};

void cmd_train_eval(const TrainEvalArgs& a) {
  const auto m = io::read_feature_matrix(a.in);
  if (!m.labels) throw Error(ErrorCode::InvalidArgument, a.in + ": matrix has no label column");
  const ClassifierSpec spec = flag_value([&] {
    const ClassifierSpec s{parse_classifier_kind(a.classifier), a.k};
    s.validate();
    return s;
  });
  const CrossValPlan plan{a.reps, a.train_fraction, a.seed};

  if (m.labels->kind == LabelKind::shape_type && a.positive.empty()) {
    const auto rep = one_vs_rest(plan, spec, m, m.labels->values);
    json classes = json::array();
    for (int c : rep.classes) classes.push_back(label_name(LabelKind::shape_type, c));
    io::write_atomic(a.out_prefix + ".report.json",
                     dump({{"mode", "one_vs_rest"},
                           {"classifier", {{"kind", a.classifier}, {"k", a.k}}},
                           {"plan", {{"repetitions", plan.repetitions}, {"train_fraction", plan.train_fraction}, {"seed", plan.seed}}},
                           {"classes", classes},
                           {"overall_accuracy", rep.overall_accuracy},
                           {"per_class_accuracy", rep.per_class_accuracy},
                           {"aggregate", {{"mean", rep.overall.mean}, {"std", rep.overall.std}}}}));
    return;
  }
  const auto y = binary_targets(m, a.positive, a.in);
  const auto report = crossval(plan, spec, m, y);
  auto j = to_json(report);
  j["mode"] = "binary";
  io::write_atomic(a.out_prefix + ".report.json", dump(j));
  std::string roc_csv = "rep,fpr,tpr\n";
  for (std::size_t r = 0; r < report.repetitions.size(); ++r) {
    for (const auto& p : report.repetitions[r].roc.points) {
      roc_csv += std::to_string(r) + "," + io::format_number(p.fpr) + "," + io::format_number(p.tpr) + "\n";
    }
  }
  io::write_atomic(a.out_prefix + ".roc.csv", roc_csv);
  io::write_atomic(a.out_prefix + ".model.json", dump(to_json(fit(spec, m, y))));
}

// --- combine -------------------------------------------------------------------

struct CombineArgs {
  std::string in, competencies, validation, out_prefix;
  double prior = 0.5;
  bool check_bayes = false, decisions = false;
};

void cmd_combine(const CombineArgs& a) {
  const auto vm = io::read_vote_matrix(a.in);
  CompetencyProfile c;
  if (!a.competencies.empty()) {
    try {
      c = CompetencyProfile(read_json(a.competencies).at("competencies").get<std::vector<double>>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, a.competencies + ": " + e.what());
    }
  } else {
    const auto val = io::read_vote_matrix(a.validation);
    c = competencies_from_votes(val.votes(), val.truth);
  }
  if (c.size() != vm.experts()) {
    throw Error(ErrorCode::LengthMismatch, "competency count " + std::to_string(c.size()) +
                                               " differs from expert count " + std::to_string(vm.experts()));
  }
  if (!(a.prior > 0.0 && a.prior < 1.0)) throw UsageError("--prior must lie in (0,1)");
  const auto votes = vm.votes();
  const auto decisions = combine_all(votes, vm.is_votes ? std::vector<std::vector<double>>{} : vm.values, c,
                                     logodds(a.prior));
  json rules = json::object();
  std::string csv = "rule,accuracy\n";
  for (std::size_t r = 0; r < decisions.size(); ++r) {
    std::size_t ok = 0;
    for (std::size_t t = 0; t < decisions[r].size(); ++t) ok += decisions[r][t] == vm.truth[t];
    const double acc = static_cast<double>(ok) / static_cast<double>(vm.truth.size());
    const std::string name(kCombinerNames[r]);
    rules[name] = {{"accuracy", acc}};
    if (a.decisions) rules[name]["decisions"] = decisions[r];
    csv += name + "," + io::format_number(acc) + "\n";
  }
  json j{{"instances", vm.truth.size()},
         {"experts", vm.experts()},
         {"input", vm.is_votes ? "votes" : "scores"},
         {"competencies", c.values()},
         {"prior_pos", a.prior},
         {"rules", rules}};
  if (a.check_bayes) {
    if (c.size() > 7) throw UsageError("--check-bayes supports at most 7 experts");
    const double agree = wmr_bayes_agreement(c, a.prior);
    j["bayes_check"] = {{"patterns", std::size_t{1} << c.size()}, {"agreement", agree}};
    std::printf("WMR-logodds / Bayes agreement over %zu patterns: %.2f%%\n", std::size_t{1} << c.size(), 100 * agree);
  }
  io::write_atomic(a.out_prefix + ".json", dump(j));
  io::write_atomic(a.out_prefix + ".csv", csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cadkit: mass contour and texture characterization, classification and ensemble fusion", "cadkit"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate synthetic contours, expert votes or texture images");
  synth->require_subcommand(1);
  SynthShapesArgs shapes;
  auto* s_shapes = synth->add_subcommand("shapes", "Four-type mass contours plus manifest.json");
  s_shapes->add_option("--n", shapes.n, "Number of contours")->required();
  s_shapes->add_option("--seed", shapes.seed, "Random seed")->required();
  s_shapes->add_option("--out", shapes.out, "Output directory")->default_val("shapes");
  s_shapes->add_option("--priors", shapes.priors, "Type priors round,lobulated,microlobulated,stellate");
  s_shapes->callback([&] { cmd_synth_shapes(shapes); });

  SynthExpertsArgs experts;
  auto* s_experts = synth->add_subcommand("experts", "Conditionally independent expert vote matrix (CSV)");
  s_experts->add_option("--k", experts.k, "Number of experts")->required()->check(CLI::PositiveNumber);
  s_experts->add_option("--trials", experts.trials, "Number of instances")->required();
  s_experts->add_option("--seed", experts.seed, "Random seed")->required();
  s_experts->add_option("--p", experts.p, "Comma-separated competencies (default: U[0.6,0.9] draws)");
  s_experts->add_option("--prior", experts.prior, "Positive-class prior")->default_val(0.5);
  s_experts->add_option("--out", experts.out, "Output CSV")->default_val("votes.csv");
  s_experts->add_option("--competencies-out", experts.competencies_out, "Write the true competencies as JSON");
  s_experts->callback([&] { cmd_synth_experts(experts); });

  SynthTexturesArgs textures;
  auto* s_tex = synth->add_subcommand("textures", "Benign-like / malignant-like texture PGMs plus manifest.json");
  s_tex->add_option("--n", textures.n, "Number of images")->required();
  s_tex->add_option("--size", textures.size, "Image side in pixels (>= 64)")->default_val(128);
  s_tex->add_option("--seed", textures.seed, "Random seed")->required();
  s_tex->add_option("--out", textures.out, "Output directory")->default_val("textures");
  s_tex->callback([&] { cmd_synth_textures(textures); });

  // extract
  auto* extract = app.add_subcommand("extract", "Compute feature matrices from contours or images");
  extract->require_subcommand(1);
  ExtractShapeArgs xs;
  auto* x_shape = extract->add_subcommand("shape", "Multi-carrier curve features of contours");
  auto* x_manifest = x_shape->add_option("--manifest", xs.manifest, "Manifest from 'synth shapes'");
  x_shape->add_option("--contour", xs.contours, "Contour CSV file(s)")->excludes(x_manifest);
  x_shape->add_option("--out", xs.out, "Output FeatureMatrix CSV")->required();
  x_shape->add_option("--label", xs.label, "diagnosis, shape_type or none (manifest mode)")->default_val("diagnosis");
  x_shape->add_option("--samples", xs.samples, "Radial samples (power of two)")->default_val(kDefaultRadialSamples);
  x_shape->add_option("--wavelet", xs.wavelet, "haar or db4")->default_val("db4");
  x_shape->add_option("--levels", xs.levels, "DWT levels")->default_val(kDefaultWaveletLevels);
  x_shape->add_option("--carriers", xs.carriers, "Subset of raw,env,dwt")->default_val("raw,env,dwt");
  x_shape->callback([&] { cmd_extract_shape(xs); });

  ExtractTextureArgs xt;
  auto* x_tex = extract->add_subcommand("texture", "20-function texture bank over box tilings");
  auto* xt_manifest = x_tex->add_option("--manifest", xt.manifest, "Manifest from 'synth textures' (one aggregated row per image)");
  x_tex->add_option("--image", xt.image, "Single PGM image")->excludes(xt_manifest);
  x_tex->add_option("--roi", xt.roi, "x,y,width,height (default: whole image)");
  x_tex->add_option("--box", xt.box, "Box size in pixels")->default_val(20);
  x_tex->add_option("--out", xt.out, "Output FeatureMatrix CSV")->required();
  x_tex->add_flag("--aggregate", xt.aggregate, "Single image: emit the pooled per-mass row instead of the box map");
  x_tex->add_option("--curves", xt.curves, "Single image: also write row-mean curves per feature");
  x_tex->callback([&] { cmd_extract_texture(xt); });

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Feature ranking, MANOVA, fractal dimension, forward selection");
  analyze->require_subcommand(1);
  AnalyzeArgs an;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--in", an.in, "Labeled FeatureMatrix CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-prefix", an.out_prefix, "Output path prefix")->required();
  };
  auto* a_rank = analyze->add_subcommand("rank", "Welch t-test ranking");
  add_common(a_rank);
  a_rank->add_option("--positive", an.positive, "Label treated as the positive class");
  a_rank->callback([&] { cmd_analyze_rank(an); });
  auto* a_manova = analyze->add_subcommand("manova", "Wilks' lambda over label groups");
  add_common(a_manova);
  a_manova->add_option("--features", an.features, "Comma-separated feature subset");
  a_manova->callback([&] { cmd_analyze_manova(an); });
  auto* a_fractal = analyze->add_subcommand("fractal", "Correlation dimension of the standardized dataset");
  add_common(a_fractal);
  a_fractal->add_option("--features", an.features, "Comma-separated feature subset");
  a_fractal->add_option("--radii", an.radii, "Number of log-spaced radii")->default_val(20);
  a_fractal->callback([&] { cmd_analyze_fractal(an); });
  auto* a_select = analyze->add_subcommand("select", "Greedy forward feature selection");
  add_common(a_select);
  a_select->add_option("--k", an.k, "Features to select")->default_val(5);
  a_select->add_option("--criterion", an.criterion, "wilks or validation_accuracy")->default_val("wilks");
  a_select->add_option("--positive", an.positive, "Positive label for validation_accuracy");
  a_select->callback([&] { cmd_analyze_select(an); });

  // train-eval
  TrainEvalArgs te;
  auto* train = app.add_subcommand("train-eval", "Repeated stratified train/validation evaluation");
  train->add_option("--in", te.in, "Labeled FeatureMatrix CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--out-prefix", te.out_prefix, "Output path prefix")->required();
  train->add_option("--classifier", te.classifier, "lda, lsmd or knn")->default_val("lda");
  train->add_option("--k", te.k, "knn neighbours (odd)")->default_val(1);
  train->add_option("--reps", te.reps, "Repetitions")->default_val(3);
  train->add_option("--train-fraction", te.train_fraction, "Training fraction")->default_val(0.7);
  train->add_option("--seed", te.seed, "Split seed")->required();
  train->add_option("--positive", te.positive, "Positive label (forces a binary evaluation)");
  train->callback([&] { cmd_train_eval(te); });

  // combine
  CombineArgs cb;
  auto* combine = app.add_subcommand("combine", "Fuse expert votes/scores with every combination rule");
  combine->add_option("--in", cb.in, "Vote or score matrix CSV")->required()->check(CLI::ExistingFile);
  auto* c_comp = combine->add_option("--competencies", cb.competencies, "JSON with a 'competencies' array");
  auto* c_val = combine->add_option("--validation", cb.validation, "Validation vote matrix to estimate competencies");
  c_comp->excludes(c_val);
  combine->add_option("--prior", cb.prior, "Positive-class prior for WMR-logodds")->default_val(0.5);
  combine->add_flag("--check-bayes", cb.check_bayes, "Exhaustively compare WMR-logodds with the Bayes oracle");
  combine->add_flag("--decisions", cb.decisions, "Include per-rule decisions in the JSON report");
  combine->add_option("--out-prefix", cb.out_prefix, "Output path prefix")->required();
  combine->callback([&] {
    if (cb.competencies.empty() && cb.validation.empty()) throw UsageError("give --competencies or --validation");
    cmd_combine(cb);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
