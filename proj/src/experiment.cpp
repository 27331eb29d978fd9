#include "nspmine/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nspmine/error.hpp"
#include "nspmine/parallel.hpp"
#include "nspmine/random.hpp"

namespace nsp {

using nlohmann::json;

namespace {

const std::set<std::string> kUnimplemented{"svm", "mlp", "gbm"};

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + name + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError("stage " + name + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage " + name + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError("stage " + name + ": " + e.what());
  }
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

void write_json(const std::filesystem::path& p, const json& j) {
  auto out = open_out(p);
  out << j.dump(2) << '\n';
}

double num_or_null(double v) { return v; }

}  // namespace

bool is_unimplemented_classifier(const std::string& name) {
  return kUnimplemented.count(name) != 0;
}

MiningConfig MiningPlan::resolve(std::size_t class_sequences, const std::string& label) const {
  double base = minsup;
  if (auto it = per_class_minsup.find(label); it != per_class_minsup.end()) base = it->second;
  if (relative) base *= static_cast<double>(class_sequences);
  MiningConfig cfg = MiningConfig::for_mode(mode, base, gap, ratio, decay);
  cfg.max_level = max_level;
  cfg.max_patterns = max_patterns;
  cfg.validate();
  return cfg;
}

void ExperimentPlan::validate() const {
  if (mining.empty()) throw ConfigError("plan needs at least one mining config");
  if (classifiers.empty()) throw ConfigError("plan needs at least one classifier");
  if (!synth && encoded_inputs.empty()) throw ConfigError("plan needs a corpus source");
  std::set<std::string> names;
  for (const auto& m : mining) {
    validate_label(m.name);
    if (!names.insert(m.name).second) throw ConfigError("duplicate mining config " + m.name);
    if (m.decay && m.mode != MiningMode::gonpm_plus) {
      throw ConfigError("decay factors only apply to gonpm-plus (" + m.name + ")");
    }
    if (m.ratio && m.mode != MiningMode::gonpm) {
      throw ConfigError("ratio only applies to gonpm (" + m.name + ")");
    }
    m.resolve(1, "");
  }
  for (const auto& c : classifiers) {
    if (!is_unimplemented_classifier(c)) parse_model_kind(c);
  }
  for (const auto& [a, b] : compare) {
    if (!names.count(a) || !names.count(b)) {
      throw ConfigError("compare pair names an unknown config: " + a + " / " + b);
    }
  }
  if (!(test_fraction > 0 && test_fraction < 1)) throw ConfigError("bad test fraction");
  if (cv_folds == 1) throw ConfigError("cross-validation needs at least 2 folds");
  if (selection.cap_min > selection.cap_max) throw ConfigError("cap minimum exceeds maximum");
}

ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan plan;
  try {
    reject_unknown_keys(j, {"seed", "corpus", "mining", "features", "classifiers",
                            "standardize", "split", "compare"},
                        "plan");
    plan.seed = j.value("seed", plan.seed);
    const json& corpus = j.at("corpus");
    reject_unknown_keys(corpus, {"synth", "encoded"}, "corpus");
    if (corpus.contains("synth")) plan.synth = synth_spec_from_json(corpus.at("synth"));
    for (const auto& p : corpus.value("encoded", json::array())) {
      plan.encoded_inputs.emplace_back(p.get<std::string>());
    }
    for (const auto& m : j.at("mining")) {
      reject_unknown_keys(m, {"name", "mode", "minsup", "relative", "per_class_minsup", "gap",
                              "ratio", "decay", "max_level", "max_patterns"},
                          "mining config");
      MiningPlan mp;
      mp.mode = parse_mining_mode(m.at("mode").get<std::string>());
      mp.name = m.value("name", to_string(mp.mode));
      mp.minsup = m.at("minsup");
      mp.relative = m.value("relative", false);
      mp.per_class_minsup =
          m.value("per_class_minsup", std::map<std::string, double>{});
      if (m.contains("gap")) mp.gap = {m.at("gap").at(0), m.at("gap").at(1)};
      if (m.contains("ratio")) mp.ratio = m.at("ratio").get<double>();
      if (m.contains("decay")) mp.decay = m.at("decay").get<std::vector<double>>();
      if (m.contains("max_level")) mp.max_level = m.at("max_level").get<std::size_t>();
      if (m.contains("max_patterns")) mp.max_patterns = m.at("max_patterns").get<std::size_t>();
      plan.mining.push_back(std::move(mp));
    }
    if (j.contains("features")) {
      const json& f = j.at("features");
      reject_unknown_keys(f, {"min_length", "cap", "allow_undersized", "normalize"}, "features");
      plan.selection.min_length = f.value("min_length", plan.selection.min_length);
      if (f.contains("cap")) {
        plan.selection.cap_min = f.at("cap").at(0);
        plan.selection.cap_max = f.at("cap").at(1);
      }
      plan.selection.allow_undersized = f.value("allow_undersized", false);
      const std::string norm = f.value("normalize", "none");
      if (norm == "length") {
        plan.normalization = Normalization::length;
      } else if (norm != "none") {
        throw ConfigError("normalize must be none or length");
      }
    }
    if (j.contains("classifiers")) {
      plan.classifiers = j.at("classifiers").get<std::vector<std::string>>();
    }
    plan.standardize = j.value("standardize", false);
    if (j.contains("split")) {
      const json& s = j.at("split");
      reject_unknown_keys(s, {"test_fraction", "cv"}, "split");
      plan.test_fraction = s.value("test_fraction", plan.test_fraction);
      plan.cv_folds = s.value("cv", std::size_t{0});
    }
    for (const auto& pair : j.value("compare", json::array())) {
      plan.compare.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

json plan_to_json(const ExperimentPlan& plan) {
  json corpus = json::object();
  if (plan.synth) corpus["synth"] = synth_spec_to_json(*plan.synth);
  if (!plan.encoded_inputs.empty()) {
    json enc = json::array();
    for (const auto& p : plan.encoded_inputs) enc.push_back(p.string());
    corpus["encoded"] = enc;
  }
  json mining = json::array();
  for (const auto& m : plan.mining) {
    json jm{{"name", m.name},
            {"mode", to_string(m.mode)},
            {"minsup", m.minsup},
            {"relative", m.relative},
            {"gap", {m.gap.min_gap, m.gap.max_gap}}};
    if (!m.per_class_minsup.empty()) jm["per_class_minsup"] = m.per_class_minsup;
    if (m.ratio) jm["ratio"] = *m.ratio;
    if (m.decay) jm["decay"] = *m.decay;
    if (m.max_level) jm["max_level"] = *m.max_level;
    if (m.max_patterns) jm["max_patterns"] = *m.max_patterns;
    mining.push_back(std::move(jm));
  }
  json compare = json::array();
  for (const auto& [a, b] : plan.compare) compare.push_back({a, b});
  return {{"seed", plan.seed},
          {"corpus", corpus},
          {"mining", mining},
          {"features",
           {{"min_length", plan.selection.min_length},
            {"cap", {plan.selection.cap_min, plan.selection.cap_max}},
            {"allow_undersized", plan.selection.allow_undersized},
            {"normalize", plan.normalization == Normalization::length ? "length" : "none"}}},
          {"classifiers", plan.classifiers},
          {"standardize", plan.standardize},
          {"split", {{"test_fraction", plan.test_fraction}, {"cv", plan.cv_folds}}},
          {"compare", compare}};
}

std::map<std::string, MiningResult> mine_per_class(const Corpus& train, const MiningPlan& plan) {
  const auto& labels = train.labels();
  std::vector<MiningResult> results(labels.size());
  parallel_for(labels.size(), [&](std::size_t i) {
    const Corpus sub = train.with_label(labels[i]);
    results[i] = mine(sub, plan.resolve(sub.size(), labels[i]));
  });
  std::map<std::string, MiningResult> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.emplace(labels[i], std::move(results[i]));
  return out;
}

namespace {

// Probabilities re-indexed onto the full class list (a model only knows the
// classes present in its training rows).
ProbaMatrix align_proba(const TrainedModel& model, const ProbaMatrix& raw,
                        const std::vector<std::string>& classes) {
  std::vector<std::size_t> target;
  for (const auto& c : model.classes()) {
    target.push_back(static_cast<std::size_t>(
        std::find(classes.begin(), classes.end(), c) - classes.begin()));
  }
  ProbaMatrix out;
  for (const auto& row : raw) {
    std::vector<double> full(classes.size(), 0.0);
    for (std::size_t c = 0; c < row.size(); ++c) full[target[c]] = row[c];
    out.push_back(std::move(full));
  }
  return out;
}

}  // namespace

PartitionOutcome evaluate_partition(const Corpus& corpus, const DataSplit& s,
                                    const MiningPlan& mining, const ExperimentPlan& plan) {
  PartitionOutcome out;
  const Corpus train_corpus = corpus.subset(s.train_rows);
  out.mined = stage("mine[" + mining.name + "]",
                    [&] { return mine_per_class(train_corpus, mining); });
  out.catalog = stage("select[" + mining.name + "]",
                      [&] { return select_patterns(out.mined, plan.selection); });
  out.matrix = stage("featurize[" + mining.name + "]",
                     [&] { return featurize(corpus, out.catalog, plan.normalization); });
  const auto& classes = corpus.labels();
  std::vector<std::string> truth;
  for (std::size_t r : s.test_rows) truth.push_back(out.matrix.row_labels[r]);
  for (const auto& name : plan.classifiers) {
    if (is_unimplemented_classifier(name)) continue;
    stage("train[" + mining.name + "/" + name + "]", [&] {
      ModelSpec spec = ModelSpec::defaults(parse_model_kind(name));
      spec.standardize = plan.standardize;
      spec.seed = derive_seed(plan.seed, "model/" + name);
      auto model = train(spec, out.matrix, s.train_rows);
      auto proba = align_proba(model, predict_proba(model, out.matrix, s.test_rows), classes);
      out.reports.push_back(evaluate(name, truth, proba, classes));
      out.models.push_back(std::move(model));
    });
  }
  return out;
}

json metrics_to_json(const MetricsReport& r) {
  json per_class = json::array();
  for (std::size_t c = 0; c < r.prf.per_class.size(); ++c) {
    const auto& s = r.prf.per_class[c];
    json warnings = json::array();
    if (s.precision_undefined) warnings.push_back("precision 0/0 reported as 0");
    if (s.recall_undefined) warnings.push_back("recall 0/0 reported as 0");
    per_class.push_back({{"label", s.label},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"f1", s.f1},
                         {"support", s.support},
                         {"auc", num_or_null(r.auc.per_class[c])},
                         {"auprc", num_or_null(r.auprc.per_class[c])},
                         {"warnings", warnings}});
  }
  return {{"classifier", r.classifier},
          {"accuracy", r.prf.accuracy},
          {"headline_average", "weighted"},
          {"precision", {{"macro", r.prf.precision_macro}, {"weighted", r.prf.precision_weighted}}},
          {"recall",
           {{"macro", r.prf.recall_macro},
            {"weighted", r.prf.recall_weighted},
            {"micro", r.prf.recall_micro}}},
          {"f1", {{"macro", r.prf.f1_macro}, {"weighted", r.prf.f1_weighted}}},
          {"auc_ovr_macro", r.auc.macro},
          {"auprc_macro", r.auprc.macro},
          {"auc_skipped_classes", r.auc.skipped},
          {"auprc_skipped_classes", r.auprc.skipped},
          {"per_class", per_class},
          {"confusion", {{"classes", r.confusion.classes}, {"counts", r.confusion.counts}}}};
}

namespace {

// ROC points (fpr, tpr) per class at every distinct score, for external plotting.
json roc_points(const std::vector<std::string>& truth, const ProbaMatrix& proba,
                const std::vector<std::string>& classes) {
  json out = json::object();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<std::pair<double, bool>> sc;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      sc.emplace_back(proba[i][c], truth[i] == classes[c]);
      pos += truth[i] == classes[c];
    }
    const std::size_t neg = sc.size() - pos;
    if (pos == 0 || neg == 0) continue;
    std::sort(sc.begin(), sc.end(), [](auto& a, auto& b) { return a.first > b.first; });
    json pts = json::array({json::array({0.0, 0.0})});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < sc.size();) {
      std::size_t j = i;
      while (j < sc.size() && sc[j].first == sc[i].first) {
        sc[j].second ? ++tp : ++fp;
        ++j;
      }
      pts.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                     static_cast<double>(tp) / static_cast<double>(pos)});
      i = j;
    }
    out[classes[c]] = pts;
  }
  return out;
}

json split_json(const DataSplit& s) {
  std::ostringstream h;
  h << std::hex << split_hash(s);
  return {{"hash", h.str()}, {"train_rows", s.train_rows}, {"test_rows", s.test_rows}};
}

std::string hash_hex(const DataSplit& s) {
  std::ostringstream h;
  h << std::hex << split_hash(s);
  return h.str();
}

Corpus load_corpus(const ExperimentPlan& plan) {
  if (plan.synth) return generate(*plan.synth);
  Corpus merged;
  for (const auto& path : plan.encoded_inputs) {
    const Corpus part = read_encoded_files(path);
    for (const auto& s : part.sequences()) merged.add(s);
  }
  return merged;
}

}  // namespace

json run_experiment(const ExperimentPlan& plan, const std::filesystem::path& out_dir) {
  using Clock = std::chrono::steady_clock;
  plan.validate();
  std::filesystem::create_directories(out_dir);
  auto log = open_out(out_dir / "log.txt");
  auto elapsed = [t0 = Clock::now()] {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };
  auto note = [&](const std::string& msg) {
    log << "[" << std::fixed << elapsed() << "s] " << msg << '\n';
    log.flush();
  };

  write_json(out_dir / "config.snapshot", plan_to_json(plan));
  const Corpus corpus = stage("corpus", [&] { return load_corpus(plan); });
  if (corpus.labels().size() < 2) throw DataError("stage corpus: need at least two classes");
  if (plan.synth) write_encoded_files(corpus, out_dir / "corpus.txt");
  note("corpus: " + std::to_string(corpus.size()) + " sequences, " +
       std::to_string(corpus.labels().size()) + " classes");

  std::vector<std::string> labels;
  for (const auto& s : corpus.sequences()) labels.push_back(s.label);
  const DataSplit main_split = stage("split", [&] { return split(labels, plan.test_fraction, plan.seed); });
  const std::vector<DataSplit> folds =
      plan.cv_folds ? stage("split", [&] { return kfold(labels, plan.cv_folds, plan.seed); })
                    : std::vector<DataSplit>{};
  {
    json sj{{"main", split_json(main_split)}, {"folds", json::array()}};
    for (const auto& f : folds) sj["folds"].push_back(split_json(f));
    write_json(out_dir / "splits.json", sj);
  }
  note("split hash " + hash_hex(main_split));

  std::vector<std::string> implemented;
  json not_implemented = json::array();
  for (const auto& c : plan.classifiers) {
    if (is_unimplemented_classifier(c)) {
      not_implemented.push_back(c);
    } else {
      implemented.push_back(c);
    }
  }

  json configs = json::object();
  std::map<std::string, std::map<std::string, double>> accuracy;  // config -> clf -> acc
  for (const auto& mining : plan.mining) {
    const auto dir = out_dir / mining.name;
    note("config " + mining.name + ": mining on split " + hash_hex(main_split));
    auto outcome = evaluate_partition(corpus, main_split, mining, plan);

    json mined_hist = json::object();
    for (const auto& [label, result] : outcome.mined) {
      auto out = open_out(dir / "patterns" / (label + ".txt"));
      write_patterns(out, result, label);
      auto tok = open_out(dir / "patterns" / (label + ".tokens"));
      write_pattern_tokens(tok, result);
      json h = json::object();
      for (const auto& level : result.levels) {
        if (!level.entries.empty()) h[std::to_string(level.level)] = level.entries.size();
      }
      mined_hist[label] = h;
      note("  " + label + ": " + std::to_string(result.pattern_count()) + " patterns in " +
           std::to_string(result.stats.seconds) + "s");
    }
    {
      auto out = open_out(dir / "catalog.txt");
      write_catalog(out, outcome.catalog);
      auto mout = open_out(dir / "matrix.csv");
      write_matrix(mout, outcome.matrix);
    }
    json hist = json::object();
    for (const auto& [len, n] : length_histogram(outcome.catalog)) hist[std::to_string(len)] = n;

    // Cross-validation repeats mining on each fold's training rows.
    std::map<std::string, std::vector<double>> cv_acc;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      note("  fold " + std::to_string(f) + " split " + hash_hex(folds[f]));
      auto fold_outcome = evaluate_partition(corpus, folds[f], mining, plan);
      for (const auto& r : fold_outcome.reports) cv_acc[r.classifier].push_back(r.prf.accuracy);
    }

    json cfg_acc = json::object();
    json cfg_cv = json::object();
    for (std::size_t i = 0; i < outcome.reports.size(); ++i) {
      const auto& report = outcome.reports[i];
      const auto& model = outcome.models[i];
      auto mout = open_out(dir / "models" / (report.classifier + ".model"));
      model.save(mout);

      json mj = metrics_to_json(report);
      mj["config"] = mining.name;
      mj["seed"] = plan.seed;
      mj["split_hash"] = hash_hex(main_split);
      mj["n_train"] = main_split.train_rows.size();
      mj["n_test"] = main_split.test_rows.size();
      mj["features"] = outcome.matrix.cols();
      {
        std::vector<std::string> truth;
        for (std::size_t r : main_split.test_rows) truth.push_back(outcome.matrix.row_labels[r]);
        auto proba = align_proba(model, predict_proba(model, outcome.matrix, main_split.test_rows),
                                 corpus.labels());
        mj["roc_points"] = roc_points(truth, proba, corpus.labels());
      }
      if (auto it = cv_acc.find(report.classifier); it != cv_acc.end()) {
        const auto& v = it->second;
        double mean = 0;
        for (double a : v) mean += a;
        mean /= static_cast<double>(v.size());
        double var = 0;
        for (double a : v) var += (a - mean) * (a - mean);
        const double sd = std::sqrt(var / static_cast<double>(v.size()));
        json cv{{"folds", v.size()}, {"accuracy", v}, {"mean", mean}, {"std", sd}};
        mj["cv"] = cv;
        cfg_cv[report.classifier] = cv;
      }
      write_json(dir / "metrics" / (report.classifier + ".json"), mj);
      cfg_acc[report.classifier] = report.prf.accuracy;
      accuracy[mining.name][report.classifier] = report.prf.accuracy;
    }
    configs[mining.name] = {{"mode", to_string(mining.mode)},
                            {"catalog_size", outcome.catalog.size()},
                            {"catalog_length_histogram", hist},
                            {"mined_length_histogram", mined_hist},
                            {"accuracy", cfg_acc},
                            {"cv", cfg_cv}};
    note("config " + mining.name + " done");
  }

  std::vector<std::pair<std::string, std::string>> pairs = plan.compare;
  if (pairs.empty()) {
    for (std::size_t i = 1; i < plan.mining.size(); ++i) {
      pairs.emplace_back(plan.mining[0].name, plan.mining[i].name);
    }
  }
  json aai_section = json::array();
  for (const auto& [a, b] : pairs) {
    std::vector<double> na, nb;
    json per = json::object();
    for (const auto& clf : implemented) {
      const double x = accuracy[a][clf], y = accuracy[b][clf];
      per[clf] = y > 0 ? (x - y) / y * 100.0 : std::numeric_limits<double>::quiet_NaN();
      if (y > 0) {
        na.push_back(x);
        nb.push_back(y);
      }
    }
    json entry{{"new", a}, {"base", b}, {"relative_gain_percent", per}};
    entry["aai_percent"] = na.empty() ? json(nullptr) : json(aai(na, nb));
    aai_section.push_back(std::move(entry));
  }

  json comparison{{"seed", plan.seed},
                  {"split_hash", hash_hex(main_split)},
                  {"fold_hashes", json::array()},
                  {"classifiers", implemented},
                  {"not_implemented", not_implemented},
                  {"configs", configs},
                  {"aai", aai_section}};
  for (const auto& f : folds) comparison["fold_hashes"].push_back(hash_hex(f));
  if (aai_section.empty()) comparison["aai_note"] = "single mining config: no AAI pairs";
  write_json(out_dir / "comparison.json", comparison);
  note("done");
  return comparison;
}

json build_report(const std::vector<std::filesystem::path>& runs) {
  json out{{"runs", json::array()}};
  std::map<std::string, std::map<std::string, std::vector<double>>> acc;
  for (const auto& dir : runs) {
    std::ifstream in(dir / "comparison.json");
    if (!in) throw IoError("cannot open " + (dir / "comparison.json").string());
    json c;
    try {
      in >> c;
    } catch (const json::exception& e) {
      throw ParseError((dir / "comparison.json").string() + ": " + e.what());
    }
    out["runs"].push_back({{"dir", dir.string()}, {"comparison", c}});
    for (const auto& [cfg, body] : c.at("configs").items()) {
      for (const auto& [clf, a] : body.at("accuracy").items()) {
        acc[cfg][clf].push_back(a.get<double>());
      }
    }
  }
  json mean = json::object();
  for (const auto& [cfg, by] : acc) {
    for (const auto& [clf, v] : by) {
      double m = 0;
      for (double a : v) m += a;
      mean[cfg][clf] = m / static_cast<double>(v.size());
    }
  }
  json pairs = json::array();
  for (const auto& [a, ba] : acc) {
    for (const auto& [b, bb] : acc) {
      if (a == b) continue;
      std::vector<double> na, nb;
      for (const auto& [clf, v] : ba) {
        if (!bb.count(clf)) continue;
        const double y = mean[b][clf].get<double>();
        if (y <= 0) continue;
        na.push_back(mean[a][clf].get<double>());
        nb.push_back(y);
      }
      if (!na.empty()) pairs.push_back({{"new", a}, {"base", b}, {"aai_percent", aai(na, nb)}});
    }
  }
  out["mean_accuracy"] = mean;
  out["aai"] = pairs;
  return out;
}

}  // namespace nsp
