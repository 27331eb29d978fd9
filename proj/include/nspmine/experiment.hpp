#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nspmine/features.hpp"
#include "nspmine/learn.hpp"
#include "nspmine/metrics.hpp"
#include "nspmine/miner.hpp"
#include "nspmine/synth.hpp"

namespace nsp {

// Mining settings as written in a plan: the threshold may be relative
// (fraction of the per-class sequence count) and is resolved per class.
struct MiningPlan {
  std::string name;
  MiningMode mode = MiningMode::gonpm_plus;
  double minsup = 2.0;
  bool relative = false;
  std::map<std::string, double> per_class_minsup;
  GapConstraint gap{0, 3};
  std::optional<double> ratio;
  std::optional<std::vector<double>> decay;
  std::optional<std::size_t> max_level;
  std::optional<std::size_t> max_patterns;

  MiningConfig resolve(std::size_t class_sequences,
                       const std::string& label) const;
};

struct ExperimentPlan {
  std::optional<SynthSpec> synth;
  std::vector<std::filesystem::path> encoded_inputs;
  std::vector<MiningPlan> mining;
  SelectionParams selection;
  Normalization normalization = Normalization::none;
  std::vector<std::string> classifiers{"lr", "knn", "nb", "dt", "rf"};
  bool standardize = false;
  double test_fraction = 0.2;
  std::size_t cv_folds = 0;  // 0 disables cross-validation
  std::vector<std::pair<std::string, std::string>> compare;  // (new, base)
  std::uint64_t seed = 42;

  void validate() const;
};

ExperimentPlan plan_from_json(const nlohmann::json& j);
nlohmann::json plan_to_json(const ExperimentPlan& plan);

// Mines every class of `train` separately (classes in parallel).
std::map<std::string, MiningResult> mine_per_class(const Corpus& train,
                                                   const MiningPlan& plan);

struct PartitionOutcome {
  std::map<std::string, MiningResult> mined;
  PatternCatalog catalog;
  FeatureMatrix matrix;
  std::vector<TrainedModel> models;
  std::vector<MetricsReport> reports;
};

// Mines the training rows, builds the catalog, featurizes every row and
// trains/evaluates each classifier on the split.
PartitionOutcome evaluate_partition(const Corpus& corpus, const DataSplit& s,
                                    const MiningPlan& mining,
                                    const ExperimentPlan& plan);

// Runs the whole plan and writes the run directory:
//   config.snapshot, splits.json, log.txt, comparison.json,
//   <config>/patterns/<class>.txt, <config>/catalog.txt, <config>/matrix.csv,
//   <config>/models/<clf>.model, <config>/metrics/<clf>.json
// Returns the comparison document.
nlohmann::json run_experiment(const ExperimentPlan& plan,
                              const std::filesystem::path& out_dir);

// Merges comparison.json files of several runs.
nlohmann::json build_report(const std::vector<std::filesystem::path>& runs);

nlohmann::json metrics_to_json(const MetricsReport& report);

// Names the spec lists but this build does not provide.
bool is_unimplemented_classifier(const std::string& name);

}  // namespace nsp
