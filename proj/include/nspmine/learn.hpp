#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nspmine/features.hpp"

namespace nsp {

struct DataSplit {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  std::uint64_t seed = 0;
};

// Stratified split: each class contributes round(n_class * test_fraction)
// rows to the test side, chosen by a seeded shuffle.
DataSplit split(const std::vector<std::string>& labels, double test_fraction,
                std::uint64_t seed);
// Stratified k-fold: each class is shuffled and dealt round-robin into k
// folds. Fold i tests on its own rows and trains on the rest.
std::vector<DataSplit> kfold(const std::vector<std::string>& labels,
                             std::size_t k, std::uint64_t seed);
// FNV-1a over the row lists, for logging that splits were shared.
std::uint64_t split_hash(const DataSplit& s);

enum class ModelKind { logistic, knn, gaussian_nb, decision_tree, random_forest };

std::string to_string(ModelKind kind);
// Short names lr, knn, nb, dt, rf or the full kind names.
ModelKind parse_model_kind(const std::string& text);

struct ModelSpec {
  ModelKind kind = ModelKind::logistic;
  // logistic
  std::size_t max_iter = 1000;
  double l2_strength = 1.0;  // inverse regularisation C, as in liblinear
  double tolerance = 1e-6;
  // knn
  std::size_t neighbors = 5;
  double minkowski_p = 2.0;
  // trees
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  std::size_t n_trees = 200;
  // naive bayes
  double variance_floor = 1e-9;

  bool standardize = false;
  std::uint64_t seed = 42;

  static ModelSpec defaults(ModelKind kind);
  void validate() const;
};

// Dense training data: row-major features, class indices into `classes`.
struct TrainingSet {
  std::vector<double> x;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::size_t> y;
  std::vector<std::string> classes;

  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * d, d};
  }
};

TrainingSet make_training_set(const FeatureMatrix& m,
                              const std::vector<std::size_t>& rows,
                              const std::vector<std::string>& classes);

struct LogisticModel {
  std::vector<double> weights;  // classes x d, row-major
  std::vector<double> bias;     // classes
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
};

struct KnnModel {
  std::vector<double> x;
  std::vector<std::size_t> y;
};

struct NaiveBayesModel {
  std::vector<double> log_prior;  // classes
  std::vector<double> mean;       // classes x d
  std::vector<double> variance;   // classes x d
};

struct TreeNode {
  // Internal nodes: go left when x[feature] <= threshold.
  std::int64_t feature = -1;
  double threshold = 0.0;
  std::int64_t left = -1;
  std::int64_t right = -1;
  std::vector<double> proba;  // leaves only
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestModel {
  std::vector<TreeModel> trees;
};

class TrainedModel {
 public:
  using Params = std::variant<LogisticModel, KnnModel, NaiveBayesModel,
                              TreeModel, ForestModel>;

  TrainedModel(ModelSpec spec, std::vector<std::string> classes,
               std::size_t features, Params params,
               std::vector<double> center = {}, std::vector<double> scale = {});

  const ModelSpec& spec() const { return spec_; }
  ModelKind kind() const { return spec_.kind; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t feature_count() const { return features_; }
  const Params& params() const { return params_; }

  // Class probabilities for one feature row. Rows sum to 1.
  std::vector<double> predict_proba(std::span<const double> features) const;

  void save(std::ostream& out) const;
  static TrainedModel load(std::istream& in);

 private:
  std::vector<double> prepare(std::span<const double> features) const;

  ModelSpec spec_;
  std::vector<std::string> classes_;
  std::size_t features_;
  Params params_;
  std::vector<double> center_;
  std::vector<double> scale_;
};

// Trains on the given matrix rows. Classes are the sorted distinct labels of
// those rows; fewer than two is a DataError.
TrainedModel train(const ModelSpec& spec, const FeatureMatrix& m,
                   const std::vector<std::size_t>& rows);
TrainedModel train(const ModelSpec& spec, const TrainingSet& data);

using ProbaMatrix = std::vector<std::vector<double>>;

ProbaMatrix predict_proba(const TrainedModel& model, const FeatureMatrix& m,
                          const std::vector<std::size_t>& rows);
// Argmax per row; ties go to the earlier class.
std::vector<std::string> predict(const TrainedModel& model,
                                 const FeatureMatrix& m,
                                 const std::vector<std::size_t>& rows);
std::size_t argmax(std::span<const double> proba);

// Mean softmax cross-entropy plus (1 / (2 C n)) * ||W||^2 (bias not
// penalised) and its gradient w.r.t. (W, b), laid out as W then b.
double logistic_objective(const TrainingSet& data, double l2_strength,
                          std::span<const double> params,
                          std::vector<double>* gradient);

}  // namespace nsp
