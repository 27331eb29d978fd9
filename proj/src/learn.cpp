#include "nspmine/learn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "nspmine/error.hpp"
#include "nspmine/random.hpp"

namespace nsp {

namespace {

std::map<std::string, std::vector<std::size_t>> rows_by_class(
    const std::vector<std::string>& labels) {
  std::map<std::string, std::vector<std::size_t>> by;
  for (std::size_t i = 0; i < labels.size(); ++i) by[labels[i]].push_back(i);
  return by;
}

}  // namespace

DataSplit split(const std::vector<std::string>& labels, double test_fraction,
                std::uint64_t seed) {
  if (!(test_fraction > 0 && test_fraction < 1)) {
    throw ConfigError("test fraction must lie strictly between 0 and 1");
  }
  DataSplit s;
  s.seed = seed;
  Rng rng(seed, "split");
  for (auto& [label, rows] : rows_by_class(labels)) {
    rng.shuffle(rows);
    const auto n_test = static_cast<std::size_t>(
        std::lround(static_cast<double>(rows.size()) * test_fraction));
    s.test_rows.insert(s.test_rows.end(), rows.begin(),
                       rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    s.train_rows.insert(s.train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test),
                        rows.end());
  }
  std::sort(s.train_rows.begin(), s.train_rows.end());
  std::sort(s.test_rows.begin(), s.test_rows.end());
  return s;
}

std::vector<DataSplit> kfold(const std::vector<std::string>& labels, std::size_t k,
                             std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  auto by = rows_by_class(labels);
  for (const auto& [label, rows] : by) {
    if (rows.size() < k) {
      throw DataError("class " + label + " has " + std::to_string(rows.size()) +
                      " rows, fewer than " + std::to_string(k) + " folds");
    }
  }
  std::vector<std::size_t> fold_of(labels.size());
  Rng rng(seed, "kfold");
  for (auto& [label, rows] : by) {
    rng.shuffle(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) fold_of[rows[i]] = i % k;
  }
  std::vector<DataSplit> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    folds[f].seed = seed;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      (fold_of[r] == f ? folds[f].test_rows : folds[f].train_rows).push_back(r);
    }
  }
  return folds;
}

std::uint64_t split_hash(const DataSplit& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  for (auto r : s.train_rows) mix(r);
  mix(~std::uint64_t{0});
  for (auto r : s.test_rows) mix(r);
  return h;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::logistic: return "logistic";
    case ModelKind::knn: return "knn";
    case ModelKind::gaussian_nb: return "gaussian_nb";
    case ModelKind::decision_tree: return "decision_tree";
    case ModelKind::random_forest: return "random_forest";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "lr" || text == "logistic") return ModelKind::logistic;
  if (text == "knn") return ModelKind::knn;
  if (text == "nb" || text == "gaussian_nb") return ModelKind::gaussian_nb;
  if (text == "dt" || text == "decision_tree") return ModelKind::decision_tree;
  if (text == "rf" || text == "random_forest") return ModelKind::random_forest;
  throw ConfigError("unknown classifier '" + text + "'");
}

ModelSpec ModelSpec::defaults(ModelKind kind) {
  ModelSpec s;
  s.kind = kind;
  return s;
}

void ModelSpec::validate() const {
  if (max_iter == 0) throw ConfigError("max_iter must be positive");
  if (!(l2_strength > 0)) throw ConfigError("L2 strength must be positive");
  if (!(tolerance > 0)) throw ConfigError("tolerance must be positive");
  if (neighbors == 0) throw ConfigError("k must be positive");
  if (!(minkowski_p >= 1)) throw ConfigError("Minkowski p must be >= 1");
  if (min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
  if (min_samples_leaf == 0) throw ConfigError("min_samples_leaf must be positive");
  if (n_trees == 0) throw ConfigError("forest needs at least one tree");
  if (!(variance_floor > 0)) throw ConfigError("variance floor must be positive");
}

TrainingSet make_training_set(const FeatureMatrix& m, const std::vector<std::size_t>& rows,
                              const std::vector<std::string>& classes) {
  TrainingSet t;
  t.n = rows.size();
  t.d = m.cols();
  t.classes = classes;
  t.x.reserve(t.n * t.d);
  for (std::size_t r : rows) {
    auto row = m.row(r);
    t.x.insert(t.x.end(), row.begin(), row.end());
    auto it = std::lower_bound(classes.begin(), classes.end(), m.row_labels[r]);
    if (it == classes.end() || *it != m.row_labels[r]) {
      throw DataError("label '" + m.row_labels[r] + "' missing from class list");
    }
    t.y.push_back(static_cast<std::size_t>(it - classes.begin()));
  }
  return t;
}

TrainedModel::TrainedModel(ModelSpec spec, std::vector<std::string> classes,
                           std::size_t features, Params params, std::vector<double> center,
                           std::vector<double> scale)
    : spec_(spec),
      classes_(std::move(classes)),
      features_(features),
      params_(std::move(params)),
      center_(std::move(center)),
      scale_(std::move(scale)) {}

std::vector<double> TrainedModel::prepare(std::span<const double> features) const {
  if (features.size() != features_) {
    throw DataError("model expects " + std::to_string(features_) + " features, got " +
                    std::to_string(features.size()));
  }
  std::vector<double> x(features.begin(), features.end());
  if (!center_.empty()) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = (x[j] - center_[j]) / scale_[j];
  }
  return x;
}

namespace {

void softmax_inplace(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

double minkowski(std::span<const double> a, std::span<const double> b, double p) {
  double acc = 0;
  if (p == 2.0) {
    for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(acc);
  }
  if (p == 1.0) {
    for (std::size_t j = 0; j < a.size(); ++j) acc += std::fabs(a[j] - b[j]);
    return acc;
  }
  for (std::size_t j = 0; j < a.size(); ++j) acc += std::pow(std::fabs(a[j] - b[j]), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace

std::vector<double> tree_proba(const TreeModel& tree, std::span<const double> x);

std::vector<double> TrainedModel::predict_proba(std::span<const double> features) const {
  const auto x = prepare(features);
  const std::size_t k = classes_.size();
  const std::size_t d = features_;
  std::vector<double> out(k, 0.0);

  if (auto* lr = std::get_if<LogisticModel>(&params_)) {
    for (std::size_t c = 0; c < k; ++c) {
      double z = lr->bias[c];
      const double* w = lr->weights.data() + c * d;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
      out[c] = z;
    }
    softmax_inplace(out);
  } else if (auto* knn = std::get_if<KnnModel>(&params_)) {
    const std::size_t n = knn->y.size();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = {minkowski(x, std::span<const double>(knn->x.data() + i * d, d),
                           spec_.minkowski_p),
                 i};
    }
    const std::size_t take = std::min(spec_.neighbors, n);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take),
                      dist.end());
    for (std::size_t i = 0; i < take; ++i) {
      out[knn->y[dist[i].second]] += 1.0 / (dist[i].first + 1e-12);
    }
    const double total = std::accumulate(out.begin(), out.end(), 0.0);
    for (double& v : out) v /= total;
  } else if (auto* nb = std::get_if<NaiveBayesModel>(&params_)) {
    constexpr double kLog2Pi = 1.8378770664093453;
    for (std::size_t c = 0; c < k; ++c) {
      double ll = nb->log_prior[c];
      for (std::size_t j = 0; j < d; ++j) {
        const double var = nb->variance[c * d + j];
        const double diff = x[j] - nb->mean[c * d + j];
        ll -= 0.5 * (kLog2Pi + std::log(var)) + diff * diff / (2 * var);
      }
      out[c] = ll;
    }
    softmax_inplace(out);
  } else if (auto* tree = std::get_if<TreeModel>(&params_)) {
    out = tree_proba(*tree, x);
  } else if (auto* forest = std::get_if<ForestModel>(&params_)) {
    for (const auto& t : forest->trees) {
      const auto p = tree_proba(t, x);
      for (std::size_t c = 0; c < k; ++c) out[c] += p[c];
    }
    for (double& v : out) v /= static_cast<double>(forest->trees.size());
  }
  return out;
}

double logistic_objective(const TrainingSet& data, double l2_strength,
                          std::span<const double> params, std::vector<double>* gradient) {
  const std::size_t k = data.classes.size();
  const std::size_t d = data.d;
  const double inv_n = 1.0 / static_cast<double>(data.n);
  const double* w = params.data();
  const double* b = params.data() + k * d;
  if (gradient) gradient->assign(k * d + k, 0.0);

  double loss = 0;
  std::vector<double> z(k);
  for (std::size_t i = 0; i < data.n; ++i) {
    const auto xi = data.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      double s = b[c];
      const double* wc = w + c * d;
      for (std::size_t j = 0; j < d; ++j) s += wc[j] * xi[j];
      z[c] = s;
    }
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0;
    for (std::size_t c = 0; c < k; ++c) sum += std::exp(z[c] - mx);
    const double log_norm = mx + std::log(sum);
    loss += log_norm - z[data.y[i]];
    if (gradient) {
      double* g = gradient->data();
      for (std::size_t c = 0; c < k; ++c) {
        const double resid =
            std::exp(z[c] - log_norm) - (c == data.y[i] ? 1.0 : 0.0);
        if (resid == 0) continue;
        double* gc = g + c * d;
        for (std::size_t j = 0; j < d; ++j) gc[j] += resid * xi[j];
        g[k * d + c] += resid;
      }
    }
  }
  double wnorm = 0;
  for (std::size_t j = 0; j < k * d; ++j) wnorm += w[j] * w[j];
  const double reg = inv_n / l2_strength;
  loss = loss * inv_n + 0.5 * reg * wnorm;
  if (gradient) {
    auto& g = *gradient;
    for (std::size_t j = 0; j < k * d; ++j) g[j] = g[j] * inv_n + reg * w[j];
    for (std::size_t c = 0; c < k; ++c) g[k * d + c] *= inv_n;
  }
  return loss;
}

namespace {

// Largest eigenvalue of (1/n) [X 1]^T [X 1] by power iteration.
double gram_spectral_bound(const TrainingSet& data) {
  const std::size_t d1 = data.d + 1;
  std::vector<double> v(d1, 1.0 / std::sqrt(static_cast<double>(d1)));
  std::vector<double> u(d1);
  double lambda = 0;
  for (int it = 0; it < 100; ++it) {
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t i = 0; i < data.n; ++i) {
      const auto xi = data.row(i);
      double dot = v[data.d];
      for (std::size_t j = 0; j < data.d; ++j) dot += xi[j] * v[j];
      for (std::size_t j = 0; j < data.d; ++j) u[j] += dot * xi[j];
      u[data.d] += dot;
    }
    double norm = 0;
    for (double& x : u) {
      x /= static_cast<double>(data.n);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0) return 0;
    const double prev = lambda;
    lambda = norm;
    for (std::size_t j = 0; j < d1; ++j) v[j] = u[j] / norm;
    if (std::fabs(lambda - prev) <= 1e-9 * lambda) break;
  }
  return lambda;
}

LogisticModel fit_logistic(const ModelSpec& spec, const TrainingSet& data) {
  const std::size_t k = data.classes.size();
  const std::size_t dim = k * data.d + k;
  // Softmax cross-entropy curvature is bounded by half the Gram spectrum.
  const double lipschitz =
      1.05 * (0.5 * gram_spectral_bound(data) +
              1.0 / (spec.l2_strength * static_cast<double>(data.n)));
  const double step = 1.0 / lipschitz;

  // Nesterov acceleration with gradient-based restart.
  std::vector<double> w(dim, 0.0), w_prev(dim, 0.0), y(dim, 0.0), g;
  double t = 1.0;
  LogisticModel model;
  for (std::size_t iter = 0; iter < spec.max_iter; ++iter) {
    logistic_objective(data, spec.l2_strength, y, &g);
    double gnorm = 0;
    for (double v : g) gnorm += v * v;
    gnorm = std::sqrt(gnorm);
    model.iterations = iter + 1;
    model.gradient_norm = gnorm;
    if (gnorm < spec.tolerance) {
      w = y;
      break;
    }
    w_prev = w;
    double restart = 0;
    for (std::size_t j = 0; j < dim; ++j) {
      w[j] = y[j] - step * g[j];
      restart += g[j] * (w[j] - w_prev[j]);
    }
    if (restart > 0) t = 1.0;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    for (std::size_t j = 0; j < dim; ++j) y[j] = w[j] + beta * (w[j] - w_prev[j]);
    t = t_next;
  }
  model.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k * data.d));
  model.bias.assign(w.begin() + static_cast<std::ptrdiff_t>(k * data.d), w.end());
  return model;
}

NaiveBayesModel fit_naive_bayes(const ModelSpec& spec, const TrainingSet& data) {
  const std::size_t k = data.classes.size();
  const std::size_t d = data.d;
  NaiveBayesModel nb;
  nb.mean.assign(k * d, 0.0);
  nb.variance.assign(k * d, 0.0);
  std::vector<double> count(k, 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    const auto xi = data.row(i);
    const std::size_t c = data.y[i];
    count[c] += 1;
    for (std::size_t j = 0; j < d; ++j) nb.mean[c * d + j] += xi[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) nb.mean[c * d + j] /= count[c];
  }
  for (std::size_t i = 0; i < data.n; ++i) {
    const auto xi = data.row(i);
    const std::size_t c = data.y[i];
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = xi[j] - nb.mean[c * d + j];
      nb.variance[c * d + j] += diff * diff;
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    nb.log_prior.push_back(std::log(count[c] / static_cast<double>(data.n)));
    for (std::size_t j = 0; j < d; ++j) {
      double& v = nb.variance[c * d + j];
      v = std::max(v / count[c], spec.variance_floor);
    }
  }
  return nb;
}

}  // namespace

TreeModel fit_tree(const ModelSpec& spec, const TrainingSet& data,
                   std::vector<std::size_t> samples, Rng* feature_rng,
                   std::size_t max_features);
ForestModel fit_forest(const ModelSpec& spec, const TrainingSet& data);

TrainedModel train(const ModelSpec& spec, const TrainingSet& input) {
  spec.validate();
  if (input.n == 0) throw DataError("no training rows");
  std::set<std::size_t> present(input.y.begin(), input.y.end());
  if (present.size() < 2) throw DataError("training set holds a single class");

  TrainingSet data = input;
  std::vector<double> center, scale;
  if (spec.standardize) {
    center.assign(data.d, 0.0);
    scale.assign(data.d, 0.0);
    for (std::size_t i = 0; i < data.n; ++i) {
      for (std::size_t j = 0; j < data.d; ++j) center[j] += data.x[i * data.d + j];
    }
    for (double& c : center) c /= static_cast<double>(data.n);
    for (std::size_t i = 0; i < data.n; ++i) {
      for (std::size_t j = 0; j < data.d; ++j) {
        const double diff = data.x[i * data.d + j] - center[j];
        scale[j] += diff * diff;
      }
    }
    for (double& s : scale) {
      s = std::sqrt(s / static_cast<double>(data.n));
      if (s == 0) s = 1;
    }
    for (std::size_t i = 0; i < data.n; ++i) {
      for (std::size_t j = 0; j < data.d; ++j) {
        double& v = data.x[i * data.d + j];
        v = (v - center[j]) / scale[j];
      }
    }
  }

  TrainedModel::Params params;
  switch (spec.kind) {
    case ModelKind::logistic:
      params = fit_logistic(spec, data);
      break;
    case ModelKind::knn:
      params = KnnModel{data.x, data.y};
      break;
    case ModelKind::gaussian_nb:
      params = fit_naive_bayes(spec, data);
      break;
    case ModelKind::decision_tree: {
      std::vector<std::size_t> all(data.n);
      std::iota(all.begin(), all.end(), 0);
      params = fit_tree(spec, data, std::move(all), nullptr, data.d);
      break;
    }
    case ModelKind::random_forest:
      params = fit_forest(spec, data);
      break;
  }
  return TrainedModel(spec, data.classes, data.d, std::move(params), std::move(center),
                      std::move(scale));
}

TrainedModel train(const ModelSpec& spec, const FeatureMatrix& m,
                   const std::vector<std::size_t>& rows) {
  std::set<std::string> labels;
  for (std::size_t r : rows) labels.insert(m.row_labels.at(r));
  return train(spec, make_training_set(m, rows, {labels.begin(), labels.end()}));
}

ProbaMatrix predict_proba(const TrainedModel& model, const FeatureMatrix& m,
                          const std::vector<std::size_t>& rows) {
  ProbaMatrix out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(model.predict_proba(m.row(r)));
  return out;
}

std::size_t argmax(std::span<const double> proba) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < proba.size(); ++c) {
    if (proba[c] > proba[best]) best = c;
  }
  return best;
}

std::vector<std::string> predict(const TrainedModel& model, const FeatureMatrix& m,
                                 const std::vector<std::size_t>& rows) {
  std::vector<std::string> out;
  for (const auto& p : predict_proba(model, m, rows)) {
    out.push_back(model.classes()[argmax(p)]);
  }
  return out;
}

}  // namespace nsp
