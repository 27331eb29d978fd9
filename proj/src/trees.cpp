// CART classification trees (gini) and bagged forests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nspmine/learn.hpp"
#include "nspmine/parallel.hpp"
#include "nspmine/random.hpp"

namespace nsp {

namespace {

double gini(const std::vector<double>& counts, double total) {
  if (total <= 0) return 0;
  double s = 0;
  for (double c : counts) s += c * c;
  return 1.0 - s / (total * total);
}

struct Split {
  std::int64_t feature = -1;
  double threshold = 0;
  double impurity = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const ModelSpec& spec, const TrainingSet& data, Rng* rng,
              std::size_t max_features)
      : spec_(spec), data_(data), rng_(rng), max_features_(max_features),
        k_(data.classes.size()) {}

  TreeModel build(std::vector<std::size_t> samples) {
    grow(std::move(samples));
    return std::move(tree_);
  }

 private:
  std::int64_t grow(std::vector<std::size_t> samples) {
    const auto id = static_cast<std::int64_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::vector<double> counts(k_, 0.0);
    for (std::size_t s : samples) counts[data_.y[s]] += 1;
    const double n = static_cast<double>(samples.size());
    const bool pure =
        std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;

    Split best;
    if (!pure && samples.size() >= spec_.min_samples_split) best = find_split(samples);
    if (best.feature < 0) {
      auto& leaf = tree_.nodes[static_cast<std::size_t>(id)];
      leaf.proba = counts;
      for (double& p : leaf.proba) p /= n;
      return id;
    }
    std::vector<std::size_t> left, right;
    for (std::size_t s : samples) {
      (value(s, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right)
          .push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    const auto l = grow(std::move(left));
    const auto r = grow(std::move(right));
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  double value(std::size_t sample, std::size_t feature) const {
    return data_.x[sample * data_.d + feature];
  }

  // Candidate features in the order they are examined. Without an rng every
  // feature is examined in index order. With one, features are drawn without
  // replacement until max_features non-constant ones have been seen (or all
  // are exhausted), as in the usual random-forest convention.
  Split find_split(const std::vector<std::size_t>& samples) {
    std::vector<std::size_t> order(data_.d);
    std::iota(order.begin(), order.end(), 0);
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, std::size_t>> column(samples.size());
    std::size_t informative = 0;
    for (std::size_t pos = 0; pos < order.size() && informative < max_features_; ++pos) {
      if (rng_) std::swap(order[pos], order[pos + rng_->below(order.size() - pos)]);
      const std::size_t f = order[pos];
      for (std::size_t i = 0; i < samples.size(); ++i) {
        column[i] = {value(samples[i], f), data_.y[samples[i]]};
      }
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      ++informative;
      evaluate_feature(f, column, best);
    }
    if (!std::isfinite(best.impurity)) best.feature = -1;
    return best;
  }

  void evaluate_feature(std::size_t f,
                        const std::vector<std::pair<double, std::size_t>>& column,
                        Split& best) const {
    const std::size_t n = column.size();
    std::vector<double> left(k_, 0.0), right(k_, 0.0);
    for (const auto& [v, y] : column) right[y] += 1;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left[column[i].second] += 1;
      right[column[i].second] -= 1;
      if (column[i].first == column[i + 1].first) continue;
      const std::size_t nl = i + 1, nr = n - nl;
      if (nl < spec_.min_samples_leaf || nr < spec_.min_samples_leaf) continue;
      const double imp = (static_cast<double>(nl) * gini(left, static_cast<double>(nl)) +
                          static_cast<double>(nr) * gini(right, static_cast<double>(nr))) /
                         static_cast<double>(n);
      double threshold = 0.5 * (column[i].first + column[i + 1].first);
      // Midpoint may round up to the right value.
      if (threshold >= column[i + 1].first) threshold = column[i].first;
      const auto fi = static_cast<std::int64_t>(f);
      const bool better =
          imp < best.impurity ||
          (imp == best.impurity &&
           (fi < best.feature || (fi == best.feature && threshold < best.threshold)));
      if (better) best = {fi, threshold, imp};
    }
  }

  const ModelSpec& spec_;
  const TrainingSet& data_;
  Rng* rng_;
  std::size_t max_features_;
  std::size_t k_;
  TreeModel tree_;
};

}  // namespace

TreeModel fit_tree(const ModelSpec& spec, const TrainingSet& data,
                   std::vector<std::size_t> samples, Rng* feature_rng,
                   std::size_t max_features) {
  return TreeBuilder(spec, data, feature_rng, std::max<std::size_t>(1, max_features))
      .build(std::move(samples));
}

ForestModel fit_forest(const ModelSpec& spec, const TrainingSet& data) {
  ForestModel forest;
  forest.trees.resize(spec.n_trees);
  const auto max_features = static_cast<std::size_t>(
      std::max(1.0, std::floor(std::sqrt(static_cast<double>(data.d)))));
  parallel_for(spec.n_trees, [&](std::size_t t) {
    Rng rng(spec.seed, "forest-tree", t);
    std::vector<std::size_t> bootstrap(data.n);
    for (auto& s : bootstrap) s = rng.below(data.n);
    forest.trees[t] = fit_tree(spec, data, std::move(bootstrap), &rng, max_features);
  });
  return forest;
}

std::vector<double> tree_proba(const TreeModel& tree, std::span<const double> x) {
  std::size_t node = 0;
  while (tree.nodes[node].feature >= 0) {
    const auto& nd = tree.nodes[node];
    node = static_cast<std::size_t>(
        x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
  }
  return tree.nodes[node].proba;
}

}  // namespace nsp
