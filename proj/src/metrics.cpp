#include "nspmine/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nspmine/error.hpp"

namespace nsp {

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) t += std::accumulate(row.begin(), row.end(), std::size_t{0});
  return t;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

namespace {

std::size_t class_index(const std::vector<std::string>& classes, const std::string& label) {
  auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw DataError("label '" + label + "' not in class list");
  return static_cast<std::size_t>(it - classes.begin());
}

double ratio_or_zero(double num, double den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : num / den;
}

}  // namespace

ConfusionMatrix confusion(const std::vector<std::string>& truth,
                          const std::vector<std::string>& predicted,
                          const std::vector<std::string>& classes) {
  if (truth.size() != predicted.size()) {
    throw DataError("truth and prediction lengths differ");
  }
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++cm.counts[class_index(classes, truth[i])][class_index(classes, predicted[i])];
  }
  return cm;
}

PrfSummary prf_accuracy(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw DataError("empty confusion matrix");
  const std::size_t k = cm.classes.size();
  PrfSummary out;
  out.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);

  std::size_t tp_sum = 0, pos_sum = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += cm.counts[c][j];
      col += cm.counts[j][c];
    }
    const auto tp = static_cast<double>(cm.counts[c][c]);
    ClassScores s;
    s.label = cm.classes[c];
    s.support = row;
    s.precision = ratio_or_zero(tp, static_cast<double>(col), s.precision_undefined);
    s.recall = ratio_or_zero(tp, static_cast<double>(row), s.recall_undefined);
    bool f1_undefined = false;
    s.f1 = ratio_or_zero(2 * s.precision * s.recall, s.precision + s.recall, f1_undefined);
    out.per_class.push_back(s);
    tp_sum += cm.counts[c][c];
    pos_sum += row;

    out.precision_macro += s.precision;
    out.recall_macro += s.recall;
    out.f1_macro += s.f1;
    const double w = static_cast<double>(row) / static_cast<double>(total);
    out.precision_weighted += w * s.precision;
    out.recall_weighted += w * s.recall;
    out.f1_weighted += w * s.f1;
  }
  out.precision_macro /= static_cast<double>(k);
  out.recall_macro /= static_cast<double>(k);
  out.f1_macro /= static_cast<double>(k);
  out.recall_micro = static_cast<double>(tp_sum) / static_cast<double>(pos_sum);
  return out;
}

double binary_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0;
  std::size_t npos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        rank_sum += avg_rank;
        ++npos;
      }
    }
    i = j;
  }
  const std::size_t nneg = n - npos;
  if (npos == 0 || nneg == 0) return std::numeric_limits<double>::quiet_NaN();
  const double p = static_cast<double>(npos);
  return (rank_sum - p * (p + 1) / 2) / (p * static_cast<double>(nneg));
}

double binary_auprc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  const std::size_t n = scores.size();
  const auto npos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  if (npos == 0) return std::numeric_limits<double>::quiet_NaN();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double area = 0, r_prev = 0, p_prev = 1;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      positive[order[j]] ? ++tp : ++fp;
      ++j;
    }
    const double r = static_cast<double>(tp) / static_cast<double>(npos);
    const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (r - r_prev) * (p + p_prev) / 2;
    r_prev = r;
    p_prev = p;
    i = j;
  }
  return area;
}

namespace {

RankMetric one_vs_rest(const std::vector<std::string>& truth, const ProbaMatrix& proba,
                       const std::vector<std::string>& classes,
                       double (*metric)(const std::vector<double>&, const std::vector<bool>&)) {
  if (truth.size() != proba.size()) throw DataError("truth and score lengths differ");
  RankMetric out;
  double sum = 0;
  std::size_t used = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<double> scores;
    std::vector<bool> pos;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (proba[i].size() != classes.size()) throw DataError("score row width mismatch");
      scores.push_back(proba[i][c]);
      pos.push_back(truth[i] == classes[c]);
    }
    const double v = metric(scores, pos);
    out.per_class.push_back(v);
    if (std::isnan(v)) {
      out.skipped.push_back(classes[c]);
    } else {
      sum += v;
      ++used;
    }
  }
  out.macro = used ? sum / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace

RankMetric auc_ovr(const std::vector<std::string>& truth, const ProbaMatrix& proba,
                   const std::vector<std::string>& classes) {
  return one_vs_rest(truth, proba, classes, &binary_auc);
}

RankMetric auprc(const std::vector<std::string>& truth, const ProbaMatrix& proba,
                 const std::vector<std::string>& classes) {
  return one_vs_rest(truth, proba, classes, &binary_auprc);
}

double aai(const std::vector<double>& accuracies_new, const std::vector<double>& accuracies_base) {
  if (accuracies_new.empty() || accuracies_new.size() != accuracies_base.size()) {
    throw DataError("aai needs two nonempty lists of equal length");
  }
  double sum = 0;
  for (std::size_t i = 0; i < accuracies_new.size(); ++i) {
    if (!(accuracies_base[i] > 0)) throw DataError("aai baseline accuracy must be positive");
    sum += (accuracies_new[i] - accuracies_base[i]) / accuracies_base[i] * 100.0;
  }
  return sum / static_cast<double>(accuracies_new.size());
}

MetricsReport evaluate(const std::string& classifier, const std::vector<std::string>& truth,
                       const ProbaMatrix& proba, const std::vector<std::string>& classes) {
  MetricsReport r;
  r.classifier = classifier;
  std::vector<std::string> predicted;
  predicted.reserve(proba.size());
  for (const auto& p : proba) predicted.push_back(classes.at(argmax(p)));
  r.confusion = confusion(truth, predicted, classes);
  r.prf = prf_accuracy(r.confusion);
  r.auc = auc_ovr(truth, proba, classes);
  r.auprc = auprc(truth, proba, classes);
  return r;
}

}  // namespace nsp
