#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nspmine/learn.hpp"

namespace nsp {

// counts[t][p]: rows of true class t predicted as p.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const;
  std::size_t trace() const;
};

ConfusionMatrix confusion(const std::vector<std::string>& truth,
                          const std::vector<std::string>& predicted,
                          const std::vector<std::string>& classes);

struct ClassScores {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool precision_undefined = false;  // 0/0, reported as 0
  bool recall_undefined = false;
};

struct PrfSummary {
  double accuracy = 0.0;
  double precision_macro = 0.0, recall_macro = 0.0, f1_macro = 0.0;
  double precision_weighted = 0.0, recall_weighted = 0.0, f1_weighted = 0.0;
  double recall_micro = 0.0;
  std::vector<ClassScores> per_class;
};

PrfSummary prf_accuracy(const ConfusionMatrix& cm);

struct RankMetric {
  double macro = 0.0;
  std::vector<double> per_class;       // NaN for skipped classes
  std::vector<std::string> skipped;    // classes lacking positives or negatives
};

// Mann-Whitney AUC of one score column against binary truth; ties count 1/2.
double binary_auc(const std::vector<double>& scores,
                  const std::vector<bool>& positive);
// Trapezoid sum over (recall, precision) points at every distinct score,
// starting from (0, 1).
double binary_auprc(const std::vector<double>& scores,
                    const std::vector<bool>& positive);

RankMetric auc_ovr(const std::vector<std::string>& truth,
                   const ProbaMatrix& proba,
                   const std::vector<std::string>& classes);
RankMetric auprc(const std::vector<std::string>& truth,
                 const ProbaMatrix& proba,
                 const std::vector<std::string>& classes);

// Mean relative gain in percent: (1/n) sum (new_i - base_i) / base_i * 100.
double aai(const std::vector<double>& accuracies_new,
           const std::vector<double>& accuracies_base);

struct MetricsReport {
  std::string classifier;
  ConfusionMatrix confusion;
  PrfSummary prf;
  RankMetric auc;
  RankMetric auprc;
};

MetricsReport evaluate(const std::string& classifier,
                       const std::vector<std::string>& truth,
                       const ProbaMatrix& proba,
                       const std::vector<std::string>& classes);

}  // namespace nsp
