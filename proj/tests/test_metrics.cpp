#include <doctest.h>

#include <cmath>
#include <set>

#include "nspmine/error.hpp"
#include "nspmine/metrics.hpp"
#include "support.hpp"

using namespace nsp;

namespace {

// Precision/recall at every threshold t in the distinct scores, computed
// from scratch, then the trapezoid sum from (0, 1).
double auprc_sweep(const std::vector<double>& s, const std::vector<bool>& y) {
  std::set<double, std::greater<>> thresholds(s.begin(), s.end());
  double pos = 0;
  for (bool b : y) pos += b;
  double area = 0, prev_r = 0, prev_p = 1;
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (y[i] ? tp : fp) += 1;
    }
    const double r = tp / pos, p = tp / (tp + fp);
    area += (r - prev_r) * (p + prev_p) / 2;
    prev_r = r;
    prev_p = p;
  }
  return area;
}

double auc_pairs(const std::vector<double>& s, const std::vector<bool>& y) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!y[i] || y[j]) continue;
      den += 1;
      num += s[i] > s[j] ? 1 : s[i] == s[j] ? 0.5 : 0;
    }
  }
  return num / den;
}

}  // namespace

TEST_CASE("confusion and per-class scores") {
  const std::vector<std::string> classes{"a", "b", "c"};
  const auto cm = confusion({"a", "a", "b", "b", "c"}, {"a", "b", "b", "b", "a"}, classes);
  CHECK(cm.counts == std::vector<std::vector<std::size_t>>{{1, 1, 0}, {0, 2, 0}, {1, 0, 0}});
  CHECK(cm.total() == 5);
  CHECK(cm.trace() == 3);
  const auto prf = prf_accuracy(cm);
  CHECK(prf.accuracy == doctest::Approx(0.6));
  CHECK(prf.per_class[0].precision == doctest::Approx(0.5));
  CHECK(prf.per_class[1].precision == doctest::Approx(2.0 / 3));
  CHECK(prf.per_class[1].recall == 1.0);
  CHECK(prf.per_class[2].precision == 0.0);
  CHECK(prf.per_class[2].precision_undefined);
  CHECK(prf.per_class[2].f1 == 0.0);
  CHECK(prf.recall_macro == doctest::Approx((0.5 + 1.0 + 0.0) / 3));
  CHECK(prf.recall_weighted == doctest::Approx(0.6));
  CHECK_THROWS_AS(confusion({"a"}, {"z"}, classes), DataError);
}

TEST_CASE("accuracy equals micro recall on random confusion matrices") {
  Rng rng(5, "confusion");
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 2 + rng.below(6);
    ConfusionMatrix cm;
    for (std::size_t c = 0; c < k; ++c) cm.classes.push_back("c" + std::to_string(c));
    cm.counts.assign(k, std::vector<std::size_t>(k));
    for (auto& row : cm.counts) {
      for (auto& v : row) v = rng.below(20);
    }
    cm.counts[0][0] += 1;
    const auto prf = prf_accuracy(cm);
    REQUIRE(prf.accuracy == prf.recall_micro);
  }
}

TEST_CASE("binary AUC") {
  CHECK(binary_auc({0.9, 0.8, 0.2, 0.1}, {true, true, false, false}) == 1.0);
  CHECK(binary_auc({0.5, 0.5, 0.5, 0.5}, {true, false, true, false}) == 0.5);
  CHECK(binary_auc({0.1, 0.9}, {true, false}) == 0.0);
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> s;
    std::vector<bool> y;
    for (int i = 0; i < 30; ++i) {
      s.push_back(static_cast<double>(rng.below(6)) / 5);
      y.push_back(rng.below(2));
    }
    y[0] = true;
    y[1] = false;
    REQUIRE(binary_auc(s, y) == doctest::Approx(auc_pairs(s, y)).epsilon(1e-12));
  }
}

TEST_CASE("trapezoid AUPRC equals a brute-force threshold sweep") {
  Rng rng(9);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> s;
    std::vector<bool> y;
    const auto n = 2 + rng.below(40);
    for (std::uint64_t i = 0; i < n; ++i) {
      s.push_back(rng.below(2) ? rng.unit() : static_cast<double>(rng.below(4)) / 4);
      y.push_back(rng.below(2));
    }
    y[0] = true;
    REQUIRE(std::abs(binary_auprc(s, y) - auprc_sweep(s, y)) <= 1e-12);
  }
  CHECK(binary_auprc({0.9, 0.1}, {true, false}) == 1.0);
}

TEST_CASE("one-vs-rest ranking skips degenerate classes") {
  const std::vector<std::string> classes{"a", "b", "c"};
  const ProbaMatrix p{{0.8, 0.1, 0.1}, {0.2, 0.7, 0.1}, {0.6, 0.3, 0.1}};
  const auto auc = auc_ovr({"a", "b", "a"}, p, classes);
  CHECK(auc.skipped == std::vector<std::string>{"c"});
  CHECK(std::isnan(auc.per_class[2]));
  CHECK(auc.per_class[0] == 1.0);
  CHECK(auc.macro == doctest::Approx(1.0));
  const auto pr = auprc({"a", "b", "a"}, p, classes);
  CHECK(pr.skipped == std::vector<std::string>{"c"});
}

TEST_CASE("average accuracy improvement") {
  CHECK(aai({0.6, 0.5}, {0.5, 0.4}) == doctest::Approx(22.5).epsilon(1e-12));
  CHECK(aai({0.5}, {0.5}) == 0.0);
  CHECK_THROWS_AS(aai({0.5}, {0.5, 0.6}), DataError);
  CHECK_THROWS_AS(aai({0.5}, {0.0}), DataError);
}

TEST_CASE("evaluate assembles every metric") {
  const std::vector<std::string> classes{"a", "b"};
  const auto r = evaluate("lr", {"a", "b", "b"}, {{0.9, 0.1}, {0.3, 0.7}, {0.6, 0.4}}, classes);
  CHECK(r.classifier == "lr");
  CHECK(r.prf.accuracy == doctest::Approx(2.0 / 3));
  CHECK(r.auc.macro == doctest::Approx(1.0));
  CHECK(r.confusion.counts[1][0] == 1);
}
