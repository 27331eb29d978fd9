// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "brute_miner.hpp"
#include "nspmine/experiment.hpp"
#include "nspmine/parallel.hpp"
#include "support.hpp"

using namespace nsp;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and budgets.
constexpr double kFixtureBudgetSeconds = 1e-3;     // 1a
constexpr double kWalkthroughBudgetSeconds = 1.0;  // 1c
constexpr std::size_t kPropertyCases = 1000;       // 2
constexpr std::size_t kTinyCorpora = 50;           // 3, 4
constexpr double kExhaustiveBudgetSeconds = 120;   // 3
constexpr double kDominanceBudgetSeconds = 300;    // 4
constexpr double kEndToEndBudgetSeconds = 900;     // 5
constexpr double kMinAccuracy = 0.90;              // 5
constexpr double kMaxCvStd = 0.05;                 // 5
constexpr double kAuprcTolerance = 1e-12;          // 6
constexpr double kGradientTolerance = 1e-5;        // 7
constexpr double kProbaSumTolerance = 1e-9;        // 7
constexpr double kMiningBudgetSeconds = 60;        // 9
constexpr std::size_t kMaxPatterns9 = 5000;        // 9

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& name, Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << name << " |"
            << o.detail.str() << std::endl;
  if (!o.pass) ++failures;
}

template <typename Fn>
void run_criterion(int id, const std::string& name, Fn&& fn) {
  Outcome o;
  try {
    fn(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  report(id, name, o);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---- 1 ----------------------------------------------------------------------

void worked_examples(Outcome& o) {
  using testing::pat;
  using testing::seq_of;
  const auto s1 = seq_of("AACACCTC");
  const auto p1 = pat("A[0,1]C[0,1]C");
  const std::vector<Occurrence> want{{1, 3, 5}, {2, 3, 5}, {4, 5, 6}, {4, 6, 8}};
  constexpr int reps = 1000;
  auto t0 = Clock::now();
  std::vector<Occurrence> got;
  for (int i = 0; i < reps; ++i) got = occurrences_all(s1, p1);
  const double per_call = since(t0) / reps;
  o.require(got == want, "1a occurrence set");
  o.require(per_call < kFixtureBudgetSeconds, "1a runtime");
  o.detail << " 1a: 4 occurrences, " << per_call * 1e6 << " us/call;";

  const auto sup = support_oneoff(seq_of("AACACACCTC"), pat("A[0,1]C[0,1]~G C"));
  o.require(sup == 2, "1b support");
  o.detail << " 1b: support " << sup << ";";

  t0 = Clock::now();
  const auto sdb = testing::corpus_of({"AACACCTCAAG"});
  auto cfg = MiningConfig::for_mode(MiningMode::gonpm_plus, 2, {0, 2}, std::nullopt,
                                    std::vector<double>{0.9, 0.5});
  cfg.max_level = 2;
  const auto r = mine(sdb, cfg);
  const double secs = since(t0);
  std::map<std::string, Support> f1, f2;
  for (const auto& e : r.levels.at(0).entries) f1.emplace(format_pattern(e.pattern), e.support);
  std::set<std::string> pos2;
  for (const auto& e : r.levels.at(1).entries) {
    f2.emplace(format_pattern(e.pattern), e.support);
    if (e.pattern.is_positive()) pos2.insert(format_pattern(e.pattern));
  }
  o.require(f1 == std::map<std::string, Support>{{"A", 5}, {"C", 4}}, "1c F1");
  o.require(pos2 == std::set<std::string>{"A[0,2]A", "A[0,2]C", "C[0,2]A", "C[0,2]C"},
            "1c level-2 positives");
  o.require(r.stats.levels.at(1).negative_candidates == 16, "1c 16 negative candidates");
  for (const char* neg : {"A[0,2]~G C", "A[0,2]~T C", "C[0,2]~G A", "C[0,2]~C C", "C[0,2]~G C"}) {
    o.require(f2.count(neg) && f2.at(neg) >= 2, std::string("1c member ") + neg);
  }
  o.require(secs < kWalkthroughBudgetSeconds, "1c runtime");
  o.detail << " 1c: F1 {A:5, C:4}, 4 positives, " << r.stats.levels.at(1).negative_candidates
           << " negative candidates, 5 listed negatives present, " << secs * 1e3 << " ms";
}

// ---- 2 ----------------------------------------------------------------------

void oracle_properties(Outcome& o) {
  Rng rng(42, "acceptance-oracle");
  std::size_t cases = 0, equal = 0, greedy_viol = 0, subset_viol = 0, prefix_viol = 0;
  std::size_t subset_cases = 0, prefix_cases = 0;
  while (cases < kPropertyCases || subset_cases < kPropertyCases || prefix_cases < kPropertyCases) {
    const auto s = testing::random_seq(rng, 1 + rng.below(20));
    const std::size_t m = rng.below(3);
    const GapConstraint g{m, m + rng.below(3)};
    auto p = testing::random_pattern(rng, 1 + rng.below(3), g);
    const auto occ = occurrences_all(s, p);

    if (occ.size() <= 20) {
      ++cases;
      const auto greedy = support_oneoff(s, p);
      const auto exact = oracle_max_disjoint(s, p);
      greedy_viol += greedy > exact;
      equal += greedy == exact;
    }
    if (p.length() >= 2) {
      // negative insertion narrows the occurrence set
      ++subset_cases;
      const std::size_t gap = rng.below(p.length() - 1);
      auto open = p;
      open.negatives[gap] = kNoNegative;
      auto closed = open;
      closed.negatives[gap] = static_cast<Symbol>(1 + rng.below(4));
      const auto wide = occurrences_all(s, open);
      for (const auto& x : occurrences_all(s, closed)) {
        subset_viol += std::find(wide.begin(), wide.end(), x) == wide.end();
      }
      // prefix anti-monotonicity of the exact maximum
      NegPattern prefix(std::vector<Symbol>(p.positives.begin(), p.positives.end() - 1), g,
                        std::vector<Symbol>(p.negatives.begin(), p.negatives.end() - 1));
      if (occ.size() <= 20 && occurrences_all(s, prefix).size() <= 20) {
        ++prefix_cases;
        prefix_viol += oracle_max_disjoint(s, prefix) < oracle_max_disjoint(s, p);
      }
    }
  }
  o.require(greedy_viol == 0, "greedy <= exact");
  o.require(subset_viol == 0, "occurrence subset under negative insertion");
  o.require(prefix_viol == 0, "prefix anti-monotonicity");
  o.detail << " greedy<=exact: " << cases << " cases, " << greedy_viol
           << " violations; subset: " << subset_cases << " cases, " << subset_viol
           << " violations; prefix: " << prefix_cases << " cases, " << prefix_viol
           << " violations; greedy==exact rate " << static_cast<double>(equal) / cases;
}

// ---- 3 ----------------------------------------------------------------------

void exhaustive_equivalence(Outcome& o) {
  const auto t0 = Clock::now();
  std::size_t patterns = 0, diverged = 0;
  for (std::uint64_t seed = 0; seed < kTinyCorpora; ++seed) {
    const auto sdb = testing::tiny_corpus(seed);
    auto cfg = MiningConfig::for_mode(MiningMode::onp_miner, 2, {0, 2});
    cfg.max_level = 4;
    const auto got = testing::as_map(mine(sdb, cfg).all());
    const auto want = testing::brute_force_mine(sdb, {0, 2}, 4, [](std::size_t) { return 2.0; });
    patterns += want.size();
    if (got != want) {
      ++diverged;
      o.detail << " corpus " << seed << " diverges (" << got.size() << " vs " << want.size() << ");";
    }
  }
  const double secs = since(t0);
  o.require(diverged == 0, "mine() equals brute force");
  o.require(secs < kExhaustiveBudgetSeconds, "runtime");
  o.detail << " " << kTinyCorpora << " corpora, " << patterns << " frequent patterns, "
           << diverged << " divergences, " << secs << " s";
}

// ---- 4 ----------------------------------------------------------------------

std::map<std::size_t, std::set<std::string>> by_level(const MiningResult& r) {
  std::map<std::size_t, std::set<std::string>> out;
  for (const auto& l : r.levels) {
    for (const auto& e : l.entries) out[l.level].insert(format_pattern(e.pattern));
  }
  return out;
}

double long_share(const MiningResult& r) {
  std::size_t longer = 0;
  for (const auto& e : r.all()) longer += e.pattern.length() >= 4;
  return r.pattern_count() ? static_cast<double>(longer) / r.pattern_count() : 0.0;
}

void schedule_dominance(Outcome& o) {
  const auto t0 = Clock::now();
  std::size_t not_superset = 0;
  for (std::uint64_t seed = 0; seed < kTinyCorpora; ++seed) {
    const auto sdb = testing::tiny_corpus(seed);
    auto fixed = MiningConfig::for_mode(MiningMode::onp_miner, 2, {0, 2});
    auto decay = MiningConfig::for_mode(MiningMode::gonpm_plus, 2, {0, 2}, std::nullopt,
                                        std::vector<double>{0.9, 0.85, 0.75, 0.65});
    fixed.max_level = decay.max_level = 4;
    const auto a = by_level(mine(sdb, fixed));
    const auto b = by_level(mine(sdb, decay));
    for (const auto& [len, pats] : a) {
      for (const auto& p : pats) {
        if (!b.count(len) || !b.at(len).count(p)) ++not_superset;
      }
    }
  }
  o.require(not_superset == 0, "decay set contains fixed set at every level");
  o.detail << " tiny corpora: " << not_superset << " fixed-only patterns;";

  // One class with a planted length-5 motif; its support sits between the
  // decayed and the fixed length-5 thresholds.
  SynthSpec spec;
  spec.sequences_per_class = 60;
  spec.min_length = 120;
  spec.max_length = 200;
  spec.seed = 42;
  spec.classes = {SynthClass{"planted", {{"ACGTA", 3.0, 1}}, {}, {}}};
  const auto sdb = generate(spec);
  const double base = 6.0 * static_cast<double>(sdb.size());
  auto fixed = MiningConfig::for_mode(MiningMode::onp_miner, base, {0, 1});
  fixed.max_level = 6;
  auto decay = MiningConfig::for_mode(MiningMode::gonpm_plus, base, {0, 1});
  decay.max_level = 6;
  const auto rf = mine(sdb, fixed);
  const auto rd = mine(sdb, decay);
  const auto lf = by_level(rf);
  std::size_t new_long = 0;
  bool motif_found = false;
  for (const auto& l : rd.levels) {
    if (l.level < 5) continue;
    for (const auto& e : l.entries) {
      const auto s = format_pattern(e.pattern);
      if (!lf.count(l.level) || !lf.at(l.level).count(s)) ++new_long;
      motif_found |= s == "A[0,1]C[0,1]G[0,1]T[0,1]A";
    }
  }
  const double share_f = long_share(rf), share_d = long_share(rd);
  o.require(new_long >= 1, "decay finds a length>=5 pattern the fixed schedule misses");
  o.require(share_d > share_f, "share of length>=4 patterns increases");
  const double secs = since(t0);
  o.require(secs < kDominanceBudgetSeconds, "runtime");
  o.detail << " planted corpus: " << new_long << " length>=5 patterns only under decay (motif "
           << (motif_found ? "found" : "not found") << "), length>=4 share " << share_f
           << " -> " << share_d << ", " << secs << " s";
}

// ---- 5 ----------------------------------------------------------------------

ExperimentPlan end_to_end_plan() {
  SynthSpec spec;
  spec.sequences_per_class = 200;
  spec.min_length = 300;
  spec.max_length = 600;
  spec.background = {0.27, 0.23, 0.23, 0.27};
  spec.seed = 42;
  spec.classes = {
      SynthClass{"c0", {}, {"GGA", "ATC", "CAT", "TGT"}, {}},
      SynthClass{"c1", {}, {"CCT", "TAG", "GTA", "ACA"}, {}},
      SynthClass{"c2", {}, {"AAG", "CGT", "TGC", "GAC"}, {}},
      SynthClass{"c3", {}, {"TTC", "GCA", "ACG", "CTG"}, {}},
  };
  ExperimentPlan plan;
  plan.synth = spec;
  MiningPlan plus;
  plus.name = "gonpm_plus";
  plus.mode = MiningMode::gonpm_plus;
  plus.minsup = 20;  // per training sequence of the class
  plus.relative = true;
  plus.gap = {0, 2};
  plus.max_level = 5;
  MiningPlan pos = plus;
  pos.name = "positive_only";
  pos.mode = MiningMode::positive_only;
  // Without negatives the fixed threshold must be lower to fill the same caps.
  pos.minsup = 8;
  plan.mining = {plus, pos};
  plan.selection = SelectionParams{4, 300, 600, true};
  plan.normalization = Normalization::length;
  plan.classifiers = {"lr"};
  plan.standardize = true;
  plan.test_fraction = 0.2;
  plan.compare = {{"gonpm_plus", "positive_only"}};
  plan.seed = 42;
  return plan;
}

void end_to_end(Outcome& o) {
  const auto t0 = Clock::now();
  testing::TempDir dir("acceptance5");
  const auto plan = end_to_end_plan();
  const auto cmp = run_experiment(plan, dir.path());
  const double acc_plus = cmp.at("configs").at("gonpm_plus").at("accuracy").at("lr");
  const double acc_pos = cmp.at("configs").at("positive_only").at("accuracy").at("lr");
  o.require(acc_plus >= kMinAccuracy, "gonpm_plus + lr accuracy >= 0.90");
  o.require(acc_plus > acc_pos, "gonpm_plus beats positive_only");
  o.detail << " accuracy gonpm_plus " << acc_plus << " vs positive_only " << acc_pos
           << " (catalogs " << cmp.at("configs").at("gonpm_plus").at("catalog_size") << " / "
           << cmp.at("configs").at("positive_only").at("catalog_size") << ");";

  // 5-fold CV of the gonpm_plus pipeline, mining repeated on each fold.
  const auto corpus = generate(*plan.synth);
  std::vector<std::string> labels;
  for (const auto& s : corpus.sequences()) labels.push_back(s.label);
  std::vector<double> accs;
  for (const auto& fold : kfold(labels, 5, plan.seed)) {
    accs.push_back(evaluate_partition(corpus, fold, plan.mining[0], plan).reports.at(0).prf.accuracy);
  }
  double mean = 0, var = 0;
  for (double a : accs) mean += a;
  mean /= static_cast<double>(accs.size());
  for (double a : accs) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / static_cast<double>(accs.size()));
  o.require(sd <= kMaxCvStd, "5-fold CV std <= 0.05");
  const double secs = since(t0);
  o.require(secs < kEndToEndBudgetSeconds, "runtime");
  o.detail << " 5-fold CV mean " << mean << ", std " << sd << "; " << secs << " s";
}

// ---- 6 ----------------------------------------------------------------------

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

void metrics_suite(Outcome& o) {
  Rng rng(42, "acceptance-metrics");
  std::size_t micro_viol = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 2 + rng.below(6);
    ConfusionMatrix cm;
    for (std::size_t c = 0; c < k; ++c) cm.classes.push_back("c" + std::to_string(c));
    cm.counts.assign(k, std::vector<std::size_t>(k));
    for (auto& row : cm.counts) {
      for (auto& v : row) v = rng.below(25);
    }
    cm.counts[0][0] += 1;
    const auto prf = prf_accuracy(cm);
    micro_viol += prf.accuracy != prf.recall_micro;
  }
  o.require(micro_viol == 0, "accuracy == micro recall");

  const double sep = binary_auc({0.9, 0.7, 0.3, 0.1}, {true, true, false, false});
  const double tied = binary_auc({0.5, 0.5, 0.5, 0.5}, {true, false, false, true});
  o.require(sep == 1.0, "AUC 1.0 when separating");
  o.require(tied == 0.5, "AUC 0.5 when tied");

  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> s;
    std::vector<bool> y;
    const auto n = 2 + rng.below(50);
    for (std::uint64_t i = 0; i < n; ++i) {
      s.push_back(rng.below(2) ? rng.unit() : static_cast<double>(rng.below(5)) / 4);
      y.push_back(rng.below(2));
    }
    y[0] = true;
    worst = std::max(worst, std::abs(binary_auprc(s, y) - auprc_sweep(s, y)));
  }
  o.require(worst <= kAuprcTolerance, "AUPRC equals sweep");
  const double a = aai({0.6, 0.5}, {0.5, 0.4});
  o.require(std::abs(a - 22.5) < 1e-12, "aai = 22.5");
  o.detail << " 1000 confusion matrices, " << micro_viol << " mismatches; AUC " << sep << " / "
           << tied << "; AUPRC max deviation " << worst << "; aai " << a;
}

// ---- 7 ----------------------------------------------------------------------

void learning_checks(Outcome& o) {
  Rng rng(42, "acceptance-learn");
  double worst = 0;
  for (int problem = 0; problem < 20; ++problem) {
    TrainingSet t;
    t.n = 5 + rng.below(30);
    t.d = 1 + rng.below(8);
    const std::size_t k = 2 + rng.below(4);
    for (std::size_t c = 0; c < k; ++c) t.classes.push_back("c" + std::to_string(c));
    for (std::size_t i = 0; i < t.n * t.d; ++i) t.x.push_back(rng.unit() * 4 - 2);
    for (std::size_t i = 0; i < t.n; ++i) t.y.push_back(rng.below(k));
    const double C = 0.1 + rng.unit() * 5;
    std::vector<double> w(k * t.d + k);
    for (auto& v : w) v = rng.unit() * 2 - 1;
    std::vector<double> g;
    logistic_objective(t, C, w, &g);
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double h = 1e-6;
      auto wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      const double fd =
          (logistic_objective(t, C, wp, nullptr) - logistic_objective(t, C, wm, nullptr)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[j]) / std::max(1.0, std::abs(g[j])));
    }
  }
  o.require(worst <= kGradientTolerance, "gradient vs finite differences");

  FeatureMatrix m;
  for (int j = 0; j < 5; ++j) m.columns.push_back("f" + std::to_string(j));
  for (int i = 0; i < 90; ++i) {
    m.row_ids.push_back("r" + std::to_string(i));
    m.row_labels.push_back("k" + std::to_string(i % 3));
    for (int j = 0; j < 5; ++j) m.values.push_back(rng.unit() * 3 + (j == i % 3 ? 1.5 : 0));
  }
  std::vector<std::size_t> rows(m.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  double worst_sum = 0;
  for (ModelKind kind : {ModelKind::logistic, ModelKind::knn, ModelKind::gaussian_nb,
                         ModelKind::decision_tree, ModelKind::random_forest}) {
    const auto model = train(ModelSpec::defaults(kind), m, rows);
    for (const auto& p : predict_proba(model, m, rows)) {
      double s = 0;
      for (double v : p) s += v;
      worst_sum = std::max(worst_sum, std::abs(s - 1));
    }
  }
  o.require(worst_sum <= kProbaSumTolerance, "probability rows sum to 1");
  o.detail << " 20 problems, max relative gradient error " << worst
           << "; max |row sum - 1| " << worst_sum << " over 5 model kinds";
}

// ---- 8 ----------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + NSPMINE_CLI_PATH + "' --quiet " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism(Outcome& o) {
  testing::TempDir dir("acceptance8");
  const json plan = json::parse(R"({
    "seed": 42,
    "corpus": {"synth": {"sequences_per_class": 30, "length": [80, 140], "seed": 42,
      "classes": [{"label": "a", "forbidden": ["GGA", "ATC"]},
                  {"label": "b", "forbidden": ["CCT", "TAG"]},
                  {"label": "c", "forbidden": ["AAG", "CGT"]}]}},
    "mining": [
      {"name": "plus", "mode": "gonpm-plus", "minsup": 5, "relative": true, "gap": [0, 2], "max_level": 4},
      {"name": "fixed", "mode": "onp-miner", "minsup": 4, "relative": true, "gap": [0, 2], "max_level": 4}],
    "features": {"min_length": 3, "cap": [20, 80]},
    "classifiers": ["lr", "knn", "nb", "dt", "rf"],
    "split": {"test_fraction": 0.2, "cv": 3}
  })");
  {
    std::ofstream out(dir / "plan.json");
    out << plan.dump(2);
  }
  const auto p = (dir / "plan.json").string();
  const std::vector<std::pair<std::string, std::string>> runs{
      {"r1", "--threads 8"}, {"r2", "--threads 8"}, {"r3", "--threads 1"}};
  for (const auto& [name, threads] : runs) {
    const int code = run_cli(threads + " run --plan '" + p + "' --out '" + (dir / name).string() + "'");
    o.require(code == 0, name + " exit code");
  }
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir / "r1")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), dir / "r1");
    const auto ext = rel.extension().string();
    const bool compared_kind = ext == ".txt" || ext == ".csv" || ext == ".json" || ext == ".model";
    if (!compared_kind || rel == "log.txt") continue;
    const auto ref = slurp(entry.path());
    for (const char* other : {"r2", "r3"}) {
      ++compared;
      if (slurp(dir / other / rel) != ref) {
        ++differing;
        o.detail << " differs: " << other << "/" << rel.string() << ";";
      }
    }
  }
  o.require(compared >= 40, "enough artifacts compared");
  o.require(differing == 0, "byte-identical artifacts");
  o.detail << " " << compared << " file comparisons (threads 8 vs 8 vs 1), " << differing
           << " differences";
}

// ---- 9 ----------------------------------------------------------------------

void performance_smoke(Outcome& o) {
  SynthSpec spec;
  spec.sequences_per_class = 50;
  spec.min_length = 500;
  spec.max_length = 1000;
  spec.seed = 42;
  const std::vector<std::vector<std::string>> forbidden{
      {"GGA"}, {"CCT"}, {"AAG"}, {"TTC"}, {"ATC"}, {"TAG"}, {"CGT"}, {"GCA"}};
  for (std::size_t c = 0; c < 8; ++c) {
    spec.classes.push_back(SynthClass{"v" + std::to_string(c), {}, forbidden[c], {}});
  }
  const auto corpus = generate(spec);
  MiningPlan mp;
  mp.name = "gonpm_plus";
  mp.mode = MiningMode::gonpm_plus;
  mp.minsup = 45;
  mp.relative = true;
  mp.gap = {0, 2};
  mp.max_level = 6;
  const auto t0 = Clock::now();
  const auto results = mine_per_class(corpus, mp);
  const double secs = since(t0);
  std::size_t total = 0;
  std::map<std::size_t, std::size_t> cands;
  std::size_t longest = 0;
  for (const auto& [label, r] : results) {
    total += r.pattern_count();
    longest = std::max(longest, r.stats.max_pattern_length);
    for (const auto& l : r.stats.levels) cands[l.level] += l.positive_candidates + l.negative_candidates;
  }
  o.require(total <= kMaxPatterns9, "total patterns <= 5000");
  o.require(total > 0, "patterns found");
  o.require(secs < kMiningBudgetSeconds, "runtime");
  o.detail << " 8x50 sequences, " << corpus.total_tokens() << " tokens, " << total
           << " patterns, longest " << longest << ", " << secs << " s on " << thread_count()
           << " thread(s); candidates per level:";
  for (const auto& [level, n] : cands) o.detail << " L" << level << "=" << n;
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments restrict the run to the listed criterion numbers.
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const auto criterion = [&](int id, const std::string& name, auto&& fn) {
    if (only.empty() || only.count(id)) run_criterion(id, name, fn);
  };
  std::cout << "nspmine acceptance run" << std::endl;
  criterion(1, "worked-example fixtures", worked_examples);
  criterion(2, "oracle properties", oracle_properties);
  criterion(3, "exhaustive-miner equivalence", exhaustive_equivalence);
  criterion(4, "schedule dominance", schedule_dominance);
  criterion(5, "end-to-end synthetic classification", end_to_end);
  criterion(6, "metrics unit suite", metrics_suite);
  criterion(7, "learning checks", learning_checks);
  criterion(8, "determinism across runs and thread counts", determinism);
  criterion(9, "performance smoke", performance_smoke);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
