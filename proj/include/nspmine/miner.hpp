#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nspmine/pattern.hpp"
#include "nspmine/seqio.hpp"

namespace nsp {

enum class ScheduleKind { fixed, single_drop, decay };

// Minimum support as a function of pattern length.
//   fixed:       base everywhere
//   single_drop: base below length 3, base / ratio from length 3
//   decay:       base at length 1, base * f_len for 2 <= len <= n, base * f_n
//                beyond; factors holds (f2, ..., fn)
class ThresholdSchedule {
 public:
  static ThresholdSchedule fixed(double base);
  static ThresholdSchedule single_drop(double base, double ratio);
  static ThresholdSchedule decay(double base, std::vector<double> factors);

  double at(std::size_t length) const;

  ScheduleKind kind() const { return kind_; }
  double base() const { return base_; }
  double ratio() const { return ratio_; }
  const std::vector<double>& factors() const { return factors_; }

 private:
  ScheduleKind kind_ = ScheduleKind::fixed;
  double base_ = 1.0;
  double ratio_ = 1.0;
  std::vector<double> factors_;
};

enum class MiningMode { onp_miner, gonpm, gonpm_plus, positive_only };

std::string to_string(MiningMode mode);
// Accepts "onp-miner", "gonpm", "gonpm-plus", "positive-only" (or '_').
MiningMode parse_mining_mode(const std::string& text);

inline constexpr double kDefaultGonpmRatio = 1.3;
inline const std::vector<double> kDefaultDecayFactors{0.9, 0.85, 0.75, 0.65};

struct MiningConfig {
  MiningMode mode = MiningMode::onp_miner;
  GapConstraint gap{0, 3};
  ThresholdSchedule schedule = ThresholdSchedule::fixed(1.0);
  std::optional<std::size_t> max_level;
  std::optional<std::size_t> max_patterns;

  // Standard schedule for a mode: fixed for onp_miner and positive_only,
  // single drop by `ratio` for gonpm, decay by `factors` for gonpm_plus.
  static MiningConfig for_mode(MiningMode mode, double base_minsup,
                               GapConstraint gap,
                               std::optional<double> ratio = std::nullopt,
                               std::optional<std::vector<double>> factors =
                                   std::nullopt);

  // Throws ConfigError when the mode and schedule disagree or values are out
  // of range.
  void validate() const;
};

struct PatternSupport {
  NegPattern pattern;
  Support support = 0;
  bool operator==(const PatternSupport&) const = default;
};

struct LevelSet {
  std::size_t level = 0;
  std::vector<PatternSupport> entries;  // sorted by canonical string
};

struct LevelStats {
  std::size_t level = 0;
  double threshold = 0.0;
  std::size_t positive_candidates = 0;
  std::size_t negative_candidates = 0;
  std::size_t pruned_negatives = 0;  // removed with an infrequent projection
  std::size_t evaluated = 0;         // support_db calls
  std::size_t frequent = 0;
  std::size_t truncated = 0;  // dropped by max_patterns
  double seconds = 0.0;
};

struct MiningStats {
  std::vector<LevelStats> levels;
  // Growth inputs of the O(l*m*n + l^2) cost model: total candidates, longest
  // pattern, total database length.
  std::size_t total_candidates = 0;
  std::size_t max_pattern_length = 0;
  std::size_t database_length = 0;
  double seconds = 0.0;
};

struct MiningResult {
  std::vector<LevelSet> levels;
  MiningStats stats;

  std::size_t pattern_count() const;
  std::vector<PatternSupport> all() const;
};

// Frequent single symbols (canonical plus any ambiguity code present).
LevelSet frequent_1(const Corpus& sdb, const ThresholdSchedule& schedule);

// Frequent length-2 patterns: positive pairs over F1, then each kept
// positive with every canonical symbol forbidden in its gap.
LevelSet find_onp2(const Corpus& sdb, const MiningConfig& cfg,
                   const LevelSet& f1, LevelStats* stats = nullptr);

// Joins p and q when p minus its first element equals q minus its last
// element, negatives included. Sorted canonically, duplicates removed.
std::vector<NegPattern> pattern_join(const LevelSet& level);

// Positive candidates are scored first. Every candidate whose positive
// projection is not frequent is discarded unscored; the rest are kept when
// support_db >= threshold.
LevelSet filter_level(const Corpus& sdb, const std::vector<NegPattern>& cands,
                      std::size_t level, double threshold,
                      LevelStats* stats = nullptr);

MiningResult mine(const Corpus& sdb, const MiningConfig& cfg);

// Pattern file: "<canonical> #SUP: <n> #LEN: <k> #CLASS: <label>" per line,
// levels in order, canonical order within a level.
void write_patterns(std::ostream& out, const MiningResult& result,
                    const std::string& label);
// Companion token file, one pattern per line in pattern_tokens form.
void write_pattern_tokens(std::ostream& out, const MiningResult& result);

struct PatternLine {
  NegPattern pattern;
  Support support = 0;
  std::string label;
  std::vector<std::string> sources;  // catalog files only
};

std::vector<PatternLine> read_pattern_lines(std::istream& in);
std::string format_pattern_line(const PatternLine& line, bool with_sources);

// Groups pattern lines by class into level-organised results.
std::map<std::string, MiningResult> results_from_lines(
    const std::vector<PatternLine>& lines);

}  // namespace nsp
