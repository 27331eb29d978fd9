#include "nspmine/miner.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "nspmine/error.hpp"
#include "nspmine/parallel.hpp"

namespace nsp {

ThresholdSchedule ThresholdSchedule::fixed(double base) {
  ThresholdSchedule s;
  s.kind_ = ScheduleKind::fixed;
  s.base_ = base;
  return s;
}

ThresholdSchedule ThresholdSchedule::single_drop(double base, double ratio) {
  ThresholdSchedule s;
  s.kind_ = ScheduleKind::single_drop;
  s.base_ = base;
  s.ratio_ = ratio;
  return s;
}

ThresholdSchedule ThresholdSchedule::decay(double base, std::vector<double> factors) {
  ThresholdSchedule s;
  s.kind_ = ScheduleKind::decay;
  s.base_ = base;
  s.factors_ = std::move(factors);
  return s;
}

double ThresholdSchedule::at(std::size_t length) const {
  switch (kind_) {
    case ScheduleKind::fixed:
      return base_;
    case ScheduleKind::single_drop:
      return length < 3 ? base_ : base_ / ratio_;
    case ScheduleKind::decay:
      if (length < 2 || factors_.empty()) return base_;
      return base_ * factors_[std::min(length - 2, factors_.size() - 1)];
  }
  return base_;
}

std::string to_string(MiningMode mode) {
  switch (mode) {
    case MiningMode::onp_miner: return "onp-miner";
    case MiningMode::gonpm: return "gonpm";
    case MiningMode::gonpm_plus: return "gonpm-plus";
    case MiningMode::positive_only: return "positive-only";
  }
  return "?";
}

MiningMode parse_mining_mode(const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), '_', '-');
  if (t == "onp-miner") return MiningMode::onp_miner;
  if (t == "gonpm") return MiningMode::gonpm;
  if (t == "gonpm-plus") return MiningMode::gonpm_plus;
  if (t == "positive-only") return MiningMode::positive_only;
  throw ConfigError("unknown mining mode '" + text + "'");
}

MiningConfig MiningConfig::for_mode(MiningMode mode, double base_minsup,
                                    GapConstraint gap, std::optional<double> ratio,
                                    std::optional<std::vector<double>> factors) {
  if (ratio && mode != MiningMode::gonpm) {
    throw ConfigError("a threshold ratio only applies to gonpm");
  }
  if (factors && mode != MiningMode::gonpm_plus) {
    throw ConfigError("decay factors only apply to gonpm-plus");
  }
  MiningConfig cfg;
  cfg.mode = mode;
  cfg.gap = gap;
  switch (mode) {
    case MiningMode::onp_miner:
    case MiningMode::positive_only:
      cfg.schedule = ThresholdSchedule::fixed(base_minsup);
      break;
    case MiningMode::gonpm:
      cfg.schedule =
          ThresholdSchedule::single_drop(base_minsup, ratio.value_or(kDefaultGonpmRatio));
      break;
    case MiningMode::gonpm_plus:
      cfg.schedule =
          ThresholdSchedule::decay(base_minsup, factors.value_or(kDefaultDecayFactors));
      break;
  }
  return cfg;
}

void MiningConfig::validate() const {
  if (!gap.valid()) throw ConfigError("gap minimum exceeds maximum");
  if (!(schedule.base() > 0)) throw ConfigError("minsup must be positive");
  const ScheduleKind want = mode == MiningMode::gonpm        ? ScheduleKind::single_drop
                            : mode == MiningMode::gonpm_plus ? ScheduleKind::decay
                                                             : ScheduleKind::fixed;
  if (schedule.kind() != want) {
    throw ConfigError("mode " + to_string(mode) + " does not match its threshold schedule");
  }
  if (want == ScheduleKind::single_drop && !(schedule.ratio() > 0)) {
    throw ConfigError("ratio must be positive");
  }
  if (want == ScheduleKind::decay) {
    if (schedule.factors().empty()) throw ConfigError("decay needs at least one factor");
    for (double f : schedule.factors()) {
      if (!(f > 0 && f <= 1)) throw ConfigError("decay factors must lie in (0,1]");
    }
  }
  if (max_level && *max_level == 0) throw ConfigError("max level must be >= 1");
  if (max_patterns && *max_patterns == 0) throw ConfigError("max patterns must be >= 1");
}

std::size_t MiningResult::pattern_count() const {
  std::size_t n = 0;
  for (const auto& l : levels) n += l.entries.size();
  return n;
}

std::vector<PatternSupport> MiningResult::all() const {
  std::vector<PatternSupport> out;
  for (const auto& l : levels) out.insert(out.end(), l.entries.begin(), l.entries.end());
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void sort_canonical(std::vector<PatternSupport>& entries) {
  std::vector<std::pair<std::string, std::size_t>> keys;
  keys.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    keys.emplace_back(format_pattern(entries[i].pattern), i);
  }
  std::sort(keys.begin(), keys.end());
  std::vector<PatternSupport> sorted;
  sorted.reserve(entries.size());
  for (const auto& k : keys) sorted.push_back(std::move(entries[k.second]));
  entries = std::move(sorted);
}

std::vector<Support> score_all(const Corpus& sdb, const std::vector<NegPattern>& ps) {
  std::vector<Support> sup(ps.size());
  parallel_for(ps.size(), [&](std::size_t i) { sup[i] = support_db(sdb, ps[i]); });
  return sup;
}

void keep_frequent(const std::vector<NegPattern>& ps, const std::vector<Support>& sup,
                   double threshold, std::vector<PatternSupport>& out) {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (static_cast<double>(sup[i]) >= threshold) out.push_back({ps[i], sup[i]});
  }
}

}  // namespace

LevelSet frequent_1(const Corpus& sdb, const ThresholdSchedule& schedule) {
  std::map<Symbol, Support> counts;
  for (Symbol s = kA; s <= kT; ++s) counts[s] = 0;
  for (const auto& seq : sdb.sequences()) {
    for (Symbol t : seq.tokens) ++counts[t];
  }
  LevelSet level{1, {}};
  const double threshold = schedule.at(1);
  for (const auto& [sym, n] : counts) {
    if (static_cast<double>(n) >= threshold) {
      level.entries.push_back({NegPattern({sym}, GapConstraint{}), n});
    }
  }
  sort_canonical(level.entries);
  return level;
}

LevelSet find_onp2(const Corpus& sdb, const MiningConfig& cfg, const LevelSet& f1,
                   LevelStats* stats) {
  const double threshold = cfg.schedule.at(2);
  std::vector<NegPattern> positives;
  for (const auto& a : f1.entries) {
    for (const auto& b : f1.entries) {
      positives.emplace_back(
          std::vector<Symbol>{a.pattern.positives[0], b.pattern.positives[0]}, cfg.gap);
    }
  }
  LevelSet level{2, {}};
  keep_frequent(positives, score_all(sdb, positives), threshold, level.entries);

  std::vector<NegPattern> negatives;
  if (cfg.mode != MiningMode::positive_only) {
    for (const auto& kept : level.entries) {
      for (Symbol e = kA; e <= kT; ++e) {
        NegPattern n = kept.pattern;
        n.negatives[0] = e;
        negatives.push_back(std::move(n));
      }
    }
    keep_frequent(negatives, score_all(sdb, negatives), threshold, level.entries);
  }
  sort_canonical(level.entries);

  if (stats) {
    stats->level = 2;
    stats->threshold = threshold;
    stats->positive_candidates = positives.size();
    stats->negative_candidates = negatives.size();
    stats->evaluated = positives.size() + negatives.size();
    stats->frequent = level.entries.size();
  }
  return level;
}

std::vector<NegPattern> pattern_join(const LevelSet& level) {
  std::vector<NegPattern> out;
  if (level.entries.empty()) return out;
  const std::size_t k = level.entries.front().pattern.length();
  if (k < 2) throw DataError("pattern_join needs patterns of length >= 2");

  // Key of a pattern with one end removed: positives then negatives.
  auto key = [](const NegPattern& p, std::size_t drop_front) {
    std::vector<Symbol> kv;
    const std::size_t k = p.length();
    kv.insert(kv.end(), p.positives.begin() + static_cast<std::ptrdiff_t>(drop_front),
              p.positives.begin() + static_cast<std::ptrdiff_t>(k - 1 + drop_front));
    kv.push_back(-1);
    kv.insert(kv.end(), p.negatives.begin() + static_cast<std::ptrdiff_t>(drop_front),
              p.negatives.begin() + static_cast<std::ptrdiff_t>(k - 2 + drop_front));
    return kv;
  };

  std::map<std::vector<Symbol>, std::vector<std::size_t>> by_prefix;
  for (std::size_t i = 0; i < level.entries.size(); ++i) {
    by_prefix[key(level.entries[i].pattern, 0)].push_back(i);
  }
  std::set<NegPattern> seen;
  for (const auto& pe : level.entries) {
    const NegPattern& p = pe.pattern;
    auto it = by_prefix.find(key(p, 1));
    if (it == by_prefix.end()) continue;
    for (std::size_t qi : it->second) {
      const NegPattern& q = level.entries[qi].pattern;
      if (q.gap != p.gap) continue;
      NegPattern r = p;
      r.positives.push_back(q.positives.back());
      r.negatives.push_back(q.negatives.back());
      seen.insert(std::move(r));
    }
  }
  std::vector<std::pair<std::string, const NegPattern*>> keyed;
  for (const auto& r : seen) keyed.emplace_back(format_pattern(r), &r);
  std::sort(keyed.begin(), keyed.end());
  out.reserve(keyed.size());
  for (const auto& kp : keyed) out.push_back(*kp.second);
  return out;
}

LevelSet filter_level(const Corpus& sdb, const std::vector<NegPattern>& cands,
                      std::size_t level, double threshold, LevelStats* stats) {
  std::vector<NegPattern> positives, negatives;
  for (const auto& c : cands) (c.is_positive() ? positives : negatives).push_back(c);

  LevelSet out{level, {}};
  keep_frequent(positives, score_all(sdb, positives), threshold, out.entries);

  std::set<NegPattern> frequent_projections;
  for (const auto& e : out.entries) frequent_projections.insert(e.pattern);
  std::vector<NegPattern> survivors;
  for (auto& n : negatives) {
    if (frequent_projections.count(n.positive_projection())) survivors.push_back(std::move(n));
  }
  keep_frequent(survivors, score_all(sdb, survivors), threshold, out.entries);
  sort_canonical(out.entries);

  if (stats) {
    stats->level = level;
    stats->threshold = threshold;
    stats->positive_candidates = positives.size();
    stats->negative_candidates = negatives.size();
    stats->pruned_negatives = negatives.size() - survivors.size();
    stats->evaluated = positives.size() + survivors.size();
    stats->frequent = out.entries.size();
  }
  return out;
}

namespace {

// Keeps the `keep` best entries by (support desc, canonical asc).
std::size_t truncate_level(LevelSet& level, std::size_t keep) {
  if (level.entries.size() <= keep) return 0;
  const std::size_t dropped = level.entries.size() - keep;
  // Entries are in canonical order already, so a stable sort on support
  // leaves ties canonical.
  std::stable_sort(level.entries.begin(), level.entries.end(),
                   [](const PatternSupport& a, const PatternSupport& b) {
                     return a.support > b.support;
                   });
  level.entries.resize(keep);
  sort_canonical(level.entries);
  return dropped;
}

}  // namespace

MiningResult mine(const Corpus& sdb, const MiningConfig& cfg) {
  cfg.validate();
  const auto t_start = Clock::now();
  MiningResult result;
  result.stats.database_length = sdb.total_tokens();
  std::size_t cumulative = 0;
  bool capped = false;

  // Appends a computed level; returns false when mining must stop.
  auto accept = [&](LevelSet level, LevelStats st) {
    if (cfg.max_patterns && cumulative + level.entries.size() > *cfg.max_patterns) {
      st.truncated = truncate_level(level, *cfg.max_patterns - cumulative);
      st.frequent = level.entries.size();
      capped = true;
    }
    cumulative += level.entries.size();
    result.stats.total_candidates += st.positive_candidates + st.negative_candidates;
    result.stats.levels.push_back(st);
    const bool empty = level.entries.empty();
    if (!empty) result.stats.max_pattern_length = level.level;
    if (!empty || level.level == 1) result.levels.push_back(std::move(level));
    const bool more = !empty && !capped &&
                      !(cfg.max_level && result.levels.back().level >= *cfg.max_level);
    return more;
  };

  auto t0 = Clock::now();
  LevelSet f1 = frequent_1(sdb, cfg.schedule);
  LevelStats s1;
  s1.level = 1;
  s1.threshold = cfg.schedule.at(1);
  s1.positive_candidates = kCanonicalCount;
  s1.frequent = f1.entries.size();
  s1.seconds = seconds_since(t0);
  if (accept(f1, s1)) {
    t0 = Clock::now();
    LevelStats s2;
    LevelSet f2 = find_onp2(sdb, cfg, result.levels.back(), &s2);
    s2.seconds = seconds_since(t0);
    bool more = accept(std::move(f2), s2);
    while (more) {
      t0 = Clock::now();
      const std::size_t next = result.levels.back().level + 1;
      const auto cands = pattern_join(result.levels.back());
      LevelStats st;
      LevelSet f = filter_level(sdb, cands, next, cfg.schedule.at(next), &st);
      st.seconds = seconds_since(t0);
      more = accept(std::move(f), st);
    }
  }
  result.stats.seconds = seconds_since(t_start);
  return result;
}

}  // namespace nsp
