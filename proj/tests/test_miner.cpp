#include <doctest.h>

#include <set>
#include <sstream>

#include "brute_miner.hpp"
#include "nspmine/error.hpp"
#include "nspmine/miner.hpp"
#include "support.hpp"

using namespace nsp;
using testing::pat;

namespace {

const LevelSet& level(const MiningResult& r, std::size_t k) {
  for (const auto& l : r.levels) {
    if (l.level == k) return l;
  }
  FAIL("missing level " << k);
  throw std::logic_error("unreachable");
}

std::map<std::string, Support> entries(const LevelSet& l) {
  std::map<std::string, Support> out;
  for (const auto& e : l.entries) out.emplace(format_pattern(e.pattern), e.support);
  return out;
}

}  // namespace

TEST_CASE("threshold schedules") {
  const auto f = ThresholdSchedule::fixed(10);
  CHECK(f.at(1) == 10);
  CHECK(f.at(7) == 10);
  const auto s = ThresholdSchedule::single_drop(13, 1.3);
  CHECK(s.at(2) == 13);
  CHECK(s.at(3) == doctest::Approx(10));
  CHECK(s.at(9) == doctest::Approx(10));
  const auto d = ThresholdSchedule::decay(100, {0.9, 0.85, 0.75, 0.65});
  CHECK(d.at(1) == 100);
  CHECK(d.at(2) == doctest::Approx(90));
  CHECK(d.at(3) == doctest::Approx(85));
  CHECK(d.at(5) == doctest::Approx(65));
  CHECK(d.at(8) == doctest::Approx(65));
}

TEST_CASE("mining config validation") {
  CHECK_NOTHROW(MiningConfig::for_mode(MiningMode::gonpm_plus, 2, {0, 2}).validate());
  CHECK(MiningConfig::for_mode(MiningMode::gonpm, 2, {0, 2}).schedule.ratio() == kDefaultGonpmRatio);
  CHECK(MiningConfig::for_mode(MiningMode::gonpm_plus, 2, {0, 2}).schedule.factors() ==
        kDefaultDecayFactors);
  CHECK_THROWS_AS(MiningConfig::for_mode(MiningMode::onp_miner, 2, {0, 2}, std::nullopt,
                                         std::vector<double>{0.9})
                      .validate(),
                  ConfigError);
  CHECK_THROWS_AS(MiningConfig::for_mode(MiningMode::onp_miner, 2, {3, 2}).validate(), ConfigError);
  CHECK_THROWS_AS(MiningConfig::for_mode(MiningMode::gonpm_plus, 2, {0, 2}, std::nullopt,
                                         std::vector<double>{0.9, 1.2})
                      .validate(),
                  ConfigError);
  CHECK_THROWS_AS(MiningConfig::for_mode(MiningMode::onp_miner, 0, {0, 2}).validate(), ConfigError);
  CHECK(parse_mining_mode("gonpm-plus") == MiningMode::gonpm_plus);
  CHECK(parse_mining_mode("positive_only") == MiningMode::positive_only);
  CHECK_THROWS_AS(parse_mining_mode("apriori"), ConfigError);
}

TEST_CASE("walkthrough: AACACCTCAAG, gap [0,2], minsup 2, decay (0.9, 0.5)") {
  const auto sdb = testing::corpus_of({"AACACCTCAAG"});
  auto cfg = MiningConfig::for_mode(MiningMode::gonpm_plus, 2, {0, 2}, std::nullopt,
                                    std::vector<double>{0.9, 0.5});
  cfg.max_level = 2;
  const auto r = mine(sdb, cfg);

  CHECK(entries(level(r, 1)) == std::map<std::string, Support>{{"A", 5}, {"C", 4}});

  std::set<std::string> positives;
  for (const auto& e : level(r, 2).entries) {
    if (e.pattern.is_positive()) positives.insert(format_pattern(e.pattern));
  }
  CHECK(positives == std::set<std::string>{"A[0,2]A", "A[0,2]C", "C[0,2]A", "C[0,2]C"});

  REQUIRE(r.stats.levels.size() >= 2);
  CHECK(r.stats.levels[1].negative_candidates == 16);
  CHECK(r.stats.levels[1].threshold == doctest::Approx(1.8));

  const auto f2 = entries(level(r, 2));
  for (const char* neg : {"A[0,2]~G C", "A[0,2]~T C", "C[0,2]~G A", "C[0,2]~C C", "C[0,2]~G C"}) {
    INFO(neg);
    REQUIRE(f2.count(neg) == 1);
    CHECK(f2.at(neg) >= 2);
  }
}

TEST_CASE("walkthrough level 3 uses the second factor") {
  const auto sdb = testing::corpus_of({"AACACCTCAAG"});
  auto cfg = MiningConfig::for_mode(MiningMode::gonpm_plus, 2, {0, 2}, std::nullopt,
                                    std::vector<double>{0.9, 0.5});
  cfg.max_level = 3;
  const auto r = mine(sdb, cfg);
  CHECK(r.stats.levels[2].threshold == doctest::Approx(1.0));
  const auto f3 = entries(level(r, 3));
  for (const char* p : {"A[0,2]A[0,2]C", "A[0,2]C[0,2]A", "A[0,2]C[0,2]C", "C[0,2]A[0,2]C",
                        "C[0,2]A[0,2]A", "C[0,2]C[0,2]A", "A[0,2]C[0,2]~C C",
                        "A[0,2]~G C[0,2]~C C"}) {
    INFO(p);
    CHECK(f3.count(p) == 1);
  }
}

TEST_CASE("pattern join matches suffix to prefix including negatives") {
  LevelSet l;
  l.level = 2;
  for (const char* p : {"A[0,2]~G C", "C[0,2]A", "C[0,2]~T A", "G[0,2]A"}) {
    l.entries.push_back({pat(p), 2});
  }
  std::vector<std::string> got;
  for (const auto& p : pattern_join(l)) got.push_back(format_pattern(p));
  CHECK(got == std::vector<std::string>{"A[0,2]~G C[0,2]A", "A[0,2]~G C[0,2]~T A",
                                        "C[0,2]A[0,2]~G C", "C[0,2]~T A[0,2]~G C",
                                        "G[0,2]A[0,2]~G C"});
}

TEST_CASE("positive-only mode never emits negatives") {
  const auto sdb = testing::corpus_of({"AACACCTCAAG", "ACGTTGCAAC"});
  const auto r = mine(sdb, MiningConfig::for_mode(MiningMode::positive_only, 2, {0, 2}));
  CHECK(r.pattern_count() > 0);
  for (const auto& e : r.all()) CHECK(e.pattern.is_positive());
}

TEST_CASE("levels are sorted canonically and meet their threshold") {
  const auto sdb = testing::tiny_corpus(3);
  const auto cfg = MiningConfig::for_mode(MiningMode::gonpm_plus, 3, {0, 2});
  const auto r = mine(sdb, cfg);
  for (const auto& l : r.levels) {
    for (std::size_t i = 0; i < l.entries.size(); ++i) {
      CHECK(l.entries[i].pattern.length() == l.level);
      CHECK(static_cast<double>(l.entries[i].support) >= cfg.schedule.at(l.level));
      CHECK(l.entries[i].support == support_db(sdb, l.entries[i].pattern));
      if (i > 0) {
        CHECK(format_pattern(l.entries[i - 1].pattern) < format_pattern(l.entries[i].pattern));
      }
    }
  }
}

TEST_CASE("max_patterns keeps the best-supported patterns and stops") {
  const auto sdb = testing::corpus_of({"AACACCTCAAGACCA", "CACCAGTAAC"});
  auto cfg = MiningConfig::for_mode(MiningMode::onp_miner, 2, {0, 2});
  const auto full = mine(sdb, cfg);
  cfg.max_patterns = 10;
  const auto capped = mine(sdb, cfg);
  CHECK(capped.pattern_count() == 10);
  CHECK(full.pattern_count() > 10);
  std::size_t truncated = 0;
  for (const auto& s : capped.stats.levels) truncated += s.truncated;
  CHECK(truncated > 0);
}

TEST_CASE("max_level stops growth") {
  const auto sdb = testing::corpus_of({"AACACCTCAAGACCA"});
  auto cfg = MiningConfig::for_mode(MiningMode::onp_miner, 2, {0, 2});
  cfg.max_level = 2;
  const auto r = mine(sdb, cfg);
  CHECK(r.levels.back().level <= 2);
}

TEST_CASE("exhaustive equivalence on small corpora") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sdb = testing::tiny_corpus(seed);
    auto cfg = MiningConfig::for_mode(MiningMode::onp_miner, 2, {0, 2});
    cfg.max_level = 4;
    const auto got = testing::as_map(mine(sdb, cfg).all());
    const auto want = testing::brute_force_mine(sdb, {0, 2}, 4, [](std::size_t) { return 2.0; });
    INFO("seed " << seed);
    CHECK(got == want);
  }
}

TEST_CASE("decay schedule output contains the fixed schedule output") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sdb = testing::tiny_corpus(seed);
    auto fixed = MiningConfig::for_mode(MiningMode::onp_miner, 3, {0, 2});
    auto decay = MiningConfig::for_mode(MiningMode::gonpm_plus, 3, {0, 2});
    fixed.max_level = decay.max_level = 4;
    const auto a = testing::as_map(mine(sdb, fixed).all());
    const auto b = testing::as_map(mine(sdb, decay).all());
    for (const auto& [p, s] : a) CHECK(b.count(p) == 1);
  }
}

TEST_CASE("stats record the growth inputs") {
  const auto sdb = testing::corpus_of({"AACACCTCAAG", "ACCA"});
  const auto r = mine(sdb, MiningConfig::for_mode(MiningMode::onp_miner, 2, {0, 2}));
  CHECK(r.stats.database_length == 15);
  std::size_t cands = 0;
  for (const auto& l : r.stats.levels) cands += l.positive_candidates + l.negative_candidates;
  CHECK(r.stats.total_candidates == cands);
  CHECK(r.stats.max_pattern_length == r.levels.back().level);
}

TEST_CASE("pattern files round trip") {
  const auto sdb = testing::corpus_of({"AACACCTCAAG"});
  auto cfg = MiningConfig::for_mode(MiningMode::gonpm_plus, 2, {0, 2});
  cfg.max_level = 3;
  const auto r = mine(sdb, cfg);
  std::ostringstream out;
  write_patterns(out, r, "walk");
  std::istringstream in(out.str());
  const auto lines = read_pattern_lines(in);
  CHECK(lines.size() == r.pattern_count());
  CHECK(out.str().rfind("A #SUP: 5 #LEN: 1 #CLASS: walk\n", 0) == 0);
  const auto back = results_from_lines(lines);
  REQUIRE(back.count("walk") == 1);
  CHECK(testing::as_map(back.at("walk").all()) == testing::as_map(r.all()));

  std::ostringstream tok;
  write_pattern_tokens(tok, r);
  CHECK(tok.str().rfind("1 -1 -2\n", 0) == 0);

  std::istringstream bad("A #SUP: x #LEN: 1 #CLASS: walk\n");
  CHECK_THROWS_AS(read_pattern_lines(bad), ParseError);
  std::istringstream wrong_len("A[0,2]C #SUP: 3 #LEN: 3 #CLASS: walk\n");
  CHECK_THROWS_AS(read_pattern_lines(wrong_len), ParseError);
}
