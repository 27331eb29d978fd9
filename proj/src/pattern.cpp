#include "nspmine/pattern.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <unordered_map>

#include "nspmine/error.hpp"

namespace nsp {

NegPattern::NegPattern(std::vector<Symbol> pos, GapConstraint g,
                       std::vector<Symbol> neg)
    : positives(std::move(pos)), gap(g), negatives(std::move(neg)) {
  if (negatives.empty() && positives.size() > 1) {
    negatives.assign(positives.size() - 1, kNoNegative);
  }
}

bool NegPattern::is_positive() const {
  return std::all_of(negatives.begin(), negatives.end(),
                     [](Symbol s) { return s == kNoNegative; });
}

std::size_t NegPattern::negative_count() const {
  return static_cast<std::size_t>(std::count_if(
      negatives.begin(), negatives.end(), [](Symbol s) { return s != kNoNegative; }));
}

NegPattern NegPattern::positive_projection() const {
  NegPattern out = *this;
  std::fill(out.negatives.begin(), out.negatives.end(), kNoNegative);
  return out;
}

void NegPattern::validate() const {
  if (positives.empty()) throw DataError("pattern has no positive element");
  if (negatives.size() + 1 != positives.size()) {
    throw DataError("pattern needs exactly one gap slot between positives");
  }
  if (!gap.valid()) throw DataError("gap constraint with min > max");
  for (Symbol s : positives) {
    if (s < 1) throw DataError("invalid positive symbol " + std::to_string(s));
  }
  for (Symbol s : negatives) {
    if (s != kNoNegative && !is_canonical(s)) {
      throw DataError("forbidden symbol must be canonical, got " + std::to_string(s));
    }
  }
}

namespace {

// Shared walk over admissible next positions after `pos` for element j + 1.
// Calls try_next(k) for each candidate position (0-based) in increasing order;
// stops when try_next returns true. A forbidden symbol at k closes the window
// for every later k, after k itself has been offered.
template <typename TryNext>
bool for_each_next(std::span<const Symbol> seq, const NegPattern& p,
                   std::size_t j, std::size_t pos, TryNext&& try_next) {
  const Symbol want = p.positives[j + 1];
  const Symbol forbidden = p.negatives[j];
  const std::size_t first = pos + 1 + p.gap.min_gap;
  const std::size_t last = std::min(pos + 1 + p.gap.max_gap, seq.size() - 1);
  if (forbidden != kNoNegative) {
    // Wildcards before the minimum gap must also avoid the forbidden symbol.
    for (std::size_t k = pos + 1; k < first && k <= last; ++k) {
      if (seq[k] == forbidden) return false;
    }
  }
  for (std::size_t k = first; k <= last; ++k) {
    if (seq[k] == want && try_next(k)) return true;
    if (forbidden != kNoNegative && seq[k] == forbidden) return false;
  }
  return false;
}

void enumerate(std::span<const Symbol> seq, const NegPattern& p, std::size_t j,
               Occurrence& current, std::vector<Occurrence>& out) {
  if (j + 1 == p.length()) {
    out.push_back(current);
    return;
  }
  for_each_next(seq, p, j, current.back() - 1, [&](std::size_t k) {
    current.push_back(k + 1);
    enumerate(seq, p, j + 1, current, out);
    current.pop_back();
    return false;
  });
}

bool extend_greedy(std::span<const Symbol> seq, const NegPattern& p,
                   std::size_t j, std::vector<char>& used,
                   std::vector<std::size_t>& path) {
  if (j + 1 == p.length()) return true;
  return for_each_next(seq, p, j, path.back(), [&](std::size_t k) {
    if (used[k]) return false;
    path.push_back(k);
    if (extend_greedy(seq, p, j + 1, used, path)) return true;
    path.pop_back();
    return false;
  });
}

}  // namespace

std::vector<Occurrence> occurrences_all(std::span<const Symbol> seq,
                                        const NegPattern& p) {
  std::vector<Occurrence> out;
  if (p.positives.empty()) return out;
  Occurrence current;
  current.reserve(p.length());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] != p.positives[0]) continue;
    current.assign(1, i + 1);
    enumerate(seq, p, 0, current, out);
  }
  return out;
}

Support support_oneoff(std::span<const Symbol> seq, const NegPattern& p) {
  if (p.positives.empty() || seq.size() < p.length()) return 0;
  if (p.length() == 1) {
    return static_cast<Support>(std::count(seq.begin(), seq.end(), p.positives[0]));
  }
  thread_local std::vector<char> used;
  thread_local std::vector<std::size_t> path;
  used.assign(seq.size(), 0);
  path.clear();
  path.reserve(p.length());
  Support count = 0;
  const Symbol root_symbol = p.positives[0];
  const std::size_t last_root = seq.size() - p.length();
  for (std::size_t root = 0; root <= last_root; ++root) {
    if (used[root] || seq[root] != root_symbol) continue;
    path.assign(1, root);
    if (extend_greedy(seq, p, 0, used, path)) {
      for (std::size_t k : path) used[k] = 1;
      ++count;
    }
  }
  return count;
}

Support support_db(const Corpus& sdb, const NegPattern& p) {
  Support total = 0;
  for (const auto& s : sdb.sequences()) total += support_oneoff(s.tokens, p);
  return total;
}

Support oracle_max_disjoint(std::span<const Symbol> seq, const NegPattern& p,
                            std::size_t max_occurrences) {
  if (seq.size() > 63) {
    throw DataError("oracle refused: sequence longer than 63 positions");
  }
  const auto occs = occurrences_all(seq, p);
  if (occs.size() > max_occurrences) {
    throw DataError("oracle refused: " + std::to_string(occs.size()) +
                    " occurrences exceed the guard of " +
                    std::to_string(max_occurrences));
  }
  const std::size_t n = seq.size();
  // Occurrence masks grouped by their first (smallest) position.
  std::vector<std::vector<std::uint64_t>> starting(n);
  for (const auto& o : occs) {
    std::uint64_t mask = 0;
    for (std::size_t pos : o) mask |= std::uint64_t{1} << (pos - 1);
    starting[o.front() - 1].push_back(mask);
  }

  // best(i, taken): positions below i are settled; taken holds consumed
  // positions >= i. Position i is either consumed already, left unused, or
  // the first position of a newly chosen occurrence.
  std::vector<std::unordered_map<std::uint64_t, Support>> memo(n + 1);
  auto best = [&](auto& self, std::size_t i, std::uint64_t taken) -> Support {
    if (i == n) return 0;
    const std::uint64_t bit = std::uint64_t{1} << i;
    if (taken & bit) return self(self, i + 1, taken & ~bit);
    if (auto it = memo[i].find(taken); it != memo[i].end()) return it->second;
    Support result = self(self, i + 1, taken);
    for (std::uint64_t occ : starting[i]) {
      if (occ & taken) continue;
      result = std::max(result, 1 + self(self, i + 1, (taken | occ) & ~bit));
    }
    memo[i].emplace(taken, result);
    return result;
  };
  return best(best, 0, 0);
}

std::string format_pattern(const NegPattern& p) {
  std::string out;
  if (p.positives.empty()) return out;
  const std::string gap =
      "[" + std::to_string(p.gap.min_gap) + "," + std::to_string(p.gap.max_gap) + "]";
  out += symbol_name(p.positives[0]);
  for (std::size_t j = 0; j + 1 < p.positives.size(); ++j) {
    out += gap;
    if (p.negatives[j] != kNoNegative) {
      out += '~';
      out += symbol_name(p.negatives[j]);
      out += ' ';
    }
    out += symbol_name(p.positives[j + 1]);
  }
  return out;
}

namespace {

class PatternParser {
 public:
  explicit PatternParser(std::string_view text) : text_(text) {}

  NegPattern parse() {
    NegPattern p;
    skip_spaces();
    p.positives.push_back(symbol());
    std::optional<GapConstraint> gap;
    for (;;) {
      skip_spaces();
      if (at_end()) break;
      expect('[');
      GapConstraint g;
      g.min_gap = number();
      expect(',');
      g.max_gap = number();
      expect(']');
      if (gap && *gap != g) fail("gap constraints differ within one pattern");
      gap = g;
      skip_spaces();
      Symbol neg = kNoNegative;
      if (peek() == '~') {
        ++pos_;
        neg = symbol();
        skip_spaces();
      }
      p.negatives.push_back(neg);
      p.positives.push_back(symbol());
    }
    if (gap) p.gap = *gap;
    try {
      p.validate();
    } catch (const DataError& e) {
      fail(e.what());
    }
    return p;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_spaces() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("bad pattern '" + std::string(text_) + "': " + why +
                     " at offset " + std::to_string(pos_));
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::size_t number() {
    const std::size_t start = pos_;
    std::size_t v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) fail("expected a number");
    return v;
  }
  Symbol symbol() {
    const char c = peek();
    if (c == '#') {
      ++pos_;
      const std::size_t v = number();
      if (v < 1 || v > 0x7FFFFFFF) fail("symbol code out of range");
      return static_cast<Symbol>(v);
    }
    const auto at = std::string_view("ACGT").find(c);
    if (c == '\0' || at == std::string_view::npos) fail("expected a symbol");
    ++pos_;
    return static_cast<Symbol>(at + 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

NegPattern parse_pattern(std::string_view text) { return PatternParser(text).parse(); }

std::string pattern_tokens(const NegPattern& p) {
  std::string out;
  for (std::size_t j = 0; j < p.positives.size(); ++j) {
    out += std::to_string(p.positives[j]);
    out += " -1 ";
    if (j < p.negatives.size() && p.negatives[j] != kNoNegative) {
      out += "f" + std::to_string(p.negatives[j]);
      out += " -1 ";
    }
  }
  out += "-2";
  return out;
}

}  // namespace nsp
