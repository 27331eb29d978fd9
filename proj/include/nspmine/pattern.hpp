#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nspmine/seqio.hpp"
#include "nspmine/symbols.hpp"

namespace nsp {

// Number of wildcard positions allowed between consecutive matched elements.
struct GapConstraint {
  std::size_t min_gap = 0;
  std::size_t max_gap = 0;

  bool valid() const { return min_gap <= max_gap; }
  auto operator<=>(const GapConstraint&) const = default;
};

// Marks an internal gap without a forbidden symbol.
inline constexpr Symbol kNoNegative = 0;

// p1 [M,N] ~e1 p2 ... [M,N] ~e(k-1) pk. negatives[j] restricts the gap between
// positives[j] and positives[j+1]; kNoNegative leaves it unrestricted.
struct NegPattern {
  std::vector<Symbol> positives;
  GapConstraint gap;
  std::vector<Symbol> negatives;

  NegPattern() = default;
  NegPattern(std::vector<Symbol> pos, GapConstraint g,
             std::vector<Symbol> neg = {});

  std::size_t length() const { return positives.size(); }
  bool is_positive() const;
  std::size_t negative_count() const;
  // The same pattern with every gap negative erased.
  NegPattern positive_projection() const;

  // Throws DataError if the structural invariants do not hold.
  void validate() const;

  auto operator<=>(const NegPattern&) const = default;
};

using Support = std::uint64_t;

// 1-based matched positions.
using Occurrence = std::vector<std::size_t>;

// Every occurrence in lexicographic position order, no one-off filtering.
std::vector<Occurrence> occurrences_all(std::span<const Symbol> seq,
                                        const NegPattern& p);

// Greedy one-off support. Roots are scanned left to right; each unused root
// matching p1 is extended depth-first, trying the smallest admissible next
// position first and backtracking on dead ends. A complete match marks its
// positions used. Gap positions are never marked, and a forbidden symbol
// anywhere strictly inside a gap rejects it whether or not it is used.
Support support_oneoff(std::span<const Symbol> seq, const NegPattern& p);

Support support_db(const Corpus& sdb, const NegPattern& p);

// Exact maximum number of pairwise position-disjoint occurrences. Refuses
// (DataError) when occurrences_all exceeds max_occurrences or the sequence is
// longer than 63 positions.
Support oracle_max_disjoint(std::span<const Symbol> seq, const NegPattern& p,
                            std::size_t max_occurrences = 20);

// Canonical text form, e.g. "A[0,2]~G C[0,2]C". The lexicographic order of
// this string is the total order used for all pattern listings.
std::string format_pattern(const NegPattern& p);
NegPattern parse_pattern(std::string_view text);

// Token form: positives and negatives in sequence order with " -1 "
// separators, negatives written f<code>, closed by "-1 -2".
std::string pattern_tokens(const NegPattern& p);

inline std::span<const Symbol> tokens_of(const EncodedSequence& s) {
  return s.tokens;
}

}  // namespace nsp
