#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace nsp {

// Integer token for one residue. Canonical nucleotides are 1..4, IUPAC
// ambiguity codes follow from 5. 0 is never a valid residue.
using Symbol = std::int32_t;

inline constexpr Symbol kA = 1;
inline constexpr Symbol kC = 2;
inline constexpr Symbol kG = 3;
inline constexpr Symbol kT = 4;
inline constexpr Symbol kCanonicalCount = 4;

inline constexpr bool is_canonical(Symbol s) { return s >= kA && s <= kT; }

// Nucleotide <-> token mapping. A=1 C=2 G=3 T=4; the ambiguity alphabet
// U R Y S W K M B D H V N receives 5..16 in that order.
class SymbolTable {
 public:
  static constexpr std::string_view kCanonicalChars = "ACGT";
  static constexpr std::string_view kRedundantChars = "URYSWKMBDHVN";

  // With map_u_to_t, 'U' is an alias of 'T' and encodes to 4.
  explicit SymbolTable(bool map_u_to_t = false);

  std::optional<Symbol> encode(char c) const;
  // Character for a code; nullopt for codes outside the table.
  std::optional<char> decode(Symbol s) const;
  bool maps_u_to_t() const { return map_u_to_t_; }
  Symbol max_code() const {
    return static_cast<Symbol>(kCanonicalChars.size() + kRedundantChars.size());
  }

 private:
  bool map_u_to_t_;
  std::array<Symbol, 256> forward_{};
};

// "A", "C", "G", "T" for canonical codes, "#n" otherwise.
std::string symbol_name(Symbol s);

}  // namespace nsp
