#include "nspmine/symbols.hpp"

namespace nsp {

SymbolTable::SymbolTable(bool map_u_to_t) : map_u_to_t_(map_u_to_t) {
  Symbol code = 1;
  for (char c : kCanonicalChars) forward_[static_cast<unsigned char>(c)] = code++;
  for (char c : kRedundantChars) forward_[static_cast<unsigned char>(c)] = code++;
  if (map_u_to_t_) forward_['U'] = kT;
}

std::optional<Symbol> SymbolTable::encode(char c) const {
  const Symbol s = forward_[static_cast<unsigned char>(c)];
  if (s == 0) return std::nullopt;
  return s;
}

std::optional<char> SymbolTable::decode(Symbol s) const {
  if (s >= 1 && s <= kCanonicalCount) return kCanonicalChars[s - 1];
  const Symbol r = s - kCanonicalCount - 1;
  if (r >= 0 && r < static_cast<Symbol>(kRedundantChars.size())) {
    if (map_u_to_t_ && kRedundantChars[r] == 'U') return std::nullopt;
    return kRedundantChars[r];
  }
  return std::nullopt;
}

std::string symbol_name(Symbol s) {
  if (is_canonical(s)) return std::string(1, SymbolTable::kCanonicalChars[s - 1]);
  return "#" + std::to_string(s);
}

}  // namespace nsp
