#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nspmine/pattern.hpp"
#include "nspmine/random.hpp"
#include "nspmine/seqio.hpp"

namespace testing {

inline std::vector<nsp::Symbol> seq_of(const std::string& text) {
  const nsp::SymbolTable table;
  std::vector<nsp::Symbol> out;
  for (char c : text) out.push_back(*table.encode(c));
  return out;
}

inline nsp::Corpus corpus_of(const std::vector<std::string>& seqs,
                             const std::string& label = "x") {
  nsp::Corpus c;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    c.add({label + "_" + std::to_string(i), label, seq_of(seqs[i])});
  }
  return c;
}

inline nsp::NegPattern pat(const std::string& text) { return nsp::parse_pattern(text); }

inline std::vector<nsp::Symbol> random_seq(nsp::Rng& rng, std::size_t len, int alphabet = 4) {
  std::vector<nsp::Symbol> s(len);
  for (auto& x : s) x = static_cast<nsp::Symbol>(1 + rng.below(static_cast<std::uint64_t>(alphabet)));
  return s;
}

// Random pattern of the given length over 1..alphabet; each gap carries a
// forbidden symbol with probability 1/2.
inline nsp::NegPattern random_pattern(nsp::Rng& rng, std::size_t len, nsp::GapConstraint gap,
                                      int alphabet = 4) {
  std::vector<nsp::Symbol> pos = random_seq(rng, len, alphabet);
  std::vector<nsp::Symbol> neg(len - 1, nsp::kNoNegative);
  for (auto& n : neg) {
    if (rng.below(2)) n = static_cast<nsp::Symbol>(1 + rng.below(static_cast<std::uint64_t>(alphabet)));
  }
  return nsp::NegPattern(pos, gap, neg);
}

// Fresh scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("nspmine_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
