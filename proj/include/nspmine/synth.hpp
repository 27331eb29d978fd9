#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "nspmine/seqio.hpp"

namespace nsp {

struct PlantedMotif {
  std::string motif;   // nucleotide string
  double rate = 1.0;   // insertions per sequence: floor(rate) + Bernoulli(frac)
  std::size_t max_gap = 0;  // background symbols between motif symbols, 0..max_gap
};

struct SynthClass {
  std::string label;
  std::vector<PlantedMotif> planted;
  std::vector<std::string> forbidden;  // contiguous motifs absent from output
  // Optional per-class background; empty means the shared background.
  std::vector<double> background;
};

struct SynthSpec {
  std::vector<SynthClass> classes;
  std::size_t sequences_per_class = 100;
  std::size_t min_length = 300;
  std::size_t max_length = 600;
  std::vector<double> background{0.25, 0.25, 0.25, 0.25};  // A C G T
  std::size_t max_retries = 8;
  bool repair = true;
  std::uint64_t seed = 42;

  void validate() const;
};

// Deterministic given spec.seed. Ids are "<label>_<index>".
Corpus generate(const SynthSpec& spec);

// Contiguous occurrences of motif in seq (start offsets, 0-based).
std::size_t count_contiguous(const std::vector<Symbol>& seq,
                             const std::vector<Symbol>& motif);
// True when motif occurs as a subsequence with at most max_gap symbols
// between consecutive elements.
bool contains_gapped(const std::vector<Symbol>& seq,
                     const std::vector<Symbol>& motif, std::size_t max_gap);

std::vector<Symbol> encode_motif(const std::string& motif);

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json synth_spec_to_json(const SynthSpec& spec);

}  // namespace nsp
