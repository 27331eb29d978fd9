#include "nspmine/synth.hpp"

#include <algorithm>
#include <cmath>

#include "nspmine/error.hpp"
#include "nspmine/random.hpp"

namespace nsp {

std::vector<Symbol> encode_motif(const std::string& motif) {
  std::vector<Symbol> out;
  for (char c : motif) {
    const auto at = std::string_view("ACGT").find(c);
    if (at == std::string_view::npos) {
      throw ConfigError("motif '" + motif + "' may only use A, C, G, T");
    }
    out.push_back(static_cast<Symbol>(at + 1));
  }
  if (out.empty()) throw ConfigError("empty motif");
  return out;
}

std::size_t count_contiguous(const std::vector<Symbol>& seq, const std::vector<Symbol>& motif) {
  if (motif.empty() || motif.size() > seq.size()) return 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i + motif.size() <= seq.size(); ++i) {
    if (std::equal(motif.begin(), motif.end(), seq.begin() + static_cast<std::ptrdiff_t>(i))) {
      ++n;
    }
  }
  return n;
}

namespace {

bool gapped_from(const std::vector<Symbol>& seq, const std::vector<Symbol>& motif,
                 std::size_t j, std::size_t pos, std::size_t max_gap) {
  if (j == motif.size()) return true;
  for (std::size_t k = pos + 1; k < seq.size() && k <= pos + 1 + max_gap; ++k) {
    if (seq[k] == motif[j] && gapped_from(seq, motif, j + 1, k, max_gap)) return true;
  }
  return false;
}

}  // namespace

bool contains_gapped(const std::vector<Symbol>& seq, const std::vector<Symbol>& motif,
                     std::size_t max_gap) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] == motif.front() && gapped_from(seq, motif, 1, i, max_gap)) return true;
  }
  return false;
}

void SynthSpec::validate() const {
  if (classes.size() < 1) throw ConfigError("synth spec needs at least one class");
  if (sequences_per_class == 0) throw ConfigError("sequences_per_class must be positive");
  if (min_length == 0 || min_length > max_length) throw ConfigError("bad length range");
  auto check_bg = [](const std::vector<double>& bg) {
    if (bg.size() != 4) throw ConfigError("background needs 4 probabilities (A C G T)");
    double s = 0;
    for (double p : bg) {
      if (!(p >= 0)) throw ConfigError("negative background probability");
      s += p;
    }
    if (!(s > 0)) throw ConfigError("background probabilities sum to zero");
  };
  check_bg(background);
  std::vector<std::string> seen;
  for (const auto& c : classes) {
    validate_label(c.label);
    if (std::find(seen.begin(), seen.end(), c.label) != seen.end()) {
      throw ConfigError("duplicate class " + c.label);
    }
    seen.push_back(c.label);
    const auto& bg = c.background.empty() ? background : c.background;
    check_bg(bg);
    for (const auto& f : c.forbidden) {
      const auto m = encode_motif(f);
      if (m.size() == 1 && bg[static_cast<std::size_t>(m[0] - 1)] > 0 && !repair) {
        throw ConfigError("class " + c.label + ": forbidden single symbol '" + f +
                          "' has nonzero background probability and repair is disabled");
      }
    }
    for (const auto& p : c.planted) {
      const auto m = encode_motif(p.motif);
      if (!(p.rate >= 0)) throw ConfigError("planted rate must be non-negative");
      if (m.size() + (m.size() - 1) * p.max_gap > min_length) {
        throw ConfigError("planted motif '" + p.motif + "' does not fit the minimum length");
      }
      if (p.max_gap == 0) {
        for (const auto& f : c.forbidden) {
          if (p.motif.find(f) != std::string::npos) {
            throw ConfigError("class " + c.label + ": planted '" + p.motif +
                              "' contains forbidden '" + f + "'");
          }
        }
      }
    }
  }
}

namespace {

class SequenceBuilder {
 public:
  SequenceBuilder(const std::vector<std::vector<Symbol>>& forbidden,
                  const std::vector<double>& background, const SynthSpec& spec, Rng& rng)
      : forbidden_(forbidden), background_(background), spec_(spec), rng_(rng) {}

  std::vector<Symbol> build(std::size_t length, const std::vector<PlantedMotif>& planted) {
    seq_.clear();
    protected_.assign(length, 0);
    for (std::size_t i = 0; i < length; ++i) seq_.push_back(draw_background());
    for (const auto& p : planted) {
      double whole = 0;
      const double frac = std::modf(p.rate, &whole);
      auto copies = static_cast<std::size_t>(whole);
      if (frac > 0 && rng_.unit() < frac) ++copies;
      const auto motif = encode_motif(p.motif);
      for (std::size_t c = 0; c < copies; ++c) plant(motif, p.max_gap);
    }
    repair_all();
    return seq_;
  }

 private:
  // True when some forbidden motif occurs in seq_ covering position i.
  bool covered(std::size_t i) const {
    for (const auto& f : forbidden_) {
      const std::size_t m = f.size();
      const std::size_t lo = i + 1 >= m ? i + 1 - m : 0;
      for (std::size_t s = lo; s <= i && s + m <= seq_.size(); ++s) {
        if (std::equal(f.begin(), f.end(), seq_.begin() + static_cast<std::ptrdiff_t>(s))) {
          return true;
        }
      }
    }
    return false;
  }

  Symbol draw_background() {
    const std::size_t i = seq_.size();
    seq_.push_back(0);
    for (std::size_t attempt = 0; attempt <= spec_.max_retries; ++attempt) {
      seq_[i] = static_cast<Symbol>(rng_.weighted(background_) + 1);
      if (!covered(i)) break;
    }
    if (covered(i)) {
      if (!spec_.repair) throw DataError("cannot avoid a forbidden motif without repair");
      for (Symbol s = kA; s <= kT; ++s) {
        seq_[i] = s;
        if (!covered(i)) break;
      }
      if (covered(i)) throw DataError("forbidden motifs exclude every symbol at a position");
    }
    const Symbol s = seq_[i];
    seq_.pop_back();
    return s;
  }

  void plant(const std::vector<Symbol>& motif, std::size_t max_gap) {
    std::vector<std::size_t> offsets{0};
    for (std::size_t j = 1; j < motif.size(); ++j) {
      offsets.push_back(offsets.back() + 1 + rng_.below(max_gap + 1));
    }
    const std::size_t span = offsets.back() + 1;
    std::size_t start = 0;
    // Prefer a placement that leaves earlier planted symbols intact.
    for (int attempt = 0; attempt < 32; ++attempt) {
      start = rng_.below(seq_.size() - span + 1);
      bool clash = false;
      for (std::size_t o : offsets) clash |= protected_[start + o] != 0;
      if (!clash) break;
    }
    for (std::size_t j = 0; j < motif.size(); ++j) {
      seq_[start + offsets[j]] = motif[j];
      protected_[start + offsets[j]] = 1;
    }
  }

  void repair_all() {
    for (std::size_t round = 0; round < 4 * seq_.size() + 16; ++round) {
      std::size_t bad = seq_.size();
      for (std::size_t i = 0; i < seq_.size() && bad == seq_.size(); ++i) {
        if (covered(i)) bad = i;
      }
      if (bad == seq_.size()) return;
      if (!spec_.repair) throw DataError("planting created a forbidden motif; repair disabled");
      // Change the rightmost unprotected position of the leftmost occurrence.
      bool fixed = false;
      std::size_t longest = 0;
      for (const auto& f : forbidden_) longest = std::max(longest, f.size());
      for (std::size_t i = std::min(bad + longest, seq_.size()); i-- > bad && !fixed;) {
        if (protected_[i] || !covered(i)) continue;
        const Symbol old = seq_[i];
        for (Symbol s = kA; s <= kT && !fixed; ++s) {
          seq_[i] = s;
          if (!covered(i)) fixed = true;
        }
        if (!fixed) seq_[i] = old;
      }
      if (!fixed) throw DataError("forbidden motif overlaps planted symbols only");
    }
    throw DataError("symbol repair did not converge");
  }

  const std::vector<std::vector<Symbol>>& forbidden_;
  const std::vector<double>& background_;
  const SynthSpec& spec_;
  Rng& rng_;
  std::vector<Symbol> seq_;
  std::vector<char> protected_;
};

}  // namespace

Corpus generate(const SynthSpec& spec) {
  spec.validate();
  Corpus corpus;
  for (const auto& cls : spec.classes) {
    std::vector<std::vector<Symbol>> forbidden;
    for (const auto& f : cls.forbidden) forbidden.push_back(encode_motif(f));
    const auto& bg = cls.background.empty() ? spec.background : cls.background;
    for (std::size_t s = 0; s < spec.sequences_per_class; ++s) {
      Rng rng(spec.seed, "synth/" + cls.label, s);
      const std::size_t length =
          spec.min_length + rng.below(spec.max_length - spec.min_length + 1);
      SequenceBuilder builder(forbidden, bg, spec, rng);
      auto tokens = builder.build(length, cls.planted);
      for (const auto& f : forbidden) {
        if (count_contiguous(tokens, f) != 0) {
          throw std::logic_error("generator emitted a forbidden motif");
        }
      }
      corpus.add({cls.label + "_" + std::to_string(s), cls.label, std::move(tokens)});
    }
  }
  return corpus;
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  SynthSpec s;
  try {
    s.sequences_per_class = j.value("sequences_per_class", s.sequences_per_class);
    if (j.contains("length")) {
      s.min_length = j.at("length").at(0);
      s.max_length = j.at("length").at(1);
    }
    s.background = j.value("background", s.background);
    s.max_retries = j.value("max_retries", s.max_retries);
    s.repair = j.value("repair", s.repair);
    s.seed = j.value("seed", s.seed);
    for (const auto& c : j.at("classes")) {
      SynthClass sc;
      sc.label = c.at("label");
      sc.forbidden = c.value("forbidden", std::vector<std::string>{});
      sc.background = c.value("background", std::vector<double>{});
      for (const auto& p : c.value("planted", nlohmann::json::array())) {
        sc.planted.push_back({p.at("motif"), p.value("rate", 1.0), p.value("max_gap", 0u)});
      }
      s.classes.push_back(std::move(sc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad synth spec: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::json synth_spec_to_json(const SynthSpec& spec) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : spec.classes) {
    nlohmann::json planted = nlohmann::json::array();
    for (const auto& p : c.planted) {
      planted.push_back({{"motif", p.motif}, {"rate", p.rate}, {"max_gap", p.max_gap}});
    }
    nlohmann::json jc{{"label", c.label}, {"forbidden", c.forbidden}, {"planted", planted}};
    if (!c.background.empty()) jc["background"] = c.background;
    classes.push_back(std::move(jc));
  }
  return {{"sequences_per_class", spec.sequences_per_class},
          {"length", {spec.min_length, spec.max_length}},
          {"background", spec.background},
          {"max_retries", spec.max_retries},
          {"repair", spec.repair},
          {"seed", spec.seed},
          {"classes", classes}};
}

}  // namespace nsp
