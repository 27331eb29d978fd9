#include "nspmine/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "nspmine/error.hpp"
#include "nspmine/parallel.hpp"

namespace nsp {

PatternCatalog select_patterns(const std::map<std::string, MiningResult>& per_class,
                               const SelectionParams& params) {
  if (per_class.empty()) throw DataError("no per-class mining results");
  if (params.cap_min > params.cap_max) throw ConfigError("cap minimum exceeds cap maximum");

  std::map<std::string, CatalogEntry> merged;  // canonical string -> entry
  for (const auto& [label, result] : per_class) {
    std::vector<std::pair<std::string, PatternSupport>> eligible;
    for (const auto& level : result.levels) {
      for (const auto& e : level.entries) {
        if (e.pattern.length() >= params.min_length) {
          eligible.emplace_back(format_pattern(e.pattern), e);
        }
      }
    }
    if (eligible.size() < params.cap_min && !params.allow_undersized) {
      throw DataError("class " + label + ": " + std::to_string(eligible.size()) + " < " +
                      std::to_string(params.cap_min));
    }
    std::sort(eligible.begin(), eligible.end(), [](const auto& a, const auto& b) {
      if (a.second.support != b.second.support) return a.second.support > b.second.support;
      return a.first < b.first;
    });
    if (eligible.size() > params.cap_max) eligible.resize(params.cap_max);
    for (auto& [key, e] : eligible) {
      auto [it, inserted] = merged.try_emplace(key);
      if (inserted) {
        it->second.pattern = e.pattern;
        it->second.source_class = label;
        it->second.support_in_source = e.support;
      }
      it->second.sources.push_back(label);
    }
  }
  PatternCatalog catalog;
  catalog.entries.reserve(merged.size());
  for (auto& [key, entry] : merged) catalog.entries.push_back(std::move(entry));
  return catalog;
}

std::vector<std::string> FeatureMatrix::class_list() const {
  std::set<std::string> s(row_labels.begin(), row_labels.end());
  return {s.begin(), s.end()};
}

FeatureMatrix featurize(const Corpus& corpus, const PatternCatalog& catalog,
                        Normalization norm) {
  FeatureMatrix m;
  m.normalization = norm;
  for (const auto& s : corpus.sequences()) {
    m.row_ids.push_back(s.id);
    m.row_labels.push_back(s.label);
  }
  for (const auto& e : catalog.entries) m.columns.push_back(format_pattern(e.pattern));
  const std::size_t cols = m.cols();
  m.values.assign(m.rows() * cols, 0.0);
  parallel_for(m.rows(), [&](std::size_t r) {
    const auto& seq = corpus.sequences()[r];
    for (std::size_t c = 0; c < cols; ++c) {
      double v = static_cast<double>(support_oneoff(seq.tokens, catalog.entries[c].pattern));
      if (norm == Normalization::length) v /= static_cast<double>(seq.length());
      m.values[r * cols + c] = v;
    }
  });
  return m;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Splits one CSV record; quoted fields may hold commas and doubled quotes.
std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      if (!cur.empty() || was_quoted) {
        throw ParseError("stray quote at line " + std::to_string(line_no));
      }
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote at line " + std::to_string(line_no));
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

void write_matrix(std::ostream& out, const FeatureMatrix& m) {
  out << quote("id") << ',' << quote("label");
  for (const auto& c : m.columns) out << ',' << quote(c);
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << quote(m.row_ids[r]) << ',' << quote(m.row_labels[r]);
    for (double v : m.row(r)) out << ',' << number(v);
    out << '\n';
  }
  if (!out) throw IoError("matrix write failure");
}

FeatureMatrix read_matrix(std::istream& in) {
  FeatureMatrix m;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  bool fractional = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line, line_no);
    if (!header) {
      if (fields.size() < 2 || fields[0] != "id" || fields[1] != "label") {
        throw ParseError("matrix header must start with \"id\",\"label\"");
      }
      m.columns.assign(fields.begin() + 2, fields.end());
      header = true;
      continue;
    }
    if (fields.size() != m.columns.size() + 2) {
      throw ParseError("row " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(m.columns.size() + 2));
    }
    m.row_ids.push_back(fields[0]);
    m.row_labels.push_back(fields[1]);
    for (std::size_t c = 2; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size()) {
        throw ParseError("non-numeric cell '" + f + "' in row " + std::to_string(line_no));
      }
      fractional |= v != std::floor(v);
      m.values.push_back(v);
    }
  }
  if (!header) throw ParseError("empty matrix file");
  if (fractional) m.normalization = Normalization::length;
  return m;
}

void write_catalog(std::ostream& out, const PatternCatalog& catalog) {
  for (const auto& e : catalog.entries) {
    out << format_pattern_line({e.pattern, e.support_in_source, e.source_class, e.sources}, true)
        << '\n';
  }
}

PatternCatalog read_catalog(std::istream& in) {
  PatternCatalog catalog;
  for (auto& l : read_pattern_lines(in)) {
    CatalogEntry e{l.pattern, l.label, l.support, l.sources};
    if (e.sources.empty()) e.sources.push_back(l.label);
    catalog.entries.push_back(std::move(e));
  }
  return catalog;
}

std::map<std::size_t, std::size_t> length_histogram(const PatternCatalog& catalog) {
  std::map<std::size_t, std::size_t> h;
  for (const auto& e : catalog.entries) ++h[e.pattern.length()];
  return h;
}

}  // namespace nsp
