#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nspmine/miner.hpp"
#include "nspmine/seqio.hpp"

namespace nsp {

struct CatalogEntry {
  NegPattern pattern;
  std::string source_class;
  Support support_in_source = 0;
  std::vector<std::string> sources;  // every class that selected the pattern
};

struct PatternCatalog {
  std::vector<CatalogEntry> entries;  // canonical order, no duplicates
  std::size_t size() const { return entries.size(); }
};

struct SelectionParams {
  std::size_t min_length = 4;
  std::size_t cap_min = 300;
  std::size_t cap_max = 600;
  bool allow_undersized = false;
};

// Per class (sorted label order): drop patterns shorter than min_length, rank
// by support descending then canonical ascending, keep the top cap_max. A
// class with fewer than cap_min survivors is an error unless
// allow_undersized. Duplicates across classes collapse to one entry owned by
// the first class.
PatternCatalog select_patterns(
    const std::map<std::string, MiningResult>& per_class,
    const SelectionParams& params);

enum class Normalization { none, length };

struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> row_labels;
  std::vector<std::string> columns;  // canonical pattern strings
  std::vector<double> values;        // row-major, rows() x cols()
  Normalization normalization = Normalization::none;

  std::size_t rows() const { return row_ids.size(); }
  std::size_t cols() const { return columns.size(); }
  double at(std::size_t r, std::size_t c) const {
    return values[r * columns.size() + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * columns.size(), columns.size()};
  }
  std::vector<std::string> class_list() const;  // sorted distinct labels
};

// cell(r, c) = support_oneoff(sequence r, pattern c), optionally divided by
// the sequence length.
FeatureMatrix featurize(const Corpus& corpus, const PatternCatalog& catalog,
                        Normalization norm = Normalization::none);

// CSV: quoted header "id","label",<patterns...>; quoted id and label, then
// numeric cells.
void write_matrix(std::ostream& out, const FeatureMatrix& m);
FeatureMatrix read_matrix(std::istream& in);

void write_catalog(std::ostream& out, const PatternCatalog& catalog);
PatternCatalog read_catalog(std::istream& in);

// Count of catalog entries per pattern length.
std::map<std::size_t, std::size_t> length_histogram(
    const PatternCatalog& catalog);

}  // namespace nsp
