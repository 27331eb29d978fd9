#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nspmine/symbols.hpp"

namespace nsp {

struct SequenceRecord {
  std::string id;
  std::string description;
  std::string residues;  // uppercase, every character mapped by the table

  bool operator==(const SequenceRecord&) const = default;
};

struct EncodedSequence {
  std::string id;
  std::string label;
  std::vector<Symbol> tokens;

  std::size_t length() const { return tokens.size(); }
  bool operator==(const EncodedSequence&) const = default;
};

// A labelled collection of encoded sequences. Ids are unique; labels() lists
// distinct class names in sorted order.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<EncodedSequence> sequences);

  void add(EncodedSequence seq);

  const std::vector<EncodedSequence>& sequences() const { return sequences_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label_of(const std::string& id) const;

  std::size_t size() const { return sequences_.size(); }
  bool empty() const { return sequences_.empty(); }
  std::size_t total_tokens() const;

  // Sub-corpus with the given row indices, in the given order.
  Corpus subset(const std::vector<std::size_t>& rows) const;
  // Sub-corpus of every sequence carrying `label`.
  Corpus with_label(const std::string& label) const;

  bool operator==(const Corpus& other) const {
    return sequences_ == other.sequences_;
  }

 private:
  std::vector<EncodedSequence> sequences_;
  std::vector<std::string> labels_;
  std::map<std::string, std::string> manifest_;  // id -> label
};

// Parses FASTA text. Sequence lines are concatenated with whitespace removed
// and lowercase folded to uppercase. Throws ParseError naming the line.
std::vector<SequenceRecord> parse_fasta(std::istream& in,
                                        const SymbolTable& table);
std::vector<SequenceRecord> parse_fasta(const std::string& text,
                                        const SymbolTable& table);
std::vector<SequenceRecord> read_fasta_file(const std::filesystem::path& path,
                                            const SymbolTable& table);
void write_fasta(std::ostream& out, const std::vector<SequenceRecord>& records);

EncodedSequence encode_sequence(const SequenceRecord& record,
                                const SymbolTable& table,
                                const std::string& label);
SequenceRecord decode_sequence(const EncodedSequence& seq,
                               const SymbolTable& table);

bool has_redundant_codes(const EncodedSequence& seq);

// Encoded corpus format: one line per sequence, every token followed by
// " -1 ", the line closed by "-1 -2" (e.g. "1 -1 3 -1 2 -1 -2"). The manifest
// is tab separated: line_index, id, label.
void write_encoded(const Corpus& corpus, std::ostream& tokens,
                   std::ostream& manifest);
Corpus read_encoded(std::istream& tokens, std::istream& manifest);

std::filesystem::path manifest_path_for(const std::filesystem::path& encoded);
void write_encoded_files(const Corpus& corpus,
                         const std::filesystem::path& encoded);
Corpus read_encoded_files(const std::filesystem::path& encoded);

// Encoded token line for one sequence, without newline.
std::string encode_token_line(const std::vector<Symbol>& tokens);

// Labels end up in whitespace separated file fields; reject anything that
// would break them.
void validate_label(const std::string& label);

}  // namespace nsp
