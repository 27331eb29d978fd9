#include "nspmine/seqio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nspmine/error.hpp"

namespace nsp {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string at_line(std::size_t line) { return " at line " + std::to_string(line); }

}  // namespace

void validate_label(const std::string& label) {
  if (label.empty()) throw DataError("empty class label");
  for (unsigned char c : label) {
    if (std::isspace(c) || c == '#' || c == ',' || c == '"' || c == '/') {
      throw DataError("class label '" + label +
                      "' contains a character from  #,\"/ or whitespace");
    }
  }
}

Corpus::Corpus(std::vector<EncodedSequence> sequences) {
  sequences_.reserve(sequences.size());
  for (auto& s : sequences) add(std::move(s));
}

void Corpus::add(EncodedSequence seq) {
  validate_label(seq.label);
  if (seq.id.empty()) throw DataError("sequence with empty id");
  if (seq.tokens.empty()) throw DataError("sequence '" + seq.id + "' is empty");
  for (Symbol t : seq.tokens) {
    if (t < 1) throw DataError("sequence '" + seq.id + "' has token < 1");
  }
  if (!manifest_.emplace(seq.id, seq.label).second) {
    throw DataError("duplicate sequence id '" + seq.id + "'");
  }
  auto it = std::lower_bound(labels_.begin(), labels_.end(), seq.label);
  if (it == labels_.end() || *it != seq.label) labels_.insert(it, seq.label);
  sequences_.push_back(std::move(seq));
}

const std::string& Corpus::label_of(const std::string& id) const {
  auto it = manifest_.find(id);
  if (it == manifest_.end()) throw DataError("unknown sequence id '" + id + "'");
  return it->second;
}

std::size_t Corpus::total_tokens() const {
  std::size_t n = 0;
  for (const auto& s : sequences_) n += s.length();
  return n;
}

Corpus Corpus::subset(const std::vector<std::size_t>& rows) const {
  Corpus out;
  for (std::size_t r : rows) out.add(sequences_.at(r));
  return out;
}

Corpus Corpus::with_label(const std::string& label) const {
  Corpus out;
  for (const auto& s : sequences_) {
    if (s.label == label) out.add(s);
  }
  return out;
}

std::vector<SequenceRecord> parse_fasta(std::istream& in,
                                        const SymbolTable& table) {
  std::vector<SequenceRecord> records;
  std::size_t header_line = 0;
  std::size_t line_no = 0;
  std::string line;

  auto close_record = [&] {
    if (!records.empty() && records.back().residues.empty()) {
      throw ParseError("empty sequence for record '" + records.back().id + "'" +
                       at_line(header_line));
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '>') {
      close_record();
      header_line = line_no;
      const std::string header = trim(std::string_view(line).substr(1));
      if (header.empty()) throw ParseError("empty header" + at_line(line_no));
      SequenceRecord rec;
      const auto cut = header.find_first_of(" \t");
      rec.id = header.substr(0, cut);
      if (cut != std::string::npos) rec.description = trim(header.substr(cut));
      records.push_back(std::move(rec));
      continue;
    }
    for (char raw : line) {
      if (std::isspace(static_cast<unsigned char>(raw))) continue;
      if (records.empty()) {
        throw ParseError("sequence data before first header" + at_line(line_no));
      }
      const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
      if (!table.encode(c)) {
        throw ParseError(std::string("unmapped character '") + raw + "'" +
                         at_line(line_no));
      }
      records.back().residues.push_back(c);
    }
  }
  close_record();
  return records;
}

std::vector<SequenceRecord> parse_fasta(const std::string& text,
                                        const SymbolTable& table) {
  std::istringstream in(text);
  return parse_fasta(in, table);
}

std::vector<SequenceRecord> read_fasta_file(const std::filesystem::path& path,
                                            const SymbolTable& table) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_fasta(in, table);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_fasta(std::ostream& out, const std::vector<SequenceRecord>& records) {
  for (const auto& r : records) {
    out << '>' << r.id;
    if (!r.description.empty()) out << ' ' << r.description;
    out << '\n';
    for (std::size_t i = 0; i < r.residues.size(); i += 70) {
      out << r.residues.substr(i, 70) << '\n';
    }
  }
}

EncodedSequence encode_sequence(const SequenceRecord& record,
                                const SymbolTable& table,
                                const std::string& label) {
  EncodedSequence out{record.id, label, {}};
  out.tokens.reserve(record.residues.size());
  for (char c : record.residues) {
    auto code = table.encode(c);
    if (!code) {
      throw ParseError(std::string("unmapped character '") + c +
                       "' in record '" + record.id + "'");
    }
    out.tokens.push_back(*code);
  }
  return out;
}

SequenceRecord decode_sequence(const EncodedSequence& seq,
                               const SymbolTable& table) {
  SequenceRecord rec{seq.id, seq.label, {}};
  rec.residues.reserve(seq.tokens.size());
  for (Symbol s : seq.tokens) {
    auto c = table.decode(s);
    if (!c) throw DataError("token " + std::to_string(s) + " has no character");
    rec.residues.push_back(*c);
  }
  return rec;
}

bool has_redundant_codes(const EncodedSequence& seq) {
  return std::any_of(seq.tokens.begin(), seq.tokens.end(),
                     [](Symbol s) { return !is_canonical(s); });
}

std::string encode_token_line(const std::vector<Symbol>& tokens) {
  std::string line;
  for (Symbol t : tokens) {
    line += std::to_string(t);
    line += " -1 ";
  }
  line += "-2";
  return line;
}

void write_encoded(const Corpus& corpus, std::ostream& tokens,
                   std::ostream& manifest) {
  if (corpus.empty()) throw DataError("empty corpus");
  std::size_t index = 0;
  for (const auto& s : corpus.sequences()) {
    tokens << encode_token_line(s.tokens) << '\n';
    manifest << index++ << '\t' << s.id << '\t' << s.label << '\n';
  }
  if (!tokens || !manifest) throw IoError("write failure");
}

namespace {

std::vector<Symbol> parse_token_line(const std::string& line, std::size_t line_no) {
  std::vector<Symbol> tokens;
  std::istringstream in(line);
  std::string word;
  bool expect_value = true;
  bool terminated = false;
  while (in >> word) {
    if (terminated) throw ParseError("data after terminator" + at_line(line_no));
    long long v = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
    if (ec != std::errc() || ptr != word.data() + word.size()) {
      throw ParseError("non-integer token '" + word + "'" + at_line(line_no));
    }
    if (v == -2) {
      // "-1 -2" after the last token is the only valid ending.
      if (tokens.empty()) throw ParseError("empty sequence" + at_line(line_no));
      if (!expect_value) throw ParseError("missing -1 before terminator" + at_line(line_no));
      terminated = true;
    } else if (v == -1) {
      if (expect_value) throw ParseError("unexpected -1" + at_line(line_no));
      expect_value = true;
    } else if (v >= 1 && v <= 0x7FFFFFFF) {
      if (!expect_value) throw ParseError("missing -1 separator" + at_line(line_no));
      tokens.push_back(static_cast<Symbol>(v));
      expect_value = false;
    } else {
      throw ParseError("invalid token '" + word + "'" + at_line(line_no));
    }
  }
  if (!terminated) throw ParseError("missing terminator" + at_line(line_no));
  return tokens;
}

}  // namespace

Corpus read_encoded(std::istream& tokens, std::istream& manifest) {
  std::vector<std::vector<Symbol>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(tokens, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    rows.push_back(parse_token_line(line, line_no));
  }

  std::vector<EncodedSequence> seqs;
  line_no = 0;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      throw ParseError("manifest row needs 3 tab-separated fields" + at_line(line_no));
    }
    if (fields[0] != std::to_string(seqs.size())) {
      throw ParseError("manifest index out of order" + at_line(line_no));
    }
    seqs.push_back(EncodedSequence{fields[1], fields[2], {}});
  }
  if (seqs.size() != rows.size()) {
    throw ParseError("manifest mismatch: " + std::to_string(seqs.size()) +
                     " manifest rows, " + std::to_string(rows.size()) +
                     " sequence lines");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) seqs[i].tokens = std::move(rows[i]);
  try {
    return Corpus(std::move(seqs));
  } catch (const DataError& e) {
    throw ParseError(e.what());
  }
}

std::filesystem::path manifest_path_for(const std::filesystem::path& encoded) {
  return encoded.string() + ".manifest.tsv";
}

void write_encoded_files(const Corpus& corpus, const std::filesystem::path& encoded) {
  if (encoded.has_parent_path()) std::filesystem::create_directories(encoded.parent_path());
  std::ofstream tok(encoded, std::ios::binary);
  std::ofstream man(manifest_path_for(encoded), std::ios::binary);
  if (!tok || !man) throw IoError("cannot write " + encoded.string());
  write_encoded(corpus, tok, man);
}

Corpus read_encoded_files(const std::filesystem::path& encoded) {
  std::ifstream tok(encoded);
  if (!tok) throw IoError("cannot open " + encoded.string());
  std::ifstream man(manifest_path_for(encoded));
  if (!man) throw IoError("cannot open " + manifest_path_for(encoded).string());
  try {
    return read_encoded(tok, man);
  } catch (const ParseError& e) {
    throw ParseError(encoded.string() + ": " + e.what());
  }
}

}  // namespace nsp
