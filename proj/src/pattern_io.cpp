#include <istream>
#include <ostream>
#include <sstream>

#include "nspmine/error.hpp"
#include "nspmine/miner.hpp"

namespace nsp {

std::string format_pattern_line(const PatternLine& line, bool with_sources) {
  std::string out = format_pattern(line.pattern);
  out += " #SUP: " + std::to_string(line.support);
  out += " #LEN: " + std::to_string(line.pattern.length());
  out += " #CLASS: " + line.label;
  if (with_sources) {
    out += " #SRC: ";
    for (std::size_t i = 0; i < line.sources.size(); ++i) {
      if (i) out += ',';
      out += line.sources[i];
    }
  }
  return out;
}

void write_patterns(std::ostream& out, const MiningResult& result,
                    const std::string& label) {
  for (const auto& level : result.levels) {
    for (const auto& e : level.entries) {
      out << format_pattern_line({e.pattern, e.support, label, {}}, false) << '\n';
    }
  }
}

void write_pattern_tokens(std::ostream& out, const MiningResult& result) {
  for (const auto& level : result.levels) {
    for (const auto& e : level.entries) out << pattern_tokens(e.pattern) << '\n';
  }
}

namespace {

std::string field(const std::string& rest, const std::string& name, bool required,
                  std::size_t line_no) {
  const std::string tag = "#" + name + ": ";
  auto at = rest.find(tag);
  if (at == std::string::npos) {
    if (required) {
      throw ParseError("missing #" + name + ": at line " + std::to_string(line_no));
    }
    return {};
  }
  at += tag.size();
  auto end = rest.find(" #", at);
  return rest.substr(at, end == std::string::npos ? std::string::npos : end - at);
}

std::size_t to_count(const std::string& s, const std::string& name, std::size_t line_no) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s[0] == '-') {
    throw ParseError("bad #" + name + ": value '" + s + "' at line " + std::to_string(line_no));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<PatternLine> read_pattern_lines(std::istream& in) {
  std::vector<PatternLine> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto sup_at = line.find(" #SUP: ");
    if (sup_at == std::string::npos) {
      throw ParseError("missing #SUP: at line " + std::to_string(line_no));
    }
    const std::string rest = line.substr(sup_at + 1);
    PatternLine pl;
    try {
      pl.pattern = parse_pattern(line.substr(0, sup_at));
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " at line " + std::to_string(line_no));
    }
    pl.support = to_count(field(rest, "SUP", true, line_no), "SUP", line_no);
    const auto len = to_count(field(rest, "LEN", true, line_no), "LEN", line_no);
    if (len != pl.pattern.length()) {
      throw ParseError("#LEN: disagrees with pattern at line " + std::to_string(line_no));
    }
    pl.label = field(rest, "CLASS", true, line_no);
    if (pl.label.empty()) throw ParseError("empty #CLASS: at line " + std::to_string(line_no));
    const std::string src = field(rest, "SRC", false, line_no);
    if (!src.empty()) {
      std::istringstream ss(src);
      std::string one;
      while (std::getline(ss, one, ',')) pl.sources.push_back(one);
    }
    lines.push_back(std::move(pl));
  }
  return lines;
}

std::map<std::string, MiningResult> results_from_lines(const std::vector<PatternLine>& lines) {
  std::map<std::string, std::map<std::size_t, LevelSet>> grouped;
  for (const auto& l : lines) {
    auto& level = grouped[l.label][l.pattern.length()];
    level.level = l.pattern.length();
    level.entries.push_back({l.pattern, l.support});
  }
  std::map<std::string, MiningResult> out;
  for (auto& [label, levels] : grouped) {
    MiningResult r;
    for (auto& [len, set] : levels) r.levels.push_back(std::move(set));
    out.emplace(label, std::move(r));
  }
  return out;
}

}  // namespace nsp
