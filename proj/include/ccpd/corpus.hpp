#pragma once

// Line-per-sentence diacritized corpora: loading, counting, windowing.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "ccpd/error.hpp"
#include "ccpd/orthography.hpp"

namespace ccpd {

struct Corpus {
  std::vector<Sentence> sentences;
  std::string source_name;
  std::size_t warning_count = 0;

  std::size_t size() const noexcept { return sentences.size(); }
  bool empty() const noexcept { return sentences.empty(); }
};

// Reads one sentence per line. Each line is canonicalized and parsed; lines
// without any Arabic letter after canonicalization are skipped. In strict mode the
// first parse error is rethrown carrying its 1-based line number.
inline Corpus read_corpus(std::istream& in, ParseMode mode = ParseMode::Lenient, std::string source_name = {}) {
  Corpus c;
  c.source_name = std::move(source_name);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string canon = canonicalize(line);
    if (canon.empty()) continue;
    ParseStats stats;
    Sentence s;
    try {
      s = parse_marked_text(canon, mode, &stats);
    } catch (const ParseError& e) {
      throw e.at_line(line_no);
    }
    c.warning_count += stats.warnings;
    if (!s.words.empty()) c.sentences.push_back(std::move(s));
  }
  return c;
}

inline Corpus load_corpus(const std::string& path, ParseMode mode = ParseMode::Lenient) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file '" + path + "'");
  return read_corpus(in, mode, path);
}

struct TokenCounts {
  std::size_t tokens = 0;
  std::size_t letters = 0;
  std::size_t marked_letters = 0;

  friend bool operator==(const TokenCounts&, const TokenCounts&) = default;
};

inline TokenCounts token_counts(const Corpus& c) {
  TokenCounts t;
  for (const auto& s : c.sentences) {
    t.tokens += s.words.size();
    for (const auto& w : s.words)
      for (const auto& l : w.letters) {
        ++t.letters;
        if (l.diac != Label::None) ++t.marked_letters;
      }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Windows

struct WindowSpec {
  std::size_t width = 20;
  std::size_t stride = 2;

  void validate() const {
    if (width < 1) throw ConfigError("window width must be >= 1");
    if (stride < 1 || stride > width) throw ConfigError("window stride must be in [1, width]");
  }
};

// Half-open range of word indices.
struct WordRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
  friend bool operator==(const WordRange&, const WordRange&) = default;
};

// Windows [k*stride, k*stride + width) clipped to the sentence, stopping at
// the first window that reaches the last word.
inline std::vector<WordRange> segment(std::size_t word_count, const WindowSpec& spec) {
  spec.validate();
  std::vector<WordRange> out;
  for (std::size_t start = 0; start < word_count; start += spec.stride) {
    const std::size_t end = std::min(start + spec.width, word_count);
    out.push_back({start, end});
    if (end == word_count) break;
  }
  return out;
}

inline std::vector<WordRange> segment(const Sentence& s, const WindowSpec& spec) {
  return segment(s.words.size(), spec);
}

}  // namespace ccpd
