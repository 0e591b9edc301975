#pragma once

// Replays per-letter distributions exported by an external model.
//
// One record per line:
//   sid \t word \t letter \t sent|word \t p0,p1,...,p14
// Indices are 0-based; sid counts non-empty corpus lines. Each row must sum
// to 1 within 1e-6.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ccpd/corpus.hpp"
#include "ccpd/error.hpp"
#include "ccpd/predictor.hpp"

namespace ccpd {

inline constexpr double kLogitsSumTolerance = 1e-6;

class LogitsTable {
 public:
  using WordKey = std::tuple<std::size_t, std::size_t, Channel>;  // sid, word, channel

  static LogitsTable read(std::istream& in) {
    LogitsTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      t.add_record(line, line_no);
    }
    return t;
  }

  static LogitsTable read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open logits file '" + path + "'");
    return read(in);
  }

  // nullopt when the word has no record or a letter is missing.
  std::optional<LetterDistributions> lookup(std::size_t sid, std::size_t word, Channel ch) const {
    auto it = rows_.find({sid, word, ch});
    if (it == rows_.end()) return std::nullopt;
    LetterDistributions out;
    out.reserve(it->second.size());
    for (const auto& d : it->second) {
      if (!d) return std::nullopt;
      out.push_back(*d);
    }
    return out;
  }

  std::size_t record_count() const noexcept { return records_; }
  const std::map<WordKey, std::vector<std::optional<LabelDistribution>>>& rows() const noexcept { return rows_; }

 private:
  void add_record(const std::string& line, std::size_t line_no) {
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() != 5) throw FormatError("expected 5 tab-separated fields, got " + std::to_string(f.size()), line_no);

    const std::size_t sid = parse_index(f[0], line_no);
    const std::size_t word = parse_index(f[1], line_no);
    const std::size_t letter = parse_index(f[2], line_no);
    Channel ch;
    if (f[3] == "sent") ch = Channel::Sent;
    else if (f[3] == "word") ch = Channel::Word;
    else throw FormatError("channel must be 'sent' or 'word', got '" + f[3] + "'", line_no);

    LabelDistribution d;
    std::size_t k = 0;
    start = 0;
    const std::string& probs = f[4];
    for (;;) {
      auto comma = probs.find(',', start);
      const std::string tok = probs.substr(start, comma - start);
      if (k >= kNumLabels) throw FormatError("more than 15 probabilities", line_no);
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (tok.empty() || *end != '\0' || !std::isfinite(v) || v < 0.0)
        throw FormatError("bad probability '" + tok + "'", line_no);
      d.p[k++] = v;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (k != kNumLabels) throw FormatError("expected 15 probabilities, got " + std::to_string(k), line_no);
    if (std::abs(d.sum() - 1.0) > kLogitsSumTolerance)
      throw FormatError("probabilities sum to " + std::to_string(d.sum()) + ", not 1", line_no);

    auto& row = rows_[{sid, word, ch}];
    if (row.size() <= letter) row.resize(letter + 1);
    if (row[letter]) throw FormatError("duplicate record", line_no);
    row[letter] = d;
    ++records_;
  }

  static std::size_t parse_index(const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    const auto v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || *end != '\0') throw FormatError("bad index '" + s + "'", line_no);
    return static_cast<std::size_t>(v);
  }

  std::map<WordKey, std::vector<std::optional<LabelDistribution>>> rows_;
  std::size_t records_ = 0;
};

class LogitsPredictor final : public Predictor {
 public:
  LogitsPredictor(std::shared_ptr<const LogitsTable> table, Channel channel)
      : table_(std::move(table)), channel_(channel) {}

  LetterDistributions predict(const PredictQuery& q) const override {
    auto got = table_->lookup(q.sentence_id, q.word_index, channel_);
    const std::size_t letters = decode_utf8(q.target_word()).size();
    if (!got || got->size() != letters)
      throw MissingPosition(std::string("no complete ") + channel_name(channel_) + " logits for sentence " +
                            std::to_string(q.sentence_id) + " word " + std::to_string(q.word_index));
    return *got;
  }

 private:
  std::shared_ptr<const LogitsTable> table_;
  Channel channel_;
};

inline PredictorPair logits_predictors(std::shared_ptr<const LogitsTable> table) {
  return {std::make_shared<const LogitsPredictor>(table, Channel::Sent),
          std::make_shared<const LogitsPredictor>(table, Channel::Word)};
}

inline PredictorPair load_external_logits(const std::string& path) {
  return logits_predictors(std::make_shared<const LogitsTable>(LogitsTable::read_file(path)));
}

struct LogitsCoverage {
  std::size_t expected_letters = 0;  // per channel
  std::size_t missing_sent = 0;
  std::size_t missing_word = 0;
  std::size_t unmatched_records = 0;  // records outside the corpus layout

  bool complete() const noexcept { return missing_sent == 0 && missing_word == 0 && unmatched_records == 0; }
};

// Checks that the table holds exactly the corpus letter layout in both channels.
inline LogitsCoverage check_coverage(const LogitsTable& t, const Corpus& c) {
  LogitsCoverage cov;
  std::size_t matched = 0;
  for (std::size_t s = 0; s < c.sentences.size(); ++s) {
    const auto& words = c.sentences[s].words;
    for (std::size_t w = 0; w < words.size(); ++w) {
      cov.expected_letters += words[w].size();
      for (Channel ch : {Channel::Sent, Channel::Word}) {
        std::size_t& missing = ch == Channel::Sent ? cov.missing_sent : cov.missing_word;
        auto it = t.rows().find({s, w, ch});
        for (std::size_t j = 0; j < words[w].size(); ++j) {
          if (it != t.rows().end() && j < it->second.size() && it->second[j]) ++matched;
          else ++missing;
        }
      }
    }
  }
  cov.unmatched_records = t.record_count() - matched;
  return cov;
}

}  // namespace ccpd
