#pragma once

// Lexicon/bigram baseline predictor with a per-letter back-off.
//
//   backoff(l)  = (n(letter, position, l) + alpha) / (N(letter, position) + 15 alpha)
//   isolated    = lambda * lexicon(word) + (1 - lambda) * backoff      (word seen)
//               = backoff                                              (word unseen)
//   contextual  = lambda * bigram(prev, word) + (1 - lambda) * isolated (pair seen)
//               = isolated                                              (otherwise)
//
// lexicon and bigram terms are relative frequencies of the observed marked
// forms, evaluated letter by letter.

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ccpd/corpus.hpp"
#include "ccpd/error.hpp"
#include "ccpd/orthography.hpp"
#include "ccpd/predictor.hpp"

namespace ccpd {

enum class LetterPosition : std::uint8_t { Initial = 0, Medial = 1, Final = 2, Single = 3 };

constexpr LetterPosition letter_position(std::size_t j, std::size_t word_size) noexcept {
  if (word_size == 1) return LetterPosition::Single;
  if (j == 0) return LetterPosition::Initial;
  if (j + 1 == word_size) return LetterPosition::Final;
  return LetterPosition::Medial;
}

using LabelCounts = std::array<std::uint64_t, kNumLabels>;
using FormCounts = std::map<std::vector<Label>, std::uint64_t>;

class NgramModel final : public Predictor {
 public:
  static constexpr double kDefaultAlpha = 0.1;
  static constexpr double kDefaultLambda = 0.7;
  static constexpr std::string_view kMagic = "CCPD1";

  NgramModel(double alpha = kDefaultAlpha, double lambda = kDefaultLambda) : alpha_(alpha), lambda_(lambda) {
    if (!(alpha > 0.0)) throw ConfigError("smoothing alpha must be > 0");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("interpolation lambda must be in [0, 1]");
  }

  double alpha() const noexcept { return alpha_; }
  double lambda() const noexcept { return lambda_; }

  const std::map<std::string, FormCounts>& word_lexicon() const noexcept { return words_; }
  const std::map<std::pair<std::string, std::string>, FormCounts>& bigram_lexicon() const noexcept {
    return bigrams_;
  }
  const std::map<std::pair<char32_t, LetterPosition>, LabelCounts>& letter_backoff() const noexcept {
    return letters_;
  }

  void add_sentence(const Sentence& s) {
    std::string prev;
    for (std::size_t i = 0; i < s.words.size(); ++i) {
      const Word& w = s.words[i];
      std::string plain = w.plain();
      auto labels = w.labels();
      ++words_[plain][labels];
      if (i > 0) ++bigrams_[{prev, plain}][labels];
      for (std::size_t j = 0; j < w.size(); ++j)
        ++letters_[{w.letters[j].base, letter_position(j, w.size())}][label_index(w.letters[j].diac)];
      prev = std::move(plain);
    }
  }

  LabelDistribution backoff(char32_t letter, LetterPosition pos) const {
    LabelDistribution d;
    auto it = letters_.find({letter, pos});
    double total = 0;
    if (it != letters_.end())
      for (auto c : it->second) total += static_cast<double>(c);
    const double denom = total + alpha_ * static_cast<double>(kNumLabels);
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      const double c = it != letters_.end() ? static_cast<double>(it->second[l]) : 0.0;
      d.p[l] = (c + alpha_) / denom;
    }
    return d;
  }

  LetterDistributions predict_isolated(const std::string& word) const {
    const std::u32string letters = decode_utf8(word);
    LetterDistributions out;
    out.reserve(letters.size());
    for (std::size_t j = 0; j < letters.size(); ++j) out.push_back(backoff(letters[j], letter_position(j, letters.size())));
    if (auto it = words_.find(word); it != words_.end()) interpolate(out, it->second);
    return out;
  }

  // `prev` is the preceding plain word, or nullptr at a context boundary.
  LetterDistributions predict_word(const std::string* prev, const std::string& word) const {
    LetterDistributions out = predict_isolated(word);
    if (prev) {
      if (auto it = bigrams_.find({*prev, word}); it != bigrams_.end()) interpolate(out, it->second);
    }
    return out;
  }

  LetterDistributions predict(const PredictQuery& q) const override {
    const std::string* prev = q.target > 0 ? &q.context[q.target - 1] : nullptr;
    return predict_word(prev, q.target_word());
  }

  // -------------------------------------------------------------------------
  // Persistence. Text tables after the magic line; reals as hex floats so a
  // save/load cycle is bit-exact. Map ordering makes output deterministic.

  void save(std::ostream& out) const {
    out << kMagic << '\n';
    out << "alpha " << hex_double(alpha_) << '\n';
    out << "lambda " << hex_double(lambda_) << '\n';
    out << "letters " << letters_.size() << '\n';
    for (const auto& [key, counts] : letters_) {
      out << static_cast<std::uint32_t>(key.first) << ' ' << static_cast<int>(key.second);
      for (auto c : counts) out << ' ' << c;
      out << '\n';
    }
    std::size_t n = 0;
    for (const auto& [w, forms] : words_) n += forms.size();
    out << "words " << n << '\n';
    for (const auto& [w, forms] : words_)
      for (const auto& [labels, c] : forms) out << w << '\t' << encode_labels(labels) << '\t' << c << '\n';
    n = 0;
    for (const auto& [k, forms] : bigrams_) n += forms.size();
    out << "bigrams " << n << '\n';
    for (const auto& [k, forms] : bigrams_)
      for (const auto& [labels, c] : forms)
        out << k.first << '\t' << k.second << '\t' << encode_labels(labels) << '\t' << c << '\n';
  }

  static NgramModel load(std::istream& in) {
    std::size_t line_no = 0;
    std::string line;
    auto next = [&]() -> std::string& {
      if (!std::getline(in, line)) throw FormatError("unexpected end of model file", line_no + 1);
      ++line_no;
      return line;
    };
    auto fail = [&](const std::string& what) -> FormatError { return FormatError(what, line_no); };

    if (next() != kMagic) throw fail("missing CCPD1 header");
    const double alpha = parse_header_real(next(), "alpha", line_no);
    const double lambda = parse_header_real(next(), "lambda", line_no);
    NgramModel m(alpha, lambda);

    const std::size_t n_letters = parse_header_count(next(), "letters", line_no);
    for (std::size_t i = 0; i < n_letters; ++i) {
      std::istringstream ls(next());
      std::uint32_t cp = 0;
      int pos = 0;
      LabelCounts counts{};
      if (!(ls >> cp >> pos) || pos < 0 || pos > 3) throw fail("bad letter back-off record");
      for (auto& c : counts)
        if (!(ls >> c)) throw fail("bad letter back-off counts");
      m.letters_[{static_cast<char32_t>(cp), static_cast<LetterPosition>(pos)}] = counts;
    }

    const std::size_t n_words = parse_header_count(next(), "words", line_no);
    for (std::size_t i = 0; i < n_words; ++i) {
      auto fields = split_tabs(next());
      if (fields.size() != 3) throw fail("word record needs 3 fields");
      m.words_[fields[0]][decode_labels(fields[1], line_no)] = parse_count(fields[2], line_no);
    }

    const std::size_t n_bigrams = parse_header_count(next(), "bigrams", line_no);
    for (std::size_t i = 0; i < n_bigrams; ++i) {
      auto fields = split_tabs(next());
      if (fields.size() != 4) throw fail("bigram record needs 4 fields");
      m.bigrams_[{fields[0], fields[1]}][decode_labels(fields[2], line_no)] = parse_count(fields[3], line_no);
    }
    return m;
  }

  void save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file '" + path + "'");
    save(out);
    if (!out) throw IoError("write failed for '" + path + "'");
  }

  static NgramModel load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    return load(in);
  }

  friend bool operator==(const NgramModel& a, const NgramModel& b) {
    return a.alpha_ == b.alpha_ && a.lambda_ == b.lambda_ && a.words_ == b.words_ && a.bigrams_ == b.bigrams_ &&
           a.letters_ == b.letters_;
  }

 private:
  void interpolate(LetterDistributions& base, const FormCounts& forms) const {
    double total = 0;
    for (const auto& [labels, c] : forms) total += static_cast<double>(c);
    if (total <= 0) return;
    for (std::size_t j = 0; j < base.size(); ++j) {
      std::array<double, kNumLabels> freq{};
      for (const auto& [labels, c] : forms)
        if (j < labels.size()) freq[label_index(labels[j])] += static_cast<double>(c);
      double norm = 0;
      for (std::size_t l = 0; l < kNumLabels; ++l) {
        base[j].p[l] = lambda_ * (freq[l] / total) + (1.0 - lambda_) * base[j].p[l];
        norm += base[j].p[l];
      }
      for (double& v : base[j].p) v /= norm;
    }
  }

  static std::string hex_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
  }

  static std::string encode_labels(const std::vector<Label>& labels) {
    static constexpr char kDigits[] = "0123456789abcde";
    std::string s;
    for (Label l : labels) s.push_back(kDigits[label_index(l)]);
    return s;
  }

  static std::vector<Label> decode_labels(const std::string& s, std::size_t line_no) {
    std::vector<Label> out;
    for (char ch : s) {
      int v = -1;
      if (ch >= '0' && ch <= '9') v = ch - '0';
      else if (ch >= 'a' && ch <= 'e') v = ch - 'a' + 10;
      if (v < 0) throw FormatError("bad label digit", line_no);
      out.push_back(label_at(static_cast<std::size_t>(v)));
    }
    return out;
  }

  static std::vector<std::string> split_tabs(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      auto tab = s.find('\t', start);
      out.push_back(s.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return out;
  }

  static std::uint64_t parse_count(const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    auto v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw FormatError("bad count '" + s + "'", line_no);
    return v;
  }

  static std::size_t parse_header_count(const std::string& line, std::string_view key, std::size_t line_no) {
    if (line.rfind(std::string(key) + ' ', 0) != 0) throw FormatError("expected '" + std::string(key) + "'", line_no);
    return parse_count(line.substr(key.size() + 1), line_no);
  }

  static double parse_header_real(const std::string& line, std::string_view key, std::size_t line_no) {
    if (line.rfind(std::string(key) + ' ', 0) != 0) throw FormatError("expected '" + std::string(key) + "'", line_no);
    const std::string v = line.substr(key.size() + 1);
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0') throw FormatError("bad real '" + v + "'", line_no);
    return d;
  }

  double alpha_;
  double lambda_;
  std::map<std::string, FormCounts> words_;
  std::map<std::pair<std::string, std::string>, FormCounts> bigrams_;
  std::map<std::pair<char32_t, LetterPosition>, LabelCounts> letters_;
};

inline NgramModel train_ngram(const Corpus& c, double alpha = NgramModel::kDefaultAlpha,
                              double lambda = NgramModel::kDefaultLambda) {
  if (c.empty()) throw EmptyCorpus();
  NgramModel m(alpha, lambda);
  for (const auto& s : c.sentences) m.add_sentence(s);
  return m;
}

}  // namespace ccpd
