#pragma once

// The per-letter predictor contract and its two applications: with sentence
// context and with the target word alone.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ccpd/error.hpp"
#include "ccpd/orthography.hpp"

namespace ccpd {

struct LabelDistribution {
  std::array<double, kNumLabels> p{};

  static LabelDistribution one_hot(Label l) {
    LabelDistribution d;
    d.p[label_index(l)] = 1.0;
    return d;
  }

  static LabelDistribution uniform() {
    LabelDistribution d;
    d.p.fill(1.0 / static_cast<double>(kNumLabels));
    return d;
  }

  double operator[](Label l) const { return p[label_index(l)]; }

  // Ties go to the lowest label index.
  Label argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kNumLabels; ++i)
      if (p[i] > p[best]) best = i;
    return label_at(best);
  }

  double max() const { return *std::max_element(p.begin(), p.end()); }

  double sum() const {
    double s = 0;
    for (double v : p) s += v;
    return s;
  }

  bool is_valid(double tol = 1e-9) const {
    for (double v : p)
      if (!(v >= 0.0) || !std::isfinite(v)) return false;
    return std::abs(sum() - 1.0) <= tol;
  }

  friend bool operator==(const LabelDistribution&, const LabelDistribution&) = default;
};

using LetterDistributions = std::vector<LabelDistribution>;

enum class Channel { Sent, Word };

constexpr const char* channel_name(Channel c) noexcept { return c == Channel::Sent ? "sent" : "word"; }

// What a predictor sees for one call. `context` holds undiacritized words;
// the target is context[target]. sentence_id/word_index locate the target in
// the corpus for predictors that replay stored or ground-truth values.
struct PredictQuery {
  std::span<const std::string> context;
  std::size_t target = 0;
  std::size_t sentence_id = 0;
  std::size_t word_index = 0;

  const std::string& target_word() const { return context[target]; }
};

// Returns one distribution per letter of the target word. Implementations must
// be deterministic and safe to call concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual LetterDistributions predict(const PredictQuery& q) const = 0;
};

// The predictor used for each channel. Context-free models use the same
// instance for both.
struct PredictorPair {
  std::shared_ptr<const Predictor> sent;
  std::shared_ptr<const Predictor> word;

  static PredictorPair shared(std::shared_ptr<const Predictor> f) { return {f, f}; }
};

// Contextual (fSent) and isolated (fWord) distributions for every letter of
// one sentence, flattened in reading order.
struct PredictionGrid {
  LetterDistributions sent;
  LetterDistributions word;

  std::size_t size() const noexcept { return sent.size(); }

  void check_shape(std::size_t letter_count) const {
    if (sent.size() != letter_count || word.size() != letter_count)
      throw ShapeError("prediction grid has " + std::to_string(sent.size()) + "/" + std::to_string(word.size()) +
                       " letters, expected " + std::to_string(letter_count));
  }
};

namespace detail {

inline void append_checked(LetterDistributions& out, LetterDistributions&& got, std::size_t expected) {
  if (got.size() != expected)
    throw ShapeError("predictor returned " + std::to_string(got.size()) + " distributions for a " +
                     std::to_string(expected) + "-letter word");
  out.insert(out.end(), std::make_move_iterator(got.begin()), std::make_move_iterator(got.end()));
}

}  // namespace detail

// Each word i is predicted with the words in [i - radius, i + radius] as
// context, clipped to the sentence.
inline LetterDistributions apply_contextual(const Predictor& f, const Sentence& s, std::size_t sentence_id,
                                            std::size_t radius) {
  const auto plain = s.plain_words();
  LetterDistributions out;
  out.reserve(s.letter_count());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    const std::size_t lo = i >= radius ? i - radius : 0;
    const std::size_t hi = radius >= plain.size() - i ? plain.size() : i + radius + 1;
    PredictQuery q{std::span<const std::string>(plain).subspan(lo, hi - lo), i - lo, sentence_id, i};
    detail::append_checked(out, f.predict(q), s.words[i].size());
  }
  return out;
}

inline LetterDistributions apply_isolated(const Predictor& f, const Sentence& s, std::size_t sentence_id) {
  return apply_contextual(f, s, sentence_id, 0);
}

}  // namespace ccpd
