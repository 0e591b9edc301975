#pragma once

// Ground-truth predictor with controlled, reproducible label corruption.

#include <cstdint>
#include <memory>
#include <string>

#include "ccpd/corpus.hpp"
#include "ccpd/error.hpp"
#include "ccpd/keyed_random.hpp"
#include "ccpd/predictor.hpp"

namespace ccpd {

// Emits one-hot truth. Each (sentence, word, letter) position is flipped
// independently with probability `flip_rate` to a wrong label drawn uniformly
// from the other 14; draws are keyed by position, channel, and seed.
class OraclePredictor final : public Predictor {
 public:
  OraclePredictor(std::shared_ptr<const Corpus> truth, Channel channel, double flip_rate, std::uint64_t seed)
      : truth_(std::move(truth)), channel_(channel), flip_rate_(flip_rate), seed_(seed) {
    if (!(flip_rate >= 0.0 && flip_rate <= 1.0)) throw ConfigError("oracle flip rate must be in [0, 1]");
  }

  bool flipped(std::size_t sentence_id, std::size_t word_index, std::size_t letter) const {
    return keyed_uniform({seed_, channel_key(), sentence_id, word_index, letter, 0}) < flip_rate_;
  }

  Label label(std::size_t sentence_id, std::size_t word_index, std::size_t letter) const {
    const Label truth = word_at(sentence_id, word_index).letters.at(letter).diac;
    if (!flipped(sentence_id, word_index, letter)) return truth;
    std::size_t pick = keyed_index({seed_, channel_key(), sentence_id, word_index, letter, 1}, kNumLabels - 1);
    if (pick >= label_index(truth)) ++pick;
    return label_at(pick);
  }

  LetterDistributions predict(const PredictQuery& q) const override {
    const Word& w = word_at(q.sentence_id, q.word_index);
    if (w.plain() != q.target_word())
      throw MissingPosition("oracle truth at sentence " + std::to_string(q.sentence_id) + " word " +
                            std::to_string(q.word_index) + " does not match the queried word");
    LetterDistributions out;
    out.reserve(w.size());
    for (std::size_t j = 0; j < w.size(); ++j)
      out.push_back(LabelDistribution::one_hot(label(q.sentence_id, q.word_index, j)));
    return out;
  }

  Channel channel() const noexcept { return channel_; }
  double flip_rate() const noexcept { return flip_rate_; }

 private:
  std::uint64_t channel_key() const noexcept { return channel_ == Channel::Sent ? 0 : 1; }

  const Word& word_at(std::size_t sentence_id, std::size_t word_index) const {
    if (sentence_id >= truth_->sentences.size() || word_index >= truth_->sentences[sentence_id].words.size())
      throw MissingPosition("oracle has no truth for sentence " + std::to_string(sentence_id) + " word " +
                            std::to_string(word_index));
    return truth_->sentences[sentence_id].words[word_index];
  }

  std::shared_ptr<const Corpus> truth_;
  Channel channel_;
  double flip_rate_;
  std::uint64_t seed_;
};

// Both channels over the same truth; the returned objects double as the flip
// log for tests.
struct OraclePair {
  std::shared_ptr<const OraclePredictor> sent;
  std::shared_ptr<const OraclePredictor> word;

  PredictorPair predictors() const { return {sent, word}; }
};

inline OraclePair oracle_predictor(std::shared_ptr<const Corpus> truth, double flip_rate_sent, double flip_rate_word,
                                   std::uint64_t seed) {
  return {std::make_shared<const OraclePredictor>(truth, Channel::Sent, flip_rate_sent, seed),
          std::make_shared<const OraclePredictor>(truth, Channel::Word, flip_rate_word, seed)};
}

}  // namespace ccpd
