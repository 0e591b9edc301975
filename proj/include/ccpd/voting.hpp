#pragma once

// Contextual-channel inference: sliding-window majority vote (MV) or one
// full-sentence pass (SP).

#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ccpd/corpus.hpp"
#include "ccpd/error.hpp"
#include "ccpd/keyed_random.hpp"
#include "ccpd/predictor.hpp"

namespace ccpd {

enum class Inference { MajorityVote, SinglePass };

struct VoteTally {
  std::vector<std::array<std::uint32_t, kNumLabels>> votes;  // per letter
  std::uint64_t rng_seed = 0;

  std::uint32_t total(std::size_t letter) const {
    return std::accumulate(votes[letter].begin(), votes[letter].end(), std::uint32_t{0});
  }
};

// Every window from segment() predicts each of its words with the window as
// context and casts one argmax vote per letter. `window_order` permutes the
// evaluation order; the tally does not depend on it.
inline VoteTally tally_votes(const Predictor& f, const Sentence& s, std::size_t sentence_id, const WindowSpec& spec,
                             std::uint64_t seed, std::span<const std::size_t> window_order = {}) {
  const auto plain = s.plain_words();
  std::vector<std::size_t> offset(s.words.size() + 1, 0);
  for (std::size_t i = 0; i < s.words.size(); ++i) offset[i + 1] = offset[i] + s.words[i].size();

  VoteTally tally;
  tally.rng_seed = seed;
  tally.votes.assign(offset.back(), {});

  const auto windows = segment(s, spec);
  std::vector<std::size_t> order(windows.size());
  if (window_order.empty()) {
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    if (window_order.size() != windows.size())
      throw ShapeError("window order has " + std::to_string(window_order.size()) + " entries for " +
                       std::to_string(windows.size()) + " windows");
    order.assign(window_order.begin(), window_order.end());
  }

  for (std::size_t k : order) {
    const WordRange& win = windows.at(k);
    const auto ctx = std::span<const std::string>(plain).subspan(win.begin, win.size());
    for (std::size_t i = win.begin; i < win.end; ++i) {
      auto dists = f.predict(PredictQuery{ctx, i - win.begin, sentence_id, i});
      if (dists.size() != s.words[i].size())
        throw ShapeError("predictor returned " + std::to_string(dists.size()) + " distributions for a " +
                         std::to_string(s.words[i].size()) + "-letter word");
      for (std::size_t j = 0; j < dists.size(); ++j) ++tally.votes[offset[i] + j][label_index(dists[j].argmax())];
    }
  }
  return tally;
}

// Plurality winner per letter as one-hot distributions. Ties are broken
// uniformly among the leaders by a draw keyed on (seed, sentence, letter).
inline LetterDistributions resolve_votes(const VoteTally& tally, std::size_t sentence_id) {
  LetterDistributions out;
  out.reserve(tally.votes.size());
  for (std::size_t j = 0; j < tally.votes.size(); ++j) {
    const auto& v = tally.votes[j];
    const std::uint32_t best = *std::max_element(v.begin(), v.end());
    std::vector<std::size_t> leaders;
    for (std::size_t l = 0; l < kNumLabels; ++l)
      if (v[l] == best) leaders.push_back(l);
    std::size_t pick = leaders.front();
    if (leaders.size() > 1) pick = leaders[keyed_index({tally.rng_seed, sentence_id, j}, leaders.size())];
    out.push_back(LabelDistribution::one_hot(label_at(pick)));
  }
  return out;
}

inline LetterDistributions mv_infer(const Predictor& f, const Sentence& s, std::size_t sentence_id,
                                    const WindowSpec& spec, std::uint64_t seed,
                                    std::span<const std::size_t> window_order = {}) {
  return resolve_votes(tally_votes(f, s, sentence_id, spec, seed, window_order), sentence_id);
}

// Whole sentence as context for every word; distributions are returned as-is.
inline LetterDistributions sp_infer(const Predictor& f, const Sentence& s, std::size_t sentence_id) {
  return apply_contextual(f, s, sentence_id, std::numeric_limits<std::size_t>::max());
}

}  // namespace ccpd
