#pragma once

// Context-contrastive letter selection: a letter is diacritized when the
// contextual and isolated applications of the same predictor disagree
// (hard) or when the contextual one is more confident by a margin (soft).

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "ccpd/corpus.hpp"
#include "ccpd/error.hpp"
#include "ccpd/mask.hpp"
#include "ccpd/orthography.hpp"
#include "ccpd/predictor.hpp"
#include "ccpd/voting.hpp"

namespace ccpd {

struct CcpdConfig {
  MaskMode mode = MaskMode::Hard;
  double theta = 0.0;
  Inference inference = Inference::MajorityVote;
  WindowSpec window{};
  // Context radius for single-pass inference; unset means the whole sentence.
  std::optional<std::size_t> radius;
  std::uint64_t seed = 0;

  void validate() const {
    window.validate();
    if (mode == MaskMode::Soft) {
      if (!std::isfinite(theta)) throw ConfigError("soft mode needs a finite theta");
      if (inference != Inference::SinglePass) throw ConfigError("soft mode requires single-pass inference");
    }
  }
};

inline SelectionMask mark_hard(const PredictionGrid& g) {
  if (g.sent.size() != g.word.size()) throw ShapeError("prediction grid channels differ in length");
  SelectionMask m = SelectionMask::all(g.size(), false, MaskMode::Hard);
  for (std::size_t j = 0; j < g.size(); ++j) m.marked[j] = g.sent[j].argmax() != g.word[j].argmax();
  return m;
}

inline SelectionMask mark_soft(const PredictionGrid& g, double theta) {
  if (g.sent.size() != g.word.size()) throw ShapeError("prediction grid channels differ in length");
  SelectionMask m = SelectionMask::all(g.size(), false, MaskMode::Soft);
  m.theta = theta;
  for (std::size_t j = 0; j < g.size(); ++j) m.marked[j] = g.sent[j].max() - g.word[j].max() > theta;
  return m;
}

inline SelectionMask select_letters(const PredictionGrid& g, const CcpdConfig& cfg) {
  switch (cfg.mode) {
    case MaskMode::Hard: return mark_hard(g);
    case MaskMode::Soft: return mark_soft(g, cfg.theta);
    case MaskMode::Full: break;
  }
  return SelectionMask::all(g.size(), true, MaskMode::Full);
}

// Marked letters take the contextual argmax, unmarked letters NONE. Base
// letters and separators are copied from `s`.
inline Sentence ccpd_assign(const PredictionGrid& g, const SelectionMask& m, const Sentence& s) {
  g.check_shape(s.letter_count());
  if (m.size() != s.letter_count())
    throw ShapeError("mask length " + std::to_string(m.size()) + " does not match letter count " +
                     std::to_string(s.letter_count()));
  Sentence out = s;
  std::size_t j = 0;
  for (auto& w : out.words)
    for (auto& l : w.letters) {
      l.diac = m[j] ? g.sent[j].argmax() : Label::None;
      ++j;
    }
  return out;
}

inline PredictionGrid predict_grid(const PredictorPair& f, const Sentence& s, std::size_t sentence_id,
                                   const CcpdConfig& cfg) {
  PredictionGrid g;
  if (cfg.inference == Inference::MajorityVote) g.sent = mv_infer(*f.sent, s, sentence_id, cfg.window, cfg.seed);
  else if (cfg.radius) g.sent = apply_contextual(*f.sent, s, sentence_id, *cfg.radius);
  else g.sent = sp_infer(*f.sent, s, sentence_id);
  g.word = apply_isolated(*f.word, s, sentence_id);
  return g;
}

struct CcpdResult {
  PredictionGrid grid;
  SelectionMask mask;
  Sentence output;  // labels as emitted; render with a full mask
};

inline CcpdResult diacritize_sentence(const Sentence& s, const PredictorPair& f, const CcpdConfig& cfg,
                                      std::size_t sentence_id = 0) {
  cfg.validate();
  CcpdResult r;
  r.grid = predict_grid(f, s, sentence_id, cfg);
  r.mask = select_letters(r.grid, cfg);
  r.output = ccpd_assign(r.grid, r.mask, s);
  return r;
}

// Full pipeline on one line of text. Any diacritics already present are
// ignored by the predictors; non-Arabic text passes through unchanged.
inline std::string partial_diacritize(std::string_view text, const PredictorPair& f, const CcpdConfig& cfg,
                                      std::size_t sentence_id = 0) {
  const Sentence s = parse_marked_text(text, ParseMode::Lenient);
  return render_full(diacritize_sentence(s, f, cfg, sentence_id).output);
}

}  // namespace ccpd
