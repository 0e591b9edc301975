#pragma once

// Partial-diacritization indicators and classic DER/WER.
//
//   SR     = |marked| / |all|
//   P-DER  = DER(contextual, marked)
//   B-DER  = DER(isolated, all)
//   H-DER  = DER(isolated, unmarked)
//   R-DER  = SR * P-DER + (1 - SR) * H-DER
//   Redri  = 1 - R-DER / B-DER          (undefined when B-DER == 0)
//
// DER over an empty letter set is 0 and reported as empty. All rates are
// integer counts with a single final division.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccpd/contrast.hpp"
#include "ccpd/corpus.hpp"
#include "ccpd/error.hpp"
#include "ccpd/mask.hpp"
#include "ccpd/orthography.hpp"
#include "ccpd/predictor.hpp"

namespace ccpd {

// Word boundaries over a flattened letter sequence.
struct LetterLayout {
  std::vector<std::size_t> word_offsets{0};

  static LetterLayout of(const Sentence& s) {
    LetterLayout l;
    l.append(s);
    return l;
  }

  void append(const Sentence& s) {
    for (const auto& w : s.words) word_offsets.push_back(word_offsets.back() + w.size());
  }

  std::size_t letters() const noexcept { return word_offsets.back(); }
  std::size_t words() const noexcept { return word_offsets.size() - 1; }
};

struct Rate {
  std::size_t errors = 0;
  std::size_t total = 0;

  bool empty() const noexcept { return total == 0; }
  double value() const noexcept { return total == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(total); }
};

enum class Subset { All, Marked, Unmarked };
enum class CaseEndings { Include, Exclude };

struct EvalScope {
  Subset subset = Subset::All;
  CaseEndings ce = CaseEndings::Include;
};

namespace detail {

inline void check_lengths(std::size_t pred, std::size_t truth, const LetterLayout& layout) {
  if (pred != truth || truth != layout.letters())
    throw ShapeError("label sequences of length " + std::to_string(pred) + " and " + std::to_string(truth) +
                     " over a " + std::to_string(layout.letters()) + "-letter layout");
}

}  // namespace detail

inline Rate der_rate(std::span<const Label> pred, std::span<const Label> truth, const LetterLayout& layout,
                     EvalScope scope = {}, const SelectionMask* mask = nullptr) {
  detail::check_lengths(pred.size(), truth.size(), layout);
  if (scope.subset != Subset::All) {
    if (!mask) throw ConfigError("marked/unmarked scope needs a selection mask");
    if (mask->size() != truth.size()) throw ShapeError("mask does not match the letter layout");
  }
  Rate r;
  for (std::size_t w = 0; w < layout.words(); ++w) {
    std::size_t end = layout.word_offsets[w + 1];
    if (scope.ce == CaseEndings::Exclude) --end;  // words are never empty
    for (std::size_t j = layout.word_offsets[w]; j < end; ++j) {
      if (scope.subset == Subset::Marked && !(*mask)[j]) continue;
      if (scope.subset == Subset::Unmarked && (*mask)[j]) continue;
      ++r.total;
      if (pred[j] != truth[j]) ++r.errors;
    }
  }
  return r;
}

inline double der(std::span<const Label> pred, std::span<const Label> truth, const LetterLayout& layout,
                  EvalScope scope = {}, const SelectionMask* mask = nullptr) {
  return der_rate(pred, truth, layout, scope, mask).value();
}

// A word is wrong when any in-scope letter is; words with no in-scope letter
// (single letters when case endings are excluded) are not counted.
inline Rate wer_rate(std::span<const Label> pred, std::span<const Label> truth, const LetterLayout& layout,
                     CaseEndings ce = CaseEndings::Include) {
  detail::check_lengths(pred.size(), truth.size(), layout);
  Rate r;
  for (std::size_t w = 0; w < layout.words(); ++w) {
    std::size_t end = layout.word_offsets[w + 1];
    if (ce == CaseEndings::Exclude) --end;
    if (end <= layout.word_offsets[w]) continue;
    ++r.total;
    for (std::size_t j = layout.word_offsets[w]; j < end; ++j)
      if (pred[j] != truth[j]) {
        ++r.errors;
        break;
      }
  }
  return r;
}

inline double wer(std::span<const Label> pred, std::span<const Label> truth, const LetterLayout& layout,
                  CaseEndings ce = CaseEndings::Include) {
  return wer_rate(pred, truth, layout, ce).value();
}

inline double sr(const SelectionMask& m) {
  if (m.size() == 0) throw EmptyScope("selection rate over zero letters");
  return static_cast<double>(m.count()) / static_cast<double>(m.size());
}

inline double combine_r_der(double sr_value, double p_der_value, double h_der_value) {
  return sr_value * p_der_value + (1.0 - sr_value) * h_der_value;
}

inline std::optional<double> redri_from(double r_der_value, double b_der_value) {
  if (b_der_value == 0.0) return std::nullopt;
  return 1.0 - r_der_value / b_der_value;
}

// Flattened truth, channel argmaxes, and selection over a corpus (or one
// sentence).
struct Evaluation {
  std::vector<Label> truth;
  std::vector<Label> sent;
  std::vector<Label> word;
  LetterLayout layout;
  SelectionMask mask;

  void add(const Sentence& truth_sentence, const PredictionGrid& g, const SelectionMask& m) {
    g.check_shape(truth_sentence.letter_count());
    if (m.size() != truth_sentence.letter_count()) throw ShapeError("mask does not match the sentence letters");
    for (const auto& w : truth_sentence.words)
      for (const auto& l : w.letters) truth.push_back(l.diac);
    for (std::size_t j = 0; j < g.size(); ++j) {
      sent.push_back(g.sent[j].argmax());
      word.push_back(g.word[j].argmax());
      mask.marked.push_back(m[j]);
    }
    mask.mode = m.mode;
    mask.theta = m.theta;
    layout.append(truth_sentence);
  }

  static Evaluation of(const Sentence& truth_sentence, const PredictionGrid& g, const SelectionMask& m) {
    Evaluation e;
    e.add(truth_sentence, g, m);
    return e;
  }
};

inline double sr(const Evaluation& e) { return sr(e.mask); }

inline Rate p_der_rate(const Evaluation& e) {
  return der_rate(e.sent, e.truth, e.layout, {Subset::Marked, CaseEndings::Include}, &e.mask);
}
inline Rate b_der_rate(const Evaluation& e) { return der_rate(e.word, e.truth, e.layout); }
inline Rate h_der_rate(const Evaluation& e) {
  return der_rate(e.word, e.truth, e.layout, {Subset::Unmarked, CaseEndings::Include}, &e.mask);
}

inline double p_der(const Evaluation& e) { return p_der_rate(e).value(); }
inline double b_der(const Evaluation& e) { return b_der_rate(e).value(); }
inline double h_der(const Evaluation& e) { return h_der_rate(e).value(); }
inline double r_der(const Evaluation& e) { return combine_r_der(sr(e), p_der(e), h_der(e)); }
inline std::optional<double> redri(const Evaluation& e) { return redri_from(r_der(e), b_der(e)); }

// Single-sentence forms.
inline double p_der(const PredictionGrid& g, const Sentence& truth, const SelectionMask& m) {
  return p_der(Evaluation::of(truth, g, m));
}
inline double b_der(const PredictionGrid& g, const Sentence& truth) {
  return b_der(Evaluation::of(truth, g, SelectionMask::all(truth.letter_count(), false)));
}
inline double h_der(const PredictionGrid& g, const Sentence& truth, const SelectionMask& m) {
  return h_der(Evaluation::of(truth, g, m));
}
inline double r_der(const PredictionGrid& g, const Sentence& truth, const SelectionMask& m) {
  return r_der(Evaluation::of(truth, g, m));
}
inline std::optional<double> redri(const PredictionGrid& g, const Sentence& truth, const SelectionMask& m) {
  return redri(Evaluation::of(truth, g, m));
}

// ---------------------------------------------------------------------------
// Reports

// Plausible selection-rate band; a system outside it is flagged.
inline constexpr double kSrBandLow = 0.01;
inline constexpr double kSrBandHigh = 0.30;

constexpr bool sr_outside_band(double sr_value) noexcept { return sr_value < kSrBandLow || sr_value > kSrBandHigh; }

struct IndicatorRow {
  std::string system;
  double sr = 0;
  double p_der = 0;
  double h_der = 0;
  double r_der = 0;
  double b_der = 0;
  std::optional<double> redri;
  double der_ce = 0;
  double wer_ce = 0;
  double der_no_ce = 0;
  double wer_no_ce = 0;
  bool p_der_empty = false;
  bool h_der_empty = false;

  bool sr_out_of_band() const noexcept { return sr_outside_band(sr); }
};

struct IndicatorReport {
  std::vector<IndicatorRow> rows;
};

inline IndicatorRow indicator_row(std::string name, const Evaluation& e) {
  IndicatorRow r;
  r.system = std::move(name);
  const Rate p = p_der_rate(e), h = h_der_rate(e);
  r.sr = sr(e);
  r.p_der = p.value();
  r.h_der = h.value();
  r.p_der_empty = p.empty();
  r.h_der_empty = h.empty();
  r.r_der = combine_r_der(r.sr, r.p_der, r.h_der);
  r.b_der = b_der(e);
  r.redri = redri_from(r.r_der, r.b_der);
  // Full-diacritization quality of the contextual channel.
  r.der_ce = der(e.sent, e.truth, e.layout, {Subset::All, CaseEndings::Include});
  r.der_no_ce = der(e.sent, e.truth, e.layout, {Subset::All, CaseEndings::Exclude});
  r.wer_ce = wer(e.sent, e.truth, e.layout, CaseEndings::Include);
  r.wer_no_ce = wer(e.sent, e.truth, e.layout, CaseEndings::Exclude);
  return r;
}

struct SystemSpec {
  std::string name;
  PredictorPair predictors;
  CcpdConfig config;
};

inline Evaluation evaluate_system(const Corpus& c, const PredictorPair& f, const CcpdConfig& cfg) {
  Evaluation e;
  for (std::size_t sid = 0; sid < c.sentences.size(); ++sid) {
    const auto r = diacritize_sentence(c.sentences[sid], f, cfg, sid);
    e.add(c.sentences[sid], r.grid, r.mask);
  }
  return e;
}

inline IndicatorReport report(const Corpus& c, const std::vector<SystemSpec>& systems) {
  if (systems.empty()) throw ConfigError("report needs at least one system");
  IndicatorReport rep;
  for (const auto& sys : systems) rep.rows.push_back(indicator_row(sys.name, evaluate_system(c, sys.predictors, sys.config)));
  return rep;
}

namespace detail {

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline double round6(double v) { return std::round(v * 1e6) / 1e6; }

}  // namespace detail

inline constexpr const char* kReportColumns[] = {"system", "sr",     "p_der",  "h_der",   "r_der",
                                                 "redri",  "der_ce", "wer_ce", "der_nce", "wer_nce"};

inline std::string format_tsv(const IndicatorReport& rep) {
  std::string out;
  for (std::size_t i = 0; i < std::size(kReportColumns); ++i) {
    if (i) out += '\t';
    out += kReportColumns[i];
  }
  out += '\n';
  using detail::fixed6;
  for (const auto& r : rep.rows) {
    out += r.system;
    for (double v : {r.sr, r.p_der, r.h_der, r.r_der}) out += '\t' + fixed6(v);
    out += '\t' + (r.redri ? fixed6(*r.redri) : std::string("NA"));
    for (double v : {r.der_ce, r.wer_ce, r.der_no_ce, r.wer_no_ce}) out += '\t' + fixed6(v);
    out += '\n';
  }
  return out;
}

// One JSON object per line, same keys as the TSV columns; undefined values
// are null. `flags` lists sr_out_of_band / p_der_empty / h_der_empty.
inline std::string format_json(const IndicatorReport& rep) {
  using detail::round6;
  std::string out;
  for (const auto& r : rep.rows) {
    nlohmann::ordered_json j;
    j["system"] = r.system;
    j["sr"] = round6(r.sr);
    j["p_der"] = round6(r.p_der);
    j["h_der"] = round6(r.h_der);
    j["r_der"] = round6(r.r_der);
    j["redri"] = r.redri ? nlohmann::ordered_json(round6(*r.redri)) : nlohmann::ordered_json(nullptr);
    j["der_ce"] = round6(r.der_ce);
    j["wer_ce"] = round6(r.wer_ce);
    j["der_nce"] = round6(r.der_no_ce);
    j["wer_nce"] = round6(r.wer_no_ce);
    auto flags = nlohmann::ordered_json::array();
    if (r.sr_out_of_band()) flags.push_back("sr_out_of_band");
    if (r.p_der_empty) flags.push_back("p_der_empty");
    if (r.h_der_empty) flags.push_back("h_der_empty");
    j["flags"] = flags;
    out += j.dump() + '\n';
  }
  return out;
}

}  // namespace ccpd
